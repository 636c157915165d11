//! Pretty-printer. Inverse of the parser: `parse(pretty_program(sig, t))`
//! returns `(sig, t)` for every well-scoped program.

use std::fmt::Write as _;

use crate::value::{BaseTy, Scalar};

use super::{ObjType, Signature, Term, TermNode};

/// Where a subterm sits, which decides whether it needs parentheses.
///
/// The binder forms (`\`, `let`, `if`) extend greedily to the right and the
/// keywords `in`/`then`/`else` delimit them, so an unparenthesized subterm is
/// only ambiguous in application position.
#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    /// Binder bodies, branches, pair components: anything prints bare.
    Top,
    /// Function position of an application: binder forms need parens.
    Head,
    /// Argument position (applications, `fst`/`snd`/`write`/`out` operands):
    /// binder forms and applications need parens.
    Arg,
}

pub fn pretty(term: &Term) -> String {
    let mut out = String::new();
    show(term, Ctx::Top, &mut out);
    out
}

/// The full program: declarations in canonical order, then the term.
pub fn pretty_program(sig: &Signature, term: &Term) -> String {
    let mut out = String::new();
    for (name, ty) in &sig.params {
        let _ = writeln!(out, "param {name} : {};", base_name(*ty));
    }
    for (name, ty) in &sig.regions {
        let _ = writeln!(out, "region {name} : {};", base_name(*ty));
    }
    for (name, ty) in &sig.tags {
        let _ = writeln!(out, "tag {name} : {};", base_name(*ty));
    }
    out.push_str(&pretty(term));
    out.push('\n');
    out
}

pub fn pretty_type(ty: &ObjType) -> String {
    let mut out = String::new();
    show_type(ty, false, &mut out);
    out
}

fn base_name(ty: BaseTy) -> String {
    match ty {
        BaseTy::Unit => "unit".to_string(),
        BaseTy::Bool => "bool".to_string(),
        BaseTy::IntMod(m) => format!("int{m}"),
    }
}

fn scalar_literal(s: &Scalar) -> String {
    match s {
        Scalar::Unit => "unit".to_string(),
        Scalar::Bool(true) => "true".to_string(),
        Scalar::Bool(false) => "false".to_string(),
        Scalar::IntMod(k, _) => k.to_string(),
    }
}

fn needs_parens(node: &TermNode, ctx: Ctx) -> bool {
    match node {
        TermNode::Lam(..) | TermNode::Let(..) | TermNode::If(..) => ctx != Ctx::Top,
        TermNode::App(..) => ctx == Ctx::Arg,
        _ => false,
    }
}

fn show(term: &Term, ctx: Ctx, out: &mut String) {
    if needs_parens(&term.node, ctx) {
        out.push('(');
        show(term, Ctx::Top, out);
        out.push(')');
        return;
    }
    match &term.node {
        TermNode::Var(x) => out.push_str(x),
        TermNode::Const(s) => out.push_str(&scalar_literal(s)),
        TermNode::Lam(x, ty, body) => {
            let _ = write!(out, "\\{x}:{}. ", pretty_type(ty));
            show(body, Ctx::Top, out);
        }
        TermNode::App(f, a) => {
            show(f, Ctx::Head, out);
            out.push(' ');
            show(a, Ctx::Arg, out);
        }
        TermNode::Let(x, bound, body) => {
            let _ = write!(out, "let {x} = ");
            show(bound, Ctx::Top, out);
            out.push_str(" in ");
            show(body, Ctx::Top, out);
        }
        TermNode::Pair(a, b) => {
            out.push('(');
            show(a, Ctx::Top, out);
            out.push_str(", ");
            show(b, Ctx::Top, out);
            out.push(')');
        }
        TermNode::Fst(e) => {
            out.push_str("fst ");
            show(e, Ctx::Arg, out);
        }
        TermNode::Snd(e) => {
            out.push_str("snd ");
            show(e, Ctx::Arg, out);
        }
        TermNode::If(c, t, e) => {
            out.push_str("if ");
            show(c, Ctx::Top, out);
            out.push_str(" then ");
            show(t, Ctx::Top, out);
            out.push_str(" else ");
            show(e, Ctx::Top, out);
        }
        TermNode::Ask(p) => {
            let _ = write!(out, "ask {p}");
        }
        TermNode::Read(r) => {
            let _ = write!(out, "read {r}");
        }
        TermNode::Write(r, e) => {
            let _ = write!(out, "write {r} ");
            show(e, Ctx::Arg, out);
        }
        TermNode::Out(t, e) => {
            let _ = write!(out, "out {t} ");
            show(e, Ctx::Arg, out);
        }
    }
}

fn show_type(ty: &ObjType, arrow_domain: bool, out: &mut String) {
    match ty {
        ObjType::Unit => out.push_str("unit"),
        ObjType::Bool => out.push_str("bool"),
        ObjType::IntMod(m) => {
            let _ = write!(out, "int{m}");
        }
        ObjType::Prod(a, b) => {
            out.push('(');
            show_type(a, false, out);
            out.push_str(", ");
            show_type(b, false, out);
            out.push(')');
        }
        ObjType::Fun(dom, latent, cod) => {
            if arrow_domain {
                out.push('(');
            }
            show_type(dom, true, out);
            out.push_str(" -> {");
            let toks: Vec<String> = latent.iter().map(|t| t.to_string()).collect();
            out.push_str(&toks.join(", "));
            out.push('}');
            out.push(' ');
            show_type(cod, false, out);
            if arrow_domain {
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use crate::algebra::EffectToken;

    fn roundtrip(src: &str) {
        let (sig, term) = parse(src).unwrap();
        let printed = pretty_program(&sig, &term);
        let (sig2, term2) = parse(&printed).unwrap();
        assert_eq!(sig, sig2, "signature drifted through {printed:?}");
        assert_eq!(term, term2, "term drifted through {printed:?}");
    }

    #[test]
    fn canonical_forms_match_the_grammar() {
        assert_eq!(
            pretty(&Term::lam("x", ObjType::IntMod(4), Term::var("x"))),
            "\\x:int4. x"
        );
        assert_eq!(
            pretty(&Term::app(Term::var("f"), Term::var("a"))),
            "f a"
        );
        assert_eq!(
            pretty(&Term::pair(Term::lit(Scalar::Unit), Term::lit(Scalar::Unit))),
            "(unit, unit)"
        );
    }

    #[test]
    fn parens_only_where_application_demands_them() {
        let lam = Term::lam("x", ObjType::Bool, Term::var("x"));
        let applied = Term::app(lam.clone(), Term::lit(Scalar::Bool(true)));
        assert_eq!(pretty(&applied), "(\\x:bool. x) true");

        let nested_arg = Term::app(Term::var("f"), Term::app(Term::var("g"), Term::var("x")));
        assert_eq!(pretty(&nested_arg), "f (g x)");

        let chain = Term::app(Term::app(Term::var("f"), Term::var("x")), Term::var("y"));
        assert_eq!(pretty(&chain), "f x y");

        let atom_arg = Term::app(Term::var("f"), Term::fst(Term::var("x")));
        assert_eq!(pretty(&atom_arg), "f fst x");
    }

    #[test]
    fn types_render_with_right_associated_arrows() {
        let t = ObjType::fun(
            ObjType::IntMod(4),
            vec![EffectToken::Read("r".to_string())],
            ObjType::fun(ObjType::Bool, vec![], ObjType::Unit),
        );
        assert_eq!(pretty_type(&t), "int4 -> {rd r} bool -> {} unit");

        let higher = ObjType::fun(
            ObjType::fun(ObjType::Unit, vec![], ObjType::Bool),
            vec![],
            ObjType::Unit,
        );
        assert_eq!(pretty_type(&higher), "(unit -> {} bool) -> {} unit");
    }

    #[test]
    fn programs_roundtrip_through_pretty() {
        roundtrip("param p : int4; \\x:int4. ask p");
        roundtrip("region r : bool; write r true");
        roundtrip("region r : int4; region s : int4; let x = read r in write s x");
        roundtrip("tag a : int4; out a (if true then 1 else 2)");
        roundtrip("let f = \\x:int4. (x, x) in fst (f 3)");
        roundtrip("param p : int4; if true then let x = ask p in x else 0");
    }
}
