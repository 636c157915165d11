//! The coeffect system: scalar liveness judgments `Γ ? F ⊢ e : τ` over the
//! boolean-conjunction algebra.
//!
//! `F = t` means the whole context is required ("live"), `F = f` that it is
//! not — matching a context object `D f ⟦Γ⟧ = 1` from which nothing can be
//! projected. Variables force `t`, constants demand `f`, composite terms
//! need their context whenever any part does, and a λ splits its body's
//! demand `r` into an immediate part (carried by the judgment) and a latent
//! part (carried by the arrow) with immediate ∧ latent = r.
//!
//! `let` additionally records whether the bound variable is live in the
//! body; a dead binding is the hook for semantic dead-code elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{EffectAlgebra, Index};
use crate::calculus::{ObjType, Pos, Signature, Term, TermNode};
use crate::error::InferError;
use crate::value::Scalar;

/// The algebra all coeffect judgments live in: `({f, t}, ∧, t)`.
pub fn coeffect_algebra() -> EffectAlgebra {
    EffectAlgebra::bool_conj()
}

// ============================================================================
// Coeffect types
// ============================================================================

/// Types as the coeffect side sees them: effect annotations are erased and
/// arrows instead carry the latent liveness flag computed by inference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoTy {
    Unit,
    Bool,
    IntMod(u8),
    Prod(Box<CoTy>, Box<CoTy>),
    Fun(Box<CoTy>, Index, Box<CoTy>),
}

impl CoTy {
    pub fn prod(a: CoTy, b: CoTy) -> CoTy {
        CoTy::Prod(Box::new(a), Box::new(b))
    }

    pub fn fun(dom: CoTy, latent: Index, cod: CoTy) -> CoTy {
        CoTy::Fun(Box::new(dom), latent, Box::new(cod))
    }

    /// Structural equality ignoring latent flags — used when matching an
    /// argument against a declared domain, since latents are inferred, not
    /// declared.
    pub fn eq_modulo_latent(&self, other: &CoTy) -> bool {
        match (self, other) {
            (CoTy::Prod(a1, b1), CoTy::Prod(a2, b2)) => {
                a1.eq_modulo_latent(a2) && b1.eq_modulo_latent(b2)
            }
            (CoTy::Fun(d1, _, c1), CoTy::Fun(d2, _, c2)) => {
                d1.eq_modulo_latent(d2) && c1.eq_modulo_latent(c2)
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for CoTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoTy::Unit => write!(f, "unit"),
            CoTy::Bool => write!(f, "bool"),
            CoTy::IntMod(m) => write!(f, "int{m}"),
            CoTy::Prod(a, b) => write!(f, "({a}, {b})"),
            CoTy::Fun(d, latent, c) => write!(f, "{d} ->^{} {c}", latent.render()),
        }
    }
}

/// Erases the effect annotations of a surface type; converted arrows default
/// their latent flag to the unit `t` (nothing is known about them, and App
/// composition never consults it).
pub fn co_ty_of(ty: &ObjType) -> CoTy {
    match ty {
        ObjType::Unit => CoTy::Unit,
        ObjType::Bool => CoTy::Bool,
        ObjType::IntMod(m) => CoTy::IntMod(*m),
        ObjType::Prod(a, b) => CoTy::prod(co_ty_of(a), co_ty_of(b)),
        ObjType::Fun(d, _, c) => CoTy::fun(co_ty_of(d), Index::Flag(true), co_ty_of(c)),
    }
}

// ============================================================================
// Judgments
// ============================================================================

/// An ordered typing telescope. Order matters: the denotation interprets
/// `⟦Γ, x⟧` as `⟦Γ⟧ × ⟦x⟧`, so lookups resolve to projection paths.
/// Shadowing rebinding appends; lookup scans from the right.
pub type CoCtx = Vec<(String, CoTy)>;

pub fn lookup<'c>(ctx: &'c CoCtx, name: &str) -> Option<(usize, &'c CoTy)> {
    ctx.iter()
        .enumerate()
        .rev()
        .find(|(_, (n, _))| n == name)
        .map(|(i, (_, t))| (i, t))
}

/// Liveness of each `let` binding, keyed `name@line:col` of the binder.
pub type LivenessTable = BTreeMap<String, bool>;

pub fn let_key(name: &str, pos: Pos) -> String {
    format!("{name}@{pos}")
}

/// How a λ's body demand `r` is split into (immediate, latent) with
/// immediate ∧ latent = r. The rule itself allows any such split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitPolicy {
    /// `(r, r)` — duplicate the demand on both sides. The default.
    #[default]
    Duplicate,
    /// `(t, r)` — push the whole demand to the arrow; the closure then
    /// always captures a live context.
    MaxLatent,
}

impl SplitPolicy {
    pub fn split(self, body_demand: &Index) -> (Index, Index) {
        match self {
            SplitPolicy::Duplicate => (body_demand.clone(), body_demand.clone()),
            SplitPolicy::MaxLatent => (Index::Flag(true), body_demand.clone()),
        }
    }
}

/// One node of a derivation of `Γ ? F ⊢ e : τ`.
#[derive(Debug, Clone)]
pub struct CoeffectJudgment {
    pub ctx: CoCtx,
    pub term: Term,
    pub ty: CoTy,
    /// The contextual requirement `F` — `Flag(true)` iff context is needed.
    pub demand: Index,
    pub rule: &'static str,
    /// λ nodes: the recorded `(immediate, latent)` split of the body demand.
    pub split: Option<(Index, Index)>,
    /// `let` nodes: whether the bound variable is live in the body.
    pub live: Option<bool>,
    /// Aggregated liveness of every `let` in this subtree.
    pub lets: LivenessTable,
    pub children: Vec<CoeffectJudgment>,
}

// ============================================================================
// Free-variable liveness
// ============================================================================

/// The variables whose values an evaluation can actually demand. Differs
/// from plain free variables at dead `let`s: a binding unused by its body
/// contributes nothing, so chains of dead bindings prune transitively.
pub fn fv_live(term: &Term) -> BTreeSet<String> {
    match &term.node {
        TermNode::Var(x) => [x.clone()].into_iter().collect(),
        TermNode::Const(_) | TermNode::Ask(_) | TermNode::Read(_) => BTreeSet::new(),
        TermNode::Lam(x, _, body) => {
            let mut fv = fv_live(body);
            fv.remove(x);
            fv
        }
        TermNode::App(a, b) | TermNode::Pair(a, b) => {
            let mut fv = fv_live(a);
            fv.extend(fv_live(b));
            fv
        }
        TermNode::Let(x, bound, body) => {
            let mut fv = fv_live(body);
            if fv.remove(x) {
                fv.extend(fv_live(bound));
            }
            fv
        }
        TermNode::Fst(e) | TermNode::Snd(e) | TermNode::Write(_, e) | TermNode::Out(_, e) => {
            fv_live(e)
        }
        TermNode::If(c, t, e) => {
            let mut fv = fv_live(c);
            fv.extend(fv_live(t));
            fv.extend(fv_live(e));
            fv
        }
    }
}

// ============================================================================
// Inference
// ============================================================================

pub fn infer_coeffect(
    sig: &Signature,
    ctx: &CoCtx,
    term: &Term,
) -> Result<CoeffectJudgment, InferError> {
    infer_coeffect_with(SplitPolicy::Duplicate, sig, ctx, term)
}

pub fn infer_coeffect_with(
    policy: SplitPolicy,
    sig: &Signature,
    ctx: &CoCtx,
    term: &Term,
) -> Result<CoeffectJudgment, InferError> {
    let t = || Index::Flag(true);
    let f = || Index::Flag(false);
    let or = |a: &Index, b: &Index| -> Index {
        match (a, b) {
            (Index::Flag(x), Index::Flag(y)) => Index::Flag(*x || *y),
            _ => unreachable!("coeffect demands are flags"),
        }
    };
    let judge = |ty: CoTy, demand: Index, rule: &'static str, children: Vec<CoeffectJudgment>| {
        let mut lets = LivenessTable::new();
        for c in &children {
            lets.extend(c.lets.clone());
        }
        CoeffectJudgment {
            ctx: ctx.clone(),
            term: term.clone(),
            ty,
            demand,
            rule,
            split: None,
            live: None,
            lets,
            children,
        }
    };
    let terr = |msg: String| InferError::Type {
        line: term.pos.line,
        col: term.pos.col,
        msg,
    };
    let unsupported = |prim: String, declared: bool| {
        if declared {
            InferError::UnsupportedPrimitive {
                prim,
                instance: "partiality".to_string(),
            }
        } else {
            terr(format!("undeclared name in `{prim}`"))
        }
    };

    match &term.node {
        TermNode::Var(x) => match lookup(ctx, x) {
            Some((_, ty)) => Ok(judge(ty.clone(), t(), "var", vec![])),
            None => Err(InferError::Scope {
                line: term.pos.line,
                col: term.pos.col,
                name: x.clone(),
            }),
        },
        TermNode::Const(s) => {
            let ty = match s {
                Scalar::Unit => CoTy::Unit,
                Scalar::Bool(_) => CoTy::Bool,
                Scalar::IntMod(_, m) => CoTy::IntMod(*m),
            };
            Ok(judge(ty, f(), "const", vec![]))
        }
        TermNode::Lam(x, ann, body) => {
            let dom = co_ty_of(ann);
            let mut inner = ctx.clone();
            inner.push((x.clone(), dom.clone()));
            let jb = infer_coeffect_with(policy, sig, &inner, body)?;
            let (immediate, latent) = policy.split(&jb.demand);
            let ty = CoTy::fun(dom, latent.clone(), jb.ty.clone());
            let mut j = judge(ty, immediate.clone(), "lam", vec![jb]);
            j.split = Some((immediate, latent));
            Ok(j)
        }
        TermNode::App(fun, arg) => {
            let jf = infer_coeffect_with(policy, sig, ctx, fun)?;
            let ja = infer_coeffect_with(policy, sig, ctx, arg)?;
            let CoTy::Fun(dom, _, cod) = jf.ty.clone() else {
                return Err(terr(format!("applied a non-function of type {}", jf.ty)));
            };
            if !ja.ty.eq_modulo_latent(&dom) {
                return Err(terr(format!(
                    "argument of type {} does not match domain {}",
                    ja.ty, dom
                )));
            }
            let demand = or(&jf.demand, &ja.demand);
            Ok(judge(*cod, demand, "app", vec![jf, ja]))
        }
        TermNode::Let(x, bound, body) => {
            let jb = infer_coeffect_with(policy, sig, ctx, bound)?;
            let mut inner = ctx.clone();
            inner.push((x.clone(), jb.ty.clone()));
            let jc = infer_coeffect_with(policy, sig, &inner, body)?;
            let live = fv_live(body).contains(x);
            // A dead binding is never evaluated, so only the body's demand
            // survives.
            let demand = if live {
                or(&jb.demand, &jc.demand)
            } else {
                jc.demand.clone()
            };
            let ty = jc.ty.clone();
            let mut j = judge(ty, demand, "let", vec![jb, jc]);
            j.live = Some(live);
            j.lets.insert(let_key(x, term.pos), live);
            Ok(j)
        }
        TermNode::Pair(a, b) => {
            let ja = infer_coeffect_with(policy, sig, ctx, a)?;
            let jb = infer_coeffect_with(policy, sig, ctx, b)?;
            let ty = CoTy::prod(ja.ty.clone(), jb.ty.clone());
            let demand = or(&ja.demand, &jb.demand);
            Ok(judge(ty, demand, "pair", vec![ja, jb]))
        }
        TermNode::Fst(e) => {
            let je = infer_coeffect_with(policy, sig, ctx, e)?;
            let CoTy::Prod(a, _) = je.ty.clone() else {
                return Err(terr(format!("fst of a non-product of type {}", je.ty)));
            };
            let demand = je.demand.clone();
            Ok(judge(*a, demand, "fst", vec![je]))
        }
        TermNode::Snd(e) => {
            let je = infer_coeffect_with(policy, sig, ctx, e)?;
            let CoTy::Prod(_, b) = je.ty.clone() else {
                return Err(terr(format!("snd of a non-product of type {}", je.ty)));
            };
            let demand = je.demand.clone();
            Ok(judge(*b, demand, "snd", vec![je]))
        }
        TermNode::If(c, th, el) => {
            let jc = infer_coeffect_with(policy, sig, ctx, c)?;
            if jc.ty != CoTy::Bool {
                return Err(terr(format!("if condition has type {}", jc.ty)));
            }
            let jt = infer_coeffect_with(policy, sig, ctx, th)?;
            let je = infer_coeffect_with(policy, sig, ctx, el)?;
            if !jt.ty.eq_modulo_latent(&je.ty) {
                return Err(terr(format!(
                    "branches have different types {} and {}",
                    jt.ty, je.ty
                )));
            }
            let demand = or(&or(&jc.demand, &jt.demand), &je.demand);
            let ty = jt.ty.clone();
            Ok(judge(ty, demand, "if", vec![jc, jt, je]))
        }
        TermNode::Ask(p) => Err(unsupported(format!("ask {p}"), sig.params.contains_key(p))),
        TermNode::Read(r) => Err(unsupported(format!("read {r}"), sig.regions.contains_key(r))),
        TermNode::Write(r, _) => {
            Err(unsupported(format!("write {r}"), sig.regions.contains_key(r)))
        }
        TermNode::Out(tag, _) => Err(unsupported(format!("out {tag}"), sig.tags.contains_key(tag))),
    }
}

// ============================================================================
// Derivation checking
// ============================================================================

/// Walks a derivation and recomputes every node's demand from its children,
/// including the λ split equation immediate ∧ latent = body demand. Returns
/// the first discrepancy.
pub fn verify_coderivation(j: &CoeffectJudgment) -> Result<(), String> {
    for c in &j.children {
        verify_coderivation(c)?;
    }
    let flag = |ix: &Index| -> Result<bool, String> {
        match ix {
            Index::Flag(b) => Ok(*b),
            other => Err(format!("non-flag coeffect index {other:?}")),
        }
    };
    let expect = |got: &Index, want: bool, what: &str| -> Result<(), String> {
        if flag(got)? == want {
            Ok(())
        } else {
            Err(format!(
                "{what}: stored {} but recomputed {}",
                got.render(),
                Index::Flag(want).render()
            ))
        }
    };
    match j.rule {
        "var" => expect(&j.demand, true, "var demand"),
        "const" => expect(&j.demand, false, "const demand"),
        "lam" => {
            let Some((imm, lat)) = &j.split else {
                return Err("lam node lacks a split".to_string());
            };
            let body = flag(&j.children[0].demand)?;
            if flag(imm)? && flag(lat)? != body {
                return Err(format!(
                    "split {} ∧ {} ≠ body demand {}",
                    imm.render(),
                    lat.render(),
                    j.children[0].demand.render()
                ));
            }
            if !flag(imm)? && body {
                return Err("live body under a dead immediate split".to_string());
            }
            expect(&j.demand, flag(imm)?, "lam demand")
        }
        "let" => {
            let live = j.live.ok_or("let node lacks a liveness record")?;
            let want = if live {
                flag(&j.children[0].demand)? || flag(&j.children[1].demand)?
            } else {
                flag(&j.children[1].demand)?
            };
            expect(&j.demand, want, "let demand")
        }
        "fst" | "snd" => expect(&j.demand, flag(&j.children[0].demand)?, "projection demand"),
        "app" | "pair" | "if" => {
            let mut want = false;
            for c in &j.children {
                want = want || flag(&c.demand)?;
            }
            expect(&j.demand, want, "composite demand")
        }
        other => Err(format!("unknown coeffect rule `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse;

    fn infer(src: &str) -> CoeffectJudgment {
        let (sig, term) = parse(src).unwrap();
        infer_coeffect(&sig, &Vec::new(), &term).unwrap()
    }

    #[test]
    fn identity_lambda_is_judged_live_with_live_latent() {
        let j = infer("\\x:int4. x");
        assert_eq!(j.demand, Index::Flag(true));
        assert_eq!(j.ty.to_string(), "int4 ->^t int4");
        assert_eq!(
            j.split,
            Some((Index::Flag(true), Index::Flag(true))),
        );
        verify_coderivation(&j).unwrap();
    }

    #[test]
    fn constants_demand_nothing() {
        assert_eq!(infer("unit").demand, Index::Flag(false));
        assert_eq!(infer("3").demand, Index::Flag(false));
        assert_eq!(infer("(1, true)").demand, Index::Flag(false));
    }

    #[test]
    fn dead_let_bindings_are_recorded_and_skipped() {
        let j = infer("let y = 1 in 3");
        assert_eq!(j.demand, Index::Flag(false));
        assert_eq!(j.live, Some(false));
        assert_eq!(j.lets.get("y@1:1"), Some(&false));

        let live = infer("let y = 1 in y");
        assert_eq!(live.live, Some(true));
        assert_eq!(live.demand, Index::Flag(true));
    }

    #[test]
    fn dead_lets_prune_transitively() {
        let j = infer("let x = 1 in let y = x in 3");
        assert_eq!(j.demand, Index::Flag(false));
        assert_eq!(j.lets.values().filter(|v| **v).count(), 0);
        // `x` is referenced only under the dead inner binding.
        assert!(!fv_live(&parse("let y = x in 3").unwrap().1).contains("x"));
    }

    #[test]
    fn split_policies_agree_except_on_dead_bodies() {
        let (sig, term) = parse("\\x:int4. 3").unwrap();
        let dup = infer_coeffect_with(SplitPolicy::Duplicate, &sig, &Vec::new(), &term).unwrap();
        assert_eq!(dup.demand, Index::Flag(false));
        assert_eq!(dup.split, Some((Index::Flag(false), Index::Flag(false))));
        verify_coderivation(&dup).unwrap();

        let lat = infer_coeffect_with(SplitPolicy::MaxLatent, &sig, &Vec::new(), &term).unwrap();
        assert_eq!(lat.demand, Index::Flag(true));
        assert_eq!(lat.split, Some((Index::Flag(true), Index::Flag(false))));
        verify_coderivation(&lat).unwrap();
    }

    #[test]
    fn application_composes_demands_with_or() {
        assert_eq!(infer("(\\x:int4. 3) 1").demand, Index::Flag(false));
        let j = infer("let z = true in (\\x:bool. 3) z");
        assert_eq!(j.demand, Index::Flag(true));
    }

    #[test]
    fn effect_primitives_are_rejected() {
        let (sig, term) = parse("param p : int4; ask p").unwrap();
        let err = infer_coeffect(&sig, &Vec::new(), &term).unwrap_err();
        assert!(matches!(
            err,
            InferError::UnsupportedPrimitive { prim, instance }
                if prim == "ask p" && instance == "partiality"
        ));
    }

    #[test]
    fn telescopes_resolve_shadowing_to_the_right() {
        let ctx: CoCtx = vec![
            ("x".to_string(), CoTy::Bool),
            ("y".to_string(), CoTy::Unit),
            ("x".to_string(), CoTy::IntMod(4)),
        ];
        let (i, ty) = lookup(&ctx, "x").unwrap();
        assert_eq!((i, ty), (2, &CoTy::IntMod(4)));
    }

    #[test]
    fn derivations_verify_across_construct_mix() {
        for src in [
            "\\f:int4 -> {} bool. \\x:int4. if f x then (x, 1) else (2, x)",
            "let p = (1, true) in if snd p then fst p else 0",
            "let dead = (\\x:unit. x) unit in \\y:bool. y",
        ] {
            verify_coderivation(&infer(src)).unwrap();
        }
    }
}
