//! Recursive-descent parser for the object language.
//!
//! Declarations build the [`Signature`] first; the term that follows is then
//! parsed with every primitive name checked against it, so scope errors for
//! `ask`/`read`/`write`/`out` and for effect-annotation tokens surface at
//! parse time with positions.

use crate::algebra::EffectToken;
use crate::error::ParseError;
use crate::value::{BaseTy, Scalar};

use super::lexer::{lex, Tok, TokKind};
use super::{DeclKind, ObjType, Pos, Signature, Term, TermNode};

pub fn parse(source: &str) -> Result<(Signature, Term), ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        i: 0,
        sig: Signature::default(),
    };
    p.decls()?;
    let term = p.term()?;
    p.expect(&TokKind::Eof)?;
    Ok((p.sig, term))
}

struct Parser {
    toks: Vec<Tok>,
    i: usize,
    sig: Signature,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i]
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.peek().line,
            col: self.peek().col,
        }
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.to_string(),
            found: t.kind.describe(),
        })
    }

    fn expect(&mut self, kind: &TokKind) -> Result<Tok, ParseError> {
        if &self.peek().kind == kind {
            Ok(self.bump())
        } else {
            self.fail(&kind.describe())
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match &self.peek().kind {
            TokKind::Ident(n) => {
                let n = n.clone();
                self.bump();
                Ok((n, pos))
            }
            _ => self.fail(expected),
        }
    }

    // ------------------------------------------------------------------
    // Declarations
    // ------------------------------------------------------------------

    fn decls(&mut self) -> Result<(), ParseError> {
        loop {
            let kind = match self.peek().kind {
                TokKind::KwParam => DeclKind::Param,
                TokKind::KwRegion => DeclKind::Region,
                TokKind::KwTag => DeclKind::Tag,
                _ => return Ok(()),
            };
            self.bump();
            let (name, _) = self.ident("a declaration name")?;
            self.expect(&TokKind::Colon)?;
            let base = self.base_ty()?;
            self.expect(&TokKind::Semi)?;
            self.sig.declare(kind, &name, base)?;
        }
    }

    fn base_ty(&mut self) -> Result<BaseTy, ParseError> {
        let b = match self.peek().kind {
            TokKind::KwUnit => BaseTy::Unit,
            TokKind::KwBool => BaseTy::Bool,
            TokKind::KwInt4 => BaseTy::IntMod(4),
            _ => return self.fail("a base type (`unit`, `bool`, or `int4`)"),
        };
        self.bump();
        Ok(b)
    }

    // ------------------------------------------------------------------
    // Terms
    // ------------------------------------------------------------------

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().kind {
            TokKind::Lambda => {
                self.bump();
                let (x, _) = self.ident("a binder name")?;
                self.expect(&TokKind::Colon)?;
                let ty = self.obj_type()?;
                self.expect(&TokKind::Dot)?;
                let body = self.term()?;
                Ok(Term::at(TermNode::Lam(x, ty, Box::new(body)), pos))
            }
            TokKind::KwLet => {
                self.bump();
                let (x, _) = self.ident("a binder name")?;
                self.expect(&TokKind::Eq)?;
                let bound = self.term()?;
                self.expect(&TokKind::KwIn)?;
                let body = self.term()?;
                Ok(Term::at(
                    TermNode::Let(x, Box::new(bound), Box::new(body)),
                    pos,
                ))
            }
            TokKind::KwIf => {
                self.bump();
                let cond = self.term()?;
                self.expect(&TokKind::KwThen)?;
                let thn = self.term()?;
                self.expect(&TokKind::KwElse)?;
                let els = self.term()?;
                Ok(Term::at(
                    TermNode::If(Box::new(cond), Box::new(thn), Box::new(els)),
                    pos,
                ))
            }
            _ => self.app(),
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while self.starts_atom() {
            let pos = acc.pos;
            let arg = self.atom()?;
            acc = Term::at(TermNode::App(Box::new(acc), Box::new(arg)), pos);
        }
        Ok(acc)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek().kind,
            TokKind::Ident(_)
                | TokKind::Digit(_)
                | TokKind::KwUnit
                | TokKind::KwTrue
                | TokKind::KwFalse
                | TokKind::LParen
                | TokKind::KwFst
                | TokKind::KwSnd
                | TokKind::KwAsk
                | TokKind::KwRead
                | TokKind::KwWrite
                | TokKind::KwOut
        )
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().kind.clone() {
            TokKind::Ident(n) => {
                self.bump();
                Ok(Term::at(TermNode::Var(n), pos))
            }
            // Literals live in Z/4, so digits are taken mod 4.
            TokKind::Digit(d) => {
                self.bump();
                Ok(Term::at(TermNode::Const(Scalar::int_mod(d as i64, 4)), pos))
            }
            TokKind::KwUnit => {
                self.bump();
                Ok(Term::at(TermNode::Const(Scalar::Unit), pos))
            }
            TokKind::KwTrue => {
                self.bump();
                Ok(Term::at(TermNode::Const(Scalar::Bool(true)), pos))
            }
            TokKind::KwFalse => {
                self.bump();
                Ok(Term::at(TermNode::Const(Scalar::Bool(false)), pos))
            }
            TokKind::LParen => {
                self.bump();
                let first = self.term()?;
                if self.peek().kind == TokKind::Comma {
                    self.bump();
                    let second = self.term()?;
                    self.expect(&TokKind::RParen)?;
                    Ok(Term::at(
                        TermNode::Pair(Box::new(first), Box::new(second)),
                        pos,
                    ))
                } else {
                    self.expect(&TokKind::RParen)?;
                    Ok(first)
                }
            }
            TokKind::KwFst => {
                self.bump();
                let e = self.atom()?;
                Ok(Term::at(TermNode::Fst(Box::new(e)), pos))
            }
            TokKind::KwSnd => {
                self.bump();
                let e = self.atom()?;
                Ok(Term::at(TermNode::Snd(Box::new(e)), pos))
            }
            TokKind::KwAsk => {
                self.bump();
                let name = self.declared_name("parameter", |sig, n| sig.params.contains_key(n))?;
                Ok(Term::at(TermNode::Ask(name), pos))
            }
            TokKind::KwRead => {
                self.bump();
                let name = self.declared_name("region", |sig, n| sig.regions.contains_key(n))?;
                Ok(Term::at(TermNode::Read(name), pos))
            }
            TokKind::KwWrite => {
                self.bump();
                let name = self.declared_name("region", |sig, n| sig.regions.contains_key(n))?;
                let e = self.atom()?;
                Ok(Term::at(TermNode::Write(name, Box::new(e)), pos))
            }
            TokKind::KwOut => {
                self.bump();
                let name = self.declared_name("tag", |sig, n| sig.tags.contains_key(n))?;
                let e = self.atom()?;
                Ok(Term::at(TermNode::Out(name, Box::new(e)), pos))
            }
            _ => self.fail("a term"),
        }
    }

    /// Reads an identifier and checks it against one of the signature's
    /// namespaces; `kind` names the namespace in the diagnostic.
    fn declared_name(
        &mut self,
        kind: &str,
        member: fn(&Signature, &str) -> bool,
    ) -> Result<String, ParseError> {
        let (name, pos) = self.ident(&format!("a {kind} name"))?;
        if member(&self.sig, &name) {
            Ok(name)
        } else {
            Err(ParseError::UndeclaredName {
                line: pos.line,
                col: pos.col,
                kind: kind.to_string(),
                name,
            })
        }
    }

    // ------------------------------------------------------------------
    // Types
    // ------------------------------------------------------------------

    fn obj_type(&mut self) -> Result<ObjType, ParseError> {
        let dom = self.type_atom()?;
        if self.peek().kind == TokKind::Arrow {
            self.bump();
            self.expect(&TokKind::LBrace)?;
            let latent = self.effect_tokens()?;
            self.expect(&TokKind::RBrace)?;
            // Arrows associate to the right.
            let cod = self.obj_type()?;
            Ok(ObjType::fun(dom, latent, cod))
        } else {
            Ok(dom)
        }
    }

    fn type_atom(&mut self) -> Result<ObjType, ParseError> {
        match self.peek().kind {
            TokKind::KwUnit => {
                self.bump();
                Ok(ObjType::Unit)
            }
            TokKind::KwBool => {
                self.bump();
                Ok(ObjType::Bool)
            }
            TokKind::KwInt4 => {
                self.bump();
                Ok(ObjType::IntMod(4))
            }
            TokKind::LParen => {
                self.bump();
                let first = self.obj_type()?;
                if self.peek().kind == TokKind::Comma {
                    self.bump();
                    let second = self.obj_type()?;
                    self.expect(&TokKind::RParen)?;
                    Ok(ObjType::prod(first, second))
                } else {
                    // Plain grouping, needed to write an arrow as a domain.
                    self.expect(&TokKind::RParen)?;
                    Ok(first)
                }
            }
            _ => self.fail("a type"),
        }
    }

    fn effect_tokens(&mut self) -> Result<Vec<EffectToken>, ParseError> {
        let mut toks = Vec::new();
        if self.peek().kind == TokKind::RBrace {
            return Ok(toks);
        }
        loop {
            toks.push(self.effect_token()?);
            if self.peek().kind == TokKind::Comma {
                self.bump();
            } else {
                return Ok(toks);
            }
        }
    }

    fn effect_token(&mut self) -> Result<EffectToken, ParseError> {
        match self.peek().kind {
            TokKind::KwRd => {
                self.bump();
                let name = self.declared_name("region", |sig, n| sig.regions.contains_key(n))?;
                Ok(EffectToken::Read(name))
            }
            TokKind::KwWr => {
                self.bump();
                let name = self.declared_name("region", |sig, n| sig.regions.contains_key(n))?;
                Ok(EffectToken::Write(name))
            }
            TokKind::KwIp => {
                self.bump();
                let name = self.declared_name("parameter", |sig, n| sig.params.contains_key(n))?;
                Ok(EffectToken::ImplicitParam(name))
            }
            TokKind::KwOut => {
                self.bump();
                let name = self.declared_name("tag", |sig, n| sig.tags.contains_key(n))?;
                Ok(EffectToken::Out(name))
            }
            _ => self.fail("an effect token (`rd`, `wr`, `ip`, or `out`)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lambda_over_ask() {
        let (sig, t) = parse("param p : int4; \\x:int4. ask p").unwrap();
        assert_eq!(sig.params.get("p"), Some(&BaseTy::IntMod(4)));
        assert_eq!(
            t,
            Term::lam("x", ObjType::IntMod(4), Term::ask("p")),
        );
    }

    #[test]
    fn parses_write_of_literal() {
        let (sig, t) = parse("region r : bool; write r true").unwrap();
        assert_eq!(sig.regions.get("r"), Some(&BaseTy::Bool));
        assert_eq!(t, Term::write("r", Term::lit(Scalar::Bool(true))));
    }

    #[test]
    fn truncated_lambda_is_a_syntax_error() {
        assert!(matches!(parse("\\x:"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn application_is_left_associative() {
        let (_, t) = parse("\\f:int4 -> {} int4. f 1 2").unwrap();
        let expected = Term::lam(
            "f",
            ObjType::fun(ObjType::IntMod(4), vec![], ObjType::IntMod(4)),
            Term::app(
                Term::app(Term::var("f"), Term::lit(Scalar::int_mod(1, 4))),
                Term::lit(Scalar::int_mod(2, 4)),
            ),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn pair_and_grouping_both_use_parens() {
        let (_, pair) = parse("(1, true)").unwrap();
        assert_eq!(
            pair,
            Term::pair(Term::lit(Scalar::int_mod(1, 4)), Term::lit(Scalar::Bool(true))),
        );
        let (_, grouped) = parse("fst (1, true)").unwrap();
        assert_eq!(
            grouped,
            Term::fst(Term::pair(
                Term::lit(Scalar::int_mod(1, 4)),
                Term::lit(Scalar::Bool(true)),
            )),
        );
    }

    #[test]
    fn latent_effect_annotations_carry_tokens_in_order() {
        let (_, t) = parse("region r : int4; tag a : bool; \\x:unit. \\y:unit -> {rd r, out a} int4. y x").unwrap();
        let TermNode::Lam(_, _, body) = &t.node else {
            panic!("expected lambda");
        };
        let TermNode::Lam(_, ty, _) = &body.node else {
            panic!("expected inner lambda");
        };
        assert_eq!(
            *ty,
            ObjType::fun(
                ObjType::Unit,
                vec![
                    EffectToken::Read("r".to_string()),
                    EffectToken::Out("a".to_string()),
                ],
                ObjType::IntMod(4),
            ),
        );
    }

    #[test]
    fn undeclared_primitive_names_are_scope_errors() {
        assert!(matches!(
            parse("ask p"),
            Err(ParseError::UndeclaredName { kind, .. }) if kind == "parameter"
        ));
        assert!(matches!(
            parse("param p : int4; read p"),
            Err(ParseError::UndeclaredName { kind, .. }) if kind == "region"
        ));
        assert!(matches!(
            parse("\\x: unit -> {wr r} unit. x"),
            Err(ParseError::UndeclaredName { kind, .. }) if kind == "region"
        ));
    }

    #[test]
    fn duplicate_declarations_are_rejected_across_namespaces() {
        assert!(matches!(
            parse("param x : int4; region x : int4; x"),
            Err(ParseError::DuplicateDecl(n)) if n == "x"
        ));
    }

    #[test]
    fn keywords_delimit_nested_binders() {
        // `write_it` is an identifier, not the `write` keyword.
        let (_, t) = parse("let x = if true then 1 else 2 in write_it").unwrap();
        let expected = Term::let_(
            "x",
            Term::if_(
                Term::lit(Scalar::Bool(true)),
                Term::lit(Scalar::int_mod(1, 4)),
                Term::lit(Scalar::int_mod(2, 4)),
            ),
            Term::var("write_it"),
        );
        assert_eq!(t, expected);
    }
}
