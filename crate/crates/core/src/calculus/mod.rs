//! The object language: a computational λ-calculus with effect primitives.
//!
//! A program is a list of declarations (implicit parameters, store regions,
//! output tags, each with a base type) followed by one term:
//!
//! ```text
//! param p : int4;
//! region r : bool;
//! let x = ask p in write r (fst (x, true))
//! ```
//!
//! Function types carry a latent effect annotation in braces,
//! `int4 -> {rd r} bool`, released at application sites. The concrete
//! grammar is implemented by [`parse`] and inverted by [`pretty`] /
//! [`pretty_program`]; parsing the pretty-printed form of a parse result
//! reproduces it exactly.

mod lexer;
mod parser;
mod pretty;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::EffectToken;
use crate::error::ParseError;
use crate::value::{BaseTy, Scalar};

pub use parser::parse;
pub use pretty::{pretty, pretty_program, pretty_type};

// ============================================================================
// Signatures
// ============================================================================

/// The declared names a program may refer to. Names are unique across the
/// three namespaces so an effect token is identified by its name alone.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub params: BTreeMap<String, BaseTy>,
    pub regions: BTreeMap<String, BaseTy>,
    pub tags: BTreeMap<String, BaseTy>,
}

impl Signature {
    pub fn declare(
        &mut self,
        kind: DeclKind,
        name: &str,
        base: BaseTy,
    ) -> Result<(), ParseError> {
        if self.params.contains_key(name)
            || self.regions.contains_key(name)
            || self.tags.contains_key(name)
        {
            return Err(ParseError::DuplicateDecl(name.to_string()));
        }
        let map = match kind {
            DeclKind::Param => &mut self.params,
            DeclKind::Region => &mut self.regions,
            DeclKind::Tag => &mut self.tags,
        };
        map.insert(name.to_string(), base);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Param,
    Region,
    Tag,
}

// ============================================================================
// Types
// ============================================================================

/// Object-language types. Arrows carry their latent effect as the ordered
/// token list written in the source; inference interprets it in the active
/// algebra (a set for powerset algebras, a sequence for traces).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjType {
    Unit,
    Bool,
    IntMod(u8),
    Prod(Box<ObjType>, Box<ObjType>),
    Fun(Box<ObjType>, Vec<EffectToken>, Box<ObjType>),
}

impl ObjType {
    pub fn prod(a: ObjType, b: ObjType) -> ObjType {
        ObjType::Prod(Box::new(a), Box::new(b))
    }

    pub fn fun(dom: ObjType, latent: Vec<EffectToken>, cod: ObjType) -> ObjType {
        ObjType::Fun(Box::new(dom), latent, Box::new(cod))
    }

    pub fn base(b: BaseTy) -> ObjType {
        match b {
            BaseTy::Unit => ObjType::Unit,
            BaseTy::Bool => ObjType::Bool,
            BaseTy::IntMod(m) => ObjType::IntMod(m),
        }
    }

    pub fn as_base(&self) -> Option<BaseTy> {
        match self {
            ObjType::Unit => Some(BaseTy::Unit),
            ObjType::Bool => Some(BaseTy::Bool),
            ObjType::IntMod(m) => Some(BaseTy::IntMod(*m)),
            _ => None,
        }
    }
}

// Display delegates to the pretty-printer so error messages and reports
// show concrete syntax.
impl fmt::Display for ObjType {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&pretty_type(self))
    }
}

// ============================================================================
// Terms
// ============================================================================

/// A source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A term with its source position. Equality ignores positions, so parsed
/// and programmatically built terms compare naturally.
#[derive(Debug, Clone, Eq)]
pub struct Term {
    pub node: TermNode,
    pub pos: Pos,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl Term {
    pub fn new(node: TermNode) -> Term {
        Term {
            node,
            pos: Pos::default(),
        }
    }

    pub fn at(node: TermNode, pos: Pos) -> Term {
        Term { node, pos }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermNode {
    Var(String),
    Lam(String, ObjType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Let(String, Box<Term>, Box<Term>),
    Const(Scalar),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Ask(String),
    Read(String),
    Write(String, Box<Term>),
    Out(String, Box<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&pretty(self))
    }
}

// Convenience constructors used by tests and the generators.
impl Term {
    pub fn var(x: &str) -> Term {
        Term::new(TermNode::Var(x.to_string()))
    }

    pub fn lam(x: &str, ty: ObjType, body: Term) -> Term {
        Term::new(TermNode::Lam(x.to_string(), ty, Box::new(body)))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::new(TermNode::App(Box::new(f), Box::new(a)))
    }

    pub fn let_(x: &str, bound: Term, body: Term) -> Term {
        Term::new(TermNode::Let(x.to_string(), Box::new(bound), Box::new(body)))
    }

    pub fn lit(s: Scalar) -> Term {
        Term::new(TermNode::Const(s))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::new(TermNode::Pair(Box::new(a), Box::new(b)))
    }

    pub fn fst(e: Term) -> Term {
        Term::new(TermNode::Fst(Box::new(e)))
    }

    pub fn snd(e: Term) -> Term {
        Term::new(TermNode::Snd(Box::new(e)))
    }

    pub fn if_(c: Term, t: Term, e: Term) -> Term {
        Term::new(TermNode::If(Box::new(c), Box::new(t), Box::new(e)))
    }

    pub fn ask(p: &str) -> Term {
        Term::new(TermNode::Ask(p.to_string()))
    }

    pub fn read(r: &str) -> Term {
        Term::new(TermNode::Read(r.to_string()))
    }

    pub fn write(r: &str, e: Term) -> Term {
        Term::new(TermNode::Write(r.to_string(), Box::new(e)))
    }

    pub fn out(t: &str, e: Term) -> Term {
        Term::new(TermNode::Out(t.to_string(), Box::new(e)))
    }
}
