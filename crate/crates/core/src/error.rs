//! Error types shared across the crate.

use thiserror::Error;

use crate::algebra::Index;

/// Errors raised by effect algebras.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// Combining two trace indices would exceed the algebra's length bound.
    #[error("index overflow: trace {0:?} ++ {1:?} exceeds max length {2}")]
    IndexOverflow(Index, Index, usize),

    /// An index was supplied that is not an element of the algebra's carrier.
    #[error("index {0:?} is not in the carrier of algebra `{1}`")]
    NotInCarrier(Index, String),

    /// The algebra has no partial order, so `leq`/`iota` are unavailable.
    #[error("algebra `{0}` has no partial order")]
    NoOrder(String),

    /// A table-driven algebra was queried outside its combine table.
    #[error("combine table of `{0}` has no entry for the given pair")]
    MissingTableEntry(String),
}

/// Errors raised while building or running semantic values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    /// An environment or store was used whose domain does not match the index.
    #[error("environment domain {found:?} does not match index demand {expected:?}")]
    EnvDomainMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    /// A value's shape is inconsistent with the index it is claimed at.
    #[error("value shape inconsistent with index: {0}")]
    IndexMismatch(String),

    /// An operation was invoked with an index from a different algebra.
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    /// Underlying algebra error (e.g. trace overflow during `mu`).
    #[error(transparent)]
    Algebra(#[from] AlgebraError),

    /// A target type could not be inhabited from the given arguments.
    #[error("cannot inhabit {0}")]
    Inhabitation(String),

    /// A function domain was too large to enumerate for pointwise equality.
    #[error("domain of size {0} exceeds the enumeration budget {1}")]
    DomainNotEnumerable(u128, u128),

    /// A semantic function was applied to a value outside its domain.
    #[error("applied function to value outside its domain: {0}")]
    NotInDomain(String),
}

/// Parse-time errors with source positions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// The input does not match the grammar.
    #[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },

    /// A primitive refers to a name missing from the signature.
    #[error("scope error at {line}:{col}: {kind} `{name}` is not declared")]
    UndeclaredName {
        line: usize,
        col: usize,
        kind: String,
        name: String,
    },

    /// A declaration reuses a name already declared in the signature.
    #[error("duplicate declaration of `{0}`")]
    DuplicateDecl(String),
}

/// Errors raised by effect and coeffect inference.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    /// Ill-typed term.
    #[error("type error at {line}:{col}: {msg}")]
    Type { line: usize, col: usize, msg: String },

    /// A variable is unbound.
    #[error("scope error at {line}:{col}: unbound variable `{name}`")]
    Scope { line: usize, col: usize, name: String },

    /// A rule demanded sub-effecting but the algebra has no order.
    #[error("`{construct}` needs a lattice-ordered algebra, but `{algebra}` has no order")]
    NoLattice { construct: String, algebra: String },

    /// The inferred trace index exceeds the algebra's bound.
    #[error(transparent)]
    IndexOverflow(#[from] AlgebraError),

    /// A primitive is not supported by the selected instance.
    #[error("primitive `{prim}` is not supported by instance `{instance}`")]
    UnsupportedPrimitive { prim: String, instance: String },

    /// An inferred effect is not below a declared annotation.
    #[error("effect escape: inferred {found:?} is not below declared {declared:?}")]
    EffectEscape { found: Index, declared: Index },
}

/// Errors raised by the executable front door.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Infer(#[from] InferError),

    #[error(transparent)]
    Sem(#[from] SemError),

    /// Supplied inputs do not match the program's inferred index.
    #[error("input mismatch: {0}")]
    InputMismatch(String),
}
