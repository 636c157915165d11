//! Indexed (graded) monads and comonads as the denotational semantics of a
//! small effectful λ-calculus.
//!
//! The crate realizes one idea end to end: the annotations of a
//! type-and-effect system (and, dually, of a coeffect system) can coincide
//! *exactly* with the indices of the denotations — a coherent semantics.
//! Concretely:
//!
//! - [`algebra`] defines the index monoids/lattices (powerset, boolean
//!   conjunction, bounded traces, trivial);
//! - [`monad`] and [`comonad`] define the graded structures and their
//!   instances (reader, memory, trace, identity collapse; partiality);
//! - [`calculus`] is the object language (AST, parser, pretty-printer);
//! - [`effects`] and [`coeffects`] synthesize the annotations;
//! - [`semantics`] compiles derivations to graded denotations whose index
//!   equals the inferred annotation, and evaluates programs;
//! - [`harness`] checks every algebraic law pointwise, establishes the
//!   negative results (the write fiber has no unit, unindexed partiality
//!   has no counit), and cross-checks evaluation against a direct
//!   global-state interpreter;
//! - [`gen`] generates random well-typed programs for the property suites.

pub mod algebra;
pub mod calculus;
pub mod coeffects;
pub mod comonad;
pub mod effects;
pub mod error;
pub mod gen;
pub mod harness;
pub mod monad;
pub mod semantics;
pub mod value;

pub use algebra::{check_algebra_laws, EffectAlgebra, EffectToken, Index};
pub use calculus::{parse, pretty, pretty_program, pretty_type, ObjType, Signature, Term, TermNode};
pub use coeffects::{infer_coeffect, CoeffectJudgment};
pub use comonad::{make_partiality_instance, IndexedComonadInstance};
pub use effects::{
    check_against_annotation, default_algebra, infer_effect, verify_derivation, EffectJudgment,
    InstanceKind,
};
pub use error::{AlgebraError, EvalError, InferError, ParseError, SemError};
pub use monad::{
    identity_collapse_instance, make_memory_exact_instance, make_memory_instance,
    make_reader_instance, make_trace_instance, IndexedMonadInstance,
};
pub use semantics::{eval_program, ExecutionReport, ProgramInputs};
pub use value::{BaseTy, CarrierTy, Env, Scalar, SemValue};
