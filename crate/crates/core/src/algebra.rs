//! Effect algebras: the index structures every graded construction here is
//! graded by.
//!
//! An [`EffectAlgebra`] is a monoid over a finite carrier of [`Index`] values,
//! optionally equipped with a partial order turning it into a join-semilattice
//! (required for sub-effecting). Four algebras ship:
//!
//! - [`EffectAlgebra::powerset`]: subsets of a token set under union, ordered
//!   by inclusion. Used by the reader and memory instances.
//! - [`EffectAlgebra::bool_conj`]: the boolean conjunction monoid
//!   `({f, t}, ∧, t)`, unordered. Used by the coeffect side.
//! - [`EffectAlgebra::trace`]: bounded sequences of output tags under
//!   concatenation, unordered and deliberately non-commutative.
//! - [`EffectAlgebra::trivial`]: the one-element monoid, which collapses the
//!   graded structures back to their ordinary ungraded counterparts.
//!
//! [`check_algebra_laws`] verifies the monoid and lattice laws exhaustively
//! over the carrier and is run against every shipped algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

// ============================================================================
// Tokens and indices
// ============================================================================

/// A single effect token, the atoms of powerset indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EffectToken {
    /// An implicit parameter demand, `ip p`.
    ImplicitParam(String),
    /// A region read, `rd r`.
    Read(String),
    /// A region write, `wr r`.
    Write(String),
    /// An output emission on a tag, `out t`.
    Out(String),
}

impl EffectToken {
    /// The name the token refers to (parameter, region, or tag).
    pub fn name(&self) -> &str {
        match self {
            EffectToken::ImplicitParam(n)
            | EffectToken::Read(n)
            | EffectToken::Write(n)
            | EffectToken::Out(n) => n,
        }
    }
}

impl fmt::Display for EffectToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectToken::ImplicitParam(n) => write!(f, "ip {n}"),
            EffectToken::Read(n) => write!(f, "rd {n}"),
            EffectToken::Write(n) => write!(f, "wr {n}"),
            EffectToken::Out(n) => write!(f, "out {n}"),
        }
    }
}

/// An element of an effect algebra's carrier.
///
/// Indices are canonical values with structural equality: token sets are kept
/// sorted (via `BTreeSet`), traces are plain sequences, and the boolean and
/// one-point carriers are immediate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    /// A set of effect tokens (powerset algebras).
    Set(BTreeSet<EffectToken>),
    /// `t` or `f` in the boolean conjunction monoid. `Flag(true)` is `t`.
    Flag(bool),
    /// An ordered sequence of output tags (trace algebras).
    Seq(Vec<String>),
    /// The single element of the trivial one-object monoid.
    Point,
}

impl Index {
    /// The empty token set.
    pub fn empty_set() -> Index {
        Index::Set(BTreeSet::new())
    }

    /// A singleton token set.
    pub fn singleton(tok: EffectToken) -> Index {
        Index::Set([tok].into_iter().collect())
    }

    /// Builds a token-set index from an iterator.
    pub fn set<I: IntoIterator<Item = EffectToken>>(toks: I) -> Index {
        Index::Set(toks.into_iter().collect())
    }

    /// The token set, if this is a set index.
    pub fn as_set(&self) -> Option<&BTreeSet<EffectToken>> {
        match self {
            Index::Set(s) => Some(s),
            _ => None,
        }
    }

    /// Region names read under this index (memory instances).
    pub fn read_regions(&self) -> BTreeSet<String> {
        match self {
            Index::Set(s) => s
                .iter()
                .filter_map(|t| match t {
                    EffectToken::Read(r) => Some(r.clone()),
                    _ => None,
                })
                .collect(),
            _ => BTreeSet::new(),
        }
    }

    /// Region names written under this index (memory instances).
    pub fn write_regions(&self) -> BTreeSet<String> {
        match self {
            Index::Set(s) => s
                .iter()
                .filter_map(|t| match t {
                    EffectToken::Write(r) => Some(r.clone()),
                    _ => None,
                })
                .collect(),
            _ => BTreeSet::new(),
        }
    }

    /// Implicit parameter names demanded by this index (reader instances).
    pub fn param_names(&self) -> BTreeSet<String> {
        match self {
            Index::Set(s) => s
                .iter()
                .filter_map(|t| match t {
                    EffectToken::ImplicitParam(p) => Some(p.clone()),
                    _ => None,
                })
                .collect(),
            _ => BTreeSet::new(),
        }
    }

    /// Renders the index the way the CLI serializes it: sets as sorted token
    /// strings in braces, traces as bracketed tag tokens, `t`/`f`/`1` bare.
    pub fn render(&self) -> String {
        match self {
            Index::Set(s) => {
                let toks: Vec<String> = s.iter().map(|t| t.to_string()).collect();
                format!("{{{}}}", toks.join(", "))
            }
            Index::Flag(true) => "t".to_string(),
            Index::Flag(false) => "f".to_string(),
            Index::Seq(tags) => {
                let toks: Vec<String> = tags.iter().map(|t| format!("out {t}")).collect();
                format!("[{}]", toks.join(", "))
            }
            Index::Point => "1".to_string(),
        }
    }

    /// Token strings in canonical order (sorted for sets, positional for
    /// traces), matching the CLI JSON schema.
    pub fn token_strings(&self) -> Vec<String> {
        match self {
            Index::Set(s) => s.iter().map(|t| t.to_string()).collect(),
            Index::Seq(tags) => tags.iter().map(|t| format!("out {t}")).collect(),
            Index::Flag(true) => vec!["t".to_string()],
            Index::Flag(false) => vec!["f".to_string()],
            Index::Point => vec!["1".to_string()],
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// ============================================================================
// Algebras
// ============================================================================

/// A finite table-driven algebra, used for deliberately broken algebras in
/// law tests and for anything not covered by the shipped constructors.
#[derive(Debug, Clone)]
pub struct TableAlgebra {
    pub carrier: Vec<Index>,
    pub unit: Index,
    pub combine: BTreeMap<(Index, Index), Index>,
    /// Pairs `(a, b)` with `a ⊑ b`; `None` means the algebra is unordered.
    pub leq: Option<BTreeSet<(Index, Index)>>,
}

#[derive(Debug, Clone)]
enum AlgebraKind {
    Powerset { tokens: BTreeSet<EffectToken> },
    BoolConj,
    Trace { tags: BTreeSet<String>, max_len: usize },
    Trivial,
    Table(Arc<TableAlgebra>),
}

/// A strict monoid of indices, optionally ordered.
///
/// Values are immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct EffectAlgebra {
    name: String,
    kind: AlgebraKind,
}

impl EffectAlgebra {
    /// The powerset algebra `(P(tokens), ∪, ∅)` ordered by inclusion.
    pub fn powerset<I: IntoIterator<Item = EffectToken>>(tokens: I) -> EffectAlgebra {
        EffectAlgebra {
            name: "powerset".to_string(),
            kind: AlgebraKind::Powerset {
                tokens: tokens.into_iter().collect(),
            },
        }
    }

    /// The boolean conjunction monoid `({f, t}, ∧, t)`, unordered.
    pub fn bool_conj() -> EffectAlgebra {
        EffectAlgebra {
            name: "bool-conj".to_string(),
            kind: AlgebraKind::BoolConj,
        }
    }

    /// Sequences over `tags` of length at most `max_len` under concatenation.
    /// Concatenation past the bound raises [`AlgebraError::IndexOverflow`].
    pub fn trace<I: IntoIterator<Item = String>>(tags: I, max_len: usize) -> EffectAlgebra {
        assert!(max_len >= 1, "trace algebra needs max_len >= 1");
        EffectAlgebra {
            name: "trace".to_string(),
            kind: AlgebraKind::Trace {
                tags: tags.into_iter().collect(),
                max_len,
            },
        }
    }

    /// The one-element monoid. Ordered (trivially) so that `iota` laws can be
    /// exercised on the collapse instance.
    pub fn trivial() -> EffectAlgebra {
        EffectAlgebra {
            name: "trivial".to_string(),
            kind: AlgebraKind::Trivial,
        }
    }

    /// A finite algebra given by explicit tables.
    pub fn from_table(name: &str, table: TableAlgebra) -> EffectAlgebra {
        EffectAlgebra {
            name: name.to_string(),
            kind: AlgebraKind::Table(Arc::new(table)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The token universe of a powerset algebra, `None` for other kinds.
    pub fn tokens(&self) -> Option<&BTreeSet<EffectToken>> {
        match &self.kind {
            AlgebraKind::Powerset { tokens } => Some(tokens),
            _ => None,
        }
    }

    /// The tag universe and length bound of a trace algebra.
    pub fn trace_bounds(&self) -> Option<(&BTreeSet<String>, usize)> {
        match &self.kind {
            AlgebraKind::Trace { tags, max_len } => Some((tags, *max_len)),
            _ => None,
        }
    }

    /// The monoidal unit `1`.
    pub fn unit(&self) -> Index {
        match &self.kind {
            AlgebraKind::Powerset { .. } => Index::empty_set(),
            AlgebraKind::BoolConj => Index::Flag(true),
            AlgebraKind::Trace { .. } => Index::Seq(Vec::new()),
            AlgebraKind::Trivial => Index::Point,
            AlgebraKind::Table(t) => t.unit.clone(),
        }
    }

    /// Whether `ix` is an element of the carrier.
    pub fn contains(&self, ix: &Index) -> bool {
        match (&self.kind, ix) {
            (AlgebraKind::Powerset { tokens }, Index::Set(s)) => s.is_subset(tokens),
            (AlgebraKind::BoolConj, Index::Flag(_)) => true,
            (AlgebraKind::Trace { tags, max_len }, Index::Seq(seq)) => {
                seq.len() <= *max_len && seq.iter().all(|t| tags.contains(t))
            }
            (AlgebraKind::Trivial, Index::Point) => true,
            (AlgebraKind::Table(t), ix) => t.carrier.contains(ix),
            _ => false,
        }
    }

    /// The monoid operation `⊗`. Partial only for trace algebras, where the
    /// concatenation may exceed the length bound.
    pub fn combine(&self, a: &Index, b: &Index) -> Result<Index, AlgebraError> {
        self.check_member(a)?;
        self.check_member(b)?;
        match (&self.kind, a, b) {
            (AlgebraKind::Powerset { .. }, Index::Set(x), Index::Set(y)) => {
                Ok(Index::Set(x.union(y).cloned().collect()))
            }
            (AlgebraKind::BoolConj, Index::Flag(x), Index::Flag(y)) => Ok(Index::Flag(*x && *y)),
            (AlgebraKind::Trace { max_len, .. }, Index::Seq(x), Index::Seq(y)) => {
                if x.len() + y.len() > *max_len {
                    Err(AlgebraError::IndexOverflow(a.clone(), b.clone(), *max_len))
                } else {
                    let mut out = x.clone();
                    out.extend(y.iter().cloned());
                    Ok(Index::Seq(out))
                }
            }
            (AlgebraKind::Trivial, Index::Point, Index::Point) => Ok(Index::Point),
            (AlgebraKind::Table(t), a, b) => t
                .combine
                .get(&(a.clone(), b.clone()))
                .cloned()
                .ok_or_else(|| AlgebraError::MissingTableEntry(self.name.clone())),
            _ => unreachable!("membership checked above"),
        }
    }

    /// Whether the algebra carries a partial order.
    pub fn has_order(&self) -> bool {
        match &self.kind {
            AlgebraKind::Powerset { .. } | AlgebraKind::Trivial => true,
            AlgebraKind::BoolConj | AlgebraKind::Trace { .. } => false,
            AlgebraKind::Table(t) => t.leq.is_some(),
        }
    }

    /// The partial order `a ⊑ b`, when present.
    pub fn leq(&self, a: &Index, b: &Index) -> Result<bool, AlgebraError> {
        self.check_member(a)?;
        self.check_member(b)?;
        match (&self.kind, a, b) {
            (AlgebraKind::Powerset { .. }, Index::Set(x), Index::Set(y)) => Ok(x.is_subset(y)),
            (AlgebraKind::Trivial, Index::Point, Index::Point) => Ok(true),
            (AlgebraKind::Table(t), a, b) => match &t.leq {
                Some(pairs) => Ok(pairs.contains(&(a.clone(), b.clone()))),
                None => Err(AlgebraError::NoOrder(self.name.clone())),
            },
            _ => Err(AlgebraError::NoOrder(self.name.clone())),
        }
    }

    /// Least upper bound of `a` and `b`, when the order exists. For the
    /// shipped ordered algebras this coincides with `combine`.
    pub fn join(&self, a: &Index, b: &Index) -> Result<Index, AlgebraError> {
        if !self.has_order() {
            return Err(AlgebraError::NoOrder(self.name.clone()));
        }
        self.combine(a, b)
    }

    /// Enumerates the whole carrier in a canonical order.
    pub fn carrier(&self) -> Vec<Index> {
        match &self.kind {
            AlgebraKind::Powerset { tokens } => {
                let toks: Vec<&EffectToken> = tokens.iter().collect();
                let n = toks.len();
                let mut out = Vec::with_capacity(1 << n);
                for mask in 0u64..(1u64 << n) {
                    let set: BTreeSet<EffectToken> = toks
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, t)| (*t).clone())
                        .collect();
                    out.push(Index::Set(set));
                }
                out.sort();
                out
            }
            AlgebraKind::BoolConj => vec![Index::Flag(false), Index::Flag(true)],
            AlgebraKind::Trace { tags, max_len } => {
                let tags: Vec<&String> = tags.iter().collect();
                let mut out = vec![Index::Seq(Vec::new())];
                let mut frontier = vec![Vec::new()];
                for _ in 0..*max_len {
                    let mut next = Vec::new();
                    for seq in &frontier {
                        for tag in &tags {
                            let mut s: Vec<String> = seq.clone();
                            s.push((*tag).clone());
                            out.push(Index::Seq(s.clone()));
                            next.push(s);
                        }
                    }
                    frontier = next;
                }
                out
            }
            AlgebraKind::Trivial => vec![Index::Point],
            AlgebraKind::Table(t) => t.carrier.clone(),
        }
    }

    fn check_member(&self, ix: &Index) -> Result<(), AlgebraError> {
        if self.contains(ix) {
            Ok(())
        } else {
            Err(AlgebraError::NotInCarrier(ix.clone(), self.name.clone()))
        }
    }
}

// ============================================================================
// Algebra law checking
// ============================================================================

/// Outcome of one algebra law check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraLawReport {
    pub law: String,
    pub passed: bool,
    pub cases: u64,
    /// Witness elements when the law fails, rendered.
    pub counterexample: Option<Vec<String>>,
}

impl AlgebraLawReport {
    fn pass(law: &str, cases: u64) -> Self {
        AlgebraLawReport {
            law: law.to_string(),
            passed: true,
            cases,
            counterexample: None,
        }
    }

    fn fail(law: &str, cases: u64, witness: Vec<&Index>) -> Self {
        AlgebraLawReport {
            law: law.to_string(),
            passed: false,
            cases,
            counterexample: Some(witness.into_iter().map(|i| i.render()).collect()),
        }
    }
}

/// Bound on carrier sizes for exhaustive algebra law checks. Triples are
/// enumerated, so the cost is cubic in the carrier.
pub const ALGEBRA_ENUM_BUDGET: usize = 4096;

/// Checks the monoid laws (and the lattice laws, when `leq` is present)
/// exhaustively over the carrier.
///
/// Partiality of `combine` (trace overflow) is handled law-by-law: a law
/// instance where every route overflows is vacuous, while disagreement in
/// definedness is a failure.
pub fn check_algebra_laws(alg: &EffectAlgebra) -> Result<Vec<AlgebraLawReport>, AlgebraError> {
    let carrier = alg.carrier();
    if carrier.len() > ALGEBRA_ENUM_BUDGET {
        return Err(AlgebraError::NotInCarrier(
            Index::Point,
            format!("{} carrier too large to enumerate", alg.name()),
        ));
    }
    let unit = alg.unit();
    let mut reports = Vec::new();

    // Associativity: (a ⊗ b) ⊗ c = a ⊗ (b ⊗ c).
    {
        let mut cases = 0u64;
        let mut failure = None;
        'assoc: for a in &carrier {
            for b in &carrier {
                for c in &carrier {
                    cases += 1;
                    let lhs = alg.combine(a, b).and_then(|ab| alg.combine(&ab, c));
                    let rhs = alg.combine(b, c).and_then(|bc| alg.combine(a, &bc));
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) if l == r => {}
                        (Err(_), Err(_)) => {} // both undefined: vacuous
                        _ => {
                            failure = Some(vec![a, b, c]);
                            break 'assoc;
                        }
                    }
                }
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("associativity", cases),
            Some(w) => AlgebraLawReport::fail("associativity", cases, w),
        });
    }

    // Identity laws: 1 ⊗ a = a and a ⊗ 1 = a.
    for (law, flip) in [("left-identity", false), ("right-identity", true)] {
        let mut cases = 0u64;
        let mut failure = None;
        for a in &carrier {
            cases += 1;
            let got = if flip {
                alg.combine(a, &unit)
            } else {
                alg.combine(&unit, a)
            };
            if got.as_ref() != Ok(a) {
                failure = Some(vec![a]);
                break;
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass(law, cases),
            Some(w) => AlgebraLawReport::fail(law, cases, w),
        });
    }

    if alg.has_order() {
        reports.extend(check_order_laws(alg, &carrier, &unit)?);
    }

    Ok(reports)
}

fn check_order_laws(
    alg: &EffectAlgebra,
    carrier: &[Index],
    unit: &Index,
) -> Result<Vec<AlgebraLawReport>, AlgebraError> {
    let mut reports = Vec::new();

    // Reflexivity, antisymmetry, transitivity.
    {
        let mut failure = None;
        let mut cases = 0u64;
        for a in carrier {
            cases += 1;
            if !alg.leq(a, a)? {
                failure = Some(vec![a]);
                break;
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("leq-reflexive", cases),
            Some(w) => AlgebraLawReport::fail("leq-reflexive", cases, w),
        });
    }
    {
        let mut failure = None;
        let mut cases = 0u64;
        'anti: for a in carrier {
            for b in carrier {
                cases += 1;
                if alg.leq(a, b)? && alg.leq(b, a)? && a != b {
                    failure = Some(vec![a, b]);
                    break 'anti;
                }
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("leq-antisymmetric", cases),
            Some(w) => AlgebraLawReport::fail("leq-antisymmetric", cases, w),
        });
    }
    {
        let mut failure = None;
        let mut cases = 0u64;
        'trans: for a in carrier {
            for b in carrier {
                for c in carrier {
                    cases += 1;
                    if alg.leq(a, b)? && alg.leq(b, c)? && !alg.leq(a, c)? {
                        failure = Some(vec![a, b, c]);
                        break 'trans;
                    }
                }
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("leq-transitive", cases),
            Some(w) => AlgebraLawReport::fail("leq-transitive", cases, w),
        });
    }

    // Unit is the least element.
    {
        let mut failure = None;
        let mut cases = 0u64;
        for a in carrier {
            cases += 1;
            if !alg.leq(unit, a)? {
                failure = Some(vec![a]);
                break;
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("unit-least", cases),
            Some(w) => AlgebraLawReport::fail("unit-least", cases, w),
        });
    }

    // Combine is monotone in both arguments and is the least upper bound.
    {
        let mut failure = None;
        let mut cases = 0u64;
        'mono: for a in carrier {
            for b in carrier {
                if !alg.leq(a, b)? {
                    continue;
                }
                for c in carrier {
                    cases += 1;
                    let lhs1 = alg.combine(a, c);
                    let rhs1 = alg.combine(b, c);
                    let lhs2 = alg.combine(c, a);
                    let rhs2 = alg.combine(c, b);
                    let ok = match (lhs1, rhs1, lhs2, rhs2) {
                        (Ok(l1), Ok(r1), Ok(l2), Ok(r2)) => alg.leq(&l1, &r1)? && alg.leq(&l2, &r2)?,
                        _ => true, // partiality: vacuous
                    };
                    if !ok {
                        failure = Some(vec![a, b, c]);
                        break 'mono;
                    }
                }
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("combine-monotone", cases),
            Some(w) => AlgebraLawReport::fail("combine-monotone", cases, w),
        });
    }
    {
        let mut failure = None;
        let mut cases = 0u64;
        'lub: for a in carrier {
            for b in carrier {
                let ab = match alg.combine(a, b) {
                    Ok(ab) => ab,
                    Err(_) => continue,
                };
                cases += 1;
                // Upper bound of both arguments.
                if !(alg.leq(a, &ab)? && alg.leq(b, &ab)?) {
                    failure = Some(vec![a, b]);
                    break 'lub;
                }
                // Least among upper bounds.
                for u in carrier {
                    if alg.leq(a, u)? && alg.leq(b, u)? && !alg.leq(&ab, u)? {
                        failure = Some(vec![a, b, u]);
                        break 'lub;
                    }
                }
            }
        }
        reports.push(match failure {
            None => AlgebraLawReport::pass("combine-is-lub", cases),
            Some(w) => AlgebraLawReport::fail("combine-is-lub", cases, w),
        });
    }

    Ok(reports)
}
