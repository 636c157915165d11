//! The semantic universe: finite first-order values plus intensional
//! functions over enumerable domains.
//!
//! Everything a denotation can produce or consume is a [`SemValue`].
//! Computations of the graded instances are ordinary values here — e.g. a
//! reader computation `T F A` is a [`SemValue::Fun`] from environments over
//! `F` to `A` — so the lax/colax operations can nest them freely.
//!
//! Law checking needs two things from this universe: enumeration of every
//! value of a given type ([`enumerate_carrier`]) and decidable equality
//! ([`sem_eq`]). Both are driven by [`CarrierTy`] descriptors. Function
//! values are compared pointwise over their enumerated domain, with an
//! evaluation budget so a runaway comparison degrades into an explicit
//! error instead of an endless loop.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::SemError;

// ============================================================================
// Scalars and base types
// ============================================================================

/// First-order values with total structural order: the entries of
/// environments, stores, and traces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Unit,
    Bool(bool),
    /// `IntMod(k, m)` is the residue `k` in `Z_m`, kept reduced: `k < m`.
    IntMod(u8, u8),
}

impl Scalar {
    pub fn int_mod(k: i64, m: u8) -> Scalar {
        assert!(m > 0);
        Scalar::IntMod(k.rem_euclid(m as i64) as u8, m)
    }

    pub fn base(&self) -> BaseTy {
        match self {
            Scalar::Unit => BaseTy::Unit,
            Scalar::Bool(_) => BaseTy::Bool,
            Scalar::IntMod(_, m) => BaseTy::IntMod(*m),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Unit => write!(f, "unit"),
            Scalar::Bool(b) => write!(f, "{b}"),
            Scalar::IntMod(k, _) => write!(f, "{k}"),
        }
    }
}

/// Base types of the object language and of declared names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseTy {
    Unit,
    Bool,
    /// `IntMod(m)` is the integers modulo `m` (the language's `int4` is
    /// `IntMod(4)`).
    IntMod(u8),
}

impl BaseTy {
    /// All values of the base type, in canonical order.
    pub fn values(&self) -> Vec<Scalar> {
        match self {
            BaseTy::Unit => vec![Scalar::Unit],
            BaseTy::Bool => vec![Scalar::Bool(false), Scalar::Bool(true)],
            BaseTy::IntMod(m) => (0..*m).map(|k| Scalar::IntMod(k, *m)).collect(),
        }
    }

    pub fn count(&self) -> u128 {
        match self {
            BaseTy::Unit => 1,
            BaseTy::Bool => 2,
            BaseTy::IntMod(m) => *m as u128,
        }
    }
}

impl fmt::Display for BaseTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseTy::Unit => write!(f, "unit"),
            BaseTy::Bool => write!(f, "bool"),
            BaseTy::IntMod(m) => write!(f, "int{m}"),
        }
    }
}

/// A finite assignment of declared names (implicit parameters or regions)
/// to scalar values. Used for reader environments, stores, and write maps.
pub type Env = BTreeMap<String, Scalar>;

// ============================================================================
// Carrier type descriptors
// ============================================================================

/// A descriptor of a semantic domain, rich enough to enumerate it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CarrierTy {
    Unit,
    Bool,
    IntMod(u8),
    Pair(Box<CarrierTy>, Box<CarrierTy>),
    /// Total functions from the first carrier to the second.
    Fun(Box<CarrierTy>, Box<CarrierTy>),
    /// Total environments: every listed name mapped to a value of its type.
    EnvOver(BTreeMap<String, BaseTy>),
    /// Partial environments: each listed name either absent or mapped.
    /// Used for the performed-writes component of memory computations.
    WritesOver(BTreeMap<String, BaseTy>),
    /// Trace tuples typed position-by-position by a tag sequence.
    TraceOver(Vec<(String, BaseTy)>),
    /// The one-point object; its sole inhabitant is [`SemValue::Absent`].
    One,
}

impl CarrierTy {
    pub fn pair(a: CarrierTy, b: CarrierTy) -> CarrierTy {
        CarrierTy::Pair(Box::new(a), Box::new(b))
    }

    pub fn fun(dom: CarrierTy, cod: CarrierTy) -> CarrierTy {
        CarrierTy::Fun(Box::new(dom), Box::new(cod))
    }

    pub fn base(b: BaseTy) -> CarrierTy {
        match b {
            BaseTy::Unit => CarrierTy::Unit,
            BaseTy::Bool => CarrierTy::Bool,
            BaseTy::IntMod(m) => CarrierTy::IntMod(m),
        }
    }
}

impl fmt::Display for CarrierTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierTy::Unit => write!(f, "unit"),
            CarrierTy::Bool => write!(f, "bool"),
            CarrierTy::IntMod(m) => write!(f, "int{m}"),
            CarrierTy::Pair(a, b) => write!(f, "({a}, {b})"),
            CarrierTy::Fun(d, c) => write!(f, "({d} => {c})"),
            CarrierTy::EnvOver(m) => {
                let parts: Vec<String> = m.iter().map(|(n, t)| format!("{n}:{t}")).collect();
                write!(f, "env{{{}}}", parts.join(", "))
            }
            CarrierTy::WritesOver(m) => {
                let parts: Vec<String> = m.iter().map(|(n, t)| format!("{n}:{t}")).collect();
                write!(f, "writes{{{}}}", parts.join(", "))
            }
            CarrierTy::TraceOver(seq) => {
                let parts: Vec<String> = seq.iter().map(|(n, t)| format!("{n}:{t}")).collect();
                write!(f, "trace[{}]", parts.join(", "))
            }
            CarrierTy::One => write!(f, "1"),
        }
    }
}

// ============================================================================
// Semantic values
// ============================================================================

/// The application closure of a [`SemValue::Fun`], plus the descriptor of
/// the domain it is total on.
#[derive(Clone)]
#[allow(clippy::type_complexity)]
pub struct FunVal {
    pub domain: CarrierTy,
    pub apply: Arc<dyn Fn(&SemValue) -> Result<SemValue, SemError> + Send + Sync>,
}

impl fmt::Debug for FunVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fun({} => _)", self.domain)
    }
}

/// An element of the semantic universe.
#[derive(Debug, Clone)]
pub enum SemValue {
    Unit,
    Bool(bool),
    /// A reduced residue: `IntMod(k, m)` with `k < m`.
    IntMod(u8, u8),
    Pair(Box<SemValue>, Box<SemValue>),
    /// An environment, store, or performed-writes map.
    Env(Env),
    /// An emitted trace: `(tag, payload)` in emission order.
    Trace(Vec<(String, Scalar)>),
    /// The single inhabitant of the one-point object.
    Absent,
    /// An intensional function, total on its declared domain.
    Fun(FunVal),
}

impl SemValue {
    pub fn int_mod(k: i64, m: u8) -> SemValue {
        match Scalar::int_mod(k, m) {
            Scalar::IntMod(k, m) => SemValue::IntMod(k, m),
            _ => unreachable!(),
        }
    }

    pub fn pair(a: SemValue, b: SemValue) -> SemValue {
        SemValue::Pair(Box::new(a), Box::new(b))
    }

    /// Wraps a closure as a function value.
    pub fn fun<F>(domain: CarrierTy, f: F) -> SemValue
    where
        F: Fn(&SemValue) -> Result<SemValue, SemError> + Send + Sync + 'static,
    {
        SemValue::Fun(FunVal {
            domain,
            apply: Arc::new(f),
        })
    }

    /// Builds a function value from an explicit graph: `outputs[i]` is the
    /// image of `domain_values[i]`. Lookup is by extensional equality, so
    /// the domain may itself contain function values.
    pub fn fun_from_table(
        domain: CarrierTy,
        domain_values: Vec<SemValue>,
        outputs: Vec<SemValue>,
    ) -> SemValue {
        assert_eq!(domain_values.len(), outputs.len());
        let table = Arc::new((domain_values, outputs));
        SemValue::fun(domain, move |arg| {
            let (dom, out) = table.as_ref();
            for (d, o) in dom.iter().zip(out.iter()) {
                let mut budget = TABLE_LOOKUP_BUDGET;
                if sem_eq(arg, d, &mut budget)? {
                    return Ok(o.clone());
                }
            }
            Err(SemError::NotInDomain(render_value(arg)))
        })
    }

    /// Applies a function value. Errors with `IndexMismatch` on non-functions.
    pub fn apply(&self, arg: &SemValue) -> Result<SemValue, SemError> {
        match self {
            SemValue::Fun(f) => (f.apply)(arg),
            other => Err(SemError::IndexMismatch(format!(
                "applied non-function value {}",
                render_value(other)
            ))),
        }
    }

    pub fn from_scalar(s: &Scalar) -> SemValue {
        match s {
            Scalar::Unit => SemValue::Unit,
            Scalar::Bool(b) => SemValue::Bool(*b),
            Scalar::IntMod(k, m) => SemValue::IntMod(*k, *m),
        }
    }

    /// The scalar view of a first-order value, when it has one.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self {
            SemValue::Unit => Some(Scalar::Unit),
            SemValue::Bool(b) => Some(Scalar::Bool(*b)),
            SemValue::IntMod(k, m) => Some(Scalar::IntMod(*k, *m)),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            SemValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_env(&self) -> Option<&Env> {
        match self {
            SemValue::Env(e) => Some(e),
            _ => None,
        }
    }
}

// ============================================================================
// Counting, enumeration, sampling
// ============================================================================

fn sat_mul(a: u128, b: u128) -> u128 {
    a.saturating_mul(b)
}

fn sat_pow(base: u128, exp: u128) -> u128 {
    match base {
        0 => u128::from(exp == 0),
        1 => 1,
        _ => {
            // With base ≥ 2 the accumulator saturates within 128 steps.
            let mut acc: u128 = 1;
            let mut i: u128 = 0;
            while i < exp {
                acc = acc.saturating_mul(base);
                if acc == u128::MAX {
                    return u128::MAX;
                }
                i += 1;
            }
            acc
        }
    }
}

/// Number of values of the carrier, saturating at `u128::MAX`.
pub fn carrier_count(ty: &CarrierTy) -> u128 {
    match ty {
        CarrierTy::Unit | CarrierTy::One => 1,
        CarrierTy::Bool => 2,
        CarrierTy::IntMod(m) => *m as u128,
        CarrierTy::Pair(a, b) => sat_mul(carrier_count(a), carrier_count(b)),
        CarrierTy::Fun(d, c) => sat_pow(carrier_count(c), carrier_count(d)),
        CarrierTy::EnvOver(m) => m.values().fold(1u128, |acc, t| sat_mul(acc, t.count())),
        CarrierTy::WritesOver(m) => m.values().fold(1u128, |acc, t| sat_mul(acc, t.count() + 1)),
        CarrierTy::TraceOver(seq) => seq.iter().fold(1u128, |acc, (_, t)| sat_mul(acc, t.count())),
    }
}

/// Enumerates every value of the carrier in a canonical order, or fails
/// with `DomainNotEnumerable` when the count exceeds `limit`.
pub fn enumerate_carrier(ty: &CarrierTy, limit: u128) -> Result<Vec<SemValue>, SemError> {
    let n = carrier_count(ty);
    if n > limit {
        return Err(SemError::DomainNotEnumerable(n, limit));
    }
    enumerate_unchecked(ty, limit)
}

fn enumerate_unchecked(ty: &CarrierTy, limit: u128) -> Result<Vec<SemValue>, SemError> {
    match ty {
        CarrierTy::Unit => Ok(vec![SemValue::Unit]),
        CarrierTy::One => Ok(vec![SemValue::Absent]),
        CarrierTy::Bool => Ok(vec![SemValue::Bool(false), SemValue::Bool(true)]),
        CarrierTy::IntMod(m) => Ok((0..*m).map(|k| SemValue::IntMod(k, *m)).collect()),
        CarrierTy::Pair(a, b) => {
            let xs = enumerate_carrier(a, limit)?;
            let ys = enumerate_carrier(b, limit)?;
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    out.push(SemValue::pair(x.clone(), y.clone()));
                }
            }
            Ok(out)
        }
        CarrierTy::EnvOver(m) => {
            let names: Vec<&String> = m.keys().collect();
            let choices: Vec<Vec<Scalar>> = m.values().map(|t| t.values()).collect();
            let mut out = Vec::new();
            for combo in mixed_radix(&choices) {
                let env: Env = names
                    .iter()
                    .zip(combo.iter())
                    .map(|(n, s)| ((**n).clone(), s.clone()))
                    .collect();
                out.push(SemValue::Env(env));
            }
            Ok(out)
        }
        CarrierTy::WritesOver(m) => {
            let names: Vec<&String> = m.keys().collect();
            // Option slot per name: absent first, then each value.
            let choices: Vec<Vec<Option<Scalar>>> = m
                .values()
                .map(|t| {
                    let mut v: Vec<Option<Scalar>> = vec![None];
                    v.extend(t.values().into_iter().map(Some));
                    v
                })
                .collect();
            let mut out = Vec::new();
            for combo in mixed_radix(&choices) {
                let env: Env = names
                    .iter()
                    .zip(combo.iter())
                    .filter_map(|(n, s)| s.clone().map(|s| ((**n).clone(), s)))
                    .collect();
                out.push(SemValue::Env(env));
            }
            Ok(out)
        }
        CarrierTy::TraceOver(seq) => {
            let choices: Vec<Vec<Scalar>> = seq.iter().map(|(_, t)| t.values()).collect();
            let mut out = Vec::new();
            for combo in mixed_radix(&choices) {
                let tr: Vec<(String, Scalar)> = seq
                    .iter()
                    .zip(combo.iter())
                    .map(|((tag, _), s)| (tag.clone(), s.clone()))
                    .collect();
                out.push(SemValue::Trace(tr));
            }
            Ok(out)
        }
        CarrierTy::Fun(d, c) => {
            let dom = enumerate_carrier(d, limit)?;
            let cod = enumerate_carrier(c, limit)?;
            let outputs_choices: Vec<Vec<SemValue>> = dom.iter().map(|_| cod.clone()).collect();
            let mut out = Vec::new();
            for combo in mixed_radix(&outputs_choices) {
                out.push(SemValue::fun_from_table(
                    (**d).clone(),
                    dom.clone(),
                    combo,
                ));
            }
            Ok(out)
        }
    }
}

/// All tuples drawing one element from each choice list, first position
/// slowest-varying (lexicographic in the choice indices).
fn mixed_radix<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for slot in choices {
        let mut next = Vec::with_capacity(out.len() * slot.len());
        for prefix in &out {
            for item in slot {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Draws a uniformly random value of the carrier. Function domains must be
/// enumerable within `fun_dom_limit` so a random graph can be tabulated.
pub fn sample_carrier<R: Rng>(
    ty: &CarrierTy,
    rng: &mut R,
    fun_dom_limit: u128,
) -> Result<SemValue, SemError> {
    match ty {
        CarrierTy::Unit => Ok(SemValue::Unit),
        CarrierTy::One => Ok(SemValue::Absent),
        CarrierTy::Bool => Ok(SemValue::Bool(rng.gen())),
        CarrierTy::IntMod(m) => Ok(SemValue::IntMod(rng.gen_range(0..*m), *m)),
        CarrierTy::Pair(a, b) => Ok(SemValue::pair(
            sample_carrier(a, rng, fun_dom_limit)?,
            sample_carrier(b, rng, fun_dom_limit)?,
        )),
        CarrierTy::EnvOver(m) => {
            let env: Env = m
                .iter()
                .map(|(n, t)| {
                    let vals = t.values();
                    (n.clone(), vals[rng.gen_range(0..vals.len())].clone())
                })
                .collect();
            Ok(SemValue::Env(env))
        }
        CarrierTy::WritesOver(m) => {
            let mut env = Env::new();
            for (n, t) in m {
                let vals = t.values();
                let k = rng.gen_range(0..=vals.len());
                if k < vals.len() {
                    env.insert(n.clone(), vals[k].clone());
                }
            }
            Ok(SemValue::Env(env))
        }
        CarrierTy::TraceOver(seq) => {
            let tr: Vec<(String, Scalar)> = seq
                .iter()
                .map(|(tag, t)| {
                    let vals = t.values();
                    (tag.clone(), vals[rng.gen_range(0..vals.len())].clone())
                })
                .collect();
            Ok(SemValue::Trace(tr))
        }
        CarrierTy::Fun(d, c) => {
            let dom = enumerate_carrier(d, fun_dom_limit)?;
            let mut outputs = Vec::with_capacity(dom.len());
            for _ in 0..dom.len() {
                outputs.push(sample_carrier(c, rng, fun_dom_limit)?);
            }
            Ok(SemValue::fun_from_table((**d).clone(), dom, outputs))
        }
    }
}

// ============================================================================
// Equality and rendering
// ============================================================================

/// Evaluation budget used when a table-backed function looks up its
/// argument extensionally.
const TABLE_LOOKUP_BUDGET: u64 = 1 << 16;

/// Default total-evaluation budget for extensional equality.
pub const DEFAULT_EQ_BUDGET: u64 = 1 << 20;

/// Per-comparison cap on a function domain during extensional equality.
pub const FUN_EQ_DOMAIN_LIMIT: u128 = 256;

/// Structural equality on first-order values, extensional equality on
/// functions: enumerate the domain (error beyond [`FUN_EQ_DOMAIN_LIMIT`])
/// and compare images, spending `budget` per application pair.
pub fn sem_eq(a: &SemValue, b: &SemValue, budget: &mut u64) -> Result<bool, SemError> {
    match (a, b) {
        (SemValue::Unit, SemValue::Unit) => Ok(true),
        (SemValue::Absent, SemValue::Absent) => Ok(true),
        (SemValue::Bool(x), SemValue::Bool(y)) => Ok(x == y),
        (SemValue::IntMod(k, m), SemValue::IntMod(l, n)) => Ok(k == l && m == n),
        (SemValue::Pair(a1, a2), SemValue::Pair(b1, b2)) => {
            Ok(sem_eq(a1, b1, budget)? && sem_eq(a2, b2, budget)?)
        }
        (SemValue::Env(x), SemValue::Env(y)) => Ok(x == y),
        (SemValue::Trace(x), SemValue::Trace(y)) => Ok(x == y),
        (SemValue::Fun(f), SemValue::Fun(g)) => {
            if f.domain != g.domain {
                return Ok(false);
            }
            let dom = enumerate_carrier(&f.domain, FUN_EQ_DOMAIN_LIMIT)?;
            for x in &dom {
                if *budget < 2 {
                    return Err(SemError::DomainNotEnumerable(dom.len() as u128, 0));
                }
                *budget -= 2;
                let fx = (f.apply)(x)?;
                let gx = (g.apply)(x)?;
                if !sem_eq(&fx, &gx, budget)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Equality with the default budget; convenient in tests.
pub fn sem_eq_default(a: &SemValue, b: &SemValue) -> Result<bool, SemError> {
    let mut budget = DEFAULT_EQ_BUDGET;
    sem_eq(a, b, &mut budget)
}

/// Renders a value for reports and counterexamples. Small function values
/// are tabulated; larger ones render opaquely.
pub fn render_value(v: &SemValue) -> String {
    match v {
        SemValue::Unit => "unit".to_string(),
        SemValue::Bool(b) => b.to_string(),
        SemValue::IntMod(k, _) => k.to_string(),
        SemValue::Pair(a, b) => format!("({}, {})", render_value(a), render_value(b)),
        SemValue::Env(e) => {
            let parts: Vec<String> = e.iter().map(|(n, s)| format!("{n}↦{s}")).collect();
            format!("{{{}}}", parts.join(", "))
        }
        SemValue::Trace(t) => {
            let parts: Vec<String> = t.iter().map(|(tag, s)| format!("{tag}:{s}")).collect();
            format!("[{}]", parts.join(", "))
        }
        SemValue::Absent => "·".to_string(),
        SemValue::Fun(f) => {
            const RENDER_DOM_LIMIT: u128 = 16;
            match enumerate_carrier(&f.domain, RENDER_DOM_LIMIT) {
                Ok(dom) => {
                    let parts: Vec<String> = dom
                        .iter()
                        .map(|x| match (f.apply)(x) {
                            Ok(y) => format!("{}↦{}", render_value(x), render_value(&y)),
                            Err(_) => format!("{}↦⊥", render_value(x)),
                        })
                        .collect();
                    format!("⟨{}⟩", parts.join(", "))
                }
                Err(_) => format!("⟨fun over {}⟩", f.domain),
            }
        }
    }
}
