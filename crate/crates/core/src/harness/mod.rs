//! Law checking for indexed monads and comonads.
//!
//! Every law is quantified over indices drawn from the instance's algebra
//! and over values drawn from semantic carriers. Quantification is
//! two-tier: a carrier whose size fits under [`Budget::exhaust_cap`] is
//! enumerated exhaustively, anything larger is sampled (seeded, so every
//! run of the same configuration checks the same cases). A law that only
//! ever saw exhaustive tiers reports [`LawVerdict::Pass`]; one that
//! sampled anywhere reports [`LawVerdict::SampledPass`].
//!
//! Total work is bounded by [`Budget::evals`] *per law*; a law that runs
//! out reports [`LawVerdict::BudgetExceeded`] rather than silently
//! checking less than it claims. Laws that do not apply to an instance —
//! `ι` compatibility on an orderless algebra — report
//! [`LawVerdict::Inapplicable`].
//!
//! A semantic error while checking (an operation rejecting a value of its
//! own carrier, say) is reported as a failure of that law: a lawful
//! instance must be total on its carriers. This is exactly how most
//! seeded mutants surface.

pub mod comonad_laws;
pub mod monad_laws;
pub mod mutants;
pub mod negative;
pub mod oracle;

use std::fmt;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{EffectAlgebra, Index};
use crate::error::SemError;
use crate::value::{
    carrier_count, enumerate_carrier, sample_carrier, sem_eq, CarrierTy, SemValue,
};

pub use comonad_laws::check_indexed_comonad_laws;
pub use monad_laws::{check_indexed_monad_laws, default_value_types};
pub use mutants::{standard_mutants, check_mutant, Mutant, MutantSubject};
pub use negative::{check_fiber_not_monad, check_unindexed_partiality_no_counit};
pub use oracle::{oracle_eval_program, OracleOutcome, OracleVal};

// ============================================================================
// Budgets, verdicts, reports
// ============================================================================

/// Work limits for one law-suite invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Evaluation budget per law. Equality checks and case iterations
    /// draw from it.
    pub evals: u64,
    /// Largest carrier that is still enumerated exhaustively.
    pub exhaust_cap: u128,
    /// Sample count used above the exhaustive tier.
    pub sample_k: usize,
    /// Seed for every sampling decision.
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x1d5eed;

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            evals: 1 << 20,
            exhaust_cap: 512,
            sample_k: 24,
            seed: DEFAULT_SEED,
        }
    }
}

/// Outcome of checking one law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawVerdict {
    /// Held on every case, all quantifiers exhaustive.
    Pass { cases: u64 },
    /// Held on every checked case, at least one quantifier sampled.
    SampledPass { cases: u64 },
    /// Violated; the witness, rendered.
    Fail { counterexample: String },
    /// The evaluation budget ran out before the quantifiers did.
    BudgetExceeded,
    /// The law does not apply to this instance.
    Inapplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub law: String,
    pub verdict: LawVerdict,
}

impl LawReport {
    /// Whether this report is acceptable for a lawful instance.
    pub fn ok(&self) -> bool {
        matches!(
            self.verdict,
            LawVerdict::Pass { .. } | LawVerdict::SampledPass { .. } | LawVerdict::Inapplicable { .. }
        )
    }

    pub fn failed(&self) -> bool {
        matches!(self.verdict, LawVerdict::Fail { .. })
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            LawVerdict::Pass { cases } => write!(f, "{}: pass ({cases} cases)", self.law),
            LawVerdict::SampledPass { cases } => {
                write!(f, "{}: pass ({cases} cases, sampled)", self.law)
            }
            LawVerdict::Fail { counterexample } => {
                write!(f, "{}: FAIL — {counterexample}", self.law)
            }
            LawVerdict::BudgetExceeded => write!(f, "{}: budget exceeded", self.law),
            LawVerdict::Inapplicable { reason } => write!(f, "{}: n/a ({reason})", self.law),
        }
    }
}

pub fn all_ok(reports: &[LawReport]) -> bool {
    reports.iter().all(LawReport::ok)
}

// ============================================================================
// The case runner
// ============================================================================

/// Control flow inside a law body: counterexample, exhausted budget, or a
/// semantic error (which the caller converts into a failure).
#[derive(Debug)]
pub(crate) enum LawFlow {
    Cex(String),
    Budget,
    Sem(SemError),
}

impl From<SemError> for LawFlow {
    fn from(e: SemError) -> LawFlow {
        match e {
            // The marker `sem_eq` leaves when its budget runs dry.
            SemError::DomainNotEnumerable(_, 0) => LawFlow::Budget,
            other => LawFlow::Sem(other),
        }
    }
}

impl From<crate::error::AlgebraError> for LawFlow {
    fn from(e: crate::error::AlgebraError) -> LawFlow {
        LawFlow::Sem(SemError::Algebra(e))
    }
}

/// Per-law quantification state: the sampling rng, remaining evaluations,
/// and whether any tier fell back to sampling.
pub(crate) struct Runner {
    exhaust_cap: u128,
    sample_k: usize,
    evals: u64,
    rng: ChaCha8Rng,
    sampled: bool,
    cases: u64,
}

/// Domain-enumeration limit when tabulating a sampled function value.
const SAMPLE_FUN_DOM_LIMIT: u128 = 4096;

impl Runner {
    fn new(budget: &Budget, law_ordinal: u64) -> Runner {
        Runner {
            exhaust_cap: budget.exhaust_cap,
            sample_k: budget.sample_k,
            evals: budget.evals,
            // Decorrelate laws without making one law's case list depend
            // on how many cases its predecessors drew.
            rng: ChaCha8Rng::seed_from_u64(
                budget.seed ^ law_ordinal.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            ),
            sampled: false,
            cases: 0,
        }
    }

    /// Records one successfully checked case.
    pub(crate) fn case(&mut self) {
        self.cases += 1;
    }

    /// Spends `n` evaluations of budget.
    pub(crate) fn charge(&mut self, n: u64) -> Result<(), LawFlow> {
        if self.evals < n {
            return Err(LawFlow::Budget);
        }
        self.evals -= n;
        Ok(())
    }

    /// Budgeted extensional equality.
    pub(crate) fn eq(&mut self, a: &SemValue, b: &SemValue) -> Result<bool, LawFlow> {
        let before = self.evals;
        let mut remaining = before;
        let r = sem_eq(a, b, &mut remaining);
        self.evals = remaining.min(before);
        Ok(r?)
    }

    /// The values of a carrier: exhaustive below the cap, sampled above.
    pub(crate) fn values(&mut self, ty: &CarrierTy) -> Result<Vec<SemValue>, LawFlow> {
        self.values_capped(ty, self.exhaust_cap, self.sample_k)
    }

    /// Like [`Runner::values`] with a custom tier boundary — used for
    /// quantifiers that multiply (function arguments in composition laws).
    pub(crate) fn values_capped(
        &mut self,
        ty: &CarrierTy,
        exhaust_cap: u128,
        k: usize,
    ) -> Result<Vec<SemValue>, LawFlow> {
        if carrier_count(ty) <= exhaust_cap {
            Ok(enumerate_carrier(ty, exhaust_cap)?)
        } else {
            self.sampled = true;
            (0..k)
                .map(|_| Ok(sample_carrier(ty, &mut self.rng, SAMPLE_FUN_DOM_LIMIT)?))
                .collect()
        }
    }

    /// The algebra's indices, subsampled above `cap`.
    pub(crate) fn indices(&mut self, alg: &EffectAlgebra, cap: usize) -> Vec<Index> {
        let all = alg.carrier();
        if all.len() <= cap {
            return all;
        }
        self.sampled = true;
        sample_indices(&mut self.rng, all.len(), cap)
            .iter()
            .map(|i| all[i].clone())
            .collect()
    }

    /// Tuples of indices, full cartesian power below `cap` tuples. Above the
    /// cap, tuples are rejection-sampled until their left-to-right product is
    /// defined: partial monoids (bounded traces) are sparse, and uniform
    /// tuples would almost always fall outside the domain the law quantifies
    /// over. The all-units tuple keeps the result nonempty regardless.
    pub(crate) fn index_tuples(
        &mut self,
        alg: &EffectAlgebra,
        arity: u32,
        cap: usize,
    ) -> Vec<Vec<Index>> {
        let base = alg.carrier();
        let total = (base.len() as u128).saturating_pow(arity);
        if total <= cap as u128 {
            let mut out: Vec<Vec<Index>> = vec![Vec::new()];
            for _ in 0..arity {
                let mut next = Vec::with_capacity(out.len() * base.len());
                for prefix in &out {
                    for ix in &base {
                        let mut row = prefix.clone();
                        row.push(ix.clone());
                        next.push(row);
                    }
                }
                out = next;
            }
            return out;
        }
        self.sampled = true;
        let mut out: Vec<Vec<Index>> = Vec::with_capacity(cap);
        let mut attempts = 0usize;
        while out.len() < cap && attempts < cap.saturating_mul(256) {
            attempts += 1;
            let row: Vec<Index> = (0..arity)
                .map(|_| base[self.rng.gen_range(0..base.len())].clone())
                .collect();
            let mut acc = row[0].clone();
            let defined = row[1..].iter().all(|ix| match alg.combine(&acc, ix) {
                Ok(next) => {
                    acc = next;
                    true
                }
                Err(_) => false,
            });
            if defined {
                out.push(row);
            }
        }
        if out.is_empty() {
            out.push(vec![alg.unit(); arity as usize]);
        }
        out
    }

    /// Ordered pairs `(x, y)` with `x ⊑ y`, subsampled above `cap`.
    pub(crate) fn leq_pairs(
        &mut self,
        alg: &EffectAlgebra,
        cap: usize,
    ) -> Result<Vec<(Index, Index)>, LawFlow> {
        let base = alg.carrier();
        let mut pairs = Vec::new();
        for x in &base {
            for y in &base {
                if alg.leq(x, y)? {
                    pairs.push((x.clone(), y.clone()));
                }
            }
        }
        if pairs.len() > cap {
            self.sampled = true;
            pairs = sample_indices(&mut self.rng, pairs.len(), cap)
                .iter()
                .map(|i| pairs[i].clone())
                .collect();
        }
        Ok(pairs)
    }
}

/// Runs one law body and folds its outcome into a report.
pub(crate) fn run_law(
    budget: &Budget,
    ordinal: u64,
    law: &str,
    body: impl FnOnce(&mut Runner) -> Result<(), LawFlow>,
) -> LawReport {
    let mut runner = Runner::new(budget, ordinal);
    let verdict = match body(&mut runner) {
        Ok(()) => {
            if runner.cases == 0 {
                // A law that never reached a checkable case must not call
                // itself a pass; genuinely inapplicable laws say so up front.
                LawVerdict::Fail {
                    counterexample: "vacuous: the quantifier domain produced no checkable case"
                        .to_string(),
                }
            } else if runner.sampled {
                LawVerdict::SampledPass { cases: runner.cases }
            } else {
                LawVerdict::Pass { cases: runner.cases }
            }
        }
        Err(LawFlow::Cex(counterexample)) => LawVerdict::Fail { counterexample },
        Err(LawFlow::Budget) => LawVerdict::BudgetExceeded,
        Err(LawFlow::Sem(e)) => LawVerdict::Fail {
            counterexample: format!("operation failed on its own carrier: {e}"),
        },
    };
    LawReport {
        law: law.to_string(),
        verdict,
    }
}

pub(crate) fn inapplicable(law: &str, reason: &str) -> LawReport {
    LawReport {
        law: law.to_string(),
        verdict: LawVerdict::Inapplicable {
            reason: reason.to_string(),
        },
    }
}
