//! Seeded law-breakers: copies of the shipped instances with exactly one
//! operation replaced by a plausible transcription mistake. The law
//! suites must catch every one of them — that is the evidence that the
//! suites test what they claim to.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{EffectAlgebra, EffectToken, Index};
use crate::comonad::{make_partiality_instance, IndexedComonadInstance};
use crate::error::SemError;
use crate::harness::{
    check_indexed_comonad_laws, check_indexed_monad_laws, Budget, LawReport,
};
use crate::monad::{make_memory_instance, make_reader_instance, restrict, IndexedMonadInstance};
use crate::value::{BaseTy, CarrierTy, SemValue};

/// Which structure a mutant perturbs, and therefore which suite hunts it.
#[derive(Clone)]
pub enum MutantSubject {
    Monad(IndexedMonadInstance),
    Comonad(IndexedComonadInstance),
}

pub struct Mutant {
    pub name: &'static str,
    /// The mistake, in one sentence.
    pub description: &'static str,
    /// The law expected to flag it (the suite may flag more).
    pub expected_law: &'static str,
    pub subject: MutantSubject,
}

/// Runs the appropriate suite against a mutant. Returns the reports and
/// whether any law failed — `true` means the mutant was caught.
pub fn check_mutant(m: &Mutant, budget: &Budget) -> (Vec<LawReport>, bool) {
    let value_tys = vec![CarrierTy::Bool, CarrierTy::IntMod(4)];
    let reports = match &m.subject {
        MutantSubject::Monad(inst) => check_indexed_monad_laws(inst, &value_tys, budget),
        MutantSubject::Comonad(inst) => check_indexed_comonad_laws(inst, &value_tys, budget),
    };
    let caught = reports.iter().any(LawReport::failed);
    (reports, caught)
}

/// The standard mutant battery.
pub fn standard_mutants() -> Vec<Mutant> {
    vec![
        reader_mu_swapped(),
        reader_strength_flipped(),
        memory_mu_first_write_wins(),
        partiality_delta_collapses(),
        partiality_mzip_or(),
    ]
}

fn reader_sig() -> BTreeMap<String, BaseTy> {
    [
        ("p".to_string(), BaseTy::IntMod(4)),
        ("q".to_string(), BaseTy::Bool),
    ]
    .into_iter()
    .collect()
}

fn env_carrier(names: &BTreeSet<String>, sig: &BTreeMap<String, BaseTy>) -> CarrierTy {
    CarrierTy::EnvOver(
        names
            .iter()
            .map(|n| (n.clone(), *sig.get(n).expect("name in signature")))
            .collect(),
    )
}

/// The reader `μ` with its two restrictions exchanged: the outer
/// computation is fed the inner's slice of the environment and vice
/// versa. Well-defined only when `F = G`; the unit laws already feed it
/// mismatched slices.
fn reader_mu_swapped() -> Mutant {
    let sig = reader_sig();
    let alg = EffectAlgebra::powerset(
        sig.keys().map(|p| EffectToken::ImplicitParam(p.clone())),
    );
    let mut inst = make_reader_instance(&sig, alg.clone());
    inst.name = "reader-mu-swapped".to_string();
    let mu_sig = sig;
    inst.mu = Arc::new(move |f: &Index, g: &Index, k: &SemValue| {
        let fg = alg.combine(f, g)?;
        let names = fg.param_names();
        let f_names = f.param_names();
        let g_names = g.param_names();
        let dom = env_carrier(&names, &mu_sig);
        let k = k.clone();
        Ok(SemValue::fun(dom, move |x| {
            let env = x.as_env().ok_or_else(|| {
                SemError::IndexMismatch("expected an environment value".to_string())
            })?;
            // Swapped: k gets the G-slice, its result the F-slice.
            let inner = k.apply(&SemValue::Env(restrict(env, &g_names)))?;
            inner.apply(&SemValue::Env(restrict(env, &f_names)))
        }))
    });
    Mutant {
        name: "reader-mu-swapped",
        description: "μ feeds the outer computation the inner's environment slice",
        expected_law: "left-unit",
        subject: MutantSubject::Monad(inst),
    }
}

/// A strength that builds its pair the wrong way round.
fn reader_strength_flipped() -> Mutant {
    let sig = reader_sig();
    let alg = EffectAlgebra::powerset(
        sig.keys().map(|p| EffectToken::ImplicitParam(p.clone())),
    );
    let mut inst = make_reader_instance(&sig, alg);
    inst.name = "reader-strength-flipped".to_string();
    let st_sig = sig;
    inst.strength = Arc::new(move |f: &Index, a: &SemValue, t: &SemValue| {
        let names = f.param_names();
        let dom = env_carrier(&names, &st_sig);
        let a = a.clone();
        let t = t.clone();
        Ok(SemValue::fun(dom, move |x| {
            Ok(SemValue::pair(t.apply(x)?, a.clone()))
        }))
    });
    Mutant {
        name: "reader-strength-flipped",
        description: "τ pairs the computed value on the left instead of the right",
        expected_law: "strength-discard",
        subject: MutantSubject::Monad(inst),
    }
}

/// The memory `μ` with first-write-wins merging. Store threading is kept
/// correct, so only the *reported* writes are wrong — a mistake invisible
/// to both unit laws and caught by associativity with a read after two
/// writes.
fn memory_mu_first_write_wins() -> Mutant {
    let regions: BTreeMap<String, BaseTy> =
        [("r".to_string(), BaseTy::IntMod(4))].into_iter().collect();
    let alg = EffectAlgebra::powerset([
        EffectToken::Read("r".to_string()),
        EffectToken::Write("r".to_string()),
    ]);
    let mut inst = make_memory_instance(&regions, alg.clone());
    inst.name = "memory-mu-first-write-wins".to_string();
    let mu_sig = regions;
    inst.mu = Arc::new(move |f: &Index, g: &Index, h: &SemValue| {
        let fg = alg.combine(f, g)?;
        let reads = fg.read_regions();
        let f_reads = f.read_regions();
        let g_reads = g.read_regions();
        let dom = env_carrier(&reads, &mu_sig);
        let h = h.clone();
        Ok(SemValue::fun(dom, move |s| {
            let store = s.as_env().ok_or_else(|| {
                SemError::IndexMismatch("expected a store value".to_string())
            })?;
            let outer = h.apply(&SemValue::Env(restrict(store, &f_reads)))?;
            let (k, w1v) = match outer {
                SemValue::Pair(a, b) => ((*a).clone(), (*b).clone()),
                _ => {
                    return Err(SemError::IndexMismatch(
                        "expected a pair value".to_string(),
                    ))
                }
            };
            let w1 = w1v
                .as_env()
                .ok_or_else(|| {
                    SemError::IndexMismatch("performed writes must be an environment".to_string())
                })?
                .clone();
            let mut s2 = restrict(store, &g_reads);
            for (r, v) in &w1 {
                if g_reads.contains(r) {
                    s2.insert(r.clone(), v.clone());
                }
            }
            let inner = k.apply(&SemValue::Env(s2))?;
            let (a, w2v) = match inner {
                SemValue::Pair(a, b) => ((*a).clone(), (*b).clone()),
                _ => {
                    return Err(SemError::IndexMismatch(
                        "expected a pair value".to_string(),
                    ))
                }
            };
            let w2 = w2v
                .as_env()
                .ok_or_else(|| {
                    SemError::IndexMismatch("performed writes must be an environment".to_string())
                })?
                .clone();
            // The mistake: the earlier write survives a conflict.
            let mut w = w2;
            for (r, v) in &w1 {
                w.insert(r.clone(), v.clone());
            }
            Ok(SemValue::pair(a, SemValue::Env(w)))
        }))
    });
    Mutant {
        name: "memory-mu-first-write-wins",
        description: "μ merges performed writes with the earlier write winning",
        expected_law: "associativity",
        subject: MutantSubject::Monad(inst),
    }
}

/// A `δ` that collapses even the fully live grade to the one-point
/// object.
fn partiality_delta_collapses() -> Mutant {
    let mut inst = make_partiality_instance();
    inst.name = "partiality-delta-collapses".to_string();
    inst.delta = Arc::new(|_: &Index, _: &Index, _: &SemValue| Ok(SemValue::Absent));
    Mutant {
        name: "partiality-delta-collapses",
        description: "δ returns the one-point value at every grade",
        expected_law: "counit-left",
        subject: MutantSubject::Comonad(inst),
    }
}

/// An `m` graded by disjunction: a zip that claims liveness when either
/// side is live, and so must emit pairs with a missing component.
fn partiality_mzip_or() -> Mutant {
    let mut inst = make_partiality_instance();
    inst.name = "partiality-mzip-or".to_string();
    inst.vee = Arc::new(|f: &Index, g: &Index| match (f, g) {
        (Index::Flag(a), Index::Flag(b)) => Ok(Index::Flag(*a || *b)),
        _ => Err(SemError::AlgebraMismatch(
            "partiality comonad used with non-flag index".to_string(),
        )),
    });
    inst.mzip = Arc::new(|f: &Index, g: &Index, d1: &SemValue, d2: &SemValue| {
        match (f, g) {
            (Index::Flag(a), Index::Flag(b)) => Ok(if *a || *b {
                SemValue::pair(d1.clone(), d2.clone())
            } else {
                SemValue::Absent
            }),
            _ => Err(SemError::AlgebraMismatch(
                "partiality comonad used with non-flag index".to_string(),
            )),
        }
    });
    Mutant {
        name: "partiality-mzip-or",
        description: "m grades by ∨-as-disjunction and pairs up missing components",
        expected_law: "mzip-carrier",
        subject: MutantSubject::Comonad(inst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_mutant_is_caught_by_its_expected_law() {
        for m in standard_mutants() {
            let (reports, caught) = check_mutant(&m, &Budget::default());
            assert!(caught, "mutant {} slipped through:\n{reports:#?}", m.name);
            let flagged: Vec<&str> = reports
                .iter()
                .filter(|r| r.failed())
                .map(|r| r.law.as_str())
                .collect();
            assert!(
                flagged.contains(&m.expected_law),
                "mutant {} was caught by {flagged:?}, expected {} among them",
                m.name,
                m.expected_law
            );
        }
    }

    #[test]
    fn pristine_instances_pass_where_mutants_fail() {
        // The same configurations, unmutated, are clean — the catches are
        // not artifacts of the mutant signatures.
        let budget = Budget::default();
        let value_tys = vec![CarrierTy::Bool, CarrierTy::IntMod(4)];

        let sig = reader_sig();
        let alg = EffectAlgebra::powerset(
            sig.keys().map(|p| EffectToken::ImplicitParam(p.clone())),
        );
        let reader = make_reader_instance(&sig, alg);
        assert!(crate::harness::all_ok(&check_indexed_monad_laws(
            &reader, &value_tys, &budget
        )));

        let regions: BTreeMap<String, BaseTy> =
            [("r".to_string(), BaseTy::IntMod(4))].into_iter().collect();
        let alg = EffectAlgebra::powerset([
            EffectToken::Read("r".to_string()),
            EffectToken::Write("r".to_string()),
        ]);
        let memory = make_memory_instance(&regions, alg);
        assert!(crate::harness::all_ok(&check_indexed_monad_laws(
            &memory, &value_tys, &budget
        )));

        let partiality = make_partiality_instance();
        assert!(crate::harness::all_ok(&check_indexed_comonad_laws(
            &partiality,
            &value_tys,
            &budget
        )));
    }
}
