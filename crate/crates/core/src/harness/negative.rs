//! Exhaustive negative results: structures that provably do *not* exist.
//!
//! Both checks quantify over **every** candidate on domains of at most
//! four elements, so a pass is a finite proof, not a sampling claim.

use std::collections::BTreeMap;

use crate::algebra::{EffectAlgebra, EffectToken, Index};
use crate::harness::{LawReport, LawVerdict};
use crate::monad::{make_memory_exact_instance, sem_fn};
use crate::value::{
    enumerate_carrier, render_value, sem_eq_default, BaseTy, CarrierTy, SemValue,
};

/// The write fiber of the exact memory carrier (`T {wr ρ} A = A × τ`) is
/// closed under `μ` — `{wr ρ} ⊗ {wr ρ} = {wr ρ}` — yet admits no unit:
/// every candidate `η : A → T A` at `A = bool` violates the right unit
/// law `μ ∘ T η = id`, because the write slot is total and the candidate
/// must overwrite whatever write the input already carries.
///
/// Any unit for the fiber would have a component at `bool`, and the right
/// unit law at `bool` mentions only that component, so checking all 16
/// components (|T bool| = 4, both domains ≤ 4) rules out every family.
pub fn check_fiber_not_monad() -> LawReport {
    let law = "memory-exact-fiber-no-unit".to_string();
    let fail = |counterexample: String| LawReport {
        law: law.clone(),
        verdict: LawVerdict::Fail { counterexample },
    };

    let regions: BTreeMap<String, BaseTy> =
        [("r".to_string(), BaseTy::Bool)].into_iter().collect();
    let alg = EffectAlgebra::powerset([EffectToken::Write("r".to_string())]);
    let inst = make_memory_exact_instance(&regions, alg.clone());
    let f = Index::singleton(EffectToken::Write("r".to_string()));

    // The fiber is only a monad candidate because its index is idempotent.
    match alg.combine(&f, &f) {
        Ok(ff) if ff == f => {}
        other => {
            return fail(format!("{f} is not idempotent: {f} ⊗ {f} = {other:?}"));
        }
    }

    let run = || -> Result<Option<String>, crate::error::SemError> {
        let tf_bool = inst.carrier_of(&f, &CarrierTy::Bool)?;
        let points = enumerate_carrier(&tf_bool, 16)?;
        let candidates = enumerate_carrier(&CarrierTy::fun(CarrierTy::Bool, tf_bool), 64)?;
        for eta in &candidates {
            let eta_fn = {
                let eta = eta.clone();
                sem_fn(move |v| eta.apply(v))
            };
            let mut witness = None;
            for t in &points {
                let lhs = inst.mu(&f, &f, &inst.fmap(&f, &eta_fn, t)?)?;
                if !sem_eq_default(&lhs, t)? {
                    witness = Some(t.clone());
                    break;
                }
            }
            if witness.is_none() {
                return Ok(Some(format!(
                    "candidate unit {} satisfies μ ∘ T η = id on the whole fiber",
                    render_value(eta)
                )));
            }
        }
        Ok(None)
    };

    match run() {
        Ok(None) => LawReport {
            law,
            verdict: LawVerdict::Pass { cases: 16 },
        },
        Ok(Some(cex)) => fail(cex),
        Err(e) => fail(format!("check aborted: {e}")),
    }
}

/// The *unindexed* partiality functor `D A = 1 + A` is not a comonad: it
/// has no counit. Every candidate `ε : D bool → bool` (all 8 functions on
/// the 3-element domain) breaks naturality against one of the four maps
/// `bool → bool` — the absent point would have to be sent somewhere, and
/// the two constant maps disagree about where. The *indexed* version
/// escapes because `ε` is only required at the live grade.
pub fn check_unindexed_partiality_no_counit() -> LawReport {
    let law = "unindexed-partiality-no-counit".to_string();

    // D bool, in a fixed order: the absent point, then the booleans.
    let d_bool = [
        SemValue::Absent,
        SemValue::Bool(false),
        SemValue::Bool(true),
    ];
    let apply_df = |f: &dyn Fn(bool) -> bool, x: &SemValue| match x {
        SemValue::Absent => SemValue::Absent,
        SemValue::Bool(b) => SemValue::Bool(f(*b)),
        _ => unreachable!("D bool has three points"),
    };
    let endomaps: [&dyn Fn(bool) -> bool; 4] =
        [&|_| false, &|_| true, &|b| b, &|b| !b];

    let mut checked = 0u64;
    // A candidate is a table over the three points of D bool.
    for table in 0u8..8 {
        let eps = |x: &SemValue| -> bool {
            let slot = match x {
                SemValue::Absent => 0,
                SemValue::Bool(false) => 1,
                SemValue::Bool(true) => 2,
                _ => unreachable!("D bool has three points"),
            };
            table & (1u8 << slot) != 0
        };
        let mut broken = false;
        'outer: for f in &endomaps {
            for x in &d_bool {
                // Naturality: ε(D f x) = f(ε(x)).
                if eps(&apply_df(f, x)) != f(eps(x)) {
                    broken = true;
                    break 'outer;
                }
            }
        }
        if !broken {
            let rendered: Vec<String> = d_bool
                .iter()
                .map(|p| format!("{}↦{}", render_value(p), eps(p)))
                .collect();
            return LawReport {
                law,
                verdict: LawVerdict::Fail {
                    counterexample: format!(
                        "candidate counit {{{}}} is natural",
                        rendered.join(", ")
                    ),
                },
            };
        }
        checked += 1;
    }

    LawReport {
        law,
        verdict: LawVerdict::Pass { cases: checked },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_write_fiber_has_no_unit() {
        let report = check_fiber_not_monad();
        assert!(report.ok(), "{report}");
        assert!(matches!(report.verdict, LawVerdict::Pass { cases: 16 }));
    }

    #[test]
    fn unindexed_partiality_has_no_counit() {
        let report = check_unindexed_partiality_no_counit();
        assert!(report.ok(), "{report}");
        assert!(matches!(report.verdict, LawVerdict::Pass { cases: 8 }));
    }
}
