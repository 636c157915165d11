//! The indexed-comonad law suite.
//!
//! `D` is the functor family, `ε` the counit at the algebra's unit index,
//! `δ_{F,G}` the graded comultiplication, `m_{F,G}` the semi-monoidal zip
//! landing at `F ∨ G`. The suite includes a carrier-membership law for
//! `m`: its result must inhabit `D_{F∨G}(A×B)` exactly, which is the law
//! that pins `∨` down (a too-optimistic `∨` would have to invent missing
//! components).

use super::{run_law, Budget, LawFlow, LawReport, Runner};
use crate::comonad::IndexedComonadInstance;
use crate::error::SemError;
use crate::monad::{sem_fn, SemFn};
use crate::value::{enumerate_carrier, render_value, CarrierTy, SemValue};

pub fn default_value_types() -> Vec<CarrierTy> {
    vec![CarrierTy::Bool, CarrierTy::IntMod(4)]
}

fn as_semfn(v: &SemValue) -> SemFn {
    let v = v.clone();
    sem_fn(move |x| v.apply(x))
}

fn cex(law: &str, detail: String) -> LawFlow {
    LawFlow::Cex(format!("{law}: {detail}"))
}

pub fn check_indexed_comonad_laws(
    inst: &IndexedComonadInstance,
    value_tys: &[CarrierTy],
    budget: &Budget,
) -> Vec<LawReport> {
    let mut reports = Vec::new();
    let mut ordinal = 100u64;
    let mut law = |name: &str,
                   reports: &mut Vec<LawReport>,
                   body: &dyn Fn(&mut Runner) -> Result<(), LawFlow>| {
        ordinal += 1;
        reports.push(run_law(budget, ordinal, name, body));
    };

    law("fmap-identity", &mut reports, &|r| {
        fmap_identity(r, inst, value_tys)
    });
    law("fmap-composition", &mut reports, &|r| {
        fmap_composition(r, inst, value_tys)
    });
    law("epsilon-naturality", &mut reports, &|r| {
        epsilon_naturality(r, inst, value_tys)
    });
    law("delta-naturality", &mut reports, &|r| {
        delta_naturality(r, inst, value_tys)
    });
    law("counit-left", &mut reports, &|r| {
        counit_left(r, inst, value_tys)
    });
    law("counit-right", &mut reports, &|r| {
        counit_right(r, inst, value_tys)
    });
    law("coassociativity", &mut reports, &|r| {
        coassociativity(r, inst, value_tys)
    });
    law("mzip-carrier", &mut reports, &|r| {
        mzip_carrier(r, inst, value_tys)
    });
    law("mzip-naturality", &mut reports, &|r| {
        mzip_naturality(r, inst, value_tys)
    });
    law("mzip-associativity", &mut reports, &|r| {
        mzip_associativity(r, inst, value_tys)
    });
    law("mzip-epsilon", &mut reports, &|r| {
        mzip_epsilon(r, inst, value_tys)
    });

    reports
}

// ============================================================================
// Functor and counit laws
// ============================================================================

fn fmap_identity(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let id: SemFn = sem_fn(|v| Ok(v.clone()));
    for f in r.indices(&inst.algebra, 8) {
        for a in tys {
            let dfa = inst.carrier_of(&f, a)?;
            for d in r.values(&dfa)? {
                r.charge(1)?;
                let lhs = inst.fmap(&f, &id, &d)?;
                if !r.eq(&lhs, &d)? {
                    return Err(cex(
                        "D_F id ≠ id",
                        format!("F = {f}, d = {}", render_value(&d)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn fmap_composition(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    for f in r.indices(&inst.algebra, 8) {
        for a in tys {
            let endo = CarrierTy::fun(a.clone(), a.clone());
            let fns = r.values_capped(&endo, 16, 4)?;
            let dfa = inst.carrier_of(&f, a)?;
            let values = r.values_capped(&dfa, 64, 8)?;
            for g1 in &fns {
                for g2 in &fns {
                    let (g1f, g2f) = (as_semfn(g1), as_semfn(g2));
                    let composed: SemFn = {
                        let (g1f, g2f) = (g1f.clone(), g2f.clone());
                        sem_fn(move |v| g2f(&g1f(v)?))
                    };
                    for d in &values {
                        r.charge(1)?;
                        let lhs = inst.fmap(&f, &composed, d)?;
                        let rhs = inst.fmap(&f, &g2f, &inst.fmap(&f, &g1f, d)?)?;
                        if !r.eq(&lhs, &rhs)? {
                            return Err(cex(
                                "D_F (g∘f) ≠ D_F g ∘ D_F f",
                                format!("F = {f}, d = {}", render_value(d)),
                            ));
                        }
                        r.case();
                    }
                }
            }
        }
    }
    Ok(())
}

fn epsilon_naturality(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    for a in tys {
        let endo = CarrierTy::fun(a.clone(), a.clone());
        let fns = r.values_capped(&endo, 16, 4)?;
        let d1a = inst.carrier_of(&unit, a)?;
        for g in &fns {
            let gf = as_semfn(g);
            for d in r.values(&d1a)? {
                r.charge(1)?;
                let lhs = gf(&inst.epsilon(&d)?)?;
                let rhs = inst.epsilon(&inst.fmap(&unit, &gf, &d)?)?;
                if !r.eq(&lhs, &rhs)? {
                    return Err(cex(
                        "f ∘ ε ≠ ε ∘ D_1 f",
                        format!("d = {}", render_value(&d)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn delta_naturality(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    for pair in r.index_tuples(alg, 2, 24) {
        let (f, g) = (&pair[0], &pair[1]);
        let Ok(fg) = alg.combine(f, g) else { continue };
        for a in tys {
            let endo = CarrierTy::fun(a.clone(), a.clone());
            let fns = r.values_capped(&endo, 16, 4)?;
            let dfga = inst.carrier_of(&fg, a)?;
            for h in &fns {
                let hf = as_semfn(h);
                let inner: SemFn = {
                    let (inst2, g2, hf2) = (inst.clone(), g.clone(), hf.clone());
                    sem_fn(move |u| inst2.fmap(&g2, &hf2, u))
                };
                for d in r.values(&dfga)? {
                    r.charge(1)?;
                    let lhs = inst.fmap(f, &inner, &inst.delta(f, g, &d)?)?;
                    let rhs = inst.delta(f, g, &inst.fmap(&fg, &hf, &d)?)?;
                    if !r.eq(&lhs, &rhs)? {
                        return Err(cex(
                            "D_F (D_G f) ∘ δ ≠ δ ∘ D_{F⊗G} f",
                            format!("F = {f}, G = {g}, d = {}", render_value(&d)),
                        ));
                    }
                    r.case();
                }
            }
        }
    }
    Ok(())
}

fn counit_left(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    for g in r.indices(&inst.algebra, 8) {
        if inst.algebra.combine(&unit, &g).is_err() {
            continue;
        }
        for a in tys {
            let dga = inst.carrier_of(&g, a)?;
            for d in r.values(&dga)? {
                r.charge(1)?;
                let lhs = inst.epsilon(&inst.delta(&unit, &g, &d)?)?;
                if !r.eq(&lhs, &d)? {
                    return Err(cex(
                        "ε ∘ δ_{1,G} ≠ id",
                        format!("G = {g}, d = {}", render_value(&d)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn counit_right(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    let eps: SemFn = {
        let inst2 = inst.clone();
        sem_fn(move |u| inst2.epsilon(u))
    };
    for f in r.indices(&inst.algebra, 8) {
        if inst.algebra.combine(&f, &unit).is_err() {
            continue;
        }
        for a in tys {
            let dfa = inst.carrier_of(&f, a)?;
            for d in r.values(&dfa)? {
                r.charge(1)?;
                let lhs = inst.fmap(&f, &eps, &inst.delta(&f, &unit, &d)?)?;
                if !r.eq(&lhs, &d)? {
                    return Err(cex(
                        "D_F ε ∘ δ_{F,1} ≠ id",
                        format!("F = {f}, d = {}", render_value(&d)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn coassociativity(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    for triple in r.index_tuples(alg, 3, 48) {
        let (f, g, h) = (&triple[0], &triple[1], &triple[2]);
        let Ok(fg) = alg.combine(f, g) else { continue };
        let Ok(gh) = alg.combine(g, h) else { continue };
        let Ok(fgh) = alg.combine(&fg, h) else { continue };
        for a in tys {
            let source = inst.carrier_of(&fgh, a)?;
            let inner_delta: SemFn = {
                let (inst2, g2, h2) = (inst.clone(), g.clone(), h.clone());
                sem_fn(move |u| inst2.delta(&g2, &h2, u))
            };
            for d in r.values(&source)? {
                r.charge(1)?;
                let lhs = inst.fmap(f, &inner_delta, &inst.delta(f, &gh, &d)?)?;
                let rhs = inst.delta(f, g, &inst.delta(&fg, h, &d)?)?;
                if !r.eq(&lhs, &rhs)? {
                    return Err(cex(
                        "D_F δ ∘ δ ≠ δ ∘ δ",
                        format!("F = {f}, G = {g}, H = {h}, d = {}", render_value(&d)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

// ============================================================================
// Semi-monoidal zip laws
// ============================================================================

/// `m_{F,G}` must land exactly in the carrier of `D_{F∨G}(A×B)`. This is
/// the membership obligation that forces `∨` to under-approximate: a
/// grade claiming liveness it does not have produces values outside the
/// carrier.
fn mzip_carrier(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    for pair in r.index_tuples(&inst.algebra, 2, 24) {
        let (f, g) = (&pair[0], &pair[1]);
        for a in tys {
            for b in tys {
                let da = inst.carrier_of(f, a)?;
                let db = inst.carrier_of(g, b)?;
                let target =
                    inst.carrier_of(&inst.vee(f, g)?, &CarrierTy::pair(a.clone(), b.clone()))?;
                let members = enumerate_carrier(&target, 512)?;
                let xs = r.values_capped(&da, 32, 6)?;
                let ys = r.values_capped(&db, 32, 6)?;
                for x in &xs {
                    for y in &ys {
                        r.charge(1)?;
                        let z = inst.mzip(f, g, x, y)?;
                        let mut found = false;
                        for m in &members {
                            if r.eq(&z, m)? {
                                found = true;
                                break;
                            }
                        }
                        if !found {
                            return Err(cex(
                                "m_{F,G} lands outside D_{F∨G}(A×B)",
                                format!(
                                    "F = {f}, G = {g}, a = {}, b = {}, got {}",
                                    render_value(x),
                                    render_value(y),
                                    render_value(&z)
                                ),
                            ));
                        }
                        r.case();
                    }
                }
            }
        }
    }
    Ok(())
}

fn mzip_naturality(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    for pair in r.index_tuples(&inst.algebra, 2, 24) {
        let (f, g) = (&pair[0], &pair[1]);
        let vee = inst.vee(f, g)?;
        for a in tys {
            for b in tys {
                let endo_a = CarrierTy::fun(a.clone(), a.clone());
                let endo_b = CarrierTy::fun(b.clone(), b.clone());
                let fs = r.values_capped(&endo_a, 8, 2)?;
                let gs = r.values_capped(&endo_b, 8, 2)?;
                let da = inst.carrier_of(f, a)?;
                let db = inst.carrier_of(g, b)?;
                let xs = r.values_capped(&da, 16, 4)?;
                let ys = r.values_capped(&db, 16, 4)?;
                for fa in &fs {
                    for gb in &gs {
                        let (faf, gbf) = (as_semfn(fa), as_semfn(gb));
                        let pairwise: SemFn = {
                            let (faf, gbf) = (faf.clone(), gbf.clone());
                            sem_fn(move |p| match p {
                                SemValue::Pair(x, y) => {
                                    Ok(SemValue::pair(faf(x)?, gbf(y)?))
                                }
                                _ => Err(SemError::IndexMismatch(
                                    "expected a pair value".to_string(),
                                )),
                            })
                        };
                        for x in &xs {
                            for y in &ys {
                                r.charge(1)?;
                                let lhs = inst.mzip(
                                    f,
                                    g,
                                    &inst.fmap(f, &faf, x)?,
                                    &inst.fmap(g, &gbf, y)?,
                                )?;
                                let rhs =
                                    inst.fmap(&vee, &pairwise, &inst.mzip(f, g, x, y)?)?;
                                if !r.eq(&lhs, &rhs)? {
                                    return Err(cex(
                                        "m ∘ (D f × D g) ≠ D (f×g) ∘ m",
                                        format!(
                                            "F = {f}, G = {g}, a = {}, b = {}",
                                            render_value(x),
                                            render_value(y)
                                        ),
                                    ));
                                }
                                r.case();
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn mzip_associativity(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let reassoc: SemFn = sem_fn(|p| match p {
        SemValue::Pair(xy, z) => match &**xy {
            SemValue::Pair(x, y) => Ok(SemValue::pair(
                (**x).clone(),
                SemValue::pair((**y).clone(), (**z).clone()),
            )),
            _ => Err(SemError::IndexMismatch("expected a pair value".to_string())),
        },
        _ => Err(SemError::IndexMismatch("expected a pair value".to_string())),
    });
    for triple in r.index_tuples(&inst.algebra, 3, 48) {
        let (f, g, h) = (&triple[0], &triple[1], &triple[2]);
        let fg = inst.vee(f, g)?;
        let gh = inst.vee(g, h)?;
        let fgh = inst.vee(&fg, h)?;
        if fgh != inst.vee(f, &gh)? {
            return Err(cex(
                "∨ is not associative on indices",
                format!("F = {f}, G = {g}, H = {h}"),
            ));
        }
        for a in tys {
            let da = inst.carrier_of(f, a)?;
            let db = inst.carrier_of(g, a)?;
            let dc = inst.carrier_of(h, a)?;
            let xs = r.values_capped(&da, 8, 3)?;
            let ys = r.values_capped(&db, 8, 3)?;
            let zs = r.values_capped(&dc, 8, 3)?;
            for x in &xs {
                for y in &ys {
                    for z in &zs {
                        r.charge(1)?;
                        let lhs = inst.fmap(
                            &fgh,
                            &reassoc,
                            &inst.mzip(&fg, h, &inst.mzip(f, g, x, y)?, z)?,
                        )?;
                        let rhs = inst.mzip(f, &gh, x, &inst.mzip(g, h, y, z)?)?;
                        if !r.eq(&lhs, &rhs)? {
                            return Err(cex(
                                "α ∘ m ∘ (m × id) ≠ m ∘ (id × m)",
                                format!(
                                    "F = {f}, G = {g}, H = {h}, values ({}, {}, {})",
                                    render_value(x),
                                    render_value(y),
                                    render_value(z)
                                ),
                            ));
                        }
                        r.case();
                    }
                }
            }
        }
    }
    Ok(())
}

fn mzip_epsilon(
    r: &mut Runner,
    inst: &IndexedComonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    let v11 = inst.vee(&unit, &unit)?;
    if v11 != unit {
        return Err(cex(
            "∨ does not preserve the unit",
            format!("1 ∨ 1 = {v11}"),
        ));
    }
    for a in tys {
        for b in tys {
            let da = inst.carrier_of(&unit, a)?;
            let db = inst.carrier_of(&unit, b)?;
            for x in r.values_capped(&da, 16, 4)? {
                for y in r.values_capped(&db, 16, 4)? {
                    r.charge(1)?;
                    let lhs = inst.epsilon(&inst.mzip(&unit, &unit, &x, &y)?)?;
                    let rhs = SemValue::pair(inst.epsilon(&x)?, inst.epsilon(&y)?);
                    if !r.eq(&lhs, &rhs)? {
                        return Err(cex(
                            "ε ∘ m_{1,1} ≠ ε × ε",
                            format!("a = {}, b = {}", render_value(&x), render_value(&y)),
                        ));
                    }
                    r.case();
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comonad::make_partiality_instance;
    use crate::harness::{all_ok, LawVerdict};

    #[test]
    fn partiality_satisfies_every_law_exhaustively() {
        let reports = check_indexed_comonad_laws(
            &make_partiality_instance(),
            &default_value_types(),
            &Budget::default(),
        );
        assert!(all_ok(&reports), "{reports:#?}");
        // Laws quantifying only over carrier elements are small enough to
        // check exhaustively; the naturality/composition laws range over
        // whole function spaces and are allowed to sample.
        let first_order = [
            "fmap-identity",
            "counit-left",
            "counit-right",
            "coassociativity",
            "mzip-carrier",
            "mzip-associativity",
            "mzip-epsilon",
        ];
        for r in &reports {
            if first_order.contains(&r.law.as_str()) {
                assert!(
                    matches!(r.verdict, LawVerdict::Pass { .. }),
                    "expected exhaustive pass, got {r}"
                );
            }
        }
    }
}
