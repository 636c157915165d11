//! The indexed-monad law suite.
//!
//! Notation in law names: `T` is the functor family, `η` the unit at the
//! algebra's unit index, `μ_{F,G}` the graded multiplication, `ι_{X,Y}`
//! the coercion along `X ⊑ Y`, `τ_F` the strength. Index quantifiers skip
//! combinations whose product does not exist (bounded-trace algebras are
//! partial monoids), so a law holds vacuously where composition is
//! undefined.

use super::{inapplicable, run_law, Budget, LawFlow, LawReport, Runner};
use crate::algebra::Index;
use crate::monad::{sem_fn, IndexedMonadInstance, SemFn};
use crate::value::{render_value, CarrierTy, SemValue};
use crate::error::SemError;

/// Value types a suite run quantifies over, chosen small enough that the
/// one-layer carriers stay enumerable.
pub fn default_value_types() -> Vec<CarrierTy> {
    vec![CarrierTy::Bool, CarrierTy::IntMod(4)]
}

fn as_semfn(v: &SemValue) -> SemFn {
    let v = v.clone();
    sem_fn(move |x| v.apply(x))
}

fn snd_fn() -> SemFn {
    sem_fn(|p| match p {
        SemValue::Pair(_, b) => Ok((**b).clone()),
        _ => Err(SemError::IndexMismatch("expected a pair value".to_string())),
    })
}

fn cex(law: &str, detail: String) -> LawFlow {
    LawFlow::Cex(format!("{law}: {detail}"))
}

/// Checks the whole indexed-monad law suite against `inst`, quantifying
/// values over `value_tys`.
pub fn check_indexed_monad_laws(
    inst: &IndexedMonadInstance,
    value_tys: &[CarrierTy],
    budget: &Budget,
) -> Vec<LawReport> {
    let mut reports = Vec::new();
    let mut ordinal = 0u64;
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
    law("eta-naturality", &mut reports, &|r| {
        eta_naturality(r, inst, value_tys)
    });
    law("mu-naturality", &mut reports, &|r| {
        mu_naturality(r, inst, value_tys)
    });
    law("left-unit", &mut reports, &|r| left_unit(r, inst, value_tys));
    law("right-unit", &mut reports, &|r| {
        right_unit(r, inst, value_tys)
    });
    law("associativity", &mut reports, &|r| {
        associativity(r, inst, value_tys)
    });

    if inst.algebra.has_order() {
        law("iota-identity", &mut reports, &|r| {
            iota_identity(r, inst, value_tys)
        });
        law("iota-transitivity", &mut reports, &|r| {
            iota_transitivity(r, inst, value_tys)
        });
        law("iota-naturality", &mut reports, &|r| {
            iota_naturality(r, inst, value_tys)
        });
        law("iota-mu-coherence", &mut reports, &|r| {
            iota_mu_coherence(r, inst, value_tys)
        });
    } else {
        let reason = format!("algebra {} has no order", inst.algebra.name());
        for name in ["iota-identity", "iota-transitivity", "iota-naturality", "iota-mu-coherence"] {
            reports.push(inapplicable(name, &reason));
        }
    }

    law("strength-discard", &mut reports, &|r| {
        strength_discard(r, inst, value_tys)
    });
    law("strength-eta", &mut reports, &|r| {
        strength_eta(r, inst, value_tys)
    });
    law("strength-mu", &mut reports, &|r| {
        strength_mu(r, inst, value_tys)
    });

    reports
}

// ============================================================================
// Functor and unit laws
// ============================================================================

fn fmap_identity(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let id: SemFn = sem_fn(|v| Ok(v.clone()));
    for f in r.indices(&inst.algebra, 8) {
        for a in tys {
            let tfa = inst.carrier_of(&f, a)?;
            for t in r.values(&tfa)? {
                r.charge(1)?;
                let lhs = inst.fmap(&f, &id, &t)?;
                if !r.eq(&lhs, &t)? {
                    return Err(cex(
                        "T_F id ≠ id",
                        format!("F = {f}, t = {}", render_value(&t)),
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
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    for f in r.indices(&inst.algebra, 8) {
        for a in tys {
            let endo = CarrierTy::fun(a.clone(), a.clone());
            let fns = r.values_capped(&endo, 16, 4)?;
            let tfa = inst.carrier_of(&f, a)?;
            let values = r.values_capped(&tfa, 64, 8)?;
            for g1 in &fns {
                for g2 in &fns {
                    let (g1f, g2f) = (as_semfn(g1), as_semfn(g2));
                    let composed: SemFn = {
                        let (g1f, g2f) = (g1f.clone(), g2f.clone());
                        sem_fn(move |v| g2f(&g1f(v)?))
                    };
                    for t in &values {
                        r.charge(1)?;
                        let lhs = inst.fmap(&f, &composed, t)?;
                        let rhs = inst.fmap(&f, &g2f, &inst.fmap(&f, &g1f, t)?)?;
                        if !r.eq(&lhs, &rhs)? {
                            return Err(cex(
                                "T_F (g∘f) ≠ T_F g ∘ T_F f",
                                format!(
                                    "F = {f}, f = {}, g = {}, t = {}",
                                    render_value(g1),
                                    render_value(g2),
                                    render_value(t)
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

fn eta_naturality(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    for a in tys {
        let endo = CarrierTy::fun(a.clone(), a.clone());
        let fns = r.values_capped(&endo, 16, 4)?;
        for g in &fns {
            let gf = as_semfn(g);
            for v in r.values(a)? {
                r.charge(1)?;
                let lhs = inst.fmap(&unit, &gf, &inst.eta(&v)?)?;
                let rhs = inst.eta(&gf(&v)?)?;
                if !r.eq(&lhs, &rhs)? {
                    return Err(cex(
                        "T_1 f ∘ η ≠ η ∘ f",
                        format!("f = {}, a = {}", render_value(g), render_value(&v)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn mu_naturality(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    for pair in r.index_tuples(alg, 2, 24) {
        let (f, g) = (&pair[0], &pair[1]);
        let Ok(fg) = alg.combine(f, g) else { continue };
        for a in tys {
            let endo = CarrierTy::fun(a.clone(), a.clone());
            let fns = r.values_capped(&endo, 16, 4)?;
            let nested = inst.carrier_of(f, &inst.carrier_of(g, a)?)?;
            let values = r.values_capped(&nested, 64, 8)?;
            for h in &fns {
                let hf = as_semfn(h);
                let inner: SemFn = {
                    let (inst2, g2, hf2) = (inst.clone(), g.clone(), hf.clone());
                    sem_fn(move |u| inst2.fmap(&g2, &hf2, u))
                };
                for t in &values {
                    r.charge(1)?;
                    let lhs = inst.fmap(&fg, &hf, &inst.mu(f, g, t)?)?;
                    let rhs = inst.mu(f, g, &inst.fmap(f, &inner, t)?)?;
                    if !r.eq(&lhs, &rhs)? {
                        return Err(cex(
                            "T f ∘ μ ≠ μ ∘ T (T f)",
                            format!("F = {f}, G = {g}, t = {}", render_value(t)),
                        ));
                    }
                    r.case();
                }
            }
        }
    }
    Ok(())
}

fn left_unit(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    for g in r.indices(&inst.algebra, 8) {
        for a in tys {
            let tga = inst.carrier_of(&g, a)?;
            for t in r.values(&tga)? {
                r.charge(1)?;
                let lhs = inst.mu(&unit, &g, &inst.eta(&t)?)?;
                if !r.eq(&lhs, &t)? {
                    return Err(cex(
                        "μ_{1,G} ∘ η ≠ id",
                        format!("G = {g}, t = {}", render_value(&t)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn right_unit(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    let eta: SemFn = {
        let inst2 = inst.clone();
        sem_fn(move |v| inst2.eta(v))
    };
    for f in r.indices(&inst.algebra, 8) {
        for a in tys {
            let tfa = inst.carrier_of(&f, a)?;
            for t in r.values(&tfa)? {
                r.charge(1)?;
                let lhs = inst.mu(&f, &unit, &inst.fmap(&f, &eta, &t)?)?;
                if !r.eq(&lhs, &t)? {
                    return Err(cex(
                        "μ_{F,1} ∘ T_F η ≠ id",
                        format!("F = {f}, t = {}", render_value(&t)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

fn associativity(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    for triple in r.index_tuples(alg, 3, 48) {
        let (f, g, h) = (&triple[0], &triple[1], &triple[2]);
        let Ok(fg) = alg.combine(f, g) else { continue };
        let Ok(gh) = alg.combine(g, h) else { continue };
        if alg.combine(&fg, h).is_err() {
            continue;
        }
        for a in tys {
            let nested =
                inst.carrier_of(f, &inst.carrier_of(g, &inst.carrier_of(h, a)?)?)?;
            let values = r.values_capped(&nested, 64, 8)?;
            let inner_mu: SemFn = {
                let (inst2, g2, h2) = (inst.clone(), g.clone(), h.clone());
                sem_fn(move |u| inst2.mu(&g2, &h2, u))
            };
            for t in &values {
                r.charge(1)?;
                let lhs = inst.mu(&fg, h, &inst.mu(f, g, t)?)?;
                let rhs = inst.mu(f, &gh, &inst.fmap(f, &inner_mu, t)?)?;
                if !r.eq(&lhs, &rhs)? {
                    return Err(cex(
                        "μ ∘ μ ≠ μ ∘ T μ",
                        format!("F = {f}, G = {g}, H = {h}, t = {}", render_value(t)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

// ============================================================================
// Coercion laws
// ============================================================================

fn iota_identity(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    for x in r.indices(&inst.algebra, 8) {
        for a in tys {
            let txa = inst.carrier_of(&x, a)?;
            for t in r.values(&txa)? {
                r.charge(1)?;
                let lhs = inst.iota(&x, &x, &t)?;
                if !r.eq(&lhs, &t)? {
                    return Err(cex(
                        "ι_{X,X} ≠ id",
                        format!("X = {x}, t = {}", render_value(&t)),
                    ));
                }
                r.case();
            }
        }
    }
    Ok(())
}

/// Applies `ι_{X,Y}`, reporting `None` when the instance leaves `ι`
/// undefined on this inclusion (the exact-writes memory carrier refuses
/// write growth, for example). Law quantifiers skip undefined inclusions
/// the same way partial-monoid quantifiers skip undefined products; any
/// other error is a genuine failure.
fn try_iota(
    inst: &IndexedMonadInstance,
    x: &Index,
    y: &Index,
    t: &SemValue,
) -> Result<Option<SemValue>, LawFlow> {
    match inst.iota(x, y, t) {
        Ok(v) => Ok(Some(v)),
        Err(SemError::Inhabitation(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn iota_transitivity(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    let pairs = r.leq_pairs(alg, 16)?;
    for (x, y) in &pairs {
        for z in alg.carrier() {
            if !alg.leq(y, &z)? {
                continue;
            }
            for a in tys {
                let txa = inst.carrier_of(x, a)?;
                for t in r.values_capped(&txa, 64, 8)? {
                    r.charge(1)?;
                    let Some(step1) = try_iota(inst, x, y, &t)? else {
                        continue;
                    };
                    let Some(lhs) = try_iota(inst, y, &z, &step1)? else {
                        continue;
                    };
                    // Both steps exist, so the direct coercion must too.
                    let Some(rhs) = try_iota(inst, x, &z, &t)? else {
                        return Err(cex(
                            "ι_{X,Z} undefined though ι_{Y,Z} ∘ ι_{X,Y} is",
                            format!("X = {x}, Y = {y}, Z = {z}"),
                        ));
                    };
                    if !r.eq(&lhs, &rhs)? {
                        return Err(cex(
                            "ι_{Y,Z} ∘ ι_{X,Y} ≠ ι_{X,Z}",
                            format!("X = {x}, Y = {y}, Z = {z}, t = {}", render_value(&t)),
                        ));
                    }
                    r.case();
                }
            }
        }
    }
    Ok(())
}

fn iota_naturality(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let pairs = r.leq_pairs(&inst.algebra, 16)?;
    for (x, y) in &pairs {
        for a in tys {
            let endo = CarrierTy::fun(a.clone(), a.clone());
            let fns = r.values_capped(&endo, 16, 4)?;
            let txa = inst.carrier_of(x, a)?;
            let values = r.values_capped(&txa, 64, 8)?;
            for g in &fns {
                let gf = as_semfn(g);
                for t in &values {
                    r.charge(1)?;
                    let Some(lifted) = try_iota(inst, x, y, t)? else {
                        continue;
                    };
                    let lhs = inst.fmap(y, &gf, &lifted)?;
                    let Some(rhs) = try_iota(inst, x, y, &inst.fmap(x, &gf, t)?)? else {
                        return Err(cex(
                            "ι defined before T_X f but not after",
                            format!("X = {x}, Y = {y}"),
                        ));
                    };
                    if !r.eq(&lhs, &rhs)? {
                        return Err(cex(
                            "T_Y f ∘ ι ≠ ι ∘ T_X f",
                            format!("X = {x}, Y = {y}, t = {}", render_value(t)),
                        ));
                    }
                    r.case();
                }
            }
        }
    }
    Ok(())
}

/// `ι` is a morphism of graded monads: coercing after multiplying equals
/// multiplying the coerced layers.
fn iota_mu_coherence(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    let pairs = r.leq_pairs(alg, 8)?;
    for (x, x2) in &pairs {
        for (y, y2) in &pairs {
            let Ok(xy) = alg.combine(x, y) else { continue };
            let Ok(xy2) = alg.combine(x2, y2) else { continue };
            if !alg.leq(&xy, &xy2)? {
                continue;
            }
            for a in tys {
                let nested = inst.carrier_of(x, &inst.carrier_of(y, a)?)?;
                let inner_iota: SemFn = {
                    let (inst2, y_from, y_to) = (inst.clone(), y.clone(), y2.clone());
                    sem_fn(move |u| inst2.iota(&y_from, &y_to, u))
                };
                for t in r.values_capped(&nested, 64, 8)? {
                    r.charge(1)?;
                    let Some(lhs) = try_iota(inst, &xy, &xy2, &inst.mu(x, y, &t)?)?
                    else {
                        continue;
                    };
                    // The inner ι error surfaces through fmap; treat its
                    // undefinedness as a skip too.
                    let mapped = match inst.fmap(x, &inner_iota, &t) {
                        Ok(v) => v,
                        Err(SemError::Inhabitation(_)) => continue,
                        Err(e) => return Err(e.into()),
                    };
                    let Some(lifted) = try_iota(inst, x, x2, &mapped)? else {
                        continue;
                    };
                    let rhs = inst.mu(x2, y2, &lifted)?;
                    // Function carriers evaluate lazily, so an undefined
                    // inner ι only surfaces when equality applies the two
                    // sides; that too is a vacuous tuple, not a failure.
                    let equal = match r.eq(&lhs, &rhs) {
                        Ok(b) => b,
                        Err(LawFlow::Sem(SemError::Inhabitation(_))) => continue,
                        Err(e) => return Err(e),
                    };
                    if !equal {
                        return Err(cex(
                            "ι ∘ μ ≠ μ ∘ (ι ∘ T ι)",
                            format!(
                                "X = {x} ⊑ {x2}, Y = {y} ⊑ {y2}, t = {}",
                                render_value(&t)
                            ),
                        ));
                    }
                    r.case();
                }
            }
        }
    }
    Ok(())
}

// ============================================================================
// Strength laws
// ============================================================================

fn strength_discard(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let snd = snd_fn();
    for f in r.indices(&inst.algebra, 8) {
        for a in tys {
            for b in tys {
                let tfb = inst.carrier_of(&f, b)?;
                let values = r.values_capped(&tfb, 64, 8)?;
                for x in r.values_capped(a, 8, 4)? {
                    for t in &values {
                        r.charge(1)?;
                        let lhs = inst.fmap(&f, &snd, &inst.strength(&f, &x, t)?)?;
                        if !r.eq(&lhs, t)? {
                            return Err(cex(
                                "T_F π₂ ∘ τ_F ≠ π₂",
                                format!("F = {f}, a = {}, t = {}", render_value(&x), render_value(t)),
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

fn strength_eta(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let unit = inst.algebra.unit();
    for a in tys {
        for b in tys {
            for x in r.values_capped(a, 8, 4)? {
                for y in r.values_capped(b, 8, 4)? {
                    r.charge(1)?;
                    let lhs = inst.strength(&unit, &x, &inst.eta(&y)?)?;
                    let rhs = inst.eta(&SemValue::pair(x.clone(), y.clone()))?;
                    if !r.eq(&lhs, &rhs)? {
                        return Err(cex(
                            "τ_1 ∘ (id × η) ≠ η",
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

/// Strength distributes over multiplication.
fn strength_mu(
    r: &mut Runner,
    inst: &IndexedMonadInstance,
    tys: &[CarrierTy],
) -> Result<(), LawFlow> {
    let alg = &inst.algebra;
    for pair in r.index_tuples(alg, 2, 16) {
        let (f, g) = (&pair[0], &pair[1]);
        let Ok(fg) = alg.combine(f, g) else { continue };
        for a in tys {
            for b in tys {
                let nested = inst.carrier_of(f, &inst.carrier_of(g, b)?)?;
                let values = r.values_capped(&nested, 32, 6)?;
                for x in r.values_capped(a, 4, 2)? {
                    let inner: SemFn = {
                        let (inst2, g2) = (inst.clone(), g.clone());
                        sem_fn(move |p| match p {
                            SemValue::Pair(u, t) => inst2.strength(&g2, u, t),
                            _ => Err(SemError::IndexMismatch(
                                "expected a pair value".to_string(),
                            )),
                        })
                    };
                    for t in &values {
                        r.charge(1)?;
                        let lhs = inst.strength(&fg, &x, &inst.mu(f, g, t)?)?;
                        let strengthened = inst.strength(f, &x, t)?;
                        let rhs = inst.mu(f, g, &inst.fmap(f, &inner, &strengthened)?)?;
                        if !r.eq(&lhs, &rhs)? {
                            return Err(cex(
                                "τ ∘ μ ≠ μ ∘ T τ ∘ τ",
                                format!(
                                    "F = {f}, G = {g}, a = {}, t = {}",
                                    render_value(&x),
                                    render_value(t)
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
