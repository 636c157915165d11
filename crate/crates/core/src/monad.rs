//! Indexed (graded) monads: a lax monoidal functor from an effect algebra
//! into endofunctors on the semantic universe.
//!
//! An [`IndexedMonadInstance`] bundles the operations
//!
//! ```text
//! η₁      : A → T 1 A
//! μ_{F,G} : T F (T G A) → T (F⊗G) A
//! ι_{X,Y} : T X A → T Y A          (when X ⊑ Y)
//! τ_F     : A × T F B → T F (A×B)  (indexed strength)
//! fmap_F  : (A→B) → T F A → T F B
//! ```
//!
//! as plain closures over [`SemValue`]s, so law checks can enumerate inputs
//! and mutants can replace a single operation. Four instances ship:
//!
//! - reader: `T F A = Env_F ⇒ A` over implicit-parameter sets, with the
//!   restriction-based `μ_{F,G} k = λx. (k (x|F)) (x|G)`;
//! - memory: `T F A = Store_{Reads(F)} ⇒ (A × Writes)` with performed
//!   writes as a partial map and sequencing that lets the second
//!   computation observe the first's writes;
//! - memory-exact: the same but with writes total on `Writes(F)`, i.e. the
//!   precise carrier `T {write ρ:τ} A = A × τ`; this is the fiber on which
//!   the no-unit negative result holds (the partial-writes refinement is a
//!   writer monad over the override monoid, so it would not witness it);
//! - trace: `T F A = A × trace` graded by the exact emission sequence;
//! - identity collapse: the trivial one-index instance, an ordinary monad.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{EffectAlgebra, EffectToken, Index};
use crate::error::SemError;
use crate::value::{BaseTy, CarrierTy, Env, Scalar, SemValue};

// ============================================================================
// The instance bundle
// ============================================================================

/// A semantic function `A → B` passed to `fmap`.
pub type SemFn = Arc<dyn Fn(&SemValue) -> Result<SemValue, SemError> + Send + Sync>;

/// Wraps a plain closure as a [`SemFn`].
pub fn sem_fn<F>(f: F) -> SemFn
where
    F: Fn(&SemValue) -> Result<SemValue, SemError> + Send + Sync + 'static,
{
    Arc::new(f)
}

/// A bundle of indexed-monad operations over a fixed algebra.
///
/// Fields are public so tests can seed law-breaking mutants by replacing a
/// single operation.
#[derive(Clone)]
#[allow(clippy::type_complexity)]
pub struct IndexedMonadInstance {
    pub name: String,
    pub algebra: EffectAlgebra,
    /// `carrier_of(F, A)` describes the domain of `T F A` values.
    pub carrier_of: Arc<dyn Fn(&Index, &CarrierTy) -> Result<CarrierTy, SemError> + Send + Sync>,
    pub fmap: Arc<dyn Fn(&Index, &SemFn, &SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    pub eta: Arc<dyn Fn(&SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    pub mu: Arc<dyn Fn(&Index, &Index, &SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    pub iota: Arc<dyn Fn(&Index, &Index, &SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    pub strength:
        Arc<dyn Fn(&Index, &SemValue, &SemValue) -> Result<SemValue, SemError> + Send + Sync>,
}

impl IndexedMonadInstance {
    pub fn carrier_of(&self, f: &Index, a: &CarrierTy) -> Result<CarrierTy, SemError> {
        (self.carrier_of)(f, a)
    }

    pub fn fmap(&self, f: &Index, g: &SemFn, t: &SemValue) -> Result<SemValue, SemError> {
        (self.fmap)(f, g, t)
    }

    pub fn eta(&self, a: &SemValue) -> Result<SemValue, SemError> {
        (self.eta)(a)
    }

    pub fn mu(&self, f: &Index, g: &Index, t: &SemValue) -> Result<SemValue, SemError> {
        (self.mu)(f, g, t)
    }

    pub fn iota(&self, x: &Index, y: &Index, t: &SemValue) -> Result<SemValue, SemError> {
        (self.iota)(x, y, t)
    }

    pub fn strength(&self, f: &Index, a: &SemValue, t: &SemValue) -> Result<SemValue, SemError> {
        (self.strength)(f, a, t)
    }
}

impl std::fmt::Debug for IndexedMonadInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IndexedMonadInstance({})", self.name)
    }
}

// ============================================================================
// Shared helpers
// ============================================================================

/// Restricts an environment to the given name set.
pub fn restrict(env: &Env, names: &BTreeSet<String>) -> Env {
    env.iter()
        .filter(|(n, _)| names.contains(*n))
        .map(|(n, s)| (n.clone(), s.clone()))
        .collect()
}

/// Checks that `v` is an environment whose domain is exactly `names`.
fn expect_env_domain(v: &SemValue, names: &BTreeSet<String>) -> Result<Env, SemError> {
    let env = v.as_env().ok_or_else(|| {
        SemError::IndexMismatch("expected an environment value".to_string())
    })?;
    let found: BTreeSet<&String> = env.keys().collect();
    let expected: BTreeSet<&String> = names.iter().collect();
    if found != expected {
        return Err(SemError::EnvDomainMismatch {
            expected: names.iter().cloned().collect(),
            found: env.keys().cloned().collect(),
        });
    }
    Ok(env.clone())
}

fn expect_pair(v: &SemValue) -> Result<(SemValue, SemValue), SemError> {
    match v {
        SemValue::Pair(a, b) => Ok(((**a).clone(), (**b).clone())),
        _ => Err(SemError::IndexMismatch("expected a pair value".to_string())),
    }
}

fn env_carrier(names: &BTreeSet<String>, sig: &BTreeMap<String, BaseTy>) -> CarrierTy {
    CarrierTy::EnvOver(
        names
            .iter()
            .map(|n| (n.clone(), *sig.get(n).expect("name in signature")))
            .collect(),
    )
}

fn check_iota_indices(alg: &EffectAlgebra, x: &Index, y: &Index) -> Result<(), SemError> {
    if alg.leq(x, y)? {
        Ok(())
    } else {
        Err(SemError::IndexMismatch(format!(
            "iota requires {x} ⊑ {y}"
        )))
    }
}

// ============================================================================
// Reader instance
// ============================================================================

/// The indexed reader monad over implicit parameters: `T F A = Env_F ⇒ A`
/// with `μ_{F,G} k = λx. (k (x − (G − F))) (x − (F − G))`, the set
/// differences coinciding with restriction to `F` and to `G` for
/// `x : F ∪ G`.
pub fn make_reader_instance(
    params: &BTreeMap<String, BaseTy>,
    alg: EffectAlgebra,
) -> IndexedMonadInstance {
    let tokens = alg.tokens().expect("reader instance needs a powerset algebra");
    for t in tokens {
        match t {
            EffectToken::ImplicitParam(p) => {
                assert!(params.contains_key(p), "token {t} not covered by signature")
            }
            _ => panic!("reader algebra must contain only implicit-parameter tokens"),
        }
    }
    reader_ops(params.clone(), alg)
}

// The reader closures need the instance's own domain descriptors; building
// them in one place keeps the `Fun` domains consistent with `carrier_of`.
fn reader_ops(sig: BTreeMap<String, BaseTy>, alg: EffectAlgebra) -> IndexedMonadInstance {
    let carrier_sig = sig.clone();
    let carrier_of = Arc::new(move |f: &Index, a: &CarrierTy| {
        Ok(CarrierTy::fun(
            env_carrier(&f.param_names(), &carrier_sig),
            a.clone(),
        ))
    });

    let fmap_sig = sig.clone();
    let fmap = Arc::new(move |f: &Index, g: &SemFn, t: &SemValue| {
        let names = f.param_names();
        let dom = env_carrier(&names, &fmap_sig);
        let t = t.clone();
        let g = g.clone();
        Ok(SemValue::fun(dom, move |x| {
            expect_env_domain(x, &names)?;
            g(&t.apply(x)?)
        }))
    });

    let eta_sig = sig.clone();
    let eta = Arc::new(move |a: &SemValue| {
        let dom = env_carrier(&BTreeSet::new(), &eta_sig);
        let a = a.clone();
        Ok(SemValue::fun(dom, move |x| {
            expect_env_domain(x, &BTreeSet::new())?;
            Ok(a.clone())
        }))
    });

    let mu_sig = sig.clone();
    let mu_alg = alg.clone();
    let mu = Arc::new(move |f: &Index, g: &Index, k: &SemValue| {
        let fg = mu_alg.combine(f, g)?;
        let names = fg.param_names();
        let f_names = f.param_names();
        let g_names = g.param_names();
        let dom = env_carrier(&names, &mu_sig);
        let k = k.clone();
        Ok(SemValue::fun(dom, move |x| {
            let env = expect_env_domain(x, &names)?;
            let inner = k.apply(&SemValue::Env(restrict(&env, &f_names)))?;
            inner.apply(&SemValue::Env(restrict(&env, &g_names)))
        }))
    });

    let iota_sig = sig.clone();
    let iota_alg = alg.clone();
    let iota = Arc::new(move |x: &Index, y: &Index, t: &SemValue| {
        check_iota_indices(&iota_alg, x, y)?;
        let x_names = x.param_names();
        let y_names = y.param_names();
        let dom = env_carrier(&y_names, &iota_sig);
        let t = t.clone();
        Ok(SemValue::fun(dom, move |e| {
            let env = expect_env_domain(e, &y_names)?;
            t.apply(&SemValue::Env(restrict(&env, &x_names)))
        }))
    });

    let st_sig = sig.clone();
    let strength = Arc::new(move |f: &Index, a: &SemValue, t: &SemValue| {
        let names = f.param_names();
        let dom = env_carrier(&names, &st_sig);
        let a = a.clone();
        let t = t.clone();
        Ok(SemValue::fun(dom, move |x| {
            expect_env_domain(x, &names)?;
            Ok(SemValue::pair(a.clone(), t.apply(x)?))
        }))
    });

    IndexedMonadInstance {
        name: "reader".to_string(),
        algebra: alg,
        carrier_of,
        fmap,
        eta,
        mu,
        iota,
        strength,
    }
}

/// The denotation of `ask p`: the evaluation map at parameter `p`.
pub fn reader_ask(p: &str, sig: &BTreeMap<String, BaseTy>) -> SemValue {
    let names: BTreeSet<String> = [p.to_string()].into_iter().collect();
    let dom = env_carrier(&names, sig);
    let p = p.to_string();
    SemValue::fun(dom, move |x| {
        let names: BTreeSet<String> = [p.clone()].into_iter().collect();
        let env = expect_env_domain(x, &names)?;
        Ok(SemValue::from_scalar(&env[&p]))
    })
}

// ============================================================================
// Memory instance
// ============================================================================

/// Whether performed writes are a partial map (the shipped instance, which
/// supports `ι` along write-set growth) or total on the write set (the
/// exact carrier `T {write ρ:τ} A = A × τ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WriteCarrier {
    Partial,
    Total,
}

/// The indexed memory monad: `T F A` maps a store over `Reads(F)` to a
/// result paired with the writes performed (a map with domain ⊆
/// `Writes(F)`). Sequencing lets the second computation observe the
/// first's writes on shared regions; later writes win.
pub fn make_memory_instance(
    regions: &BTreeMap<String, BaseTy>,
    alg: EffectAlgebra,
) -> IndexedMonadInstance {
    memory_ops(regions.clone(), alg, WriteCarrier::Partial, "memory")
}

/// The exact-writes memory variant with writes total on `Writes(F)`, so
/// the fiber at `{wr ρ}` is literally `A × τ`. `ι` is restricted to
/// inclusions that do not grow the write set (no default written value
/// exists to invent). Used for the fiber no-unit result.
pub fn make_memory_exact_instance(
    regions: &BTreeMap<String, BaseTy>,
    alg: EffectAlgebra,
) -> IndexedMonadInstance {
    memory_ops(regions.clone(), alg, WriteCarrier::Total, "memory-exact")
}

fn memory_ops(
    regions: BTreeMap<String, BaseTy>,
    alg: EffectAlgebra,
    wc: WriteCarrier,
    name: &str,
) -> IndexedMonadInstance {
    let tokens = alg.tokens().expect("memory instance needs a powerset algebra");
    for t in tokens {
        match t {
            EffectToken::Read(r) | EffectToken::Write(r) => {
                assert!(regions.contains_key(r), "token {t} not covered by signature")
            }
            _ => panic!("memory algebra must contain only read/write tokens"),
        }
    }

    let writes_carrier = move |names: &BTreeSet<String>, sig: &BTreeMap<String, BaseTy>| {
        let m: BTreeMap<String, BaseTy> = names
            .iter()
            .map(|n| (n.clone(), *sig.get(n).expect("region in signature")))
            .collect();
        match wc {
            WriteCarrier::Partial => CarrierTy::WritesOver(m),
            WriteCarrier::Total => CarrierTy::EnvOver(m),
        }
    };

    let carrier_sig = regions.clone();
    let carrier_of = Arc::new(move |f: &Index, a: &CarrierTy| {
        Ok(CarrierTy::fun(
            env_carrier(&f.read_regions(), &carrier_sig),
            CarrierTy::pair(
                a.clone(),
                writes_carrier(&f.write_regions(), &carrier_sig),
            ),
        ))
    });

    let fmap_sig = regions.clone();
    let fmap = Arc::new(move |f: &Index, g: &SemFn, t: &SemValue| {
        let reads = f.read_regions();
        let dom = env_carrier(&reads, &fmap_sig);
        let t = t.clone();
        let g = g.clone();
        Ok(SemValue::fun(dom, move |s| {
            expect_env_domain(s, &reads)?;
            let (a, w) = expect_pair(&t.apply(s)?)?;
            Ok(SemValue::pair(g(&a)?, w))
        }))
    });

    let eta_sig = regions.clone();
    let eta = Arc::new(move |a: &SemValue| {
        let dom = env_carrier(&BTreeSet::new(), &eta_sig);
        let a = a.clone();
        Ok(SemValue::fun(dom, move |s| {
            expect_env_domain(s, &BTreeSet::new())?;
            Ok(SemValue::pair(a.clone(), SemValue::Env(Env::new())))
        }))
    });

    // For the total-writes variant a value at index F must carry a write for
    // every region in Writes(F); `check_writes` enforces the shape.
    let check_writes = move |w: &Env, writes: &BTreeSet<String>| -> Result<(), SemError> {
        let dom: BTreeSet<&String> = w.keys().collect();
        let ok = match wc {
            WriteCarrier::Partial => dom.iter().all(|r| writes.contains(*r)),
            WriteCarrier::Total => dom == writes.iter().collect(),
        };
        if ok {
            Ok(())
        } else {
            Err(SemError::IndexMismatch(format!(
                "performed writes {:?} inconsistent with write set {:?}",
                w.keys().collect::<Vec<_>>(),
                writes
            )))
        }
    };

    let mu_sig = regions.clone();
    let mu_alg = alg.clone();
    let mu = Arc::new(move |f: &Index, g: &Index, h: &SemValue| {
        let fg = mu_alg.combine(f, g)?;
        let reads = fg.read_regions();
        let f_reads = f.read_regions();
        let g_reads = g.read_regions();
        let f_writes = f.write_regions();
        let g_writes = g.write_regions();
        let dom = env_carrier(&reads, &mu_sig);
        let h = h.clone();
        Ok(SemValue::fun(dom, move |s| {
            let store = expect_env_domain(s, &reads)?;
            let (k, w1v) = expect_pair(&h.apply(&SemValue::Env(restrict(&store, &f_reads)))?)?;
            let w1 = w1v.as_env().ok_or_else(|| {
                SemError::IndexMismatch("performed writes must be an environment".to_string())
            })?;
            check_writes(w1, &f_writes)?;
            // The second computation reads the first's writes on shared regions.
            let mut s2 = restrict(&store, &g_reads);
            for (r, v) in w1 {
                if g_reads.contains(r) {
                    s2.insert(r.clone(), v.clone());
                }
            }
            let (a, w2v) = expect_pair(&k.apply(&SemValue::Env(s2))?)?;
            let w2 = w2v.as_env().ok_or_else(|| {
                SemError::IndexMismatch("performed writes must be an environment".to_string())
            })?;
            check_writes(w2, &g_writes)?;
            // Later write wins.
            let mut w = w1.clone();
            for (r, v) in w2 {
                w.insert(r.clone(), v.clone());
            }
            Ok(SemValue::pair(a, SemValue::Env(w)))
        }))
    });

    let iota_sig = regions.clone();
    let iota_alg = alg.clone();
    let iota = Arc::new(move |x: &Index, y: &Index, t: &SemValue| {
        check_iota_indices(&iota_alg, x, y)?;
        if wc == WriteCarrier::Total && x.write_regions() != y.write_regions() {
            return Err(SemError::Inhabitation(format!(
                "total-writes carrier admits no iota from {x} to {y}: \
                 no default value for the added write regions"
            )));
        }
        let x_reads = x.read_regions();
        let y_reads = y.read_regions();
        let dom = env_carrier(&y_reads, &iota_sig);
        let t = t.clone();
        Ok(SemValue::fun(dom, move |s| {
            let store = expect_env_domain(s, &y_reads)?;
            t.apply(&SemValue::Env(restrict(&store, &x_reads)))
        }))
    });

    let st_sig = regions.clone();
    let strength = Arc::new(move |f: &Index, a: &SemValue, t: &SemValue| {
        let reads = f.read_regions();
        let dom = env_carrier(&reads, &st_sig);
        let a = a.clone();
        let t = t.clone();
        Ok(SemValue::fun(dom, move |s| {
            expect_env_domain(s, &reads)?;
            let (b, w) = expect_pair(&t.apply(s)?)?;
            Ok(SemValue::pair(SemValue::pair(a.clone(), b), w))
        }))
    });

    IndexedMonadInstance {
        name: name.to_string(),
        algebra: alg,
        carrier_of,
        fmap,
        eta,
        mu,
        iota,
        strength,
    }
}

/// The denotation of `read ρ`: the evaluation map on the singleton store.
pub fn memory_read(r: &str, sig: &BTreeMap<String, BaseTy>) -> SemValue {
    let names: BTreeSet<String> = [r.to_string()].into_iter().collect();
    let dom = env_carrier(&names, sig);
    let r = r.to_string();
    SemValue::fun(dom, move |s| {
        let names: BTreeSet<String> = [r.clone()].into_iter().collect();
        let store = expect_env_domain(s, &names)?;
        Ok(SemValue::pair(
            SemValue::from_scalar(&store[&r]),
            SemValue::Env(Env::new()),
        ))
    })
}

/// The denotation of writing an already-evaluated value to region `ρ`:
/// `T {wr ρ} Unit` returning unit and the singleton performed write.
pub fn memory_write(r: &str, v: Scalar, sig: &BTreeMap<String, BaseTy>) -> SemValue {
    let dom = env_carrier(&BTreeSet::new(), sig);
    let r = r.to_string();
    SemValue::fun(dom, move |s| {
        expect_env_domain(s, &BTreeSet::new())?;
        let w: Env = [(r.clone(), v.clone())].into_iter().collect();
        Ok(SemValue::pair(SemValue::Unit, SemValue::Env(w)))
    })
}

// ============================================================================
// Trace instance
// ============================================================================

/// The order-recording instance: `T F A = A × (values typed by the tag
/// sequence F)`, the emitted trace being exactly the grade.
pub fn make_trace_instance(
    tags: &BTreeMap<String, BaseTy>,
    alg: EffectAlgebra,
) -> IndexedMonadInstance {
    let (alg_tags, _) = alg.trace_bounds().expect("trace instance needs a trace algebra");
    for t in alg_tags {
        assert!(tags.contains_key(t), "tag {t} not covered by signature");
    }
    let sig = tags.clone();

    let trace_ty = move |f: &Index, sig: &BTreeMap<String, BaseTy>| -> Result<CarrierTy, SemError> {
        match f {
            Index::Seq(seq) => Ok(CarrierTy::TraceOver(
                seq.iter()
                    .map(|t| (t.clone(), *sig.get(t).expect("tag in signature")))
                    .collect(),
            )),
            other => Err(SemError::AlgebraMismatch(format!(
                "trace instance used with non-trace index {other}"
            ))),
        }
    };

    // The emitted tuple must agree with the grade position by position.
    let check_trace = |tr: &[(String, Scalar)], f: &Index| -> Result<(), SemError> {
        let seq = match f {
            Index::Seq(seq) => seq,
            other => {
                return Err(SemError::AlgebraMismatch(format!(
                    "trace instance used with non-trace index {other}"
                )))
            }
        };
        let tags: Vec<&String> = tr.iter().map(|(t, _)| t).collect();
        if tags.len() != seq.len() || tags.iter().zip(seq.iter()).any(|(a, b)| **a != *b) {
            return Err(SemError::IndexMismatch(format!(
                "emitted trace {tags:?} does not match grade {f}"
            )));
        }
        Ok(())
    };

    let carrier_sig = sig.clone();
    let carrier_of = Arc::new(move |f: &Index, a: &CarrierTy| {
        Ok(CarrierTy::pair(a.clone(), trace_ty(f, &carrier_sig)?))
    });

    let fmap = Arc::new(move |f: &Index, g: &SemFn, t: &SemValue| {
        let (a, tr) = expect_pair(t)?;
        match &tr {
            SemValue::Trace(items) => check_trace(items, f)?,
            _ => return Err(SemError::IndexMismatch("expected a trace value".to_string())),
        }
        Ok(SemValue::pair(g(&a)?, tr))
    });

    let eta = Arc::new(|a: &SemValue| Ok(SemValue::pair(a.clone(), SemValue::Trace(Vec::new()))));

    let mu_alg = alg.clone();
    let mu = Arc::new(move |f: &Index, g: &Index, t: &SemValue| {
        mu_alg.combine(f, g)?;
        let (inner, outer_tr) = expect_pair(t)?;
        let (a, inner_tr) = expect_pair(&inner)?;
        match (&outer_tr, &inner_tr) {
            (SemValue::Trace(vf), SemValue::Trace(vg)) => {
                check_trace(vf, f)?;
                check_trace(vg, g)?;
                // Outer (first-executed) emissions precede inner ones.
                let mut out = vf.clone();
                out.extend(vg.iter().cloned());
                Ok(SemValue::pair(a, SemValue::Trace(out)))
            }
            _ => Err(SemError::IndexMismatch("expected trace values".to_string())),
        }
    });

    let iota_alg = alg.clone();
    let iota = Arc::new(move |_: &Index, _: &Index, _: &SemValue| {
        Err(SemError::Algebra(crate::error::AlgebraError::NoOrder(
            iota_alg.name().to_string(),
        )))
    });

    let strength = Arc::new(move |f: &Index, a: &SemValue, t: &SemValue| {
        let (b, tr) = expect_pair(t)?;
        match &tr {
            SemValue::Trace(items) => check_trace(items, f)?,
            _ => return Err(SemError::IndexMismatch("expected a trace value".to_string())),
        }
        Ok(SemValue::pair(SemValue::pair(a.clone(), b), tr))
    });

    IndexedMonadInstance {
        name: "trace".to_string(),
        algebra: alg,
        carrier_of,
        fmap,
        eta,
        mu,
        iota,
        strength,
    }
}

/// The denotation of emitting an already-evaluated value on tag `t`:
/// `T [t] Unit`.
pub fn trace_out(tag: &str, v: Scalar) -> SemValue {
    SemValue::pair(SemValue::Unit, SemValue::Trace(vec![(tag.to_string(), v)]))
}

// ============================================================================
// Identity collapse
// ============================================================================

/// The collapse to an ordinary monad: a single index, `T 1 A = A`, and all
/// operations (essentially) identities.
pub fn identity_collapse_instance() -> IndexedMonadInstance {
    let alg = EffectAlgebra::trivial();

    let check_unit = |ix: &Index| -> Result<(), SemError> {
        if *ix == Index::Point {
            Ok(())
        } else {
            Err(SemError::AlgebraMismatch(format!(
                "identity instance used with index {ix}"
            )))
        }
    };

    IndexedMonadInstance {
        name: "identity".to_string(),
        algebra: alg.clone(),
        carrier_of: Arc::new(move |f, a| {
            check_unit(f)?;
            Ok(a.clone())
        }),
        fmap: Arc::new(move |f, g, t| {
            check_unit(f)?;
            g(t)
        }),
        eta: Arc::new(|a| Ok(a.clone())),
        mu: Arc::new(move |f, g, t| {
            check_unit(f)?;
            check_unit(g)?;
            Ok(t.clone())
        }),
        iota: Arc::new(move |x, y, t| {
            check_unit(x)?;
            check_unit(y)?;
            Ok(t.clone())
        }),
        strength: Arc::new(move |f, a, t| {
            check_unit(f)?;
            Ok(SemValue::pair(a.clone(), t.clone()))
        }),
    }
}
