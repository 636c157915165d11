//! Indexed comonads: a colax monoidal functor from an effect algebra into
//! endofunctors, dual to the indexed monads of [`crate::monad`].
//!
//! The colax operations are
//!
//! ```text
//! ε₁      : D 1 A → A
//! δ_{F,G} : D (F⊗G) A → D F (D G A)
//! m_{F,G} : D_F A × D_G B → D_{F∨G} (A×B)   (semi-monoidal zip)
//! ```
//!
//! The shipped instance is the indexed partiality comonad over the boolean
//! conjunction monoid `({f, t}, ∧, t)`: `D t A = A` and `D f A = 1`, the
//! one-point object. It grades computations by whether their context is
//! available at all, which is what makes comonadic dead-code elimination
//! expressible. Its `m` uses `∨ = ∧`: among the sixteen binary operations
//! on `{f, t}` that is the only associative choice whose target type
//! `D_{F∨G}(A×B)` is inhabited for every argument combination (any choice
//! sending a pair with an absent side to grade `t` would have to conjure
//! the missing component).

use std::sync::Arc;

use crate::algebra::{EffectAlgebra, Index};
use crate::error::SemError;
use crate::monad::SemFn;
use crate::value::{CarrierTy, SemValue};

/// A bundle of indexed-comonad operations over a fixed algebra.
///
/// Fields are public so tests can seed law-breaking mutants by replacing a
/// single operation.
#[derive(Clone)]
#[allow(clippy::type_complexity)]
pub struct IndexedComonadInstance {
    pub name: String,
    pub algebra: EffectAlgebra,
    /// `carrier_of(F, A)` describes the domain of `D F A` values.
    pub carrier_of: Arc<dyn Fn(&Index, &CarrierTy) -> Result<CarrierTy, SemError> + Send + Sync>,
    pub fmap: Arc<dyn Fn(&Index, &SemFn, &SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    pub epsilon: Arc<dyn Fn(&SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    pub delta: Arc<dyn Fn(&Index, &Index, &SemValue) -> Result<SemValue, SemError> + Send + Sync>,
    /// The `∨` of the semi-monoidal structure, on indices.
    pub vee: Arc<dyn Fn(&Index, &Index) -> Result<Index, SemError> + Send + Sync>,
    /// `m_{F,G}`, landing at index `vee(F, G)`.
    pub mzip: Arc<
        dyn Fn(&Index, &Index, &SemValue, &SemValue) -> Result<SemValue, SemError> + Send + Sync,
    >,
}

impl IndexedComonadInstance {
    pub fn carrier_of(&self, f: &Index, a: &CarrierTy) -> Result<CarrierTy, SemError> {
        (self.carrier_of)(f, a)
    }

    pub fn fmap(&self, f: &Index, g: &SemFn, d: &SemValue) -> Result<SemValue, SemError> {
        (self.fmap)(f, g, d)
    }

    pub fn epsilon(&self, d: &SemValue) -> Result<SemValue, SemError> {
        (self.epsilon)(d)
    }

    pub fn delta(&self, f: &Index, g: &Index, d: &SemValue) -> Result<SemValue, SemError> {
        (self.delta)(f, g, d)
    }

    pub fn vee(&self, f: &Index, g: &Index) -> Result<Index, SemError> {
        (self.vee)(f, g)
    }

    pub fn mzip(
        &self,
        f: &Index,
        g: &Index,
        d1: &SemValue,
        d2: &SemValue,
    ) -> Result<SemValue, SemError> {
        (self.mzip)(f, g, d1, d2)
    }
}

impl std::fmt::Debug for IndexedComonadInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IndexedComonadInstance({})", self.name)
    }
}

fn expect_flag(ix: &Index) -> Result<bool, SemError> {
    match ix {
        Index::Flag(b) => Ok(*b),
        other => Err(SemError::AlgebraMismatch(format!(
            "partiality comonad used with non-flag index {other}"
        ))),
    }
}

/// A value claimed at index `f` must be the one-point inhabitant.
fn expect_absent(d: &SemValue) -> Result<(), SemError> {
    match d {
        SemValue::Absent => Ok(()),
        other => Err(SemError::IndexMismatch(format!(
            "non-absent value {} at index f",
            crate::value::render_value(other)
        ))),
    }
}

/// The indexed partiality comonad: `D t A = A`, `D f A = 1`, with
/// `ε_t a = a`, `δ_{t,t} a = a`, and `δ_{X,Y}` the unique map into the
/// one-point object when `X = f` and/or `Y = f`.
pub fn make_partiality_instance() -> IndexedComonadInstance {
    let alg = EffectAlgebra::bool_conj();

    let carrier_of = Arc::new(|f: &Index, a: &CarrierTy| {
        Ok(if expect_flag(f)? {
            a.clone()
        } else {
            CarrierTy::One
        })
    });

    let fmap = Arc::new(|f: &Index, g: &SemFn, d: &SemValue| {
        if expect_flag(f)? {
            g(d)
        } else {
            expect_absent(d)?;
            Ok(SemValue::Absent)
        }
    });

    let epsilon = Arc::new(|d: &SemValue| Ok(d.clone()));

    let delta = Arc::new(|f: &Index, g: &Index, d: &SemValue| {
        if expect_flag(f)? && expect_flag(g)? {
            Ok(d.clone())
        } else {
            // F⊗G = f, so the input lives in the one-point object, and so
            // does the output (whether at the outer or the inner layer).
            expect_absent(d)?;
            Ok(SemValue::Absent)
        }
    });

    let vee_alg = alg.clone();
    let vee = Arc::new(move |f: &Index, g: &Index| Ok(vee_alg.combine(f, g)?));

    let mzip = Arc::new(|f: &Index, g: &Index, d1: &SemValue, d2: &SemValue| {
        let ft = expect_flag(f)?;
        let gt = expect_flag(g)?;
        if !ft {
            expect_absent(d1)?;
        }
        if !gt {
            expect_absent(d2)?;
        }
        Ok(if ft && gt {
            SemValue::pair(d1.clone(), d2.clone())
        } else {
            SemValue::Absent
        })
    });

    IndexedComonadInstance {
        name: "partiality".to_string(),
        algebra: alg,
        carrier_of,
        fmap,
        epsilon,
        delta,
        vee,
        mzip,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monad::sem_fn;
    use crate::value::{carrier_count, sem_eq_default};

    fn t() -> Index {
        Index::Flag(true)
    }

    fn f() -> Index {
        Index::Flag(false)
    }

    #[test]
    fn epsilon_is_identity_at_the_unit_index() {
        let inst = make_partiality_instance();
        let v = SemValue::IntMod(2, 4);
        assert!(sem_eq_default(&inst.epsilon(&v).unwrap(), &v).unwrap());
    }

    #[test]
    fn delta_collapses_when_either_index_is_f() {
        let inst = make_partiality_instance();
        assert!(matches!(
            inst.delta(&f(), &t(), &SemValue::Absent).unwrap(),
            SemValue::Absent
        ));
        assert!(matches!(
            inst.delta(&t(), &f(), &SemValue::Absent).unwrap(),
            SemValue::Absent
        ));
        let v = SemValue::IntMod(3, 4);
        assert!(sem_eq_default(&inst.delta(&t(), &t(), &v).unwrap(), &v).unwrap());
        // A non-absent value cannot be claimed at the collapsed index.
        assert!(matches!(
            inst.delta(&t(), &f(), &SemValue::IntMod(3, 4)),
            Err(SemError::IndexMismatch(_))
        ));
    }

    #[test]
    fn mzip_joins_with_conjunction() {
        let inst = make_partiality_instance();
        let a = SemValue::IntMod(1, 4);
        let b = SemValue::Bool(true);
        let both = inst.mzip(&t(), &t(), &a, &b).unwrap();
        assert!(sem_eq_default(&both, &SemValue::pair(a.clone(), b)).unwrap());
        // t ∧ f = f: the pair collapses to the one-point object.
        let half = inst.mzip(&t(), &f(), &a, &SemValue::Absent).unwrap();
        assert!(matches!(half, SemValue::Absent));
        assert_eq!(inst.vee(&t(), &f()).unwrap(), f());
    }

    #[test]
    fn fmap_acts_only_at_the_live_index() {
        let inst = make_partiality_instance();
        let succ = sem_fn(|x: &SemValue| match x {
            SemValue::IntMod(k, m) => Ok(SemValue::int_mod(*k as i64 + 1, *m)),
            _ => Err(SemError::IndexMismatch("expected int".to_string())),
        });
        let up = inst.fmap(&t(), &succ, &SemValue::IntMod(1, 4)).unwrap();
        assert!(sem_eq_default(&up, &SemValue::IntMod(2, 4)).unwrap());
        assert!(matches!(
            inst.fmap(&f(), &succ, &SemValue::Absent).unwrap(),
            SemValue::Absent
        ));
        assert!(matches!(
            inst.fmap(&f(), &succ, &SemValue::IntMod(1, 4)),
            Err(SemError::IndexMismatch(_))
        ));
    }

    #[test]
    fn shape_preservation_is_relaxed() {
        // |D f A| = 1 while |A| = 4: the indexed comonad changes shape,
        // which an ordinary comonad cannot.
        let inst = make_partiality_instance();
        let a = CarrierTy::IntMod(4);
        let at_f = inst.carrier_of(&f(), &a).unwrap();
        let at_t = inst.carrier_of(&t(), &a).unwrap();
        assert_eq!(carrier_count(&at_f), 1);
        assert_eq!(carrier_count(&at_t), 4);
    }
}
