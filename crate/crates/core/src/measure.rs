//! F-valued Haar measure on a finite group normalised by a subgroup K, the
//! convolution algebra of functions, the idempotents Λ_U and the antipode.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};
use crate::fingroup::{FiniteGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("characteristic {characteristic} divides |K| = {order}")]
    OrdinaryViolation { order: usize, characteristic: u64 },
    #[error("function does not belong to this measure context")]
    ContextMismatch,
    #[error("μ(U) vanishes in characteristic {characteristic} (|U| = {size}, |K| = {k})")]
    VanishingMeasure { size: usize, k: usize, characteristic: u64 },
    #[error("Λ_U needs a nonempty set")]
    EmptySet,
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A function G → F stored densely by element index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupFunction {
    field: Field,
    values: Vec<Scalar>,
}

impl GroupFunction {
    pub fn zero(field: Field, order: usize) -> Self {
        GroupFunction {
            field,
            values: vec![field.zero(); order],
        }
    }

    pub fn from_values(field: Field, values: Vec<Scalar>) -> Self {
        assert!(values.iter().all(|v| v.field() == field));
        GroupFunction { field, values }
    }

    /// `c` on the set, 0 elsewhere.
    pub fn constant_on(field: Field, order: usize, set: &[usize], c: &Scalar) -> Self {
        let mut f = Self::zero(field, order);
        for &x in set {
            f.values[x] = c.clone();
        }
        f
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, x: usize) -> &Scalar {
        &self.values[x]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&x| !self.values[x].is_zero())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &GroupFunction) -> GroupFunction {
        assert_eq!(self.len(), other.len());
        GroupFunction {
            field: self.field,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> GroupFunction {
        GroupFunction {
            field: self.field,
            values: self.values.iter().map(|a| a * c).collect(),
        }
    }

    /// Serialisable sparse form.
    pub fn to_sparse(&self) -> SparseFunction {
        SparseFunction {
            support: self
                .support()
                .into_iter()
                .map(|x| {
                    let (n, d) = self.values[x].to_fraction();
                    (x, n.to_string(), d.to_string())
                })
                .collect(),
        }
    }
}

/// `{"support": [[element, numerator, denominator], ...]}`; in positive
/// characteristic the numerator is the residue and the denominator 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseFunction {
    pub support: Vec<(usize, String, String)>,
}

/// Group, normalising subgroup K and field, with char F ∤ |K|.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    group: Arc<FiniteGroup>,
    k: Subgroup,
    field: Field,
    inv_k: Scalar,
}

impl MeasureContext {
    pub fn new(group: Arc<FiniteGroup>, k: Subgroup, field: Field) -> Result<Self, MeasureError> {
        let inv_k = field
            .from_i64(k.order() as i64)
            .inverse()
            .ok_or(MeasureError::OrdinaryViolation {
                order: k.order(),
                characteristic: field.characteristic(),
            })?;
        Ok(MeasureContext {
            group,
            k,
            field,
            inv_k,
        })
    }

    /// K = {e}.
    pub fn trivial(group: Arc<FiniteGroup>, field: Field) -> Self {
        let k = group.trivial();
        Self::new(group, k, field).expect("|{e}| = 1 is invertible")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn k(&self) -> &Subgroup {
        &self.k
    }

    pub fn field(&self) -> Field {
        self.field
    }

    fn check(&self, f: &GroupFunction) -> Result<(), MeasureError> {
        if f.field == self.field && f.len() == self.group.order() {
            Ok(())
        } else {
            Err(MeasureError::ContextMismatch)
        }
    }

    /// Exact pre-image |X|/|K| of the measure.
    pub fn measure_rational(&self, set: &[usize]) -> Ratio<BigInt> {
        Ratio::new(BigInt::from(set.len()), BigInt::from(self.k.order()))
    }

    /// μ_K(X) = |X|/|K| in F.
    pub fn measure(&self, set: &[usize]) -> Result<Scalar, MeasureError> {
        if let Some(&x) = set.iter().find(|&&x| x >= self.group.order()) {
            return Err(MeasureError::ElementOutOfRange(x));
        }
        Ok(self.field.from_i64(set.len() as i64) * self.inv_k.clone())
    }

    pub fn zero_function(&self) -> GroupFunction {
        GroupFunction::zero(self.field, self.group.order())
    }

    pub fn indicator(&self, set: &[usize]) -> GroupFunction {
        GroupFunction::constant_on(self.field, self.group.order(), set, &self.field.one())
    }

    /// (Ψ⋆Θ)(x) = (1/|K|)·Σ_y Ψ(y)Θ(y⁻¹x).
    pub fn convolve(&self, psi: &GroupFunction, theta: &GroupFunction) -> Result<GroupFunction, MeasureError> {
        self.check(psi)?;
        self.check(theta)?;
        let g = &self.group;
        let mut out = self.zero_function();
        let theta_support = theta.support();
        for y in psi.support() {
            let a = psi.value(y);
            for &z in &theta_support {
                let x = g.mul(y, z);
                out.values[x] = &out.values[x] + &(a * theta.value(z));
            }
        }
        Ok(out.scale(&self.inv_k))
    }

    /// Λ_U: 1/μ_K(U) on U, 0 elsewhere.
    pub fn lambda(&self, set: &[usize]) -> Result<GroupFunction, MeasureError> {
        if set.is_empty() {
            return Err(MeasureError::EmptySet);
        }
        let mu = self.measure(set)?;
        let c = mu.inverse().ok_or(MeasureError::VanishingMeasure {
            size: set.len(),
            k: self.k.order(),
            characteristic: self.field.characteristic(),
        })?;
        Ok(GroupFunction::constant_on(self.field, self.group.order(), set, &c))
    }

    /// x ↦ Θ(g⁻¹xg), the function written ᵍΘ^{g⁻¹}.
    pub fn conjugate(&self, theta: &GroupFunction, g: usize) -> Result<GroupFunction, MeasureError> {
        self.check(theta)?;
        let grp = &self.group;
        let gi = grp.inv(g);
        Ok(GroupFunction {
            field: self.field,
            values: (0..grp.order())
                .map(|x| theta.value(grp.conj(gi, x)).clone())
                .collect(),
        })
    }

    /// σ(Θ)(x) = Θ(x⁻¹).
    pub fn antipode(&self, theta: &GroupFunction) -> Result<GroupFunction, MeasureError> {
        self.check(theta)?;
        Ok(antipode(&self.group, theta))
    }
}

/// σ(Θ)(x) = Θ(x⁻¹).
pub fn antipode(group: &FiniteGroup, theta: &GroupFunction) -> GroupFunction {
    GroupFunction {
        field: theta.field,
        values: (0..group.order())
            .map(|x| theta.value(group.inv(x)).clone())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularCheck {
    /// |H : H ∩ xHx⁻¹|.
    pub index_conjugate: u64,
    /// |H : H ∩ x⁻¹Hx|.
    pub index_inverse_conjugate: u64,
    /// Δ(x) as an exact ratio (numerator, denominator).
    pub delta: (u64, u64),
    pub unimodular: bool,
}

/// Δ(x) from Δ(x)·|H : H∩x⁻¹Hx| = |H : H∩xHx⁻¹|.
pub fn modular_check(group: &FiniteGroup, h: &Subgroup, x: usize) -> ModularCheck {
    let idx = |g: usize| {
        let meet = group.intersection(h, &group.conjugate(h, g));
        (h.order() / meet.order()) as u64
    };
    let a = idx(x);
    let b = idx(group.inv(x));
    let delta = Ratio::new(a, b);
    ModularCheck {
        index_conjugate: a,
        index_inverse_conjugate: b,
        delta: (*delta.numer(), *delta.denom()),
        unimodular: a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::gl_n_fq;
    use proptest::prelude::*;

    fn gl22_ctx(c: u64) -> (crate::fingroup::BnPairData, MeasureContext) {
        let bn = gl_n_fq(2, 2).unwrap();
        let ctx = MeasureContext::new(
            Arc::new(bn.group.clone()),
            bn.b.clone(),
            Field::from_characteristic(c).unwrap(),
        )
        .unwrap();
        (bn, ctx)
    }

    #[test]
    fn measure_values() {
        let (bn, ctx) = gl22_ctx(0);
        assert!(ctx.measure(bn.b.elements()).unwrap().is_one());
        let whole: Vec<usize> = (0..6).collect();
        assert_eq!(ctx.measure(&whole).unwrap(), Field::Rational.from_i64(3));
        assert!(ctx.measure(&[]).unwrap().is_zero());
    }

    #[test]
    fn ordinary_violation() {
        let bn = gl_n_fq(2, 2).unwrap();
        let err = MeasureContext::new(Arc::new(bn.group.clone()), bn.b.clone(), Field::Prime(2));
        assert!(matches!(err, Err(MeasureError::OrdinaryViolation { order: 2, characteristic: 2 })));
    }

    #[test]
    fn lambda_is_idempotent_and_unit() {
        let (bn, ctx) = gl22_ctx(0);
        let lb = ctx.lambda(bn.b.elements()).unwrap();
        assert!(lb.values().iter().enumerate().all(|(x, v)| v.is_one() == bn.b.contains(x)));
        assert_eq!(ctx.convolve(&lb, &lb).unwrap(), lb);
        let theta_s = ctx.indicator(bn.cell(&bn.weyl.generator(0).unwrap()).unwrap());
        assert_eq!(ctx.convolve(&lb, &theta_s).unwrap(), theta_s);
        assert_eq!(ctx.convolve(&theta_s, &lb).unwrap(), theta_s);
    }

    #[test]
    fn quadratic_relation_by_convolution() {
        let (bn, ctx) = gl22_ctx(0);
        let s = bn.weyl.generator(0).unwrap();
        let theta_s = ctx.indicator(bn.cell(&s).unwrap());
        let theta_e = ctx.indicator(bn.b.elements());
        let expected = theta_s.add(&theta_e.scale(&Field::Rational.from_i64(2)));
        assert_eq!(ctx.convolve(&theta_s, &theta_s).unwrap(), expected);
    }

    #[test]
    fn vanishing_measure() {
        let bn = gl_n_fq(2, 2).unwrap();
        let g = Arc::new(bn.group.clone());
        let ctx = MeasureContext::trivial(g, Field::Prime(3));
        let u: Vec<usize> = bn.cell(&bn.weyl.identity()).unwrap().to_vec();
        assert!(ctx.lambda(&u).is_ok());
        let three: Vec<usize> = (0..3).collect();
        assert!(matches!(ctx.lambda(&three), Err(MeasureError::VanishingMeasure { .. })));
        assert_eq!(ctx.lambda(&[]), Err(MeasureError::EmptySet));
    }

    #[test]
    fn antipode_on_cells() {
        let bn = gl_n_fq(3, 2).unwrap();
        let ctx = MeasureContext::new(Arc::new(bn.group.clone()), bn.b.clone(), Field::Rational).unwrap();
        for w in bn.weyl_elements() {
            let wi = bn.weyl.invert(w).unwrap();
            let theta = ctx.indicator(bn.cell(w).unwrap());
            assert_eq!(ctx.antipode(&theta).unwrap(), ctx.indicator(bn.cell(&wi).unwrap()));
            assert_eq!(ctx.antipode(&ctx.antipode(&theta).unwrap()).unwrap(), theta);
        }
        let lb = ctx.lambda(bn.b.elements()).unwrap();
        assert_eq!(ctx.antipode(&lb).unwrap(), lb);
    }

    #[test]
    fn modular_function_is_trivial() {
        let bn = gl_n_fq(2, 2).unwrap();
        let s = bn.simple_lifts[0];
        let m = modular_check(&bn.group, &bn.b, s);
        assert_eq!((m.index_conjugate, m.index_inverse_conjugate), (2, 2));
        assert!(m.unimodular);
        let whole = bn.group.whole();
        let m = modular_check(&bn.group, &whole, s);
        assert_eq!((m.index_conjugate, m.index_inverse_conjugate), (1, 1));
    }

    #[test]
    fn associativity_on_basis_functions() {
        let (_, ctx) = gl22_ctx(0);
        let delta = |x: usize| ctx.indicator(&[x]);
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let left = ctx.convolve(&ctx.convolve(&delta(a), &delta(b)).unwrap(), &delta(c)).unwrap();
                    let right = ctx.convolve(&delta(a), &ctx.convolve(&delta(b), &delta(c)).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    fn gl23_function(field: Field, coeffs: &[i64]) -> GroupFunction {
        GroupFunction::from_values(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 24, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

        #[test]
        fn convolution_associative_and_antipode_reverses(
            a in proptest::collection::vec(-2i64..3, 48),
            b in proptest::collection::vec(-2i64..3, 48),
            c in proptest::collection::vec(-2i64..3, 48),
        ) {
            let bn = gl_n_fq(2, 3).unwrap();
            let field = Field::Prime(5);
            let ctx = MeasureContext::new(Arc::new(bn.group.clone()), bn.b.clone(), field).unwrap();
            let (a, b, c) = (gl23_function(field, &a), gl23_function(field, &b), gl23_function(field, &c));
            let ab = ctx.convolve(&a, &b).unwrap();
            prop_assert_eq!(
                ctx.convolve(&ab, &c).unwrap(),
                ctx.convolve(&a, &ctx.convolve(&b, &c).unwrap()).unwrap()
            );
            let sa = ctx.antipode(&a).unwrap();
            let sb = ctx.antipode(&b).unwrap();
            prop_assert_eq!(ctx.antipode(&ab).unwrap(), ctx.convolve(&sb, &sa).unwrap());
        }
    }
}
