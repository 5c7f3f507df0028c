//! Integer Laurent polynomials in a fixed number of variables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::{Field, Scalar};

/// Σ c_e q^e over exponent vectors e ∈ ℤ^n; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, c, vec![0; nvars])
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn monomial(nvars: usize, c: impl Into<BigInt>, exps: Vec<i64>) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// q_i^e.
    pub fn var_power(nvars: usize, i: usize, e: i64) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = e;
        Self::monomial(nvars, 1, exps)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.nvars)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    fn add_term(&mut self, exps: Vec<i64>, c: BigInt) {
        let entry = self.terms.entry(exps).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Substitutes q_i ↦ values[i]; None when a negative power meets a
    /// non-invertible value.
    pub fn evaluate(&self, field: Field, values: &[Scalar]) -> Option<Scalar> {
        assert_eq!(values.len(), self.nvars, "one value per variable");
        let mut total = field.zero();
        for (e, c) in &self.terms {
            let mut term = field.from_bigint(c);
            for (v, &k) in values.iter().zip(e) {
                term = term * v.pow(k)?;
            }
            total = total + term;
        }
        Some(total)
    }

    /// Rendering with the given variable names, highest exponent first.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "−" } else if k > 0 { "+" } else { "" };
            out.push_str(sign);
            out.push_str(&render_monomial(&c.abs(), e, names));
        }
        out
    }

    /// True when the polynomial is a single term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

fn render_monomial(c: &BigInt, exps: &[i64], names: &[String]) -> String {
    let mut vars = String::new();
    for (name, &e) in names.iter().zip(exps) {
        match e {
            0 => {}
            1 => vars.push_str(name),
            _ => {
                let _ = write!(vars, "{name}^{e}");
            }
        }
    }
    match (vars.is_empty(), c.is_one()) {
        (true, _) => c.to_string(),
        (false, true) => vars,
        (false, false) => format!("{c}{vars}"),
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    nvars: usize,
    terms: Vec<(Vec<i64>, String)>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LaurentRepr {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = LaurentRepr::deserialize(d)?;
        let mut p = LaurentPoly::zero(repr.nvars);
        for (e, c) in repr.terms {
            if e.len() != repr.nvars {
                return Err(D::Error::custom("exponent vector length"));
            }
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names() -> Vec<String> {
        vec!["q".into()]
    }

    #[test]
    fn arithmetic_and_rendering() {
        let q = LaurentPoly::var_power(1, 0, 1);
        let one = LaurentPoly::one(1);
        let qm1 = q.sub(&one);
        assert_eq!(qm1.render(&names()), "q−1");
        assert_eq!(q.mul(&LaurentPoly::var_power(1, 0, -1)), one);
        assert_eq!(qm1.sub(&qm1), LaurentPoly::zero(1));
        assert_eq!(LaurentPoly::monomial(1, -2, vec![-1]).render(&names()), "−2q^-1");
        let p = q.mul(&q).add(&q).add(&LaurentPoly::constant(1, -3));
        assert_eq!(p.render(&names()), "q^2+q−3");
        let two = [Field::Rational.from_i64(2)];
        assert_eq!(p.evaluate(Field::Rational, &two), Some(Field::Rational.from_i64(3)));
        let zero = [Field::Rational.zero()];
        assert_eq!(LaurentPoly::var_power(1, 0, -1).evaluate(Field::Rational, &zero), None);
    }

    #[test]
    fn serde_round_trip() {
        let p = LaurentPoly::monomial(2, 5, vec![1, -2]).add(&LaurentPoly::one(2));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), p);
    }

    fn poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i64..=3, -3i64..=3, -5i64..=5), 0..5).prop_map(|ts| {
            ts.into_iter().fold(LaurentPoly::zero(2), |acc, (a, b, c)| {
                acc.add(&LaurentPoly::monomial(2, c, vec![a, b]))
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]
        #[test]
        fn ring_laws(a in poly(), b in poly(), c in poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn evaluation_is_a_ring_map(a in poly(), b in poly(), x in 1i64..7, y in 1i64..7) {
            let f = Field::Prime(7);
            let v = [f.from_i64(x), f.from_i64(y)];
            let lhs = a.mul(&b).evaluate(f, &v).unwrap();
            let rhs = a.evaluate(f, &v).unwrap() * b.evaluate(f, &v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
