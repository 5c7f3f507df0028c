//! Multiparameter Iwahori–Hecke algebras over ℤ[q_c, q_c⁻¹], their
//! (anti-)involutions and specializations, and the spherical Hecke algebra
//! ℋ(B\G/B) of a finite BN-pair with the isomorphism check.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cartan::CoxeterOrder;
use crate::coxeter::{CoxeterError, CoxeterSystem, WeylElement};
use crate::field::{Field, Scalar};
use crate::fingroup::BnPairData;
use crate::laurent::LaurentPoly;
use crate::measure::{GroupFunction, MeasureContext, MeasureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("elements belong to different Hecke algebras")]
    SystemMismatch,
    #[error("parameter for class {class} is not invertible")]
    NonInvertibleParameter { class: usize },
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("characteristic {characteristic} divides |B| = {order}")]
    OrdinaryViolation { order: usize, characteristic: u64 },
    #[error("convolution of Θ_{u} and Θ_{v} is not B-bi-invariant")]
    NotClosed { u: String, v: String },
    #[error("q_s differs inside parameter class {class}")]
    InconsistentParameters { class: usize },
}

/// Classes of S under W-conjugacy: components of the graph with an edge s–t
/// whenever m_st is odd.
pub fn parameter_classes(sys: &CoxeterSystem) -> Vec<Vec<usize>> {
    let n = sys.rank();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if let CoxeterOrder::Finite(m) = sys.coxeter().entry(i, j) {
                if m % 2 == 1 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    classes.into_values().collect()
}

/// The algebra ℍ: a Coxeter system with its parameter classes.
#[derive(Debug)]
pub struct HeckeAlgebra {
    sys: CoxeterSystem,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    names: Vec<String>,
}

impl HeckeAlgebra {
    pub fn new(sys: CoxeterSystem) -> Arc<Self> {
        let classes = parameter_classes(&sys);
        let mut class_of = vec![0; sys.rank()];
        for (c, members) in classes.iter().enumerate() {
            for &s in members {
                class_of[s] = c;
            }
        }
        let names = if classes.len() == 1 {
            vec!["q".to_string()]
        } else {
            (0..classes.len()).map(|c| format!("q{c}")).collect()
        };
        Arc::new(HeckeAlgebra {
            sys,
            classes,
            class_of,
            names,
        })
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.sys
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, s: usize) -> usize {
        self.class_of[s]
    }

    pub fn variable_names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.classes.len()
    }

    /// q_s as a Laurent polynomial.
    pub fn q(&self, s: usize) -> LaurentPoly {
        LaurentPoly::var_power(self.nvars(), self.class_of[s], 1)
    }

    pub fn zero(self: &Arc<Self>) -> HeckeElement {
        HeckeElement {
            algebra: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(self: &Arc<Self>, w: &WeylElement) -> HeckeElement {
        let mut e = self.zero();
        e.terms.insert(w.clone(), LaurentPoly::one(self.nvars()));
        e
    }

    pub fn basis_word(self: &Arc<Self>, word: &[usize]) -> Result<HeckeElement, HeckeError> {
        Ok(self.basis(&self.sys.reduce_word(word)?))
    }

    pub fn unit(self: &Arc<Self>) -> HeckeElement {
        self.basis(&self.sys.identity())
    }

    pub fn t(self: &Arc<Self>, s: usize) -> Result<HeckeElement, HeckeError> {
        Ok(self.basis(&self.sys.generator(s)?))
    }

    /// T_s⁻¹ = q_s⁻¹T_s + (q_s⁻¹ − 1)T_e.
    pub fn t_inverse(self: &Arc<Self>, s: usize) -> Result<HeckeElement, HeckeError> {
        let qi = LaurentPoly::var_power(self.nvars(), self.class_of[s], -1);
        let ts = self.t(s)?.scale(&qi);
        let e = self.unit().scale(&qi.sub(&LaurentPoly::one(self.nvars())));
        ts.add(&e)
    }

    /// ι_IM(T_s) = −q_s T_s⁻¹ = (q_s − 1)T_e − T_s.
    pub fn iota_generator(self: &Arc<Self>, s: usize) -> Result<HeckeElement, HeckeError> {
        let qm1 = self.q(s).sub(&LaurentPoly::one(self.nvars()));
        self.unit().scale(&qm1).sub(&self.t(s)?)
    }

    /// Left multiplication by T_s: T_sT_w = T_{sw} if l(sw) > l(w), and
    /// q_sT_{sw} + (q_s − 1)T_w otherwise.
    fn left_mul_t(&self, s: usize, a: &BTreeMap<WeylElement, LaurentPoly>) -> Result<BTreeMap<WeylElement, LaurentPoly>, HeckeError> {
        let q = self.q(s);
        let qm1 = q.sub(&LaurentPoly::one(self.nvars()));
        let mut out: BTreeMap<WeylElement, LaurentPoly> = BTreeMap::new();
        for (w, p) in a {
            let sw = self.sys.left_mul_generator(s, w)?;
            if sw.length() > w.length() {
                add_into(&mut out, sw, p.clone());
            } else {
                add_into(&mut out, sw, q.mul(p));
                add_into(&mut out, w.clone(), qm1.mul(p));
            }
        }
        Ok(out)
    }
}

fn add_into(map: &mut BTreeMap<WeylElement, LaurentPoly>, w: WeylElement, p: LaurentPoly) {
    if p.is_zero() {
        return;
    }
    let sum = match map.remove(&w) {
        Some(existing) => existing.add(&p),
        None => p,
    };
    if !sum.is_zero() {
        map.insert(w, sum);
    }
}

/// Σ p_w T_w with no zero coefficients.
#[derive(Clone)]
pub struct HeckeElement {
    algebra: Arc<HeckeAlgebra>,
    terms: BTreeMap<WeylElement, LaurentPoly>,
}

impl PartialEq for HeckeElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.terms == other.terms
    }
}

impl Eq for HeckeElement {}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Longest words first, e.g. `(q−1)·T_[0] + q·T_[]`.
impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.algebra.variable_names();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(w, p)| {
                let basis = format!("T_{}", word_string(w.word()));
                if p.is_one() {
                    basis
                } else if p.is_monomial() {
                    let c = p.render(names);
                    if c == "−1" {
                        format!("−{basis}")
                    } else {
                        format!("{c}·{basis}")
                    }
                } else {
                    format!("({})·{basis}", p.render(names))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn word_string(word: &[usize]) -> String {
    let parts: Vec<String> = word.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

impl HeckeElement {
    pub fn algebra(&self) -> &Arc<HeckeAlgebra> {
        &self.algebra
    }

    pub fn terms(&self) -> &BTreeMap<WeylElement, LaurentPoly> {
        &self.terms
    }

    pub fn coefficient(&self, w: &WeylElement) -> LaurentPoly {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| LaurentPoly::zero(self.algebra.nvars()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same(&self, other: &HeckeElement) -> Result<(), HeckeError> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(HeckeError::SystemMismatch)
        }
    }

    fn with_terms(&self, terms: BTreeMap<WeylElement, LaurentPoly>) -> HeckeElement {
        HeckeElement {
            algebra: self.algebra.clone(),
            terms,
        }
    }

    pub fn add(&self, other: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        self.same(other)?;
        let mut terms = self.terms.clone();
        for (w, p) in &other.terms {
            add_into(&mut terms, w.clone(), p.clone());
        }
        Ok(self.with_terms(terms))
    }

    pub fn sub(&self, other: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        self.add(&other.scale(&LaurentPoly::constant(self.algebra.nvars(), -1)))
    }

    pub fn scale(&self, c: &LaurentPoly) -> HeckeElement {
        let mut terms = BTreeMap::new();
        for (w, p) in &self.terms {
            add_into(&mut terms, w.clone(), c.mul(p));
        }
        self.with_terms(terms)
    }

    pub fn mul(&self, other: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        self.same(other)?;
        let mut out = BTreeMap::new();
        for (u, p) in &self.terms {
            let mut acc = other.terms.clone();
            for &s in u.word().iter().rev() {
                acc = self.algebra.left_mul_t(s, &acc)?;
            }
            for (w, c) in acc {
                add_into(&mut out, w, p.mul(&c));
            }
        }
        Ok(self.with_terms(out))
    }

    /// σ(T_w) = T_{w⁻¹}, extended linearly.
    pub fn antipode(&self) -> Result<HeckeElement, HeckeError> {
        let mut terms = BTreeMap::new();
        for (w, p) in &self.terms {
            add_into(&mut terms, self.algebra.sys.invert(w)?, p.clone());
        }
        Ok(self.with_terms(terms))
    }

    /// The homomorphism with T_s ↦ (q_s − 1)T_e − T_s.
    pub fn iota_im(&self) -> Result<HeckeElement, HeckeError> {
        self.image_along_words(false)
    }

    /// The anti-homomorphism with T_s ↦ (q_s − 1)T_e − T_s.
    pub fn sigma_im(&self) -> Result<HeckeElement, HeckeError> {
        self.image_along_words(true)
    }

    fn image_along_words(&self, reverse: bool) -> Result<HeckeElement, HeckeError> {
        let alg = &self.algebra;
        let images: Vec<HeckeElement> = (0..alg.sys.rank())
            .map(|s| alg.iota_generator(s))
            .collect::<Result<_, _>>()?;
        let mut out = alg.zero();
        for (w, p) in &self.terms {
            let mut acc = alg.unit();
            let word: Vec<usize> = if reverse {
                w.word().iter().rev().copied().collect()
            } else {
                w.word().to_vec()
            };
            for s in word {
                acc = acc.mul(&images[s])?;
            }
            out = out.add(&acc.scale(p))?;
        }
        Ok(out)
    }

    /// Substitutes the parameters coefficientwise into F.
    pub fn specialize(&self, field: Field, values: &[Scalar]) -> Result<SpecializedElement, HeckeError> {
        check_parameters(self.algebra.nvars(), values)?;
        let mut terms = BTreeMap::new();
        for (w, p) in &self.terms {
            let v = p.evaluate(field, values).expect("parameters are invertible");
            if !v.is_zero() {
                terms.insert(w.clone(), v);
            }
        }
        Ok(SpecializedElement { field, terms })
    }
}

fn check_parameters(nvars: usize, values: &[Scalar]) -> Result<(), HeckeError> {
    if values.len() != nvars {
        return Err(HeckeError::ParameterCount {
            expected: nvars,
            got: values.len(),
        });
    }
    if let Some(class) = values.iter().position(Scalar::is_zero) {
        return Err(HeckeError::NonInvertibleParameter { class });
    }
    Ok(())
}

/// Σ c_w T_w with coefficients in a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializedElement {
    pub field: Field,
    pub terms: BTreeMap<WeylElement, Scalar>,
}

impl SpecializedElement {
    pub fn coefficient(&self, w: &WeylElement) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }
}

/// The specialized algebra: same multiplication rule with q_s ∈ F.
pub fn specialized_multiply(
    algebra: &HeckeAlgebra,
    values: &[Scalar],
    a: &SpecializedElement,
    b: &SpecializedElement,
) -> Result<SpecializedElement, HeckeError> {
    check_parameters(algebra.nvars(), values)?;
    let field = a.field;
    let one = field.one();
    let mut out: BTreeMap<WeylElement, Scalar> = BTreeMap::new();
    let push = |map: &mut BTreeMap<WeylElement, Scalar>, w: WeylElement, c: Scalar| {
        let sum = match map.remove(&w) {
            Some(x) => &x + &c,
            None => c,
        };
        if !sum.is_zero() {
            map.insert(w, sum);
        }
    };
    for (u, p) in &a.terms {
        let mut acc = b.terms.clone();
        for &s in u.word().iter().rev() {
            let q = &values[algebra.class_of(s)];
            let qm1 = q + &(-one.clone());
            let mut next = BTreeMap::new();
            for (w, c) in acc {
                let sw = algebra.sys.left_mul_generator(s, &w)?;
                if sw.length() > w.length() {
                    push(&mut next, sw, c);
                } else {
                    push(&mut next, sw, q * &c);
                    push(&mut next, w, &qm1 * &c);
                }
            }
            acc = next;
        }
        for (w, c) in acc {
            push(&mut out, w, p * &c);
        }
    }
    Ok(SpecializedElement { field, terms: out })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub quadratic: bool,
    pub braid: bool,
    pub pairs_checked: usize,
}

/// Quadratic relations for the images of T_s and braid relations for all
/// finite m_st, under ι_IM (reverse = false) or σ_IM (reverse = true).
pub fn involution_relations(algebra: &Arc<HeckeAlgebra>, reverse: bool) -> Result<RelationReport, HeckeError> {
    let n = algebra.sys.rank();
    let images: Vec<HeckeElement> = (0..n).map(|s| algebra.iota_generator(s)).collect::<Result<_, _>>()?;
    let mut quadratic = true;
    for (s, x) in images.iter().enumerate() {
        let q = algebra.unit().scale(&algebra.q(s));
        quadratic &= x.sub(&q)?.mul(&x.add(&algebra.unit())?)?.is_zero();
    }
    let mut braid = true;
    let mut pairs_checked = 0;
    let alternate = |a: &HeckeElement, b: &HeckeElement, m: u32| -> Result<HeckeElement, HeckeError> {
        let mut acc = algebra.unit();
        for k in 0..m {
            let f = if k % 2 == 0 { a } else { b };
            acc = if reverse { f.mul(&acc)? } else { acc.mul(f)? };
        }
        Ok(acc)
    };
    for s in 0..n {
        for t in s + 1..n {
            if let CoxeterOrder::Finite(m) = algebra.sys.coxeter().entry(s, t) {
                pairs_checked += 1;
                braid &= alternate(&images[s], &images[t], m)? == alternate(&images[t], &images[s], m)?;
            }
        }
    }
    Ok(RelationReport {
        quadratic,
        braid,
        pairs_checked,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Involution {
    Identity,
    Antipode,
    SigmaIm,
    IotaIm,
}

impl Involution {
    pub const ALL: [Involution; 4] = [Involution::Identity, Involution::Antipode, Involution::SigmaIm, Involution::IotaIm];

    pub fn apply(self, a: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        match self {
            Involution::Identity => Ok(a.clone()),
            Involution::Antipode => a.antipode(),
            Involution::SigmaIm => a.sigma_im(),
            Involution::IotaIm => a.iota_im(),
        }
    }

    /// Product in the Klein four-group with σ·ι_IM = σ_IM.
    pub fn klein_product(self, other: Involution) -> Involution {
        let bits = |x: Involution| match x {
            Involution::Identity => 0u8,
            Involution::Antipode => 1,
            Involution::IotaIm => 2,
            Involution::SigmaIm => 3,
        };
        match bits(self) ^ bits(other) {
            0 => Involution::Identity,
            1 => Involution::Antipode,
            2 => Involution::IotaIm,
            _ => Involution::SigmaIm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleinReport {
    pub basis_checked: usize,
    /// table[i][j] is the map equal to ALL[i]∘ALL[j] on every basis element.
    pub table: Vec<Vec<Option<Involution>>>,
    pub is_klein: bool,
    pub iota_homomorphism: bool,
    pub sigma_im_antihomomorphism: bool,
    pub antipode_antihomomorphism: bool,
}

/// Composition table of {Id, σ, σ_IM, ι_IM} on T_w with l(w) ≤ max_length, and
/// (anti-)multiplicativity on all pairs of those basis elements.
pub fn klein_four_check(algebra: &Arc<HeckeAlgebra>, max_length: usize) -> Result<KleinReport, HeckeError> {
    let basis: Vec<HeckeElement> = algebra
        .sys
        .ball(max_length)?
        .iter()
        .map(|w| algebra.basis(w))
        .collect();
    let images: Vec<Vec<HeckeElement>> = Involution::ALL
        .iter()
        .map(|inv| basis.iter().map(|b| inv.apply(b)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let mut table = vec![vec![None; 4]; 4];
    let mut is_klein = true;
    for (i, a) in Involution::ALL.iter().enumerate() {
        for (j, b) in Involution::ALL.iter().enumerate() {
            let composed: Vec<HeckeElement> = images[j].iter().map(|x| a.apply(x)).collect::<Result<_, _>>()?;
            let found = (0..4).find(|&k| composed == images[k]).map(|k| Involution::ALL[k]);
            is_klein &= found == Some(a.klein_product(*b));
            table[i][j] = found;
        }
    }
    let mut iota_homomorphism = true;
    let mut sigma_im_antihomomorphism = true;
    let mut antipode_antihomomorphism = true;
    for (x, ix) in basis.iter().zip(0..) {
        for (y, iy) in basis.iter().zip(0..) {
            let xy = x.mul(y)?;
            iota_homomorphism &= xy.iota_im()? == images[3][ix].mul(&images[3][iy])?;
            sigma_im_antihomomorphism &= xy.sigma_im()? == images[2][iy].mul(&images[2][ix])?;
            antipode_antihomomorphism &= xy.antipode()? == images[1][iy].mul(&images[1][ix])?;
        }
    }
    Ok(KleinReport {
        basis_checked: basis.len(),
        table,
        is_klein,
        iota_homomorphism,
        sigma_im_antihomomorphism,
        antipode_antihomomorphism,
    })
}

/// Structure constants of ℋ(B\G/B) in the basis Θ_w = 1_{BẇB}, with μ(B) = 1.
#[derive(Debug, Clone)]
pub struct SphericalHecke {
    pub field: Field,
    pub weyl: Vec<WeylElement>,
    /// constants[u][v][w]: coefficient of Θ_w in Θ_u⋆Θ_v.
    pub constants: Vec<Vec<Vec<Scalar>>>,
}

pub fn spherical_hecke(bn: &BnPairData, field: Field) -> Result<SphericalHecke, HeckeError> {
    let ctx = MeasureContext::new(Arc::new(bn.group.clone()), bn.b.clone(), field).map_err(|e| match e {
        MeasureError::OrdinaryViolation { order, characteristic } => HeckeError::OrdinaryViolation { order, characteristic },
        other => other.into(),
    })?;
    let weyl = bn.weyl_elements().to_vec();
    let thetas: Vec<GroupFunction> = weyl.iter().map(|w| ctx.indicator(bn.cell(w).expect("cell"))).collect();
    let mut constants = Vec::with_capacity(weyl.len());
    for (u, tu) in weyl.iter().zip(&thetas) {
        let mut row = Vec::with_capacity(weyl.len());
        for (v, tv) in weyl.iter().zip(&thetas) {
            let prod = ctx.convolve(tu, tv)?;
            let mut coeffs = Vec::with_capacity(weyl.len());
            let mut rebuilt = ctx.zero_function();
            for (w, tw) in weyl.iter().zip(&thetas) {
                let lift = bn.lift(w).expect("lift");
                let c = prod.value(lift).clone();
                rebuilt = rebuilt.add(&tw.scale(&c));
                coeffs.push(c);
            }
            if rebuilt != prod {
                return Err(HeckeError::NotClosed {
                    u: u.to_string(),
                    v: v.to_string(),
                });
            }
            row.push(coeffs);
        }
        constants.push(row);
    }
    Ok(SphericalHecke {
        field,
        weyl,
        constants,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoMismatch {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    pub hecke: String,
    pub convolution: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoReport {
    pub field: Field,
    /// q per parameter class, as |B : B ∩ ṡBṡ⁻¹|.
    pub parameters: Vec<u64>,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub mismatches: Vec<IsoMismatch>,
}

impl IsoReport {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares T_uT_v specialized at q_s = |B : B ∩ ṡBṡ⁻¹| with Θ_u⋆Θ_v for all
/// u, v ∈ W.
pub fn iso_check(bn: &BnPairData, field: Field) -> Result<IsoReport, HeckeError> {
    let sph = spherical_hecke(bn, field)?;
    let algebra = HeckeAlgebra::new(bn.weyl.clone());
    let mut parameters = Vec::with_capacity(algebra.nvars());
    for (c, members) in algebra.classes().iter().enumerate() {
        let q = bn.q_parameter(members[0]);
        if members.iter().any(|&s| bn.q_parameter(s) != q) {
            return Err(HeckeError::InconsistentParameters { class: c });
        }
        parameters.push(q);
    }
    let values: Vec<Scalar> = parameters.iter().map(|&q| field.from_i64(q as i64)).collect();
    let mut mismatches = Vec::new();
    let mut pairs_checked = 0;
    for (iu, u) in sph.weyl.iter().enumerate() {
        for (iv, v) in sph.weyl.iter().enumerate() {
            pairs_checked += 1;
            let prod = algebra.basis(u).mul(&algebra.basis(v))?.specialize(field, &values)?;
            for (iw, w) in sph.weyl.iter().enumerate() {
                let expected = prod.coefficient(w);
                let got = &sph.constants[iu][iv][iw];
                if expected != *got {
                    mismatches.push(IsoMismatch {
                        u: u.word().to_vec(),
                        v: v.word().to_vec(),
                        w: w.word().to_vec(),
                        hecke: format!("{expected}"),
                        convolution: format!("{got}"),
                    });
                }
            }
        }
    }
    Ok(IsoReport {
        field,
        parameters,
        basis_size: sph.weyl.len(),
        pairs_checked,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::GeneralizedCartanMatrix;
    use crate::fingroup::gl_n_fq;
    use proptest::prelude::*;

    fn algebra(rows: Vec<Vec<i64>>) -> Arc<HeckeAlgebra> {
        HeckeAlgebra::new(CoxeterSystem::new(GeneralizedCartanMatrix::new(rows).unwrap()))
    }

    fn a2() -> Arc<HeckeAlgebra> {
        algebra(vec![vec![2, -1], vec![-1, 2]])
    }

    fn b2() -> Arc<HeckeAlgebra> {
        algebra(vec![vec![2, -2], vec![-1, 2]])
    }

    fn g2() -> Arc<HeckeAlgebra> {
        algebra(vec![vec![2, -3], vec![-1, 2]])
    }

    fn affine() -> Arc<HeckeAlgebra> {
        algebra(vec![vec![2, -2], vec![-2, 2]])
    }

    #[test]
    fn classes() {
        assert_eq!(a2().classes(), &[vec![0, 1]]);
        assert_eq!(b2().classes().len(), 2);
        assert_eq!(affine().classes().len(), 2);
        assert_eq!(g2().classes().len(), 2);
    }

    #[test]
    fn quadratic_relation_and_display() {
        let h = a2();
        let t0 = h.t(0).unwrap();
        let sq = t0.mul(&t0).unwrap();
        assert_eq!(sq.to_string(), "(q−1)·T_[0] + q·T_[]");
        assert_eq!(h.unit().mul(&t0).unwrap(), t0);
        assert_eq!(t0.mul(&h.t_inverse(0).unwrap()).unwrap(), h.unit());
        let t1 = h.t(1).unwrap();
        let sts = t0.mul(&t1).unwrap().mul(&t0).unwrap();
        let tst = t1.mul(&t0).unwrap().mul(&t1).unwrap();
        assert_eq!(sts, tst);
        assert_eq!(sts, h.basis_word(&[0, 1, 0]).unwrap());
    }

    #[test]
    fn iota_on_generators() {
        for h in [a2(), b2(), g2(), affine()] {
            for s in 0..2 {
                let t = h.t(s).unwrap();
                let i = t.iota_im().unwrap();
                assert_eq!(i, h.iota_generator(s).unwrap());
                assert_eq!(i.iota_im().unwrap(), t);
                let minus_q_tinv = h.t_inverse(s).unwrap().scale(&h.q(s).neg());
                assert_eq!(i, minus_q_tinv);
            }
            for reverse in [false, true] {
                let r = involution_relations(&h, reverse).unwrap();
                assert!(r.quadratic && r.braid);
            }
        }
    }

    #[test]
    fn klein_four_group() {
        for h in [a2(), b2()] {
            let r = klein_four_check(&h, 3).unwrap();
            assert!(r.is_klein, "{:?}", r.table);
            assert!(r.iota_homomorphism && r.sigma_im_antihomomorphism && r.antipode_antihomomorphism);
        }
    }

    #[test]
    fn specialization() {
        let h = a2();
        let t0 = h.t(0).unwrap();
        let f = Field::Rational;
        let sq = t0.mul(&t0).unwrap();
        let one = [f.one()];
        let at1 = sq.specialize(f, &one).unwrap();
        assert_eq!(at1.terms.len(), 1);
        assert_eq!(at1.coefficient(&h.system().identity()), f.one());
        let two = [f.from_i64(2)];
        let at2 = sq.specialize(f, &two).unwrap();
        assert_eq!(at2.coefficient(&h.system().generator(0).unwrap()), f.one());
        assert_eq!(at2.coefficient(&h.system().identity()), f.from_i64(2));
        let inv = h.t_inverse(0).unwrap().specialize(f, &two).unwrap();
        assert_eq!(inv.coefficient(&h.system().identity()), f.from_ratio(-1, 2).unwrap());
        assert_eq!(inv.coefficient(&h.system().generator(0).unwrap()), f.from_ratio(1, 2).unwrap());
        assert_eq!(
            sq.specialize(f, &[f.zero()]),
            Err(HeckeError::NonInvertibleParameter { class: 0 })
        );
        let other = b2();
        assert_eq!(t0.mul(&other.t(0).unwrap()), Err(HeckeError::SystemMismatch));
    }

    #[test]
    fn spherical_structure_constants() {
        let f = Field::Rational;
        for (q, expect_s, expect_e) in [(2u64, 1i64, 2i64), (3, 2, 3)] {
            let bn = gl_n_fq(2, q).unwrap();
            let sph = spherical_hecke(&bn, f).unwrap();
            let s = sph.weyl.iter().position(|w| w.length() == 1).unwrap();
            let e = sph.weyl.iter().position(|w| w.length() == 0).unwrap();
            assert_eq!(sph.constants[s][s][s], f.from_i64(expect_s));
            assert_eq!(sph.constants[s][s][e], f.from_i64(expect_e));
            for v in 0..sph.weyl.len() {
                for w in 0..sph.weyl.len() {
                    let unit = if v == w { f.one() } else { f.zero() };
                    assert_eq!(sph.constants[e][v][w], unit);
                }
            }
        }
        assert!(matches!(
            spherical_hecke(&gl_n_fq(2, 2).unwrap(), Field::Prime(2)),
            Err(HeckeError::OrdinaryViolation { .. })
        ));
    }

    #[test]
    fn isomorphism_small_groups() {
        for (q, p) in [(2, 5), (3, 5)] {
            let bn = gl_n_fq(2, q).unwrap();
            for f in [Field::Rational, Field::Prime(p)] {
                let r = iso_check(&bn, f).unwrap();
                assert!(r.passes(), "{:?}", r.mismatches);
                assert_eq!(r.parameters, vec![q]);
            }
        }
    }

    fn word(rank: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0..rank, 0..=4)
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 48, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]
        #[test]
        fn associativity(which in 0usize..4, a in word(2), b in word(2), c in word(2)) {
            let h = [a2(), b2(), g2(), affine()][which].clone();
            let (x, y, z) = (h.basis_word(&a).unwrap(), h.basis_word(&b).unwrap(), h.basis_word(&c).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        }

        #[test]
        fn antipode_reverses_products(which in 0usize..4, a in word(2), b in word(2)) {
            let h = [a2(), b2(), g2(), affine()][which].clone();
            let (x, y) = (h.basis_word(&a).unwrap(), h.basis_word(&b).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap().antipode().unwrap(), y.antipode().unwrap().mul(&x.antipode().unwrap()).unwrap());
        }

        #[test]
        fn specialization_commutes_with_products(a in word(2), b in word(2), q in 1i64..7) {
            let h = b2();
            let f = Field::Prime(7);
            let values = [f.from_i64(q), f.from_i64(q % 6 + 1)];
            let (x, y) = (h.basis_word(&a).unwrap(), h.basis_word(&b).unwrap());
            let lhs = x.mul(&y).unwrap().specialize(f, &values).unwrap();
            let rhs = specialized_multiply(&h, &values, &x.specialize(f, &values).unwrap(), &y.specialize(f, &values).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
