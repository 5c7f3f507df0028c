//! Weyl groups of generalized Cartan matrices in the integer reflection
//! representation on the root lattice.
//!
//! Convention: s_i(α_j) = α_j − a_ij·α_i, so column j of the matrix of s_i is
//! e_j − a_ij·e_i. The representation is faithful, so elements are compared
//! by their matrices. Every element carries its length-lex minimal reduced
//! word, which serves as the canonical key everywhere downstream.

use std::collections::HashSet;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

use thiserror::Error;

use crate::cartan::{coxeter_matrix, spherical_subsets, CoxeterMatrix, CoxeterOrder, GeneralizedCartanMatrix};

pub const DEFAULT_ELEMENT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxeterError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("elements belong to different Coxeter systems")]
    SystemMismatch,
    #[error("enumeration exceeded the element cap of {cap}")]
    BudgetExceeded { cap: usize },
    #[error("integer overflow in the reflection representation")]
    Overflow,
    #[error("the Weyl group is infinite; a finite radius is required")]
    Infinite,
}

/// Row-major n×n integer matrix.
type IntMatrix = Vec<i64>;

fn mat_mul(n: usize, a: &[i64], b: &[i64]) -> Result<IntMatrix, CoxeterError> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let term = x.checked_mul(b[k * n + j]).ok_or(CoxeterError::Overflow)?;
                out[i * n + j] = out[i * n + j]
                    .checked_add(term)
                    .ok_or(CoxeterError::Overflow)?;
            }
        }
    }
    Ok(out)
}

fn identity(n: usize) -> IntMatrix {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

/// Column `c` is a negative root: nonzero with all coordinates ≤ 0.
fn column_negative(n: usize, m: &[i64], c: usize) -> bool {
    let mut any = false;
    for r in 0..n {
        let x = m[r * n + c];
        if x > 0 {
            return false;
        }
        any |= x != 0;
    }
    any
}

#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    cartan: GeneralizedCartanMatrix,
    coxeter: CoxeterMatrix,
    generators: Vec<IntMatrix>,
    element_cap: usize,
    fingerprint: u64,
}

/// An element of W: its matrix, the inverse matrix, and the canonical word.
#[derive(Clone)]
pub struct WeylElement {
    rank: usize,
    matrix: IntMatrix,
    inverse: IntMatrix,
    word: Vec<usize>,
    system: u64,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.system == other.system && self.matrix == other.matrix
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.system.hash(state);
        self.matrix.hash(state);
    }
}

impl PartialOrd for WeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Length first, then lexicographic on the canonical word.
impl Ord for WeylElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.word.len(), &self.word, self.system).cmp(&(other.word.len(), &other.word, other.system))
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}", self.word)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.word.iter().map(|i| format!("s{i}")).collect();
        write!(f, "{}", parts.join(""))
    }
}

impl WeylElement {
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Rows of the matrix in the basis of simple roots.
    pub fn matrix_rows(&self) -> Vec<Vec<i64>> {
        self.matrix.chunks(self.rank).map(<[i64]>::to_vec).collect()
    }

    /// l(w·s_i) < l(w).
    pub fn has_right_descent(&self, i: usize) -> bool {
        column_negative(self.rank, &self.matrix, i)
    }

    /// l(s_i·w) < l(w).
    pub fn has_left_descent(&self, i: usize) -> bool {
        column_negative(self.rank, &self.inverse, i)
    }

    pub fn right_descents(&self) -> Vec<usize> {
        (0..self.rank).filter(|&i| self.has_right_descent(i)).collect()
    }

    /// Whether the element lies in the standard parabolic W_J.
    pub fn in_parabolic(&self, j: &[usize]) -> bool {
        self.word.iter().all(|s| j.contains(s))
    }
}

impl CoxeterSystem {
    pub fn new(cartan: GeneralizedCartanMatrix) -> Self {
        let n = cartan.size();
        let generators = (0..n)
            .map(|i| {
                let mut m = identity(n);
                for j in 0..n {
                    m[i * n + j] -= cartan.entry(i, j);
                }
                m
            })
            .collect();
        let mut h = DefaultHasher::new();
        cartan.hash(&mut h);
        CoxeterSystem {
            coxeter: coxeter_matrix(&cartan),
            cartan,
            generators,
            element_cap: DEFAULT_ELEMENT_CAP,
            fingerprint: h.finish(),
        }
    }

    pub fn with_element_cap(mut self, cap: usize) -> Self {
        self.element_cap = cap.max(1);
        self
    }

    pub fn element_cap(&self) -> usize {
        self.element_cap
    }

    pub fn rank(&self) -> usize {
        self.cartan.size()
    }

    pub fn cartan(&self) -> &GeneralizedCartanMatrix {
        &self.cartan
    }

    pub fn coxeter(&self) -> &CoxeterMatrix {
        &self.coxeter
    }

    pub fn generator_matrix(&self, i: usize) -> Vec<Vec<i64>> {
        let n = self.rank();
        self.generators[i].chunks(n).map(<[i64]>::to_vec).collect()
    }

    pub fn identity(&self) -> WeylElement {
        let n = self.rank();
        WeylElement {
            rank: n,
            matrix: identity(n),
            inverse: identity(n),
            word: Vec::new(),
            system: self.fingerprint,
        }
    }

    pub fn generator(&self, i: usize) -> Result<WeylElement, CoxeterError> {
        self.reduce_word(&[i])
    }

    fn check_index(&self, i: usize) -> Result<(), CoxeterError> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(CoxeterError::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            })
        }
    }

    fn check_owner(&self, u: &WeylElement) -> Result<(), CoxeterError> {
        if u.system == self.fingerprint {
            Ok(())
        } else {
            Err(CoxeterError::SystemMismatch)
        }
    }

    /// Builds the element from matrix data, peeling off the smallest left
    /// descent each step to produce the length-lex minimal reduced word.
    fn from_matrices(&self, matrix: IntMatrix, inverse: IntMatrix) -> Result<WeylElement, CoxeterError> {
        let n = self.rank();
        let mut word = Vec::new();
        let mut m = matrix.clone();
        let mut inv = inverse.clone();
        let id = identity(n);
        while m != id {
            let Some(i) = (0..n).find(|&i| column_negative(n, &inv, i)) else {
                unreachable!("non-identity element without a left descent");
            };
            word.push(i);
            m = mat_mul(n, &self.generators[i], &m)?;
            inv = mat_mul(n, &inv, &self.generators[i])?;
        }
        Ok(WeylElement {
            rank: n,
            matrix,
            inverse,
            word,
            system: self.fingerprint,
        })
    }

    pub fn reduce_word(&self, word: &[usize]) -> Result<WeylElement, CoxeterError> {
        let n = self.rank();
        let mut m = identity(n);
        let mut inv = identity(n);
        for &i in word {
            self.check_index(i)?;
            m = mat_mul(n, &m, &self.generators[i])?;
            inv = mat_mul(n, &self.generators[i], &inv)?;
        }
        self.from_matrices(m, inv)
    }

    pub fn multiply(&self, u: &WeylElement, v: &WeylElement) -> Result<WeylElement, CoxeterError> {
        self.check_owner(u)?;
        self.check_owner(v)?;
        let n = self.rank();
        let m = mat_mul(n, &u.matrix, &v.matrix)?;
        let inv = mat_mul(n, &v.inverse, &u.inverse)?;
        self.from_matrices(m, inv)
    }

    pub fn invert(&self, u: &WeylElement) -> Result<WeylElement, CoxeterError> {
        self.check_owner(u)?;
        self.from_matrices(u.inverse.clone(), u.matrix.clone())
    }

    /// s_i·u.
    pub fn left_mul_generator(&self, i: usize, u: &WeylElement) -> Result<WeylElement, CoxeterError> {
        self.check_index(i)?;
        self.check_owner(u)?;
        let n = self.rank();
        let m = mat_mul(n, &self.generators[i], &u.matrix)?;
        let inv = mat_mul(n, &u.inverse, &self.generators[i])?;
        self.from_matrices(m, inv)
    }

    /// u·s_i.
    pub fn right_mul_generator(&self, u: &WeylElement, i: usize) -> Result<WeylElement, CoxeterError> {
        self.check_index(i)?;
        self.check_owner(u)?;
        let n = self.rank();
        let m = mat_mul(n, &u.matrix, &self.generators[i])?;
        let inv = mat_mul(n, &self.generators[i], &u.inverse)?;
        self.from_matrices(m, inv)
    }

    /// All elements of length ≤ `radius`, by length and then by word.
    pub fn ball(&self, radius: usize) -> Result<Vec<WeylElement>, CoxeterError> {
        self.enumerate(Some(radius))
    }

    /// The whole group, when it is finite and within the element cap.
    pub fn elements(&self) -> Result<Vec<WeylElement>, CoxeterError> {
        self.enumerate(None)
    }

    fn enumerate(&self, radius: Option<usize>) -> Result<Vec<WeylElement>, CoxeterError> {
        if radius.is_none() && !self.is_finite() {
            return Err(CoxeterError::Infinite);
        }
        let mut out = vec![self.identity()];
        let mut layer = vec![self.identity()];
        let mut seen: HashSet<IntMatrix> = HashSet::from([identity(self.rank())]);
        let mut len = 0;
        while !layer.is_empty() && radius.is_none_or(|r| len < r) {
            let mut next = Vec::new();
            for w in &layer {
                for i in 0..self.rank() {
                    if w.has_left_descent(i) {
                        continue;
                    }
                    let x = self.left_mul_generator(i, w)?;
                    if seen.insert(x.matrix.clone()) {
                        next.push(x);
                        if seen.len() > self.element_cap {
                            return Err(CoxeterError::BudgetExceeded {
                                cap: self.element_cap,
                            });
                        }
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            layer = next;
            len += 1;
        }
        Ok(out)
    }

    /// W is finite iff every principal minor of the Cartan matrix is positive.
    pub fn is_finite(&self) -> bool {
        spherical_subsets(&self.cartan).contains(&(0..self.rank()).collect::<Vec<_>>())
    }

    /// Length-minimal representatives of the cosets wW_J meeting the ball of
    /// radius `radius` (the whole group when `None`).
    pub fn min_coset_reps(
        &self,
        j: &[usize],
        radius: Option<usize>,
    ) -> Result<Vec<WeylElement>, CoxeterError> {
        for &i in j {
            self.check_index(i)?;
        }
        let elements = self.enumerate(radius)?;
        Ok(elements
            .into_iter()
            .filter(|w| j.iter().all(|&i| !w.has_right_descent(i)))
            .collect())
    }

    /// The minimal representative of uW_J.
    pub fn coset_min_rep(&self, u: &WeylElement, j: &[usize]) -> Result<WeylElement, CoxeterError> {
        let mut x = u.clone();
        while let Some(&i) = j.iter().find(|&&i| x.has_right_descent(i)) {
            x = self.right_mul_generator(&x, i)?;
        }
        Ok(x)
    }

    /// (s_i s_j)^{m_ij} = 1 for every finite m_ij, as a matrix identity.
    pub fn braid_relations_hold(&self) -> Result<bool, CoxeterError> {
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                let CoxeterOrder::Finite(m) = self.coxeter.entry(i, j) else {
                    continue;
                };
                let st = mat_mul(n, &self.generators[i], &self.generators[j])?;
                let mut p = identity(n);
                for _ in 0..m {
                    p = mat_mul(n, &p, &st)?;
                }
                if p != identity(n) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Order of s_i s_j found by repeated multiplication, up to `bound`.
    pub fn product_order(&self, i: usize, j: usize, bound: u32) -> Result<Option<u32>, CoxeterError> {
        self.check_index(i)?;
        self.check_index(j)?;
        let n = self.rank();
        let st = mat_mul(n, &self.generators[i], &self.generators[j])?;
        let mut p = st.clone();
        for k in 1..=bound {
            if p == identity(n) {
                return Ok(Some(k));
            }
            p = mat_mul(n, &p, &st)?;
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::validate_cartan;

    fn sys(rows: &[&[i64]]) -> CoxeterSystem {
        CoxeterSystem::new(validate_cartan(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
    }

    fn a2() -> CoxeterSystem {
        sys(&[&[2, -1], &[-1, 2]])
    }

    fn affine() -> CoxeterSystem {
        sys(&[&[2, -2], &[-2, 2]])
    }

    #[test]
    fn generator_matrices() {
        let s = a2();
        assert_eq!(s.generator_matrix(0), vec![vec![-1, 1], vec![0, 1]]);
        assert!(s.braid_relations_hold().unwrap());
        for i in 0..2 {
            let g = s.generator(i).unwrap();
            assert!(s.multiply(&g, &g).unwrap().is_identity());
        }
    }

    #[test]
    fn product_orders_match_coxeter_matrix() {
        assert_eq!(a2().product_order(0, 1, 100).unwrap(), Some(3));
        assert_eq!(sys(&[&[2, -1], &[-2, 2]]).product_order(0, 1, 100).unwrap(), Some(4));
        assert_eq!(sys(&[&[2, -1], &[-3, 2]]).product_order(0, 1, 100).unwrap(), Some(6));
        assert_eq!(affine().product_order(0, 1, 100).unwrap(), None);
    }

    #[test]
    fn reduce_word_examples() {
        let s = a2();
        assert_eq!(s.reduce_word(&[0, 1, 0, 1]).unwrap().word(), &[1, 0]);
        assert!(s.reduce_word(&[]).unwrap().is_identity());
        assert!(s.reduce_word(&[0, 0]).unwrap().is_identity());
        assert_eq!(s.reduce_word(&[1, 0, 1]).unwrap().word(), &[0, 1, 0]);
        assert_eq!(
            s.reduce_word(&[2]),
            Err(CoxeterError::IndexOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn affine_lengths() {
        let s = affine();
        let st = s.reduce_word(&[0, 1]).unwrap();
        let mut p = s.identity();
        for k in 1..=10 {
            p = s.multiply(&p, &st).unwrap();
            assert_eq!(p.length(), 2 * k);
        }
    }

    #[test]
    fn balls() {
        let words: Vec<Vec<usize>> = affine()
            .ball(3)
            .unwrap()
            .iter()
            .map(|w| w.word().to_vec())
            .collect();
        assert_eq!(
            words,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![0, 1],
                vec![1, 0],
                vec![0, 1, 0],
                vec![1, 0, 1]
            ]
        );
        assert_eq!(a2().ball(3).unwrap().len(), 6);
        assert_eq!(a2().ball(0).unwrap().len(), 1);
        assert_eq!(a2().elements().unwrap().len(), 6);
        assert_eq!(sys(&[&[2, -1], &[-3, 2]]).elements().unwrap().len(), 12);
        assert_eq!(affine().elements(), Err(CoxeterError::Infinite));
        assert_eq!(
            affine().with_element_cap(50).ball(40),
            Err(CoxeterError::BudgetExceeded { cap: 50 })
        );
    }

    #[test]
    fn coset_representatives() {
        let reps = a2().min_coset_reps(&[1], None).unwrap();
        let lengths: Vec<usize> = reps.iter().map(WeylElement::length).collect();
        assert_eq!(lengths, vec![0, 1, 2]);
        assert_eq!(a2().min_coset_reps(&[], None).unwrap().len(), 6);
        let words: Vec<Vec<usize>> = affine()
            .min_coset_reps(&[0], Some(2))
            .unwrap()
            .iter()
            .map(|w| w.word().to_vec())
            .collect();
        assert_eq!(words, vec![vec![], vec![1], vec![0, 1]]);
    }

    #[test]
    fn coset_min_rep_strips_descents() {
        let s = a2();
        let w = s.reduce_word(&[0, 1]).unwrap();
        assert_eq!(s.coset_min_rep(&w, &[1]).unwrap().word(), &[0]);
        let top = s.reduce_word(&[0, 1, 0]).unwrap();
        assert!(s.coset_min_rep(&top, &[0, 1]).unwrap().is_identity());
    }

    #[test]
    fn mismatched_systems_are_rejected() {
        let a = a2();
        let b = affine();
        let u = a.generator(0).unwrap();
        let v = b.generator(0).unwrap();
        assert_eq!(a.multiply(&u, &v), Err(CoxeterError::SystemMismatch));
    }
}
