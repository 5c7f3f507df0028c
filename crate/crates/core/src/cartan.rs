//! Generalized Cartan matrices, their Coxeter matrices, spherical subsets and
//! the invariant f(𝒜) (largest finite-type principal submatrix).

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::bareiss_determinant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("Cartan matrix must be non-empty")]
    Empty,
    #[error("Cartan matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("diagonal entry a_{0}{0} is not 2")]
    DiagonalNotTwo(usize),
    #[error("off-diagonal entry a_{0}{1} is positive")]
    PositiveOffDiagonal(usize, usize),
    #[error("a_{0}{1} = 0 but a_{1}{0} != 0")]
    ZeroAsymmetry(usize, usize),
    #[error("rank {0} exceeds the supported maximum of 16")]
    TooLarge(usize),
}

/// A validated generalized Cartan matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedCartanMatrix {
    entries: Vec<Vec<i64>>,
}

impl GeneralizedCartanMatrix {
    pub fn new(raw: Vec<Vec<i64>>) -> Result<Self, CartanError> {
        validate_cartan(raw)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// The principal submatrix on the index set `subset`.
    pub fn principal_submatrix(&self, subset: &[usize]) -> Vec<Vec<i64>> {
        subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.entries[i][j]).collect())
            .collect()
    }

    /// Type A_n (n ≥ 1).
    pub fn type_a(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        GeneralizedCartanMatrix { entries }
    }
}

pub fn validate_cartan(raw: Vec<Vec<i64>>) -> Result<GeneralizedCartanMatrix, CartanError> {
    let n = raw.len();
    if n == 0 {
        return Err(CartanError::Empty);
    }
    if n > 16 {
        return Err(CartanError::TooLarge(n));
    }
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(CartanError::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    for (i, row) in raw.iter().enumerate() {
        if row[i] != 2 {
            return Err(CartanError::DiagonalNotTwo(i));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && raw[i][j] > 0 {
                return Err(CartanError::PositiveOffDiagonal(i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && (raw[i][j] == 0) != (raw[j][i] == 0) {
                return Err(CartanError::ZeroAsymmetry(i, j));
            }
        }
    }
    Ok(GeneralizedCartanMatrix { entries: raw })
}

/// An entry m_ij of a Coxeter matrix: a finite order or ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoxeterOrder {
    Finite(u32),
    Infinite,
}

impl CoxeterOrder {
    pub fn finite(self) -> Option<u32> {
        match self {
            CoxeterOrder::Finite(m) => Some(m),
            CoxeterOrder::Infinite => None,
        }
    }
}

impl fmt::Display for CoxeterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterOrder::Finite(m) => write!(f, "{m}"),
            CoxeterOrder::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for CoxeterOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CoxeterOrder::Finite(m) => s.serialize_u32(*m),
            CoxeterOrder::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CoxeterOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(m) => Ok(CoxeterOrder::Finite(m)),
            Raw::S(s) if s == "inf" => Ok(CoxeterOrder::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad Coxeter order {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterMatrix {
    entries: Vec<Vec<CoxeterOrder>>,
}

impl CoxeterMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> CoxeterOrder {
        self.entries[i][j]
    }
}

/// m_ij from the product a_ij·a_ji: 0,1,2,3,≥4 ↦ 2,3,4,6,∞.
pub fn coxeter_matrix(a: &GeneralizedCartanMatrix) -> CoxeterMatrix {
    let n = a.size();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return CoxeterOrder::Finite(1);
                    }
                    match a.entry(i, j) * a.entry(j, i) {
                        0 => CoxeterOrder::Finite(2),
                        1 => CoxeterOrder::Finite(3),
                        2 => CoxeterOrder::Finite(4),
                        3 => CoxeterOrder::Finite(6),
                        _ => CoxeterOrder::Infinite,
                    }
                })
                .collect()
        })
        .collect();
    CoxeterMatrix { entries }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericalSubsetReport {
    /// Sorted by size, then lexicographically.
    pub subsets: Vec<Vec<usize>>,
    pub f_value: usize,
}

impl SphericalSubsetReport {
    pub fn contains(&self, subset: &[usize]) -> bool {
        self.subsets.iter().any(|s| s == subset)
    }
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Lists every J whose parabolic W_J is finite: all principal minors of A_J
/// positive. Checked as det(A_J) > 0 together with sphericity of all proper
/// subsets, which are visited first.
pub fn spherical_subsets(a: &GeneralizedCartanMatrix) -> SphericalSubsetReport {
    let n = a.size();
    let mut spherical = vec![false; 1 << n];
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), members(*m, n)));
    for &mask in &masks {
        let subset = members(mask, n);
        let faces_ok = subset
            .iter()
            .all(|&i| spherical[(mask & !(1 << i)) as usize]);
        if !faces_ok {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = a
            .principal_submatrix(&subset)
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        spherical[mask as usize] = bareiss_determinant(minor).is_positive();
    }
    let subsets: Vec<Vec<usize>> = masks
        .iter()
        .filter(|&&m| spherical[m as usize])
        .map(|&m| members(m, n))
        .collect();
    let f_value = subsets.iter().map(Vec::len).max().unwrap_or(0);
    SphericalSubsetReport { subsets, f_value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcm(rows: &[&[i64]]) -> GeneralizedCartanMatrix {
        validate_cartan(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validation_errors_name_indices() {
        assert!(validate_cartan(vec![vec![2, -1], vec![-1, 2]]).is_ok());
        assert!(validate_cartan(vec![vec![2, -2], vec![-2, 2]]).is_ok());
        assert_eq!(
            validate_cartan(vec![vec![2, 0], vec![-1, 2]]),
            Err(CartanError::ZeroAsymmetry(0, 1))
        );
        assert_eq!(
            validate_cartan(vec![vec![2, 1], vec![1, 2]]),
            Err(CartanError::PositiveOffDiagonal(0, 1))
        );
        assert_eq!(
            validate_cartan(vec![vec![2, -1], vec![-1, 3]]),
            Err(CartanError::DiagonalNotTwo(1))
        );
        assert!(matches!(
            validate_cartan(vec![vec![2, -1]]),
            Err(CartanError::NotSquare { .. })
        ));
        assert_eq!(validate_cartan(vec![]), Err(CartanError::Empty));
    }

    #[test]
    fn coxeter_dictionary() {
        let m = |rows: &[&[i64]]| coxeter_matrix(&gcm(rows)).entry(0, 1);
        assert_eq!(m(&[&[2, -1], &[-1, 2]]), CoxeterOrder::Finite(3));
        assert_eq!(m(&[&[2, -1], &[-2, 2]]), CoxeterOrder::Finite(4));
        assert_eq!(m(&[&[2, -1], &[-3, 2]]), CoxeterOrder::Finite(6));
        assert_eq!(m(&[&[2, 0], &[0, 2]]), CoxeterOrder::Finite(2));
        assert_eq!(m(&[&[2, -2], &[-2, 2]]), CoxeterOrder::Infinite);
        assert_eq!(m(&[&[2, -1], &[-4, 2]]), CoxeterOrder::Infinite);
    }

    #[test]
    fn spherical_examples() {
        let a2 = spherical_subsets(&gcm(&[&[2, -1], &[-1, 2]]));
        assert_eq!(a2.subsets, vec![vec![], vec![0], vec![1], vec![0, 1]]);
        assert_eq!(a2.f_value, 2);

        let affine = spherical_subsets(&gcm(&[&[2, -2], &[-2, 2]]));
        assert_eq!(affine.subsets, vec![vec![], vec![0], vec![1]]);
        assert_eq!(affine.f_value, 1);

        let generic = spherical_subsets(&gcm(&[&[2, -2, -2], &[-2, 2, -2], &[-2, -2, 2]]));
        assert_eq!(generic.f_value, 1);
        assert_eq!(generic.subsets.len(), 4);
    }

    #[test]
    fn f_is_monotone_on_principal_submatrices() {
        let a = gcm(&[&[2, -1, 0], &[-1, 2, -2], &[0, -2, 2]]);
        let f = spherical_subsets(&a).f_value;
        for subset in [vec![0, 1], vec![1, 2], vec![0, 2], vec![0], vec![2]] {
            let sub = gcm(
                &a.principal_submatrix(&subset)
                    .iter()
                    .map(|r| r.as_slice())
                    .collect::<Vec<_>>(),
            );
            assert!(spherical_subsets(&sub).f_value <= f);
        }
    }

    #[test]
    fn coxeter_order_serde() {
        let m = coxeter_matrix(&gcm(&[&[2, -2], &[-2, 2]]));
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"entries":[[1,"inf"],["inf",1]]}"#);
        assert_eq!(serde_json::from_str::<CoxeterMatrix>(&json).unwrap(), m);
    }
}
