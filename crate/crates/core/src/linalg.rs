//! Dense exact matrices over a [`Field`], with fraction-free (Bareiss) rank
//! over ℚ and ordinary elimination over 𝔽_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::field::{Field, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} over {}]", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            write!(f, "\n  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        assert!(data.iter().all(|s| s.field() == field));
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_i64_rows(field: Field, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
                .collect(),
        )
    }

    /// A single column built from `entries`.
    pub fn column(field: Field, entries: Vec<Scalar>) -> Self {
        let n = entries.len();
        Matrix {
            field,
            rows: n,
            cols: 1,
            data: entries,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_vec(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        assert_eq!(self.field, other.field);
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] = &out[(r, c)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-self.field.one()))
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Stacks matrices vertically; all must share a column count.
    pub fn vstack(field: Field, cols: usize, blocks: &[Matrix]) -> Matrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Concatenates matrices horizontally; all must share a row count.
    pub fn hstack(field: Field, rows: usize, blocks: &[Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            for r in 0..rows {
                for c in 0..b.cols {
                    out[(r, off + c)] = b[(r, c)].clone();
                }
            }
            off += b.cols;
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out[(r, c)] = self[(r0 + r, c0 + c)].clone();
            }
        }
        out
    }

    /// Rank: Bareiss over ℚ, Gaussian elimination over 𝔽_p.
    pub fn rank(&self) -> usize {
        match self.field {
            Field::Rational => bareiss_rank(self.to_integer_rows()),
            Field::Prime(_) => self.rref().1.len(),
        }
    }

    /// Each row scaled by the lcm of its denominators (characteristic 0 only).
    fn to_integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |acc, s| {
                    acc.lcm(s.as_rational().expect("rational entry").denom())
                });
                row.iter()
                    .map(|s| {
                        let q = s.as_rational().unwrap();
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns, pivoting on the first
    /// nonzero entry of each column.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].inverse().unwrap();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let delta = &factor * &m[(r, j)];
                    m[(i, j)] = &m[(i, j)] - &delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Columns form a basis of the right kernel.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.field, self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = self.field.one();
            for (i, &p) in pivots.iter().enumerate() {
                basis[(p, k)] = -&r[(i, f)];
            }
        }
        basis
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(
            self.field,
            n,
            &[self.clone(), Matrix::identity(self.field, n)],
        );
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    /// A matrix `P` with `P · self = I`, when the columns are independent.
    pub fn left_inverse(&self) -> Option<Matrix> {
        let (_, rows) = self.transpose().rref();
        if rows.len() != self.cols {
            return None;
        }
        let square = Matrix::vstack(
            self.field,
            self.cols,
            &rows.iter().map(|&r| self.block(r, 0, 1, self.cols)).collect::<Vec<_>>(),
        );
        let inv = square.inverse()?;
        let mut select = Matrix::zeros(self.field, self.cols, self.rows);
        for (k, &r) in rows.iter().enumerate() {
            select[(k, r)] = self.field.one();
        }
        Some(inv.mul(&select))
    }
}

/// Fraction-free Gaussian elimination over ℤ; returns the rank.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Exact determinant of a square integer matrix by Bareiss elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(bareiss_determinant(big(&[vec![2, -1], vec![-1, 2]])), 3.into());
        assert_eq!(bareiss_determinant(big(&[vec![2, -2], vec![-2, 2]])), 0.into());
        assert_eq!(bareiss_determinant(big(&[vec![0, 1], vec![1, 0]])), (-1).into());
        let a3 = big(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(bareiss_determinant(a3), 4.into());
    }

    #[test]
    fn kernel_and_inverse() {
        let f = Field::Rational;
        let m = Matrix::from_i64_rows(f, &[vec![1, 1, 0], vec![0, 1, 1]]);
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
        let sq = Matrix::from_i64_rows(f, &[vec![2, 1], vec![1, 1]]);
        assert_eq!(sq.mul(&sq.inverse().unwrap()), Matrix::identity(f, 2));
        let tall = Matrix::from_i64_rows(f, &[vec![1, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(tall.left_inverse().unwrap().mul(&tall), Matrix::identity(f, 2));
    }

    #[test]
    fn rank_depends_on_characteristic() {
        let rows = vec![vec![1, 1], vec![1, -1]];
        assert_eq!(Matrix::from_i64_rows(Field::Rational, &rows).rank(), 2);
        assert_eq!(Matrix::from_i64_rows(Field::Prime(2), &rows).rank(), 1);
    }

    proptest! {
        // Bareiss over ℤ and rational RREF are independent routes to the rank.
        #[test]
        fn bareiss_matches_rref(entries in prop::collection::vec(-3i64..=3, 20), rows in 1usize..=5) {
            let cols = 20 / rows;
            let grid: Vec<Vec<i64>> = (0..rows).map(|r| entries[r * cols..(r + 1) * cols].to_vec()).collect();
            let m = Matrix::from_i64_rows(Field::Rational, &grid);
            prop_assert_eq!(bareiss_rank(big(&grid)), m.rref().1.len());
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
