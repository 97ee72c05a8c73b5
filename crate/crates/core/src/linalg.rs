//! Dense matrices over exact rationals.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            assert_eq!(row.len(), n_cols, "ragged matrix rows");
            data.extend(row);
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
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

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    /// Square submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    ///
    /// Each row is first scaled by the lcm of its denominators so that the
    /// elimination runs over integers; the scaling is divided out at the end.
    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for r in 0..n {
            let lcm = self
                .row(r)
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &lcm;
            m.push(
                self.row(r)
                    .iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect(),
            );
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Rational::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
            }
            prev = m[k][k].clone();
        }
        Rational::new(sign * &m[n - 1][n - 1], scale)
    }

    /// `[det(A[0..1]), det(A[0..2]), ..., det(A)]`.
    pub fn leading_principal_minors(&self) -> Vec<Rational> {
        assert!(self.is_square());
        (1..=self.rows)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.select(&idx, &idx).determinant()
            })
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    #[allow(clippy::needless_range_loop)]
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m: Vec<Vec<Rational>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            let rank = pivots.len();
            let Some(p) = (rank..self.rows).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][c].clone();
            for x in m[rank].iter_mut().skip(c) {
                *x /= &pivot;
            }
            for r in 0..self.rows {
                if r != rank && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for cc in c..self.cols {
                        let delta = &f * &m[rank][cc];
                        m[r][cc] -= delta;
                    }
                }
            }
            pivots.push(c);
        }
        let data = m.into_iter().flatten().collect();
        (
            RatMatrix {
                rows: self.rows,
                cols: self.cols,
                data,
            },
            pivots,
        )
    }

    /// Rank over the rationals by Gaussian elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![Rational::zero(); self.cols];
                v[free] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, free)].clone();
                }
                v
            })
            .collect()
    }

    /// Sylvester's criterion: every leading principal minor is strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && self
                .leading_principal_minors()
                .iter()
                .all(Signed::is_positive)
    }

    /// Dense lower triangle, row `i` holding entries `(i, 0..=i)`.
    pub fn lower_triangle(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| (0..=r).map(|c| self[(r, c)].clone()).collect())
            .collect()
    }

    /// Inverse of [`RatMatrix::lower_triangle`] for symmetric matrices.
    pub fn from_lower_triangle(lower: &[Vec<Rational>]) -> Option<RatMatrix> {
        let n = lower.len();
        let mut m = Self::zeros(n, n);
        for (r, row) in lower.iter().enumerate() {
            if row.len() != r + 1 {
                return None;
            }
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = v.clone();
                m[(c, r)] = v.clone();
            }
        }
        Some(m)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use proptest::prelude::*;

    /// Laplace expansion along the first row; test-only oracle.
    fn cofactor_det(m: &RatMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rational::zero();
        for c in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&x| x != c).collect();
            let minor = cofactor_det(&m.select(&rows, &cols));
            let term = &m[(0, c)] * minor;
            if c % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn determinant_small_cases() {
        let m = RatMatrix::from_rows(vec![vec![rat(1), rat(2)], vec![rat(3), rat(4)]]);
        assert_eq!(m.determinant(), rat(-2));
        let z = RatMatrix::from_rows(vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]);
        assert_eq!(z.determinant(), rat(-1));
        let singular = RatMatrix::from_rows(vec![vec![ratio(1, 2), rat(1)], vec![rat(1), rat(2)]]);
        assert_eq!(singular.determinant(), rat(0));
        assert_eq!(RatMatrix::zeros(0, 0).determinant(), rat(1));
    }

    #[test]
    fn rank_and_definiteness() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1), rat(1), rat(1)],
            vec![rat(-1), rat(-1), rat(-1)],
        ]);
        assert_eq!(m.rank(), 1);
        assert!(RatMatrix::from_diagonal(&[rat(1), rat(2)]).is_positive_definite());
        assert!(!RatMatrix::from_diagonal(&[rat(1), rat(-1)]).is_positive_definite());
        assert!(!RatMatrix::from_diagonal(&[rat(1), rat(0)]).is_positive_definite());
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1), rat(2), rat(3), rat(4)],
            vec![rat(2), rat(4), rat(7), rat(9)],
        ]);
        let basis = m.nullspace();
        assert_eq!(basis.len(), 4 - m.rank());
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=5).prop_map(|(p, q)| ratio(p, q))
    }

    fn square_matrix(max: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(small_rational(), n), n)
                .prop_map(RatMatrix::from_rows)
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(m in square_matrix(5)) {
            prop_assert_eq!(m.determinant(), cofactor_det(&m));
        }

        #[test]
        fn determinant_is_multiplicative(a in square_matrix(3), seed in 0u64..1000) {
            let n = a.rows();
            let b = RatMatrix::from_rows((0..n).map(|r| (0..n).map(|c| {
                ratio(((seed as i64 + 3 * r as i64 + 7 * c as i64) % 11) - 5, 1 + (c as i64 % 3))
            }).collect()).collect());
            prop_assert_eq!(a.mul(&b).determinant(), a.determinant() * b.determinant());
        }

        #[test]
        fn lower_triangle_round_trips(m in square_matrix(4)) {
            let sym = m.add(&m.transpose());
            prop_assert_eq!(RatMatrix::from_lower_triangle(&sym.lower_triangle()).unwrap(), sym);
        }
    }
}
