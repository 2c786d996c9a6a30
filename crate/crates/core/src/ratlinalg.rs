//! Exact rational scalars, vectors and matrices.
//!
//! Everything in the math core is built on [`Rational`], an arbitrary
//! precision fraction that is kept fully reduced with a positive
//! denominator. Matrices are dense and row-major; the elimination routines
//! here (rank, row-basis selection, kernels, orthogonal complements) are the
//! only linear algebra the reduction needs.

use std::fmt;
use std::ops::Index;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational number; reduced, with denominator > 0.
pub type Rational = BigRational;

/// Dense vector of rationals.
pub type RatVector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("input rows are linearly dependent")]
    DependentRows,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational `{token}`")]
pub struct RationalParseError {
    pub token: String,
}

/// `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` as a reduced rational. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `[+-]digits[/digits]` with a strictly positive denominator.
pub fn parse_rational(token: &str) -> Result<Rational, RationalParseError> {
    let err = || RationalParseError {
        token: token.to_string(),
    };
    let (num_part, den_part) = match token.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (token, None),
    };
    let digits = num_part.strip_prefix(['+', '-']).unwrap_or(num_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let numer: BigInt = num_part.parse().map_err(|_| err())?;
    let denom = match den_part {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            d
        }
    };
    Ok(Rational::new(numer, denom))
}

pub fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Largest absolute entry; zero for the empty vector.
pub fn inf_norm(x: &[Rational]) -> Rational {
    x.iter()
        .map(|a| a.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

fn is_zero_vec(x: &[Rational]) -> bool {
    x.iter().all(Zero::is_zero)
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from explicit rows. `cols` is only consulted when
    /// `rows` is empty.
    pub fn from_rows(rows: Vec<RatVector>, cols: usize) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(cols, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(RatMatrix {
            rows: nrows,
            cols,
            entries,
        })
    }

    /// Integer matrix literal. Panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<RatVector> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| rat(x)).collect())
            .collect();
        Self::from_rows(rows, 0).expect("ragged integer matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<RatVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `yᵀ A` for a vector `y` of length `rows`.
    pub fn left_mul_vec(&self, y: &[Rational]) -> Result<RatVector, LinalgError> {
        if y.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: y.len(),
            });
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).map(|i| &y[i] * self.get(i, j)).sum())
            .collect())
    }

    /// `A x` for a vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &[Rational]) -> Result<RatVector, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(Rational::is_integer)
    }

    /// Sum of all rows.
    pub fn row_sum(&self) -> RatVector {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Keeps the rows listed in `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> RatMatrix {
        let rows = indices.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_rows(rows, self.cols).expect("rows share a width")
    }

    /// Keeps the columns listed in `indices`, in that order.
    pub fn select_cols(&self, indices: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(self.rows, indices.len());
        for i in 0..self.rows {
            for (jj, &j) in indices.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        self.get(i, j)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form and its pivot columns.
pub fn rref(a: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        m.swap_rows(p, r);
        let inv = m.get(r, c).recip();
        for j in c..m.cols {
            let v = m.get(r, j) * &inv;
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r || m.get(i, c).is_zero() {
                continue;
            }
            let factor = m.get(i, c).clone();
            for j in c..m.cols {
                let v = m.get(i, j) - &factor * m.get(r, j);
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &RatMatrix) -> usize {
    rref(a).1.len()
}

/// Greedy leftmost maximal independent set of rows (0-based indices).
pub fn select_row_basis(a: &RatMatrix) -> Vec<usize> {
    // each stored vector is normalized to 1 at its pivot and zero at every
    // earlier pivot
    let mut basis: Vec<(usize, RatVector)> = Vec::new();
    let mut chosen = Vec::new();
    for i in 0..a.rows() {
        let mut v = a.row(i).to_vec();
        for (p, b) in &basis {
            if v[*p].is_zero() {
                continue;
            }
            let factor = v[*p].clone();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= &factor * y;
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let factor = b[p].clone();
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x -= &factor * y;
                    }
                }
            }
            basis.push((p, v));
            chosen.push(i);
        }
    }
    chosen
}

/// Basis of `{x : A x = 0}`, one vector per free column (in column order).
pub fn kernel(a: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..a.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); a.cols()];
            x[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -r.get(row, f).clone();
            }
            x
        })
        .collect()
}

/// Basis of `{y : yᵀ A = 0}`.
pub fn left_kernel(a: &RatMatrix) -> Vec<RatVector> {
    kernel(&a.transpose())
}

/// Unique solution of `A x = b` when `A` has full column rank and the
/// system is consistent; `None` otherwise.
pub fn solve_full_column_rank(a: &RatMatrix, b: &[Rational]) -> Option<RatVector> {
    if b.len() != a.rows() {
        return None;
    }
    let mut aug = RatMatrix::zeros(a.rows(), a.cols() + 1);
    for (i, bi) in b.iter().enumerate() {
        for j in 0..a.cols() {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, a.cols(), bi.clone());
    }
    let (r, pivots) = rref(&aug);
    if pivots.len() != a.cols() || pivots.iter().any(|&p| p == a.cols()) {
        return None;
    }
    Some((0..a.cols()).map(|i| r.get(i, a.cols()).clone()).collect())
}

pub fn determinant(a: &RatMatrix) -> Result<Rational, LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let f = plu(a);
    if f.upper.rows() > 0 && (0..a.rows()).any(|i| f.upper.get(i, i).is_zero()) {
        return Ok(Rational::zero());
    }
    let mut det: Rational = (0..a.rows()).map(|i| f.upper.get(i, i)).product();
    if permutation_is_odd(&f.perm) {
        det = -det;
    }
    Ok(det)
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0;
    for start in 0..perm.len() {
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2 == 1
}

/// Factors `P A = L U`: `perm[i]` is the row of `A` that lands in row `i`,
/// `lower` is unit lower triangular (rows × rows) and `upper` is in row
/// echelon form (rows × cols).
#[derive(Clone, Debug)]
pub struct PluFactors {
    pub perm: Vec<usize>,
    pub lower: RatMatrix,
    pub upper: RatMatrix,
}

pub fn plu(a: &RatMatrix) -> PluFactors {
    let rows = a.rows();
    let mut upper = a.clone();
    let mut lower = RatMatrix::zeros(rows, rows);
    let mut perm: Vec<usize> = (0..rows).collect();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !upper.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            upper.swap_rows(p, r);
            perm.swap(p, r);
            // multipliers already recorded belong to the swapped rows
            for j in 0..r {
                let tmp = lower.get(p, j).clone();
                lower.set(p, j, lower.get(r, j).clone());
                lower.set(r, j, tmp);
            }
        }
        let pivot = upper.get(r, c).clone();
        for i in r + 1..rows {
            if upper.get(i, c).is_zero() {
                continue;
            }
            let factor = upper.get(i, c) / &pivot;
            for j in c..a.cols() {
                let v = upper.get(i, j) - &factor * upper.get(r, j);
                upper.set(i, j, v);
            }
            lower.set(i, r, factor);
        }
        r += 1;
    }
    for i in 0..rows {
        lower.set(i, i, Rational::one());
    }
    PluFactors { perm, lower, upper }
}

/// Orthogonal basis of the orthogonal complement of span(`rows`) in
/// dimension `ambient_dim`, each vector scaled to ℓ∞-norm exactly 1.
///
/// The given rows are orthogonalized first, then the standard basis vectors
/// are fed through Gram–Schmidt in index order; the directions they add are
/// the result.
pub fn orth_complement_basis(
    rows: &[RatVector],
    ambient_dim: usize,
) -> Result<Vec<RatVector>, LinalgError> {
    if let Some(bad) = rows.iter().find(|r| r.len() != ambient_dim) {
        return Err(LinalgError::DimensionMismatch {
            expected: ambient_dim,
            found: bad.len(),
        });
    }
    let mut ortho: Vec<(RatVector, Rational)> = Vec::new();
    let project_out = |v: &mut RatVector, ortho: &[(RatVector, Rational)]| {
        for (q, qq) in ortho {
            let coeff = dot(v, q) / qq;
            if coeff.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(q) {
                *x -= &coeff * y;
            }
        }
    };
    for r in rows {
        let mut v = r.clone();
        project_out(&mut v, &ortho);
        if is_zero_vec(&v) {
            return Err(LinalgError::DependentRows);
        }
        let norm2 = dot(&v, &v);
        ortho.push((v, norm2));
    }
    let mut complement = Vec::new();
    for i in 0..ambient_dim {
        if ortho.len() == ambient_dim {
            break;
        }
        let mut v = vec![Rational::zero(); ambient_dim];
        v[i] = Rational::one();
        project_out(&mut v, &ortho);
        if is_zero_vec(&v) {
            continue;
        }
        let norm2 = dot(&v, &v);
        ortho.push((v.clone(), norm2));
        complement.push(v);
    }
    for v in complement.iter_mut() {
        let scale = inf_norm(v).recip();
        for x in v.iter_mut() {
            *x *= &scale;
        }
    }
    Ok(complement)
}

/// `⌊x⌋` as a big integer.
pub fn floor_to_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}
