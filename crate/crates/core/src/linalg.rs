//! Exact rational scalars and dense linear algebra over ℚ.
//!
//! Everything downstream (axiom scans, derivation solves, coboundary kernels)
//! reduces to rank and kernel computations here, so the routines favour
//! exactness over speed: entries are `BigRational`, always in lowest terms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
    #[error("rows have inconsistent lengths")]
    RaggedRows,
    #[error("vector {index} of the subspace is not contained in the ambient span")]
    NotASubspace { index: usize },
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
}

/// Integer as a rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` as a rational. Panics on a zero denominator.
pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-0.25"`.
pub fn parse_rational(src: &str) -> Result<Rational, LinalgError> {
    let s = src.trim();
    let bad = || LinalgError::BadRational(src.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Rational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn zero_vec(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rational> {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `acc += coef * v`
pub fn axpy(acc: &mut [Rational], coef: &Rational, v: &[Rational]) {
    debug_assert_eq!(acc.len(), v.len());
    if coef.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += coef * x;
        }
    }
}

pub fn add_assign_vec(acc: &mut [Rational], v: &[Rational]) {
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += x;
        }
    }
}

pub fn sub_assign_vec(acc: &mut [Rational], v: &[Rational]) {
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a -= x;
        }
    }
}

/// Largest absolute entry, zero for an empty slice.
pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
}

/// Dense row-major matrix over ℚ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: zero_vec(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in entries.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::RaggedRows);
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer entries, convenient in tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().map(|&x| q(x))).collect(),
        }
    }

    /// Builds a matrix whose `c`-th column is `columns[c]`.
    pub fn from_columns(nrows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(nrows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column {c} has wrong length");
            for (r, x) in col.iter().enumerate() {
                m.data[r * m.cols + c] = x.clone();
            }
        }
        m
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

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Rational) {
        self.data[r * self.cols + c] = x;
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "mul_vec shape mismatch");
        let mut out = zero_vec(self.rows);
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let a = &self.data[r * self.cols + c];
                if !a.is_zero() {
                    *o += a * x;
                }
            }
        }
        out
    }

    /// `self += coef * other`
    pub fn axpy(&mut self, coef: &Rational, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        axpy(&mut self.data, coef, &other.data);
    }

    /// `a·b − b·a`
    pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
        &(a * b) - &(b * a)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> Rational {
        max_abs(&self.data)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols);
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, x) in row.into_iter().enumerate() {
                m.data[r * self.cols + c] = x;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut rows: Vec<Vec<Rational>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend(unit_vec(n, r));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut rows, 2 * n);
        if pivots[n - 1] >= n {
            return None;
        }
        let data = rows.into_iter().flat_map(|row| row.into_iter().skip(n)).collect();
        Some(Matrix { rows: n, cols: n, data })
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

/// Gauss-Jordan elimination on a list of rows of width `width`.
/// Leaves the rows in reduced echelon form and returns the pivot columns.
fn rref_in_place(rows: &mut [Vec<Rational>], width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..width {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][col].recip();
        if !inv.is_one() {
            for x in rows[next][col..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let (before, rest) = rows.split_at_mut(next);
        let (pivot_row, after) = rest.split_first_mut().expect("pivot row exists");
        for row in before.iter_mut().chain(after.iter_mut()) {
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..width {
                let pc = &pivot_row[c];
                if !pc.is_zero() {
                    row[c] -= &factor * pc;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut rows = m.to_rows();
    rref_in_place(&mut rows, m.cols).len()
}

/// Basis of `{v : m·v = 0}`, one vector per free column.
pub fn kernel_basis(m: &Matrix) -> SubspaceBasis {
    let (r, pivots) = m.rref();
    let n = m.cols;
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = zero_vec(n);
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                let x = r.get(row, free);
                if !x.is_zero() {
                    v[p] = -x;
                }
            }
            v
        })
        .collect();
    SubspaceBasis::new(n, vectors)
}

/// Basis of the column space of `m`.
pub fn image_basis(m: &Matrix) -> SubspaceBasis {
    let cols: Vec<Vec<Rational>> = (0..m.cols).map(|c| m.column(c)).collect();
    SubspaceBasis::new(m.rows, cols)
}

/// `dim z − dim b`, after checking that `b ⊆ span(z)`.
pub fn quotient_dim(z: &SubspaceBasis, b: &SubspaceBasis) -> Result<usize, LinalgError> {
    if z.ambient_dim != b.ambient_dim {
        return Err(LinalgError::AmbientMismatch(z.ambient_dim, b.ambient_dim));
    }
    if let Some(index) = b.vectors.iter().position(|v| !z.contains(v)) {
        return Err(LinalgError::NotASubspace { index });
    }
    Ok(z.dim() - b.dim())
}

/// A subspace of ℚⁿ held as the rows of its reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    /// Span of `spanning`; dependent vectors are discarded.
    pub fn new(ambient_dim: usize, spanning: Vec<Vec<Rational>>) -> Self {
        assert!(
            spanning.iter().all(|v| v.len() == ambient_dim),
            "vector length differs from ambient dimension"
        );
        let mut rows = spanning;
        let pivots = rref_in_place(&mut rows, ambient_dim);
        rows.truncate(pivots.len());
        SubspaceBasis {
            ambient_dim,
            vectors: rows,
            pivots,
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self::new(ambient_dim, Vec::new())
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::new(
            ambient_dim,
            (0..ambient_dim).map(|i| unit_vec(ambient_dim, i)).collect(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    /// Residue of `v` after eliminating the pivot coordinates.
    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut r = v.to_vec();
        for (row, &p) in self.vectors.iter().zip(&self.pivots) {
            let f = r[p].clone();
            if !f.is_zero() {
                axpy(&mut r, &-f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        is_zero_vec(&self.reduce(v))
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> bool {
        other.vectors.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in this basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        // Rows are in reduced echelon form, so the coordinate on row i is
        // simply the entry of v at that row's pivot.
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::identity(3)), 3);
        assert_eq!(rank(&Matrix::zeros(2, 2)), 0);
        // Second row is twice the first.
        assert_eq!(rank(&Matrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::identity(4)).dim(), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(3, 3)).dim(), 3);
        let m = Matrix::from_i64(&[&[1, 1, 0]]);
        let k = kernel_basis(&m);
        assert_eq!(k.dim(), 2);
        for v in k.vectors() {
            assert!(is_zero_vec(&m.mul_vec(v)));
        }
    }

    #[test]
    fn quotient_examples() {
        let z = SubspaceBasis::full(3);
        assert_eq!(quotient_dim(&z, &SubspaceBasis::empty(3)).unwrap(), 3);
        assert_eq!(quotient_dim(&z, &z).unwrap(), 0);
        let plane = SubspaceBasis::new(2, vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
        let diag = SubspaceBasis::new(2, vec![vec![q(1), q(1)]]);
        assert_eq!(quotient_dim(&plane, &diag).unwrap(), 1);
        assert_eq!(quotient_dim(&diag, &plane), Err(LinalgError::NotASubspace { index: 0 }));
    }

    #[test]
    fn inverse_and_singular() {
        let m = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert!(Matrix::zeros(3, 3).inverse().is_none());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), q(-4));
        assert_eq!(parse_rational("-0.25").unwrap(), qf(-1, 4));
        assert_eq!(parse_rational(" 7/-14 ").unwrap(), qf(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&qf(6, -4)), "-3/2");
        assert_eq!(format_rational(&q(5)), "5");
    }

    #[test]
    fn coordinates_in_basis() {
        let s = SubspaceBasis::new(3, vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]]);
        let v = vec![q(2), q(5), q(3)];
        let c = s.coordinates(&v).unwrap();
        let mut back = zero_vec(3);
        for (coef, row) in c.iter().zip(s.vectors()) {
            axpy(&mut back, coef, row);
        }
        assert_eq!(back, v);
        assert!(s.coordinates(&[q(1), q(0), q(0)]).is_none());
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |xs| {
                let mut it = xs.into_iter();
                Matrix::from_fn(r, c, |_, _| {
                    let (n, d) = it.next().unwrap();
                    qf(n, d)
                })
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + k.dim(), m.cols());
            for v in k.vectors() {
                prop_assert!(is_zero_vec(&m.mul_vec(v)));
            }
        }

        #[test]
        fn quotient_adds_up(m in small_matrix()) {
            // Column space of m sits inside the span of all unit vectors and
            // inside itself.
            let img = image_basis(&m);
            let full = SubspaceBasis::full(m.rows());
            prop_assert_eq!(quotient_dim(&full, &img).unwrap() + img.dim(), full.dim());
            prop_assert_eq!(quotient_dim(&img, &img).unwrap(), 0);
        }
    }
}
