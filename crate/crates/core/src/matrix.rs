//! Dense nonnegative matrices, marginal targets and diagonal scalings.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{is_positive, Scalar};
use crate::scaling::Side;

/// Dense row-major `m x n` matrix with nonnegative entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(m * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRow { row: i, expected: n, found: row.len() });
            }
            entries.extend(row);
        }
        Self::from_vec(m, n, entries)
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        // NaN compares as unordered and is rejected too.
        if let Some(k) = entries.iter().position(|x| !matches!(x.partial_cmp(&T::zero()), Some(Ordering::Greater | Ordering::Equal))) {
            return Err(Error::NegativeEntry { row: k / cols, col: k % cols });
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::from_vec(rows, cols, entries)
    }

    /// Parses `"3,6;5,10"` (rows separated by `;`, entries by `,`).
    pub fn parse_inline(text: &str) -> Result<Self> {
        let rows = text
            .split(';')
            .map(|row| row.split(',').map(|s| T::parse_literal(s.trim())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Entries are produced by the caller and not re-validated.
    pub(crate) fn from_trusted(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, entries }
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.cols).map(<[T]>::to_vec).collect()
    }

    /// `A j_n`.
    pub fn row_sums(&self) -> Vec<T> {
        self.entries.chunks(self.cols).map(|row| sum(row.iter())).collect()
    }

    /// `A^t j_m`.
    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for row in self.entries.chunks(self.cols) {
            for (s, x) in sums.iter_mut().zip(row) {
                *s = s.clone() + x.clone();
            }
        }
        sums
    }

    pub fn total(&self) -> T {
        sum(self.entries.iter())
    }

    pub fn transpose(&self) -> Self {
        let (m, n) = (self.rows, self.cols);
        let entries = (0..m * n).map(|k| self.get(k % m, k / m).clone()).collect();
        Matrix::from_trusted(n, m, entries)
    }

    /// Index of the first row with zero sum.
    pub fn zero_row_sum(&self) -> Option<usize> {
        self.row_sums().iter().position(|s| !is_positive(s))
    }

    pub fn zero_col_sum(&self) -> Option<usize> {
        self.col_sums().iter().position(|s| !is_positive(s))
    }

    pub fn has_positive_row_sums(&self) -> bool {
        self.zero_row_sum().is_none()
    }

    pub fn has_positive_col_sums(&self) -> bool {
        self.zero_col_sum().is_none()
    }

    /// Largest numerator/denominator bit length over all entries.
    pub fn max_entry_bits(&self) -> u64 {
        self.entries.iter().map(Scalar::magnitude_bits).max().unwrap_or(0)
    }

    /// `A v` for an arbitrary (possibly signed) vector.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self.entries.chunks(self.cols).map(|row| dot(row, v)).collect())
    }

    /// `A^t w`.
    pub fn mul_vec_transposed(&self, w: &[T]) -> Result<Vec<T>> {
        if w.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} rows",
                w.len(),
                self.rows
            )));
        }
        let mut out = vec![T::zero(); self.cols];
        for (row, wi) in self.entries.chunks(self.cols).zip(w) {
            for (o, x) in out.iter_mut().zip(row) {
                *o = o.clone() + x.clone() * wi.clone();
            }
        }
        Ok(out)
    }

    /// Entry-wise comparison with tolerance (exact equality when `tol` is 0).
    pub fn approx_eq(&self, other: &Self, tol: &T) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.within(b, tol))
    }

    pub fn render_rows(&self) -> Vec<Vec<String>> {
        self.entries.chunks(self.cols).map(|row| row.iter().map(Scalar::render).collect()).collect()
    }

    pub fn convert<U: Scalar>(&self) -> Matrix<U> {
        let entries = self.entries.iter().map(|x| U::from_rational(&x.to_rational())).collect();
        Matrix::from_trusted(self.rows, self.cols, entries)
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.render_rows().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn sum<'a, T: Scalar>(values: impl Iterator<Item = &'a T>) -> T {
    values.fold(T::zero(), |acc, x| acc + x.clone())
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Positive row targets `r` and column targets `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginals<T> {
    r: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> Marginals<T> {
    pub fn new(r: Vec<T>, c: Vec<T>) -> Result<Self> {
        if r.is_empty() || c.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for (side, v) in [(Side::Row, &r), (Side::Column, &c)] {
            if let Some(index) = v.iter().position(|x| !is_positive(x)) {
                return Err(Error::NonPositiveMarginal { side, index });
            }
        }
        Ok(Marginals { r, c })
    }

    /// `r = j_m`, `c = j_n`.
    pub fn ones(m: usize, n: usize) -> Result<Self> {
        Self::new(vec![T::one(); m], vec![T::one(); n])
    }

    /// Classical doubly stochastic targets for a square matrix. Rectangular
    /// matrices have no default and need explicit marginals.
    pub fn default_for(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::MarginalsRequired { rows: a.rows(), cols: a.cols() });
        }
        Self::ones(a.rows(), a.cols())
    }

    pub fn r(&self) -> &[T] {
        &self.r
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn row_total(&self) -> T {
        sum(self.r.iter())
    }

    pub fn col_total(&self) -> T {
        sum(self.c.iter())
    }

    /// `sum(r) == sum(c)`; exact for rationals, relative 1e-12 for floats.
    pub fn balanced(&self) -> bool {
        let (rt, ct) = (self.row_total(), self.col_total());
        let scale = if rt > T::one() { rt.clone() } else { T::one() };
        rt.within(&ct, &(T::default_tolerance() * scale))
    }

    pub fn require_balanced(&self) -> Result<()> {
        if self.balanced() {
            Ok(())
        } else {
            Err(Error::UnbalancedMarginals {
                row_total: self.row_total().render(),
                col_total: self.col_total().render(),
            })
        }
    }

    /// `(c, r)`: the marginals of the transposed problem.
    pub fn transpose(&self) -> Self {
        Marginals { r: self.c.clone(), c: self.r.clone() }
    }

    pub fn check_shape(&self, a: &Matrix<T>) -> Result<()> {
        if self.r.len() != a.rows() || self.c.len() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "marginals of length ({}, {}) for a {}x{} matrix",
                self.r.len(),
                self.c.len(),
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }

    pub fn convert<U: Scalar>(&self) -> Marginals<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::from_rational(&x.to_rational())).collect();
        Marginals { r: conv(&self.r), c: conv(&self.c) }
    }
}

/// Positive diagonal matrix applied on the left (`Row`) or right (`Column`).
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalScaling<T> {
    side: Side,
    factors: Vec<T>,
}

impl<T: Scalar> DiagonalScaling<T> {
    pub fn new(side: Side, factors: Vec<T>) -> Result<Self> {
        if let Some(index) = factors.iter().position(|x| !is_positive(x)) {
            return Err(Error::InvalidArgument(format!("diagonal factor {} is not positive", index + 1)));
        }
        Ok(DiagonalScaling { side, factors })
    }

    pub fn identity(side: Side, len: usize) -> Self {
        DiagonalScaling { side, factors: vec![T::one(); len] }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn factors(&self) -> &[T] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|x| x.is_one())
    }

    pub fn inverse(&self) -> Self {
        let factors = self.factors.iter().map(|x| T::one() / x.clone()).collect();
        DiagonalScaling { side: self.side, factors }
    }

    /// `D A` for a row scaling, `A D` for a column scaling.
    pub fn apply(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        let expected = match self.side {
            Side::Row => a.rows(),
            Side::Column => a.cols(),
        };
        if self.factors.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} factors against {expected} {}",
                self.factors.len(),
                if self.side == Side::Row { "rows" } else { "columns" }
            )));
        }
        let n = a.cols();
        let entries = a
            .entries()
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let d = match self.side {
                    Side::Row => &self.factors[k / n],
                    Side::Column => &self.factors[k % n],
                };
                x.clone() * d.clone()
            })
            .collect();
        Ok(Matrix::from_trusted(a.rows(), n, entries))
    }
}

pub(crate) fn check_tolerance<T: Scalar>(tol: &T) -> Result<()> {
    if *tol < T::zero() {
        return Err(Error::NegativeTolerance(tol.render()));
    }
    if T::EXACT && !tol.is_zero() {
        return Err(Error::NonzeroExactTolerance(tol.render()));
    }
    Ok(())
}

fn sums_match<T: Scalar>(sums: &[T], targets: &[T], tol: &T) -> bool {
    sums.iter().zip(targets).all(|(s, t)| s.within(t, tol))
}

/// `|rowsum_i(A) - r_i| <= tol` for every row.
pub fn is_row_stochastic<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, tol: &T) -> Result<bool> {
    check_tolerance(tol)?;
    marg.check_shape(a)?;
    Ok(sums_match(&a.row_sums(), marg.r(), tol))
}

/// `|colsum_j(A) - c_j| <= tol` for every column.
pub fn is_col_stochastic<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, tol: &T) -> Result<bool> {
    check_tolerance(tol)?;
    marg.check_shape(a)?;
    Ok(sums_match(&a.col_sums(), marg.c(), tol))
}

pub fn is_doubly_stochastic<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, tol: &T) -> Result<bool> {
    Ok(is_row_stochastic(a, marg, tol)? && is_col_stochastic(a, marg, tol)?)
}

/// Largest deviation of any row or column sum from its target.
pub fn marginal_residual<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>) -> T {
    let rows = a.row_sums().into_iter().zip(marg.r()).map(|(s, t)| (s - t.clone()).abs());
    let cols = a.col_sums().into_iter().zip(marg.c()).map(|(s, t)| (s - t.clone()).abs());
    rows.chain(cols).fold(T::zero(), |acc, x| if x > acc { x } else { acc })
}
