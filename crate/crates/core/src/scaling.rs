//! Row and column scaling and the alternating Sinkhorn–Knopp iteration.
//!
//! Column scaling is `C(A) = A diag(c_j / colsum_j(A))`, row scaling is
//! `R(A) = diag(r_i / rowsum_i(A)) A`. A scaling whose diagonal is the
//! identity is a fixed point and does not count as an effective step.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{check_tolerance, is_doubly_stochastic, marginal_residual, DiagonalScaling, Marginals, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Row,
    Column,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Row => Side::Column,
            Side::Column => Side::Row,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Row => "row",
            Side::Column => "column",
        }
    }
}

/// One application of `C` or `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingStep<T> {
    pub side: Side,
    pub applied: DiagonalScaling<T>,
    pub result: Matrix<T>,
    /// The diagonal was the identity, so `result` equals the input.
    pub was_fixed_point: bool,
}

/// `diag(A, c)`: factors `c_j / colsum_j(A)`.
pub fn column_diag<T: Scalar>(a: &Matrix<T>, c: &[T]) -> Result<DiagonalScaling<T>> {
    if c.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!("{} column targets for {} columns", c.len(), a.cols())));
    }
    let sums = a.col_sums();
    if let Some(j) = sums.iter().position(|s| s.partial_cmp(&T::zero()) != Some(Ordering::Greater)) {
        return Err(Error::ZeroColumnSum(j));
    }
    let factors = c.iter().zip(sums).map(|(cj, s)| cj.clone() / s).collect();
    DiagonalScaling::new(Side::Column, factors)
}

/// `diag(A, r)`: factors `r_i / rowsum_i(A)`.
pub fn row_diag<T: Scalar>(a: &Matrix<T>, r: &[T]) -> Result<DiagonalScaling<T>> {
    if r.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!("{} row targets for {} rows", r.len(), a.rows())));
    }
    let sums = a.row_sums();
    if let Some(i) = sums.iter().position(|s| s.partial_cmp(&T::zero()) != Some(Ordering::Greater)) {
        return Err(Error::ZeroRowSum(i));
    }
    let factors = r.iter().zip(sums).map(|(ri, s)| ri.clone() / s).collect();
    DiagonalScaling::new(Side::Row, factors)
}

fn step_with<T: Scalar>(a: &Matrix<T>, applied: DiagonalScaling<T>) -> Result<ScalingStep<T>> {
    let was_fixed_point = applied.is_identity();
    let result = if was_fixed_point { a.clone() } else { applied.apply(a)? };
    Ok(ScalingStep { side: applied.side(), applied, result, was_fixed_point })
}

/// `C(A)`.
pub fn column_scale<T: Scalar>(a: &Matrix<T>, c: &[T]) -> Result<ScalingStep<T>> {
    step_with(a, column_diag(a, c)?)
}

/// `R(A)`.
pub fn row_scale<T: Scalar>(a: &Matrix<T>, r: &[T]) -> Result<ScalingStep<T>> {
    step_with(a, row_diag(a, r)?)
}

pub fn scale<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, side: Side) -> Result<ScalingStep<T>> {
    match side {
        Side::Row => row_scale(a, marg.r()),
        Side::Column => column_scale(a, marg.c()),
    }
}

/// Alternating sequence of scalings starting from `initial`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingTrace<T> {
    pub initial: Matrix<T>,
    pub steps: Vec<ScalingStep<T>>,
    pub marginals: Marginals<T>,
    pub first_side: Side,
}

impl<T: Scalar> ScalingTrace<T> {
    pub fn new(initial: Matrix<T>, marginals: Marginals<T>, first_side: Side) -> Result<Self> {
        marginals.check_shape(&initial)?;
        Ok(ScalingTrace { initial, steps: Vec::new(), marginals, first_side })
    }

    /// Runs exactly `count` scalings without stopping early.
    pub fn alternate(initial: &Matrix<T>, marginals: &Marginals<T>, first_side: Side, count: usize) -> Result<Self> {
        let mut trace = Self::new(initial.clone(), marginals.clone(), first_side)?;
        for _ in 0..count {
            trace.advance()?;
        }
        Ok(trace)
    }

    pub fn current(&self) -> &Matrix<T> {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }

    /// Input matrix of step `k`.
    pub fn input_of(&self, k: usize) -> &Matrix<T> {
        if k == 0 {
            &self.initial
        } else {
            &self.steps[k - 1].result
        }
    }

    pub fn next_side(&self) -> Side {
        if self.steps.len().is_multiple_of(2) {
            self.first_side
        } else {
            self.first_side.other()
        }
    }

    pub fn advance(&mut self) -> Result<&ScalingStep<T>> {
        let step = scale(self.current(), &self.marginals, self.next_side())?;
        self.steps.push(step);
        Ok(self.steps.last().expect("just pushed"))
    }

    /// Steps whose diagonal was not the identity.
    pub fn effective_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.was_fixed_point).count()
    }

    /// Whether any recorded scaling was a no-op.
    pub fn has_fixed_point(&self) -> bool {
        self.steps.iter().any(|s| s.was_fixed_point)
    }

    /// JSON array of steps; full matrices only when `include_matrices`.
    pub fn to_json(&self, include_matrices: bool) -> Value {
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(k, step)| {
                let mut obj = json!({
                    "index": k + 1,
                    "side": step.side.name(),
                    "factors": step.applied.factors().iter().map(Scalar::render).collect::<Vec<_>>(),
                    "fixed_point": step.was_fixed_point,
                    "residual": marginal_residual(&step.result, &self.marginals).render(),
                });
                if include_matrices {
                    obj["matrix"] = json!(step.result.render_rows());
                }
                obj
            })
            .collect();
        Value::Array(steps)
    }
}

#[derive(Clone, Debug)]
pub struct SinkhornOptions<T> {
    /// Upper bound on recorded scalings (fixed points included).
    pub max_steps: usize,
    pub tol: T,
    /// Abort when an exact entry grows beyond this many bits.
    pub max_bits: Option<u64>,
}

impl<T: Scalar> Default for SinkhornOptions<T> {
    fn default() -> Self {
        SinkhornOptions { max_steps: 10_000, tol: T::default_tolerance(), max_bits: Some(1 << 20) }
    }
}

#[derive(Clone, Debug)]
pub struct SinkhornResult<T> {
    pub trace: ScalingTrace<T>,
    /// `None` when no iterate met the tolerance.
    pub limit: Option<Matrix<T>>,
    pub iterations_used: usize,
    pub effective_steps: usize,
    pub final_residual: T,
}

impl<T: Scalar> SinkhornResult<T> {
    pub fn converged(&self) -> bool {
        self.limit.is_some()
    }
}

/// Alternates row and column scalings starting with `first_side` until the
/// iterate is `(r, c)`-doubly stochastic within `opts.tol` or `max_steps`
/// scalings have been applied.
pub fn sinkhorn_iterate<T: Scalar>(
    a: &Matrix<T>,
    marg: &Marginals<T>,
    first_side: Side,
    opts: &SinkhornOptions<T>,
) -> Result<SinkhornResult<T>> {
    marg.check_shape(a)?;
    marg.require_balanced()?;
    check_tolerance(&opts.tol)?;
    if opts.max_steps == 0 {
        return Err(Error::NoSteps);
    }
    if let Some(i) = a.zero_row_sum() {
        return Err(Error::ZeroRowSum(i));
    }
    if let Some(j) = a.zero_col_sum() {
        return Err(Error::ZeroColumnSum(j));
    }

    let mut trace = ScalingTrace::new(a.clone(), marg.clone(), first_side)?;
    let mut converged = is_doubly_stochastic(a, marg, &opts.tol)?;
    while !converged && trace.steps.len() < opts.max_steps {
        trace.advance()?;
        if let Some(limit) = opts.max_bits {
            let bits = trace.current().max_entry_bits();
            if bits > limit {
                return Err(Error::BitSizeExceeded { bits, limit, step: trace.steps.len() });
            }
        }
        converged = is_doubly_stochastic(trace.current(), marg, &opts.tol)?;
    }

    let final_residual = marginal_residual(trace.current(), marg);
    Ok(SinkhornResult {
        limit: converged.then(|| trace.current().clone()),
        iterations_used: trace.steps.len(),
        effective_steps: trace.effective_steps(),
        final_residual,
        trace,
    })
}
