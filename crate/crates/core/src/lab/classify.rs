//! Finite-termination classification.
//!
//! If alternating scaling reaches an `(r, c)`-doubly stochastic matrix after
//! exactly `L` effective scalings, then `L <= 2`. [`classify`] relies on that
//! and inspects only `A, R(A), C(A), C(R(A)), R(C(A))`. [`terminates_at`]
//! makes no such assumption and simply iterates to a given depth.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lab::residue::{scan, Scan};
use crate::matrix::{is_doubly_stochastic, Marginals, Matrix};
use crate::scalar::Scalar;
use crate::scaling::{column_scale, row_scale, ScalingStep, ScalingTrace, Side};

/// Deepest `terminates_at` search accepted.
pub const MAX_DEPTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    L0,
    L1,
    L2,
    NotFinite,
}

impl Verdict {
    /// Verdict for an effective step count; `None` for counts above 2.
    pub fn from_steps(steps: Option<usize>) -> Option<Verdict> {
        match steps {
            Some(0) => Some(Verdict::L0),
            Some(1) => Some(Verdict::L1),
            Some(2) => Some(Verdict::L2),
            Some(_) => None,
            None => Some(Verdict::NotFinite),
        }
    }

    pub fn steps(self) -> Option<usize> {
        match self {
            Verdict::L0 => Some(0),
            Verdict::L1 => Some(1),
            Verdict::L2 => Some(2),
            Verdict::NotFinite => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::L0 => "L0",
            Verdict::L1 => "L1",
            Verdict::L2 => "L2",
            Verdict::NotFinite => "NotFinite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessOrder {
    RowFirst,
    ColumnFirst,
    Either,
    None,
}

impl WitnessOrder {
    fn from_counts(verdict: Verdict, row_first: Option<usize>, column_first: Option<usize>) -> WitnessOrder {
        if verdict == Verdict::NotFinite {
            return WitnessOrder::None;
        }
        let target = verdict.steps();
        match (row_first == target, column_first == target) {
            (true, true) => WitnessOrder::Either,
            (true, false) => WitnessOrder::RowFirst,
            (false, true) => WitnessOrder::ColumnFirst,
            (false, false) => WitnessOrder::None,
        }
    }

    pub fn includes(self, side: Side) -> bool {
        match self {
            WitnessOrder::Either => true,
            WitnessOrder::RowFirst => side == Side::Row,
            WitnessOrder::ColumnFirst => side == Side::Column,
            WitnessOrder::None => false,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WitnessOrder::RowFirst => "row first",
            WitnessOrder::ColumnFirst => "column first",
            WitnessOrder::Either => "either order",
            WitnessOrder::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TerminationClass<T> {
    pub verdict: Verdict,
    pub witness_order: WitnessOrder,
    /// Scalings of the witnessing order up to the first doubly stochastic
    /// iterate, row-first when both orders witness.
    pub witness_trace: Option<ScalingTrace<T>>,
    /// Effective steps when starting with a row scaling.
    pub row_first: Option<usize>,
    pub column_first: Option<usize>,
    /// The first scaling of some order was a no-op, so raw and effective
    /// step counts differ for that order.
    pub convention_sensitive: bool,
}

impl<T> fmt::Display for TerminationClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::L0 => write!(f, "L0 (already doubly stochastic)"),
            Verdict::NotFinite => write!(f, "NotFinite"),
            v => write!(f, "{} ({})", v.label(), self.witness_order.label()),
        }
    }
}

fn check_inputs<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, what: &'static str) -> Result<()> {
    if !T::EXACT {
        return Err(Error::ApproximateBackend(what));
    }
    marg.check_shape(a)?;
    marg.require_balanced()?;
    if let Some(i) = a.zero_row_sum() {
        return Err(Error::ZeroRowSum(i));
    }
    if let Some(j) = a.zero_col_sum() {
        return Err(Error::ZeroColumnSum(j));
    }
    Ok(())
}

/// Effective count for one order given its first two scalings, or `None`
/// when the first scaling is a no-op and the count must come from the other
/// order.
fn second_level<T: Scalar>(
    first: &ScalingStep<T>,
    second: &ScalingStep<T>,
    is_ds: &impl Fn(&Matrix<T>) -> Result<bool>,
) -> Result<Option<Option<usize>>> {
    if first.was_fixed_point {
        return Ok(None);
    }
    Ok(Some(if is_ds(&first.result)? {
        Some(1)
    } else if is_ds(&second.result)? {
        Some(2)
    } else {
        None
    }))
}

/// Classifies `A` by the number of effective scalings after which it becomes
/// exactly `(r, c)`-doubly stochastic. Exact backend only.
pub fn classify<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>) -> Result<TerminationClass<T>> {
    check_inputs(a, marg, "classify")?;
    let zero = T::zero();
    let is_ds = |x: &Matrix<T>| is_doubly_stochastic(x, marg, &zero);

    if is_ds(a)? {
        return Ok(TerminationClass {
            verdict: Verdict::L0,
            witness_order: WitnessOrder::Either,
            witness_trace: Some(ScalingTrace::new(a.clone(), marg.clone(), Side::Row)?),
            row_first: Some(0),
            column_first: Some(0),
            convention_sensitive: false,
        });
    }

    let r = row_scale(a, marg.r())?;
    let c = column_scale(a, marg.c())?;
    let cr = column_scale(&r.result, marg.c())?;
    let rc = row_scale(&c.result, marg.r())?;

    let row_own = second_level(&r, &cr, &is_ds)?;
    let col_own = second_level(&c, &rc, &is_ds)?;
    // Both first scalings being no-ops would make A doubly stochastic.
    let (row_first, column_first) = match (row_own, col_own) {
        (Some(rf), Some(cf)) => (rf, cf),
        (None, Some(cf)) => (cf, cf),
        (Some(rf), None) => (rf, rf),
        (None, None) => unreachable!("A is not doubly stochastic"),
    };

    let best = match (row_first, column_first) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let verdict = Verdict::from_steps(best).expect("counts never exceed 2");
    let witness_order = WitnessOrder::from_counts(verdict, row_first, column_first);

    let witness_trace = match witness_order {
        WitnessOrder::None => None,
        order => {
            let (first, steps) = if order.includes(Side::Row) { (Side::Row, [r, cr]) } else { (Side::Column, [c, rc]) };
            let mut trace = ScalingTrace::new(a.clone(), marg.clone(), first)?;
            for step in steps {
                let done = is_ds(trace.current())?;
                if done {
                    break;
                }
                trace.steps.push(step);
            }
            Some(trace)
        }
    };

    Ok(TerminationClass {
        verdict,
        witness_order,
        witness_trace,
        row_first,
        column_first,
        convention_sensitive: row_own.is_none() || col_own.is_none(),
    })
}

/// Smallest effective step count `k <= depth` after which the alternating
/// sequence starting with `first_side` is exactly doubly stochastic.
///
/// Iterates are first screened modulo a large prime; only runs the screen
/// cannot rule out are replayed in rational arithmetic.
pub fn terminates_at<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, first_side: Side, depth: usize) -> Result<Option<usize>> {
    check_inputs(a, marg, "terminates_at")?;
    if depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    match scan(a, marg, first_side, depth) {
        Scan::Never => Ok(None),
        Scan::Undecided => terminates_at_exact(a, marg, first_side, depth),
    }
}

fn terminates_at_exact<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, first_side: Side, depth: usize) -> Result<Option<usize>> {
    let zero = T::zero();
    let mut trace = ScalingTrace::new(a.clone(), marg.clone(), first_side)?;
    let mut effective = 0;
    loop {
        if is_doubly_stochastic(trace.current(), marg, &zero)? {
            return Ok(Some(effective));
        }
        if effective == depth {
            return Ok(None);
        }
        if !trace.advance()?.was_fixed_point {
            effective += 1;
        }
        // Only the first scaling can be a no-op unless the iterate is
        // already doubly stochastic, so this loop makes progress.
        debug_assert!(trace.steps.len() <= effective + 1);
    }
}
