//! Nonzero-diagonal certification via bipartite matching on the positivity
//! pattern.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{is_positive, Scalar};

/// A permutation `sigma` with every `a[i][sigma[i]] > 0`, if one exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportWitness {
    pub has_nonzero_diagonal: bool,
    /// 0-based; `sigma[i]` is the column matched to row `i`.
    pub sigma: Option<Vec<usize>>,
}

/// Row-to-column adjacency of the positive entries, columns ascending.
struct Pattern {
    adj: Vec<Vec<usize>>,
    cols: usize,
}

impl Pattern {
    fn of<T: Scalar>(a: &Matrix<T>) -> Self {
        let adj = (0..a.rows()).map(|i| (0..a.cols()).filter(|&j| is_positive(a.get(i, j))).collect()).collect();
        Pattern { adj, cols: a.cols() }
    }

    /// Kuhn augmenting path from `row`, skipping columns in `blocked`.
    fn augment(&self, row: usize, blocked: &[bool], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &self.adj[row] {
            if blocked[j] || seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|other| self.augment(other, blocked, seen, owner)) {
                owner[j] = Some(row);
                return true;
            }
        }
        false
    }

    /// Whether `rows` can be matched into the unblocked columns.
    fn saturates(&self, rows: impl Iterator<Item = usize>, blocked: &[bool]) -> bool {
        let mut owner = vec![None; self.cols];
        let mut seen = vec![false; self.cols];
        for row in rows {
            seen.iter_mut().for_each(|s| *s = false);
            if !self.augment(row, blocked, &mut seen, &mut owner) {
                return false;
            }
        }
        true
    }
}

/// Finds the lexicographically smallest `sigma` with a nonzero
/// `sigma`-diagonal, or reports that none exists.
///
/// Rows are fixed in order to the smallest column that still leaves a
/// perfect matching for the remaining rows.
pub fn support_witness<T: Scalar>(a: &Matrix<T>) -> Result<SupportWitness> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let pattern = Pattern::of(a);
    let mut blocked = vec![false; n];
    if !pattern.saturates(0..n, &blocked) {
        return Ok(SupportWitness { has_nonzero_diagonal: false, sigma: None });
    }
    let mut sigma = Vec::with_capacity(n);
    for i in 0..n {
        let j = pattern.adj[i]
            .iter()
            .copied()
            .find(|&j| {
                if blocked[j] {
                    return false;
                }
                blocked[j] = true;
                let ok = pattern.saturates(i + 1..n, &blocked);
                blocked[j] = false;
                ok
            })
            .expect("a perfect matching exists, so some column extends the prefix");
        blocked[j] = true;
        sigma.push(j);
    }
    Ok(SupportWitness { has_nonzero_diagonal: true, sigma: Some(sigma) })
}

/// Size of a maximum matching in the positivity pattern.
pub fn matching_size<T: Scalar>(a: &Matrix<T>) -> usize {
    let pattern = Pattern::of(a);
    let blocked = vec![false; a.cols()];
    let mut owner = vec![None; a.cols()];
    let mut seen = vec![false; a.cols()];
    (0..a.rows())
        .filter(|&row| {
            seen.iter_mut().for_each(|s| *s = false);
            pattern.augment(row, &blocked, &mut seen, &mut owner)
        })
        .count()
}
