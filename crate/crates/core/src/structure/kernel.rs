//! Exact kernels and the kernel/image orthogonality check.
//!
//! For any matrix, `ker(A)` is the orthogonal complement of `im(A^t)`.
//! [`orthogonality_check`] samples `y = A^t w` and measures `<x, y>` against
//! an exact kernel basis.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::matrix::{dot, Matrix};
use crate::scalar::{ExactRational, Scalar};

/// Basis of `{x : A x = 0}` for rows of arbitrary sign, via reduced row
/// echelon form. One vector per free column, with a 1 in that column.
pub fn nullspace_of_rows(rows: &[Vec<ExactRational>], cols: usize) -> Vec<Vec<ExactRational>> {
    let mut a: Vec<Vec<ExactRational>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == a.len() {
            break;
        }
        let Some(found) = (pivot_row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(found, pivot_row);
        let pivot = a[pivot_row][col].clone();
        for x in a[pivot_row].iter_mut() {
            *x = &*x / &pivot;
        }
        let pivot_values = a[pivot_row].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == pivot_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_values) {
                *x -= &factor * p;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }

    let mut is_pivot = vec![false; cols];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    (0..cols)
        .filter(|&free| !is_pivot[free])
        .map(|free| {
            let mut v = vec![ExactRational::zero(); cols];
            v[free] = ExactRational::from_integer(1.into());
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            v
        })
        .collect()
}

/// Exact basis of `ker(A)`; empty when the kernel is trivial.
pub fn nullspace_basis(a: &Matrix<ExactRational>) -> Vec<Vec<ExactRational>> {
    nullspace_of_rows(&a.to_rows(), a.cols())
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub backend: &'static str,
    pub trials: usize,
    pub kernel_dim: usize,
    /// Largest `|<x, A^t w>|` over all trials and basis vectors.
    pub max_violation: String,
    pub max_violation_f64: f64,
    pub passed: bool,
}

/// Samples `trials` vectors `w`, forms `y = A^t w` in the backend's
/// arithmetic and checks `|<x, y>| <= tol` for every exact kernel basis
/// vector `x` (scaled to unit max-norm). The kernel itself is always
/// computed exactly from the rational value of the entries.
pub fn orthogonality_check<T: Scalar>(a: &Matrix<T>, trials: usize, tol: &T, seed: u64) -> OrthogonalityReport {
    let exact = a.convert::<ExactRational>();
    let basis: Vec<Vec<T>> = nullspace_basis(&exact)
        .into_iter()
        .map(|v| {
            let norm = v.iter().map(Signed::abs).max().expect("nonempty");
            v.iter().map(|x| T::from_rational(&(x / &norm))).collect()
        })
        .collect();

    let mut max_violation = T::zero();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let w: Vec<T> = (0..a.rows()).map(|_| T::from_ratio(rng.gen_range(-20..=20), rng.gen_range(1..=10))).collect();
        let y = a.mul_vec_transposed(&w).expect("w has one entry per row");
        for x in &basis {
            let v = dot(x, &y).abs();
            if v > max_violation {
                max_violation = v;
            }
        }
    }
    OrthogonalityReport {
        backend: T::BACKEND,
        trials,
        kernel_dim: basis.len(),
        passed: max_violation <= *tol,
        max_violation_f64: max_violation.to_f64(),
        max_violation: max_violation.render(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = ExactRational;

    fn mat(text: &str) -> Matrix<Q> {
        Matrix::parse_inline(text).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    /// Independent check: `v` is a nonzero kernel vector when `A v = 0`,
    /// computed entry by entry.
    fn kills(a: &Matrix<Q>, v: &[Q]) -> bool {
        (0..a.rows()).all(|i| (0..a.cols()).map(|j| a.get(i, j) * &v[j]).sum::<Q>().is_zero())
    }

    #[test]
    fn kernel_of_uniform_two_by_two() {
        let basis = nullspace_basis(&mat("1/2,1/2;1/2,1/2"));
        // Hand elimination: x1 + x2 = 0.
        assert_eq!(basis, vec![vec![q(-1, 1), q(1, 1)]]);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(nullspace_basis(&Matrix::identity(3).unwrap()).is_empty());
    }

    #[test]
    fn single_row_has_two_dimensional_kernel() {
        let a = mat("1,2,3");
        let basis = nullspace_basis(&a);
        // x1 = -2 x2 - 3 x3.
        assert_eq!(basis, vec![vec![q(-2, 1), q(1, 1), q(0, 1)], vec![q(-3, 1), q(0, 1), q(1, 1)]]);
        assert!(basis.iter().all(|v| kills(&a, v)));
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        assert_eq!(nullspace_basis(&mat("0,0,0;0,0,0")).len(), 3);
    }

    #[test]
    fn orthogonality_examples() {
        let report = orthogonality_check(&mat("1/2,1/2;1/2,1/2"), 20, &Q::zero(), 1);
        assert_eq!(report.kernel_dim, 1);
        assert_eq!(report.max_violation, "0");
        assert!(report.passed);

        let af = Matrix::<f64>::parse_inline("1,2,3;2,4,6;1,0,1").unwrap();
        let report = orthogonality_check(&af, 20, &1e-9, 1);
        assert_eq!(report.kernel_dim, 1);
        assert!(report.passed, "{report:?}");
    }

    fn rational_matrix() -> impl Strategy<Value = Matrix<Q>> {
        (1usize..6, 1usize..7).prop_flat_map(|(m, n)| {
            proptest::collection::vec((0i64..4, 1i64..4), m * n)
                .prop_map(move |v| Matrix::from_vec(m, n, v.into_iter().map(|(a, b)| q(a, b)).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn basis_vectors_are_killed_and_rank_nullity_holds(a in rational_matrix()) {
            let basis = nullspace_basis(&a);
            for v in &basis {
                prop_assert!(kills(&a, v));
            }
            // Rank of A^t equals rank of A.
            let rank = a.cols() - basis.len();
            let rank_t = a.rows() - nullspace_basis(&a.transpose()).len();
            prop_assert_eq!(rank, rank_t);
        }

        #[test]
        fn exact_orthogonality_is_exact(a in rational_matrix(), seed in any::<u64>()) {
            let report = orthogonality_check(&a, 5, &Q::zero(), seed);
            prop_assert_eq!(report.max_violation, "0");
        }
    }
}
