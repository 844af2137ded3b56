//! Generators of matrices with a prescribed termination class.
//!
//! * One step: `A = D S` with `S = r c^t / T` the rank-one `(r, c)`-doubly
//!   stochastic matrix and `D` a positive diagonal, so `R(A) = S`.
//! * Two steps: `A = u v^t` with positive `u`, `v`. Then `R(A) = r v^t / sum(v)`
//!   and `C(R(A)) = S`.
//!
//! Degenerate draws are rejected by the classifier and redrawn.

use crate::error::{Error, Result};
use crate::lab::classify::{classify, Verdict};
use crate::lab::sampling::{positive_rational, trial_rng};
use crate::matrix::{DiagonalScaling, Marginals, Matrix};
use crate::scalar::ExactRational;
use crate::scaling::Side;

type Q = ExactRational;

const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug)]
pub struct Generated {
    pub matrix: Matrix<Q>,
    pub verdict: Verdict,
    /// Draws discarded before `matrix` was accepted.
    pub regenerations: usize,
}

/// `r c^t / sum(r)`.
pub fn rank_one_doubly_stochastic(marg: &Marginals<Q>) -> Result<Matrix<Q>> {
    marg.require_balanced()?;
    let total = marg.row_total();
    let (m, n) = (marg.r().len(), marg.c().len());
    Matrix::from_fn(m, n, |i, j| &marg.r()[i] * &marg.c()[j] / &total)
}

/// `diag(d) r c^t / sum(r)`.
pub fn one_step_from_diagonal(marg: &Marginals<Q>, d: &[Q]) -> Result<Matrix<Q>> {
    DiagonalScaling::new(Side::Row, d.to_vec())?.apply(&rank_one_doubly_stochastic(marg)?)
}

/// `u v^t`.
pub fn two_step_from_factors(u: &[Q], v: &[Q]) -> Result<Matrix<Q>> {
    if u.iter().chain(v).any(|x| *x <= Q::from_integer(0.into())) {
        return Err(Error::InvalidArgument("factors must be positive".into()));
    }
    Matrix::from_fn(u.len(), v.len(), |i, j| &u[i] * &v[j])
}

fn generate(marg: &Marginals<Q>, seed: u64, want: Verdict, build: impl Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Matrix<Q>>) -> Result<Generated> {
    marg.require_balanced()?;
    let mut rng = trial_rng(seed, 0);
    for regenerations in 0..MAX_ATTEMPTS {
        let matrix = build(&mut rng)?;
        let class = classify(&matrix, marg)?;
        if class.verdict == want {
            return Ok(Generated { matrix, verdict: class.verdict, regenerations });
        }
    }
    Err(Error::InvalidArgument(format!("no {} matrix after {MAX_ATTEMPTS} draws", want.label())))
}

/// Random matrix that becomes `(r, c)`-doubly stochastic after one row
/// scaling.
pub fn gen_exact_one_step(marg: &Marginals<Q>, seed: u64) -> Result<Generated> {
    let m = marg.r().len();
    generate(marg, seed, Verdict::L1, |rng| {
        let d: Vec<Q> = (0..m).map(|_| positive_rational(rng, 20, 10)).collect();
        one_step_from_diagonal(marg, &d)
    })
}

/// Random rank-one matrix that needs exactly two scalings.
pub fn gen_exact_two_step(marg: &Marginals<Q>, seed: u64) -> Result<Generated> {
    let (m, n) = (marg.r().len(), marg.c().len());
    generate(marg, seed, Verdict::L2, |rng| {
        let u: Vec<Q> = (0..m).map(|_| positive_rational(rng, 20, 10)).collect();
        let v: Vec<Q> = (0..n).map(|_| positive_rational(rng, 20, 10)).collect();
        two_step_from_factors(&u, &v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::classify::WitnessOrder;
    use crate::lab::sampling::ratio;

    fn q(n: i64, d: i64) -> Q {
        ratio(n, d)
    }

    #[test]
    fn one_step_example() {
        let marg = Marginals::ones(2, 2).unwrap();
        let a = one_step_from_diagonal(&marg, &[q(2, 1), q(1, 1)]).unwrap();
        assert_eq!(a, Matrix::parse_inline("1,1;1/2,1/2").unwrap());
        let class = classify(&a, &marg).unwrap();
        assert_eq!((class.verdict, class.witness_order), (Verdict::L1, WitnessOrder::RowFirst));
    }

    #[test]
    fn identity_diagonal_gives_the_doubly_stochastic_matrix() {
        let marg = Marginals::ones(2, 2).unwrap();
        let s = one_step_from_diagonal(&marg, &[q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(classify(&s, &marg).unwrap().verdict, Verdict::L0);
    }

    #[test]
    fn two_step_example_is_the_worked_matrix() {
        let marg = Marginals::ones(2, 2).unwrap();
        let a = two_step_from_factors(&[q(3, 1), q(5, 1)], &[q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(a, Matrix::parse_inline("3,6;5,10").unwrap());
        assert_eq!(classify(&a, &marg).unwrap().verdict, Verdict::L2);
        // u = r, v = c / T is already doubly stochastic.
        let s = two_step_from_factors(&[q(1, 1), q(1, 1)], &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(classify(&s, &marg).unwrap().verdict, Verdict::L0);
    }

    #[test]
    fn generators_hit_their_class() {
        let marg = Marginals::new(vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(1, 1)]).unwrap();
        for seed in 0..100 {
            let g = gen_exact_one_step(&marg, seed).unwrap();
            let class = classify(&g.matrix, &marg).unwrap();
            assert_eq!(class.verdict, Verdict::L1);
            assert!(class.witness_order.includes(Side::Row));
        }
        let marg4 = Marginals::ones(4, 4).unwrap();
        for seed in 0..100 {
            let g = gen_exact_two_step(&marg4, seed).unwrap();
            assert_eq!(classify(&g.matrix, &marg4).unwrap().verdict, Verdict::L2);
        }
    }

    #[test]
    fn unbalanced_marginals_are_rejected() {
        let marg = Marginals::new(vec![q(1, 1)], vec![q(2, 1)]).unwrap();
        assert!(gen_exact_one_step(&marg, 0).is_err());
        assert!(gen_exact_two_step(&marg, 0).is_err());
    }
}
