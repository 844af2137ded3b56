//! Seeded random rationals. Trial `i` of a run with seed `s` always draws
//! from `ChaCha8Rng::seed_from_u64(s + i)`.

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::matrix::Matrix;
use crate::scalar::ExactRational;

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

pub(crate) fn ratio(numer: i64, denom: i64) -> ExactRational {
    ExactRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `k / d` with `k` uniform in `1..=numerator_max`, `d` in `1..=denominator_max`.
pub fn positive_rational(rng: &mut impl Rng, numerator_max: i64, denominator_max: i64) -> ExactRational {
    ratio(rng.gen_range(1..=numerator_max), rng.gen_range(1..=denominator_max))
}

/// Entry law for sampled matrices: zero with probability `1 - density`,
/// otherwise `k / d` with `k` uniform in `1..=numerator_max` and one
/// denominator `d` in `1..=denominator_max` shared by the whole matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntryLaw {
    pub density: f64,
    pub numerator_max: i64,
    pub denominator_max: i64,
}

impl Default for EntryLaw {
    fn default() -> Self {
        EntryLaw { density: 0.9, numerator_max: 20, denominator_max: 10 }
    }
}

impl EntryLaw {
    /// Draws until every row and column sum is positive.
    pub fn sample(&self, rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<ExactRational> {
        loop {
            let d = rng.gen_range(1..=self.denominator_max);
            let entries = (0..rows * cols)
                .map(|_| {
                    if rng.gen_bool(self.density) {
                        ratio(rng.gen_range(1..=self.numerator_max), d)
                    } else {
                        ratio(0, 1)
                    }
                })
                .collect();
            let a = Matrix::from_vec(rows, cols, entries).expect("entries are nonnegative");
            if a.has_positive_row_sums() && a.has_positive_col_sums() {
                return a;
            }
        }
    }
}
