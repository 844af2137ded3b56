//! Sampling harness for the inequality: for positive `c` and `z != 0` with
//! every `z_j + 1 > 0` and `sum c_j z_j = 0`, the sum
//! `sum c_j z_j / (z_j + 1)` is strictly negative.

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lab::sampling::{positive_rational, ratio, trial_rng};
use crate::scalar::{ExactRational, Scalar};

type Q = ExactRational;

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaSums {
    /// `sum c_j z_j`.
    pub s1: Q,
    /// `sum c_j z_j / (z_j + 1)`.
    pub s2: Q,
}

/// Evaluates both sums. Requires positive `c` and `z_j > -1`.
pub fn lemma_sums(c: &[Q], z: &[Q]) -> Result<LemmaSums> {
    if c.len() != z.len() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} values", c.len(), z.len())));
    }
    if let Some(j) = c.iter().position(|x| *x <= Q::zero()) {
        return Err(Error::InvalidArgument(format!("c_{} = {} is not positive", j + 1, c[j].render())));
    }
    if let Some(j) = z.iter().position(|x| *x <= -Q::one()) {
        return Err(Error::InvalidArgument(format!("z_{} = {} violates z + 1 > 0", j + 1, z[j].render())));
    }
    let s1 = c.iter().zip(z).map(|(cj, zj)| cj * zj).sum();
    let s2 = c.iter().zip(z).map(|(cj, zj)| cj * zj / (zj + Q::one())).sum();
    Ok(LemmaSums { s1, s2 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Number of valid samples to evaluate.
    pub trials: u64,
    pub seed: u64,
    /// Free coordinates are drawn from `(-1, z_max]`.
    pub z_max: i64,
    pub numerator_max: i64,
    pub denominator_max: i64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { n_min: 2, n_max: 8, trials: 100_000, seed: 42, z_max: 5, numerator_max: 20, denominator_max: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCounterexample {
    pub sample: u64,
    pub c: Vec<String>,
    pub z: Vec<String>,
    pub s2: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub config: LemmaConfig,
    pub trials: u64,
    /// Draws including rejected ones.
    pub attempts: u64,
    pub rejected: u64,
    /// Valid samples with `s2 >= 0`.
    pub violations: u64,
    /// Valid samples whose constructed `s1` was not exactly 0.
    pub s1_nonzero: u64,
    pub min_s2: Option<String>,
    pub max_s2: Option<String>,
    pub counterexamples: Vec<LemmaCounterexample>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.s1_nonzero == 0
    }
}

struct Draw {
    attempts: u64,
    c: Vec<Q>,
    z: Vec<Q>,
    sums: LemmaSums,
}

/// Draws until the sample is valid: `z_n` solved from `sum c_j z_j = 0`,
/// rejected when `z_n <= -1` or `z = 0`.
fn draw(cfg: &LemmaConfig, sample: u64) -> Draw {
    let mut rng = trial_rng(cfg.seed, sample);
    let mut attempts = 0;
    loop {
        attempts += 1;
        let n = rng.gen_range(cfg.n_min..=cfg.n_max);
        let c: Vec<Q> = (0..n).map(|_| positive_rational(&mut rng, cfg.numerator_max, cfg.denominator_max)).collect();
        let mut z: Vec<Q> = (0..n - 1)
            .map(|_| {
                let d = rng.gen_range(1..=cfg.denominator_max);
                // p / d with p in (-d, z_max d], so z > -1.
                ratio(rng.gen_range(-d + 1..=cfg.z_max * d), d)
            })
            .collect();
        let partial: Q = c.iter().zip(&z).map(|(cj, zj)| cj * zj).sum();
        let last = -partial / &c[n - 1];
        if last <= -Q::one() {
            continue;
        }
        z.push(last);
        if z.iter().all(Zero::is_zero) {
            continue;
        }
        let sums = lemma_sums(&c, &z).expect("validated above");
        return Draw { attempts, c, z, sums };
    }
}

pub fn lemma_harness(cfg: &LemmaConfig) -> Result<LemmaReport> {
    if cfg.n_min < 2 || cfg.n_min > cfg.n_max {
        return Err(Error::InvalidArgument(format!("bad size range {}..{} (need n >= 2)", cfg.n_min, cfg.n_max)));
    }
    if cfg.z_max < 1 || cfg.numerator_max < 1 || cfg.denominator_max < 1 {
        return Err(Error::InvalidArgument("sampling bounds must be positive".into()));
    }
    let draws: Vec<Draw> = (0..cfg.trials).into_par_iter().map(|i| draw(cfg, i)).collect();

    let mut report = LemmaReport {
        config: cfg.clone(),
        trials: cfg.trials,
        attempts: 0,
        rejected: 0,
        violations: 0,
        s1_nonzero: 0,
        min_s2: None,
        max_s2: None,
        counterexamples: Vec::new(),
    };
    let mut min_s2: Option<Q> = None;
    let mut max_s2: Option<Q> = None;
    for (i, d) in draws.into_iter().enumerate() {
        report.attempts += d.attempts;
        report.rejected += d.attempts - 1;
        report.s1_nonzero += u64::from(!d.sums.s1.is_zero());
        if d.sums.s2 >= Q::zero() {
            report.violations += 1;
            report.counterexamples.push(LemmaCounterexample {
                sample: i as u64,
                c: d.c.iter().map(Scalar::render).collect(),
                z: d.z.iter().map(Scalar::render).collect(),
                s2: d.sums.s2.render(),
            });
        }
        if min_s2.as_ref().is_none_or(|m| d.sums.s2 < *m) {
            min_s2 = Some(d.sums.s2.clone());
        }
        if max_s2.as_ref().is_none_or(|m| d.sums.s2 > *m) {
            max_s2 = Some(d.sums.s2);
        }
    }
    report.min_s2 = min_s2.map(|x| x.render());
    report.max_s2 = max_s2.map(|x| x.render());
    Ok(report)
}
