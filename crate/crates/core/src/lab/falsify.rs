//! Randomized search for a matrix that becomes doubly stochastic after
//! exactly three or more scalings.
//!
//! Each trial samples an exact square matrix, runs [`terminates_at`] from
//! both sides to the configured depth and compares the result with
//! [`classify`]. Any `k >= 3` is a counterexample and is kept verbatim.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lab::classify::{classify, terminates_at, Verdict, WitnessOrder, MAX_DEPTH};
use crate::lab::sampling::{positive_rational, trial_rng, EntryLaw};
use crate::matrix::{Marginals, Matrix};
use crate::scalar::{ExactRational, Scalar};
use crate::scaling::Side;
use crate::structure::support_witness;

type Q = ExactRational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifyConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub trials: u64,
    pub seed: u64,
    pub depth: usize,
    pub entries: EntryLaw,
    /// Draw random balanced `(r, c)` instead of all-ones.
    pub random_marginals: bool,
    /// Resample matrices without a nonzero diagonal instead of flagging them.
    pub require_support: bool,
    /// Worker threads; 0 lets the pool decide.
    #[serde(skip)]
    pub jobs: usize,
    /// Record wall-clock time in the report.
    #[serde(skip)]
    pub timing: bool,
}

impl Default for FalsifyConfig {
    fn default() -> Self {
        FalsifyConfig {
            n_min: 2,
            n_max: 4,
            trials: 10_000,
            seed: 42,
            depth: 6,
            entries: EntryLaw::default(),
            random_marginals: false,
            require_support: false,
            jobs: 0,
            timing: false,
        }
    }
}

impl FalsifyConfig {
    fn validate(&self) -> Result<()> {
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(Error::InvalidArgument(format!("bad size range {}..{}", self.n_min, self.n_max)));
        }
        if !(self.entries.density > 0.0 && self.entries.density <= 1.0) {
            return Err(Error::InvalidArgument(format!("density {} outside (0, 1]", self.entries.density)));
        }
        if self.entries.numerator_max < 1 || self.entries.denominator_max < 1 {
            return Err(Error::InvalidArgument("entry bounds must be positive".into()));
        }
        if self.depth > MAX_DEPTH {
            return Err(Error::InvalidArgument(format!("depth {} exceeds {MAX_DEPTH}", self.depth)));
        }
        Ok(())
    }
}

/// A sampled matrix with its step counts, kept for counterexamples and
/// oracle disagreements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub trial: u64,
    pub entries: Vec<Vec<String>>,
    pub r: Vec<String>,
    pub c: Vec<String>,
    pub row_first: Option<usize>,
    pub column_first: Option<usize>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifierReport {
    pub config: FalsifyConfig,
    pub rng_seed: u64,
    pub trials: u64,
    /// Trials where some order terminated after 3 or more effective steps.
    pub l3_hits: u64,
    pub class_histogram: BTreeMap<String, u64>,
    /// Effective step counts per order, `"none"` for no termination.
    pub row_first_steps: BTreeMap<String, u64>,
    pub column_first_steps: BTreeMap<String, u64>,
    pub deepest_checked: usize,
    /// Trials where `classify` and `terminates_at` disagree.
    pub oracle_disagreements: u64,
    /// Accepted matrices with no nonzero diagonal.
    pub without_support: u64,
    pub counterexamples: Vec<Sample>,
    pub disagreements: Vec<Sample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl FalsifierReport {
    fn empty(config: &FalsifyConfig) -> Self {
        FalsifierReport {
            config: config.clone(),
            rng_seed: config.seed,
            trials: 0,
            l3_hits: 0,
            class_histogram: BTreeMap::new(),
            row_first_steps: BTreeMap::new(),
            column_first_steps: BTreeMap::new(),
            deepest_checked: config.depth,
            oracle_disagreements: 0,
            without_support: 0,
            counterexamples: Vec::new(),
            disagreements: Vec::new(),
            elapsed_seconds: None,
        }
    }

    fn record(&mut self, outcome: TrialOutcome) {
        let key = |k: Option<usize>| k.map_or_else(|| "none".to_string(), |k| k.to_string());
        self.trials += 1;
        *self.class_histogram.entry(outcome.sample.verdict.label().to_string()).or_default() += 1;
        *self.row_first_steps.entry(key(outcome.sample.row_first)).or_default() += 1;
        *self.column_first_steps.entry(key(outcome.sample.column_first)).or_default() += 1;
        self.without_support += u64::from(!outcome.has_support);
        if !outcome.agrees {
            self.oracle_disagreements += 1;
            self.disagreements.push(outcome.sample.clone());
        }
        let deep = |k: Option<usize>| k.is_some_and(|k| k >= 3);
        if deep(outcome.sample.row_first) || deep(outcome.sample.column_first) {
            self.l3_hits += 1;
            self.counterexamples.push(outcome.sample);
        }
    }

    pub fn passed(&self) -> bool {
        self.l3_hits == 0
    }
}

struct TrialOutcome {
    sample: Sample,
    has_support: bool,
    agrees: bool,
}

fn sample_marginals(rng: &mut impl Rng, n: usize, random: bool) -> Marginals<Q> {
    if !random {
        return Marginals::ones(n, n).expect("n >= 1");
    }
    let r: Vec<Q> = (0..n).map(|_| positive_rational(rng, 9, 4)).collect();
    let w: Vec<Q> = (0..n).map(|_| positive_rational(rng, 9, 4)).collect();
    let scale = r.iter().sum::<Q>() / w.iter().sum::<Q>();
    let c = w.into_iter().map(|x| x * &scale).collect();
    Marginals::new(r, c).expect("positive by construction")
}

fn run_trial(cfg: &FalsifyConfig, trial: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, trial);
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let (a, has_support): (Matrix<Q>, bool) = loop {
        let a = cfg.entries.sample(&mut rng, n, n);
        let supported = support_witness(&a)?.has_nonzero_diagonal;
        if supported || !cfg.require_support {
            break (a, supported);
        }
    };
    let marg = sample_marginals(&mut rng, n, cfg.random_marginals);

    let row_first = terminates_at(&a, &marg, Side::Row, cfg.depth)?;
    let column_first = terminates_at(&a, &marg, Side::Column, cfg.depth)?;
    let class = classify(&a, &marg)?;

    let best = match (row_first, column_first) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let expected_verdict = Verdict::from_steps(best);
    let agrees = expected_verdict == Some(class.verdict)
        && class.row_first == row_first
        && class.column_first == column_first
        && match class.witness_order {
            WitnessOrder::None => best.is_none(),
            order => {
                order.includes(Side::Row) == (row_first == best) && order.includes(Side::Column) == (column_first == best)
            }
        };

    let render = |v: &[Q]| v.iter().map(Scalar::render).collect();
    Ok(TrialOutcome {
        sample: Sample {
            trial,
            entries: a.render_rows(),
            r: render(marg.r()),
            c: render(marg.c()),
            row_first,
            column_first,
            verdict: class.verdict,
        },
        has_support,
        agrees,
    })
}

/// Runs `cfg.trials` independent seeded trials.
pub fn falsify_search(cfg: &FalsifyConfig) -> Result<FalsifierReport> {
    cfg.validate()?;
    let start = Instant::now();
    let run = || (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<Vec<_>>>();
    let outcomes = if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    let mut report = FalsifierReport::empty(cfg);
    outcomes.into_iter().for_each(|o| report.record(o));
    if cfg.timing {
        report.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}
