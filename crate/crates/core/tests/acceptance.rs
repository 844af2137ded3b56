//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sinkhorn_core::lab::sampling::{trial_rng, EntryLaw};
use sinkhorn_core::lab::{
    classify, falsify_search, gen_exact_one_step, gen_exact_two_step, lemma_harness, lemma_sums, terminates_at,
    FalsifyConfig, LemmaConfig, Verdict,
};
use sinkhorn_core::structure::{nullspace_basis, orthogonality_check, support_witness};
use sinkhorn_core::{
    column_scale, row_scale, sinkhorn_iterate, ExactRational, Marginals, Matrix, Scalar, Side, SinkhornOptions,
};

type Q = ExactRational;
type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn mat(text: &str) -> Matrix<Q> {
    Matrix::parse_inline(text).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Direct `(r, c)`-doubly stochastic test written against raw entries.
fn exactly_doubly_stochastic(a: &Matrix<Q>, r: &[Q], c: &[Q]) -> bool {
    let rows = (0..a.rows()).all(|i| (0..a.cols()).map(|j| a.get(i, j).clone()).sum::<Q>() == r[i]);
    let cols = (0..a.cols()).all(|j| (0..a.rows()).map(|i| a.get(i, j).clone()).sum::<Q>() == c[j]);
    rows && cols
}

/// Column scaling from the definition `a_ij c_j / colsum_j`.
fn naive_column_scale(a: &Matrix<Q>, c: &[Q]) -> Matrix<Q> {
    let sums: Vec<Q> = (0..a.cols()).map(|j| (0..a.rows()).map(|i| a.get(i, j).clone()).sum()).collect();
    Matrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) * &c[j] / &sums[j]).unwrap()
}

fn naive_row_scale(a: &Matrix<Q>, r: &[Q]) -> Matrix<Q> {
    naive_column_scale(&a.transpose(), r).transpose()
}

fn median_runtime(runs: usize, mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..runs)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[runs / 2]
}

fn worked_chain(first: Side, middle: &str) -> Check {
    let a = mat("3,6;5,10");
    let ones = Marginals::ones(2, 2).unwrap();
    let half = mat("1/2,1/2;1/2,1/2");
    let (step1, step2) = match first {
        Side::Row => {
            let s1 = row_scale(&a, ones.r()).map_err(|e| e.to_string())?;
            let s2 = column_scale(&s1.result, ones.c()).map_err(|e| e.to_string())?;
            (s1.result, s2.result)
        }
        Side::Column => {
            let s1 = column_scale(&a, ones.c()).map_err(|e| e.to_string())?;
            let s2 = row_scale(&s1.result, ones.r()).map_err(|e| e.to_string())?;
            (s1.result, s2.result)
        }
    };
    ensure(step1 == mat(middle), || format!("first iterate {step1}"))?;
    ensure(step2 == half, || format!("second iterate {step2}"))?;

    let opts = SinkhornOptions::default();
    let result = sinkhorn_iterate(&a, &ones, first, &opts).map_err(|e| e.to_string())?;
    ensure(result.limit.as_ref() == Some(&half), || "sinkhorn_iterate limit differs".into())?;
    ensure(result.effective_steps == 2 && result.iterations_used == 2, || format!("steps = {}", result.effective_steps))?;
    ensure(result.trace.steps[0].result == mat(middle), || "trace differs from the chain".into())?;

    let time = median_runtime(25, || {
        sinkhorn_iterate(&a, &ones, first, &opts).unwrap();
    });
    ensure(time < Duration::from_millis(1), || format!("runtime {time:?}"))?;
    Ok(format!("3,6;5,10 -> {middle} -> 1/2 everywhere, steps = 2, median {:.3} ms", time.as_secs_f64() * 1e3))
}

fn ac1() -> Check {
    worked_chain(Side::Row, "1/3,2/3;1/3,2/3")
}

fn ac2() -> Check {
    worked_chain(Side::Column, "3/8,3/8;5/8,5/8")
}

fn ac3() -> Check {
    let cfg = FalsifyConfig { trials: 10_000, n_min: 2, n_max: 4, depth: 6, seed: 42, ..FalsifyConfig::default() };
    let start = Instant::now();
    let report = falsify_search(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.trials == 10_000, || format!("{} trials ran", report.trials))?;
    ensure(report.l3_hits == 0, || format!("l3_hits = {}: {:?}", report.l3_hits, report.counterexamples))?;
    for hist in [&report.row_first_steps, &report.column_first_steps] {
        for k in 3..=6 {
            ensure(!hist.contains_key(&k.to_string()), || format!("k = {k} observed: {hist:?}"))?;
        }
    }
    ensure(elapsed < Duration::from_secs(60), || format!("runtime {elapsed:?}"))?;
    Ok(format!("10000 trials, n in 2..4, depth 6, seed 42: l3_hits = 0, classes {:?}, {:.1} s", report.class_histogram, elapsed.as_secs_f64()))
}

/// Same samples as the falsifier, compared here against both library
/// routines and, for a prefix, against a naive rational iteration.
fn ac4() -> Check {
    let cfg = FalsifyConfig::default();
    let report = falsify_search(&cfg).map_err(|e| e.to_string())?;
    ensure(report.oracle_disagreements == 0, || format!("{} disagreements: {:?}", report.oracle_disagreements, report.disagreements))?;

    let mut naive_checked = 0;
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t);
        let n = rng.gen_range(cfg.n_min..=cfg.n_max);
        let a = cfg.entries.sample(&mut rng, n, n);
        let ones = Marginals::ones(n, n).unwrap();
        let class = classify(&a, &ones).map_err(|e| e.to_string())?;
        let row = terminates_at(&a, &ones, Side::Row, 6).map_err(|e| e.to_string())?;
        let col = terminates_at(&a, &ones, Side::Column, 6).map_err(|e| e.to_string())?;
        let best = match (row, col) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        ensure(Verdict::from_steps(best) == Some(class.verdict), || format!("trial {t}: {class} vs {row:?}/{col:?}"))?;
        ensure(class.row_first == row && class.column_first == col, || format!("trial {t}: counts differ"))?;
        if t < 300 {
            let naive = (naive_count(&a, Side::Row, 6), naive_count(&a, Side::Column, 6));
            ensure(naive == (row, col), || format!("trial {t}: naive {naive:?} vs {row:?}/{col:?}"))?;
            naive_checked += 1;
        }
    }
    Ok(format!("{} samples: classify matches the depth-6 search everywhere ({naive_checked} also replayed naively)", cfg.trials))
}

/// Effective steps to reach an exactly doubly stochastic iterate with unit
/// marginals, no-op scalings not counted.
fn naive_count(a: &Matrix<Q>, first: Side, depth: usize) -> Option<usize> {
    let ones = vec![Q::one(); a.rows()];
    let mut current = a.clone();
    let mut side = first;
    let mut effective = 0;
    for _ in 0..=2 * depth + 1 {
        if exactly_doubly_stochastic(&current, &ones, &ones) {
            return Some(effective);
        }
        if effective == depth {
            return None;
        }
        let next = match side {
            Side::Row => naive_row_scale(&current, &ones),
            Side::Column => naive_column_scale(&current, &ones),
        };
        if next != current {
            effective += 1;
        }
        current = next;
        side = side.other();
    }
    None
}

fn ac5() -> Check {
    let sums = lemma_sums(&[q(1, 1), q(1, 1)], &[q(1, 2), q(-1, 2)]).map_err(|e| e.to_string())?;
    // (1/2)/(3/2) + (-1/2)/(1/2)
    let expected = q(1, 2) / q(3, 2) + q(-1, 2) / q(1, 2);
    ensure(expected == q(-2, 3), || "hand oracle".into())?;
    ensure(sums.s1.is_zero() && sums.s2 == expected, || format!("spot s2 = {}", sums.s2.render()))?;

    let cfg = LemmaConfig { trials: 100_000, n_min: 2, n_max: 8, ..LemmaConfig::default() };
    let report = lemma_harness(&cfg).map_err(|e| e.to_string())?;
    ensure(report.trials == 100_000, || format!("{} samples", report.trials))?;
    ensure(report.violations == 0 && report.s1_nonzero == 0, || format!("{} violations", report.violations))?;
    let max = Q::parse_literal(report.max_s2.as_deref().unwrap_or("0")).map_err(|e| e.to_string())?;
    ensure(max < Q::zero(), || format!("max s2 = {}", max.render()))?;
    Ok(format!("100000 samples, n <= 8: s2 < 0 in all (max s2 = {}), spot value -2/3", report.max_s2.unwrap()))
}

/// Exact rank by Gaussian elimination on a row copy.
fn rank(a: &Matrix<Q>) -> usize {
    let mut rows = a.to_rows();
    let mut rank = 0;
    for col in 0..a.cols() {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i][col].is_zero() {
                let f = &rows[i][col] / &rows[rank][col];
                let pivot = rows[rank].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Product of random nonnegative `m x k` and `k x n` factors, so the kernel
/// is often nontrivial.
fn low_rank(rng: &mut ChaCha8Rng, m: usize, n: usize, k: usize) -> Vec<Vec<i64>> {
    let b: Vec<Vec<i64>> = (0..m).map(|_| (0..k).map(|_| rng.gen_range(0..=4)).collect()).collect();
    let c: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..=4)).collect()).collect();
    (0..m).map(|i| (0..n).map(|j| (0..k).map(|l| b[i][l] * c[l][j]).sum()).collect()).collect()
}

fn ac6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut nontrivial = 0;
    for trial in 0..1000 {
        let (m, n) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let k = rng.gen_range(1..=m.min(n));
        let d = rng.gen_range(1..=5);
        let ints = low_rank(&mut rng, m, n, k);
        let a = Matrix::from_fn(m, n, |i, j| q(ints[i][j], d)).unwrap();
        let basis = nullspace_basis(&a);
        ensure(basis.len() + rank(&a) == n, || format!("trial {trial}: kernel dimension {}", basis.len()))?;
        for v in &basis {
            ensure(a.mul_vec(v).unwrap().iter().all(Zero::is_zero), || format!("trial {trial}: A v != 0"))?;
        }
        nontrivial += usize::from(!basis.is_empty());
        let report = orthogonality_check(&a, 5, &Q::zero(), trial);
        ensure(report.max_violation == "0" && report.passed, || format!("trial {trial}: violation {}", report.max_violation))?;
    }

    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let k = rng.gen_range(5..=9);
        let ints = low_rank(&mut rng, 10, 10, k);
        let a = Matrix::from_fn(10, 10, |i, j| ints[i][j] as f64).unwrap();
        let report = orthogonality_check(&a, 5, &1e-9, trial);
        worst = worst.max(report.max_violation_f64);
        ensure(report.max_violation_f64 <= 1e-9, || format!("approx trial {trial}: violation {}", report.max_violation_f64))?;
    }
    Ok(format!("1000 exact (m, n <= 8, {nontrivial} with nontrivial kernel): violation 0; 1000 approx 10x10: max violation {worst:e}"))
}

fn ac7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let law = EntryLaw { density: 0.8, numerator_max: 30, denominator_max: 12 };
    let mut rectangular = 0;
    for trial in 0..1000 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        rectangular += usize::from(m != n);
        let a = law.sample(&mut rng, m, n);
        let r: Vec<Q> = (0..m).map(|_| q(rng.gen_range(1..=9), rng.gen_range(1..=4))).collect();
        let c: Vec<Q> = (0..n).map(|_| q(rng.gen_range(1..=9), rng.gen_range(1..=4))).collect();
        let at = a.transpose();
        let ca = column_scale(&a, &c).map_err(|e| e.to_string())?.result;
        let ra = row_scale(&a, &r).map_err(|e| e.to_string())?.result;
        let rat = row_scale(&at, &c).map_err(|e| e.to_string())?.result;
        let cat = column_scale(&at, &r).map_err(|e| e.to_string())?.result;
        ensure(ca.transpose() == rat, || format!("trial {trial}: C(A)^t != R(A^t)"))?;
        ensure(ra.transpose() == cat, || format!("trial {trial}: R(A)^t != C(A^t)"))?;
        ensure(ca == naive_column_scale(&a, &c) && ra == naive_row_scale(&a, &r), || format!("trial {trial}: definition"))?;
    }
    Ok(format!("1000 matrices ({rectangular} rectangular), per-side marginals: both identities exact"))
}

fn ac8() -> Check {
    let targets = [
        Marginals::ones(3, 3).unwrap(),
        Marginals::new(vec![q(1, 1), q(2, 1)], vec![q(1, 2), q(3, 2), q(1, 1)]).unwrap(),
    ];
    let mut regenerations = 0;
    for marg in &targets {
        let (r, c) = (marg.r().to_vec(), marg.c().to_vec());
        for seed in 0..100 {
            let g = gen_exact_one_step(marg, seed).map_err(|e| e.to_string())?;
            regenerations += g.regenerations;
            let class = classify(&g.matrix, marg).map_err(|e| e.to_string())?;
            ensure(class.verdict == Verdict::L1, || format!("one-step seed {seed}: {class}"))?;
            let a = &g.matrix;
            ensure(!exactly_doubly_stochastic(a, &r, &c), || "one-step output already doubly stochastic".into())?;
            let one = exactly_doubly_stochastic(&naive_row_scale(a, &r), &r, &c)
                || exactly_doubly_stochastic(&naive_column_scale(a, &c), &r, &c);
            ensure(one, || format!("one-step seed {seed}: no single scaling works"))?;

            let g = gen_exact_two_step(marg, seed).map_err(|e| e.to_string())?;
            regenerations += g.regenerations;
            let class = classify(&g.matrix, marg).map_err(|e| e.to_string())?;
            ensure(class.verdict == Verdict::L2, || format!("two-step seed {seed}: {class}"))?;
            let a = &g.matrix;
            let (ra, ca) = (naive_row_scale(a, &r), naive_column_scale(a, &c));
            let none_before = [a, &ra, &ca].iter().all(|x| !exactly_doubly_stochastic(x, &r, &c));
            let two = exactly_doubly_stochastic(&naive_column_scale(&ra, &c), &r, &c)
                || exactly_doubly_stochastic(&naive_row_scale(&ca, &r), &r, &c);
            ensure(none_before && two, || format!("two-step seed {seed}: not exactly two scalings"))?;
        }
    }
    Ok(format!("100 seeds each for 3x3 and 2x3 targets: one-step -> L1, two-step -> L2 ({regenerations} regenerations)"))
}

fn ac9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ones = Marginals::<f64>::ones(10, 10).unwrap();
    let opts = SinkhornOptions { max_steps: 10_000, tol: 1e-12, max_bits: None };
    let mut most = 0;
    for trial in 0..100 {
        let a = Matrix::from_fn(10, 10, |_, _| rng.gen_range(0.01..10.0)).unwrap();
        let result = sinkhorn_iterate(&a, &ones, Side::Column, &opts).map_err(|e| e.to_string())?;
        let limit = result.limit.as_ref().ok_or_else(|| format!("trial {trial}: unconverged"))?;
        let residual = (0..10)
            .flat_map(|i| [(0..10).map(|j| limit.get(i, j)).sum::<f64>(), (0..10).map(|j| limit.get(j, i)).sum::<f64>()])
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max);
        ensure(residual <= 1e-12, || format!("trial {trial}: residual {residual:e}"))?;
        most = most.max(result.iterations_used);
    }
    Ok(format!("100 random positive 10x10: residual <= 1e-12 in every run, at most {most} scalings"))
}

fn ac10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut with_diagonal = 0;
    for trial in 0..1000 {
        let n = rng.gen_range(1..=6);
        let density = rng.gen_range(0.2..0.9);
        let a = Matrix::from_fn(n, n, |_, _| if rng.gen_bool(density) { q(1, 1) } else { q(0, 1) }).unwrap();
        let brute = (0..n).permutations(n).find(|p| p.iter().enumerate().all(|(i, &j)| !a.get(i, j).is_zero()));
        let witness = support_witness(&a).map_err(|e| e.to_string())?;
        ensure(witness.has_nonzero_diagonal == brute.is_some(), || format!("trial {trial}: existence differs for {a}"))?;
        ensure(witness.sigma == brute, || format!("trial {trial}: sigma {:?} vs {brute:?}", witness.sigma))?;
        with_diagonal += usize::from(brute.is_some());
    }
    Ok(format!("1000 patterns, n <= 6: matches permutation enumeration ({with_diagonal} with a nonzero diagonal)"))
}

fn main() -> ExitCode {
    let checks: [Criterion; 10] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("{name} PASS {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{name} FAIL {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
