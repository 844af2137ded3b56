use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use sinkhorn_core::io::{write_document, Format, MatrixDocument};
use sinkhorn_core::lab::{
    classify, falsify_search, gen_exact_one_step, gen_exact_two_step, lemma_harness, lemma_sums, FalsifierReport,
    FalsifyConfig, LemmaConfig, LemmaReport, Verdict,
};
use sinkhorn_core::lab::sampling::EntryLaw;
use sinkhorn_core::structure::{extract_certificate, matching_size, support_witness};
use sinkhorn_core::{sinkhorn_iterate, ExactRational, Marginals, Matrix, Scalar, ScalingTrace, Side, SinkhornOptions};

use crate::args::{Backend, ClassifyArgs, FalsifyArgs, GenArgs, GenKind, LemmaArgs, ScaleArgs, SupportArgs};
use crate::input::{load, load_document, parse_list, parse_range, parse_tolerance};

type Q = ExactRational;

/// Result of a command: exit status plus both renderings.
pub struct Outcome {
    /// False for an honest negative result such as a non-converging run.
    pub positive: bool,
    pub text: String,
    pub json: Value,
}

fn render_vec<T: Scalar>(v: &[T]) -> Vec<String> {
    v.iter().map(Scalar::render).collect()
}

fn trace_text<T: Scalar>(out: &mut String, trace: &ScalingTrace<T>, with_matrices: bool) {
    for (k, step) in trace.steps.iter().enumerate() {
        let note = if step.was_fixed_point { " (fixed point)" } else { "" };
        let _ = writeln!(out, "step {}: {} scaling by [{}]{note}", k + 1, step.side.name(), render_vec(step.applied.factors()).join(", "));
        if with_matrices {
            let _ = writeln!(out, "  {}", step.result);
        }
    }
}

pub fn scale(args: &ScaleArgs) -> Result<Outcome> {
    match args.backend {
        Backend::Exact => scale_with::<Q>(args),
        Backend::Approx => scale_with::<f64>(args),
    }
}

fn scale_with<T: Scalar>(args: &ScaleArgs) -> Result<Outcome> {
    let (a, marg) = load::<T>(&args.input)?;
    let opts = SinkhornOptions {
        max_steps: args.max_steps,
        tol: parse_tolerance::<T>(args.tol.as_deref())?,
        max_bits: (args.max_bits > 0).then_some(args.max_bits),
    };
    let first: Side = args.first.into();
    let result = sinkhorn_iterate(&a, &marg, first, &opts)?;
    let last = result.trace.current();

    let mut text = String::new();
    match &result.limit {
        Some(limit) => {
            let _ = writeln!(text, "limit: {limit}");
        }
        None => {
            let _ = writeln!(text, "Unconverged after {} scalings", result.iterations_used);
            let _ = writeln!(text, "last: {last}");
        }
    }
    let _ = writeln!(text, "steps: {}", result.effective_steps);
    let _ = writeln!(text, "scalings: {}", result.iterations_used);
    let _ = writeln!(text, "residual: {}", result.final_residual.render());

    let mut report = json!({
        "command": "scale",
        "backend": T::BACKEND,
        "first_side": first.name(),
        "converged": result.converged(),
        "steps": result.effective_steps,
        "scalings": result.iterations_used,
        "residual": result.final_residual.render(),
        "limit": result.limit.as_ref().map(Matrix::render_rows),
        "last": last.render_rows(),
        "r": render_vec(marg.r()),
        "c": render_vec(marg.c()),
    });
    if args.trace {
        trace_text(&mut text, &result.trace, args.trace_matrices);
        report["trace"] = result.trace.to_json(args.trace_matrices);
    }
    if args.certificate {
        match extract_certificate(&result.trace) {
            Ok(cert) => {
                let _ = writeln!(text, "certificate: row step {}", cert.row_step + 1);
                let _ = writeln!(text, "  d1 = [{}]", render_vec(cert.d1.factors()).join(", "));
                let _ = writeln!(text, "  d2 = [{}]", render_vec(cert.d2.factors()).join(", "));
                let _ = writeln!(text, "  z = [{}]", render_vec(&cert.z).join(", "));
                let _ = writeln!(text, "  s1 = {}, s2 = {}", cert.s1.render(), cert.s2.render());
                let _ = writeln!(text, "  A1 = D1 A3 D2: {}", cert.reconstruction_ok);
                let mut value = cert.to_json();
                value["row_step"] = json!(cert.row_step + 1);
                report["certificate"] = value;
            }
            Err(err) => {
                let _ = writeln!(text, "certificate: unavailable ({err})");
                report["certificate"] = json!({ "unavailable": err.to_string() });
            }
        }
    }
    Ok(Outcome { positive: result.converged(), text, json: report })
}

fn count(k: Option<usize>) -> String {
    k.map_or_else(|| "none".into(), |k| k.to_string())
}

pub fn classify_cmd(args: &ClassifyArgs) -> Result<Outcome> {
    match args.backend {
        Backend::Exact => classify_with::<Q>(args),
        Backend::Approx => classify_with::<f64>(args),
    }
}

fn classify_with<T: Scalar>(args: &ClassifyArgs) -> Result<Outcome> {
    let (a, marg) = load::<T>(&args.input)?;
    let class = classify(&a, &marg)?;

    let mut text = format!("{class}\n");
    let _ = writeln!(text, "row first: {}", count(class.row_first));
    let _ = writeln!(text, "column first: {}", count(class.column_first));
    if class.convention_sensitive {
        let _ = writeln!(text, "a leading scaling is a fixed point and is not counted");
    }
    let mut report = json!({
        "command": "classify",
        "summary": class.to_string(),
        "verdict": class.verdict,
        "witness_order": class.witness_order,
        "row_first": class.row_first,
        "column_first": class.column_first,
        "convention_sensitive": class.convention_sensitive,
    });
    if args.trace {
        if let Some(trace) = &class.witness_trace {
            let _ = writeln!(text, "witness, {} first:", trace.first_side.name());
            trace_text(&mut text, trace, true);
            report["trace"] = json!({ "first_side": trace.first_side.name(), "steps": trace.to_json(true) });
        }
    }
    Ok(Outcome { positive: class.verdict != Verdict::NotFinite, text, json: report })
}

pub fn support(args: &SupportArgs) -> Result<Outcome> {
    match args.backend {
        Backend::Exact => support_with::<Q>(args),
        Backend::Approx => support_with::<f64>(args),
    }
}

fn support_with<T: Scalar>(args: &SupportArgs) -> Result<Outcome> {
    let a = load_document::<T>(&args.input)?.matrix;
    let witness = support_witness(&a)?;
    let sigma: Option<Vec<usize>> = witness.sigma.as_ref().map(|s| s.iter().map(|j| j + 1).collect());
    let text = match &sigma {
        Some(s) => format!("sigma: {}\n", s.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")),
        None => format!("no nonzero diagonal (maximum matching has size {})\n", matching_size(&a)),
    };
    let report = json!({
        "command": "support",
        "has_nonzero_diagonal": witness.has_nonzero_diagonal,
        "sigma": sigma,
        "matching_size": matching_size(&a),
    });
    Ok(Outcome { positive: witness.has_nonzero_diagonal, text, json: report })
}

fn exact_only(backend: Backend, what: &str) -> Result<()> {
    if backend == Backend::Approx {
        bail!("{what} requires the exact backend");
    }
    Ok(())
}

fn histogram_line(map: &std::collections::BTreeMap<String, u64>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

pub fn falsify(args: &FalsifyArgs) -> Result<Outcome> {
    exact_only(args.backend, "falsify")?;
    let (n_min, n_max) = parse_range(&args.n)?;
    let cfg = FalsifyConfig {
        n_min,
        n_max,
        trials: args.trials,
        seed: args.seed,
        depth: args.depth,
        entries: EntryLaw { density: args.density, numerator_max: args.numerator_max, denominator_max: args.denominator_max },
        random_marginals: args.random_marginals,
        require_support: args.require_support,
        jobs: args.jobs,
        timing: args.timing,
    };
    let report: FalsifierReport = falsify_search(&cfg)?;

    let mut text = String::new();
    let _ = writeln!(text, "trials: {}", report.trials);
    let _ = writeln!(text, "seed: {}", report.rng_seed);
    let _ = writeln!(text, "depth: {}", report.deepest_checked);
    let _ = writeln!(text, "l3_hits: {}", report.l3_hits);
    let _ = writeln!(text, "oracle_disagreements: {}", report.oracle_disagreements);
    let _ = writeln!(text, "classes: {}", histogram_line(&report.class_histogram));
    let _ = writeln!(text, "row first steps: {}", histogram_line(&report.row_first_steps));
    let _ = writeln!(text, "column first steps: {}", histogram_line(&report.column_first_steps));
    let _ = writeln!(text, "without support: {}", report.without_support);
    for s in &report.counterexamples {
        let _ = writeln!(text, "counterexample trial {}: {:?} r={:?} c={:?}", s.trial, s.entries, s.r, s.c);
    }
    if let Some(t) = report.elapsed_seconds {
        let _ = writeln!(text, "elapsed: {t:.3}s");
    }
    let mut value = serde_json::to_value(&report)?;
    value["command"] = json!("falsify");
    Ok(Outcome { positive: report.passed(), text, json: value })
}

pub fn lemma_check(args: &LemmaArgs) -> Result<Outcome> {
    exact_only(args.backend, "lemma-check")?;
    if let (Some(c), Some(z)) = (&args.c, &args.z) {
        return lemma_spot(&parse_list(c).context("parsing --c")?, &parse_list(z).context("parsing --z")?);
    }
    let (n_min, n_max) = parse_range(&args.n)?;
    let cfg = LemmaConfig {
        n_min,
        n_max,
        trials: args.trials,
        seed: args.seed,
        z_max: args.z_max,
        numerator_max: args.numerator_max,
        denominator_max: args.denominator_max,
    };
    let report: LemmaReport = lemma_harness(&cfg)?;

    let mut text = String::new();
    let _ = writeln!(text, "samples: {}", report.trials);
    let _ = writeln!(text, "rejected draws: {}", report.rejected);
    let _ = writeln!(text, "violations: {}", report.violations);
    if let (Some(lo), Some(hi)) = (&report.min_s2, &report.max_s2) {
        let _ = writeln!(text, "s2 range: [{lo}, {hi}]");
    }
    for cx in &report.counterexamples {
        let _ = writeln!(text, "counterexample {}: c={:?} z={:?} s2={}", cx.sample, cx.c, cx.z, cx.s2);
    }
    let mut value = serde_json::to_value(&report)?;
    value["command"] = json!("lemma-check");
    value["mode"] = json!("sample");
    Ok(Outcome { positive: report.passed(), text, json: value })
}

fn lemma_spot(c: &[Q], z: &[Q]) -> Result<Outcome> {
    let sums = lemma_sums(c, z)?;
    let hypothesis = sums.s1 == Q::from_integer(0.into()) && z.iter().any(|x| *x != Q::from_integer(0.into()));
    let holds = !hypothesis || sums.s2 < Q::from_integer(0.into());
    let mut text = format!("s1: {}\ns2: {}\n", sums.s1.render(), sums.s2.render());
    if !hypothesis {
        text.push_str("hypothesis not met (needs s1 = 0 and z != 0)\n");
    }
    let value = json!({
        "command": "lemma-check",
        "mode": "spot",
        "c": render_vec(c),
        "z": render_vec(z),
        "s1": sums.s1.render(),
        "s2": sums.s2.render(),
        "hypothesis_met": hypothesis,
        "holds": holds,
    });
    Ok(Outcome { positive: holds, text, json: value })
}

pub fn gen(args: &GenArgs) -> Result<Outcome> {
    let marg: Marginals<Q> = match (&args.r, &args.c) {
        (Some(r), Some(c)) => Marginals::new(parse_list(r).context("parsing --r")?, parse_list(c).context("parsing --c")?)?,
        (None, None) => Marginals::ones(args.size, args.size)?,
        _ => bail!("--r and --c must be given together"),
    };
    let generated = match args.kind {
        GenKind::OneStep => gen_exact_one_step(&marg, args.seed)?,
        GenKind::TwoStep => gen_exact_two_step(&marg, args.seed)?,
    };

    let mut text = format!("{}\n", generated.matrix);
    let _ = writeln!(text, "verdict: {}", generated.verdict.label());
    let _ = writeln!(text, "regenerations: {}", generated.regenerations);
    if let Some(path) = &args.write {
        let doc = MatrixDocument { matrix: generated.matrix.clone(), r: Some(marg.r().to_vec()), c: Some(marg.c().to_vec()) };
        write_document(path, Format::from_path(path), &doc).with_context(|| format!("writing {}", path.display()))?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    let value = json!({
        "command": "gen",
        "kind": args.kind.name(),
        "seed": args.seed,
        "verdict": generated.verdict,
        "regenerations": generated.regenerations,
        "matrix": generated.matrix.render_rows(),
        "r": render_vec(marg.r()),
        "c": render_vec(marg.c()),
    });
    Ok(Outcome { positive: true, text, json: value })
}
