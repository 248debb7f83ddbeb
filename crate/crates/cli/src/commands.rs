//! Subcommand drivers. Each writes JSON lines to `out`, human-readable text
//! to `err`, and returns the process exit status.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use sbfix_core::conditions::enriched_gap;
use sbfix_core::{
    certify, hausdorff, make_pair_sample, picard_solve, picard_solve_multi, AnyMap, CertificateReport, Error,
    IterationTrace, NormKind, PointSet, Verdict, Witness,
};
use serde::Serialize;

use crate::jsonl::{write_record, Tagged};
use crate::points::{format_significant, parse_points};
use crate::problem::{Overrides, Problem, ProblemFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Witnesses printed by `check` unless all are requested.
pub const DEFAULT_WITNESS_LIMIT: usize = 10;

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub overrides: Overrides,
    pub all_witnesses: bool,
}

#[derive(Serialize)]
struct RunHeader<'a> {
    record: &'static str,
    subcommand: &'static str,
    digest: &'a str,
    norm: NormKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct CheckSummary<'a> {
    record: &'static str,
    condition: &'a str,
    pairs_checked: usize,
    antecedent_hits: usize,
    violations: usize,
    witnesses_shown: usize,
    verdict: Verdict,
}

#[derive(Serialize)]
struct IterateRecord<'a> {
    record: &'static str,
    n: usize,
    x: &'a sbfix_core::Vector,
    step_norm: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    record: &'static str,
    converged: bool,
    iterations: usize,
    estimated_ratio: Option<f64>,
    limit: &'a sbfix_core::Vector,
    final_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay_violations: Option<&'a [usize]>,
}

/// Loads, overrides and validates a problem file; prints diagnostics and
/// returns `None` on failure.
fn prepare(path: &Path, overrides: &Overrides, err: &mut dyn Write) -> Option<(Problem, String)> {
    let mut file = match ProblemFile::load(path) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return None;
        }
    };
    let digest = file.digest();
    file.apply(overrides);
    match file.validate() {
        Ok(p) => Some((p, digest)),
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            None
        }
    }
}

fn random_seed(problem: &Problem) -> Option<u64> {
    match &problem.file.pairs {
        Some(sbfix_core::PairSpec::Random { seed, .. }) => Some(*seed),
        _ => None,
    }
}

/// `check`: certify the problem's condition on its pair sample.
pub fn check(path: &Path, opts: &CheckOptions, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<u8> {
    let started = Instant::now();
    let Some((problem, digest)) = prepare(path, &opts.overrides, err) else {
        return Ok(EXIT_USAGE);
    };
    let Some(cond) = problem.condition else {
        writeln!(err, "error: {}: field `condition`: required by check", path.display())?;
        return Ok(EXIT_USAGE);
    };
    let Some(spec) = &problem.file.pairs else {
        writeln!(err, "error: {}: field `pairs`: required by check", path.display())?;
        return Ok(EXIT_USAGE);
    };
    let kind = problem.norm();
    let sample = match make_pair_sample(spec, &problem.file.map) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {}: field `pairs`: {e}", path.display())?;
            return Ok(EXIT_USAGE);
        }
    };
    let report = match certify(&problem.file.map, &cond, &sample, kind) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };

    write_record(
        out,
        &RunHeader {
            record: "run",
            subcommand: "check",
            digest: &digest,
            norm: kind,
            condition: Some(cond.tag()),
            seed: random_seed(&problem),
        },
    )?;
    let shown = if opts.all_witnesses {
        report.violations.len()
    } else {
        report.violations.len().min(DEFAULT_WITNESS_LIMIT)
    };
    for w in &report.violations[..shown] {
        write_record(
            out,
            &Tagged {
                record: "witness",
                body: w,
            },
        )?;
    }
    write_record(
        out,
        &CheckSummary {
            record: "summary",
            condition: &report.condition,
            pairs_checked: report.pairs_checked,
            antecedent_hits: report.antecedent_hits,
            violations: report.violations.len(),
            witnesses_shown: shown,
            verdict: report.verdict,
        },
    )?;
    describe_check(&report, shown, err)?;
    writeln!(err, "wall time: {:.3} s", started.elapsed().as_secs_f64())?;
    Ok(if report.is_certified() { EXIT_OK } else { EXIT_FAIL })
}

fn describe_check(report: &CertificateReport, shown: usize, err: &mut dyn Write) -> std::io::Result<()> {
    writeln!(err, "condition: {}", report.condition)?;
    writeln!(
        err,
        "pairs checked: {}, antecedent held on {}",
        report.pairs_checked, report.antecedent_hits
    )?;
    match report.verdict {
        Verdict::CertifiedOnSample => writeln!(
            err,
            "verdict: certified on sample (no violation among the sampled pairs)"
        ),
        Verdict::Violated => {
            writeln!(
                err,
                "verdict: violated ({} witnesses, {shown} shown)",
                report.violations.len()
            )?;
            if let Some(w) = report.violations.first() {
                writeln!(
                    err,
                    "first witness: x = {}, y = {}: {} vs bound {}",
                    w.x, w.y, w.consequent_lhs, w.consequent_rhs
                )?;
            }
            Ok(())
        }
    }
}

/// `solve`: averaged Picard iteration from the configured start.
pub fn solve(path: &Path, overrides: &Overrides, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<u8> {
    let started = Instant::now();
    let Some((problem, digest)) = prepare(path, overrides, err) else {
        return Ok(EXIT_USAGE);
    };
    let Some(cfg) = &problem.solve else {
        writeln!(
            err,
            "error: {}: field `solve.x0`: missing starting point (set it or pass --x0)",
            path.display()
        )?;
        return Ok(EXIT_USAGE);
    };
    let kind = problem.norm();
    let b = problem.params.b();
    let result = match &problem.file.map {
        AnyMap::Single(m) => picard_solve(m, b, cfg, kind),
        AnyMap::Multi(m) => picard_solve_multi(m, b, cfg, kind),
    };
    write_record(
        out,
        &RunHeader {
            record: "run",
            subcommand: "solve",
            digest: &digest,
            norm: kind,
            condition: None,
            seed: None,
        },
    )?;
    let trace = match result {
        Ok(t) => t,
        Err(e @ Error::Divergence { .. }) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_FAIL);
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    write_trace(&trace, cfg.decay_check.is_some(), out)?;
    writeln!(
        err,
        "{} after {} iterations; limit {} (residual {:e}); estimated ratio {}",
        if trace.converged {
            "converged"
        } else {
            "did not converge"
        },
        trace.iterations_used,
        trace.last(),
        trace.final_residual(),
        trace
            .estimated_ratio
            .map_or_else(|| "n/a".to_string(), |r| format!("{r:.6}")),
    )?;
    if cfg.decay_check.is_some() && !trace.decay_violations.is_empty() {
        writeln!(err, "decay check flagged {} steps", trace.decay_violations.len())?;
    }
    writeln!(err, "wall time: {:.3} s", started.elapsed().as_secs_f64())?;
    Ok(if trace.converged { EXIT_OK } else { EXIT_FAIL })
}

fn write_trace(trace: &IterationTrace, decay: bool, out: &mut dyn Write) -> std::io::Result<()> {
    for (n, x) in trace.iterates.iter().enumerate() {
        write_record(
            out,
            &IterateRecord {
                record: "iterate",
                n,
                x,
                step_norm: trace.step_norms[n],
                residual: trace.residuals[n],
            },
        )?;
    }
    write_record(
        out,
        &SolveSummary {
            record: "summary",
            converged: trace.converged,
            iterations: trace.iterations_used,
            estimated_ratio: trace.estimated_ratio,
            limit: trace.last(),
            final_residual: trace.final_residual(),
            decay_violations: decay.then_some(trace.decay_violations.as_slice()),
        },
    )
}

/// `hausdorff`: prints H(A, B) with 12 significant digits.
pub fn hausdorff_files(
    a: &Path,
    b: &Path,
    norm: NormKind,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let load = |path: &Path| -> Result<PointSet, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let points = parse_points(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        PointSet::new(points, norm).map_err(|e| format!("{}: {e}", path.display()))
    };
    let sets = load(a).and_then(|sa| load(b).map(|sb| (sa, sb)));
    let (sa, sb) = match sets {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    match hausdorff(&sa, &sb, norm) {
        Ok(h) => {
            writeln!(out, "{}", format_significant(h, 12))?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(EXIT_USAGE)
        }
    }
}

/// `demo`: the two-exceptional-point example, annotated.
pub fn demo(out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<u8> {
    for record in crate::demo::records() {
        write_record(out, &record)?;
        if let Some(text) = record.get("summary").and_then(|s| s.as_str()) {
            writeln!(err, "{text}")?;
        }
    }
    Ok(EXIT_OK)
}

/// First witness in `report` at the given pair, if any.
pub fn find_witness<'a>(report: &'a CertificateReport, x: &[f64], y: &[f64]) -> Option<&'a Witness> {
    report
        .violations
        .iter()
        .find(|w| w.x.coords() == x && w.y.coords() == y)
}

/// `‖b(x−y) + Tx − Ty‖` for a single-valued map.
pub fn map_gap(
    map: &sbfix_core::MapSpec,
    b: f64,
    x: &sbfix_core::Vector,
    y: &sbfix_core::Vector,
    kind: NormKind,
) -> sbfix_core::Result<f64> {
    Ok(enriched_gap(b, x, y, &map.eval(x, kind)?, &map.eval(y, kind)?, kind))
}
