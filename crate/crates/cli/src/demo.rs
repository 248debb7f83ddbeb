//! The built-in worked example: `T` is zero everywhere except at two
//! exceptional points, `T(4,5) = (4,0)` and `T(5,4) = (0,4)`, with `b = 1`,
//! `θ = 1` and hence `λ = r = 1/2`.
//!
//! Records carry a `provenance` label:
//! - `worked-example`: a value printed in the published worked example;
//! - `corrected`: a printed value that the computation does not reproduce;
//! - `derived`: hand arithmetic, recomputed here;
//! - `computed`: found by this tool (solver runs, grid searches).

use serde_json::{json, Value};

use sbfix_core::conditions::PairSample;
use sbfix_core::solver::apriori_bound;
use sbfix_core::{
    certify, dist, f_threshold, fixed_point_residual, make_pair_sample, picard_solve, psi_single, uniqueness_certify,
    AnyMap, ConditionKind, Entry, MapSpec, Matrix, NormKind, PairSpec, SolveConfig, Vector,
};

use crate::commands::{find_witness, map_gap};

pub const B: f64 = 1.0;
pub const THETA: f64 = 1.0;
const KIND: NormKind = NormKind::L2;

/// Distance between the exceptional points as printed in the worked example.
pub const PRINTED_DISTANCE: f64 = 2.0;

fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).expect("finite literal")
}

pub fn example_map() -> MapSpec {
    MapSpec::PiecewiseOverride {
        default: Box::new(MapSpec::Affine {
            a: Matrix::scaled_identity(2, 0.0),
            c: v(&[0.0, 0.0]),
        }),
        overrides: vec![
            Entry::new(v(&[4.0, 5.0]), v(&[4.0, 0.0])),
            Entry::new(v(&[5.0, 4.0]), v(&[0.0, 4.0])),
        ],
    }
}

pub fn example_condition() -> ConditionKind {
    ConditionKind::suzuki_berinde(B, THETA).expect("valid parameters")
}

/// Both orderings of the exceptional pair plus five default-region pairs.
pub fn restricted_pairs() -> PairSpec {
    let p = |a: &[f64], b: &[f64]| [v(a), v(b)];
    PairSpec::Explicit {
        pairs: vec![
            p(&[4.0, 5.0], &[5.0, 4.0]),
            p(&[5.0, 4.0], &[4.0, 5.0]),
            p(&[1.0, 2.0], &[3.0, -1.0]),
            p(&[0.0, 0.0], &[2.0, 2.0]),
            p(&[-3.0, 1.0], &[6.0, 7.0]),
            p(&[0.5, -0.5], &[-2.0, 8.0]),
            p(&[10.0, 10.0], &[-10.0, -10.0]),
        ],
    }
}

/// The integer grid `[-10, 10]²`, which contains both exceptional points.
pub fn grid_pairs() -> PairSpec {
    PairSpec::Grid {
        lower: vec![-10.0, -10.0],
        upper: vec![10.0, 10.0],
        steps: 21,
    }
}

pub fn records() -> Vec<Value> {
    let map = example_map();
    let any = AnyMap::from(map.clone());
    let cond = example_condition();
    let lambda = 1.0 / (B + 1.0);
    let r = THETA * lambda;
    let x = v(&[4.0, 5.0]);
    let y = v(&[5.0, 4.0]);
    let zero = v(&[0.0, 0.0]);
    let mut out = Vec::new();

    let psi = psi_single(r, lambda).expect("r in range");
    out.push(json!({
        "record": "demo", "item": "psi", "provenance": "worked-example",
        "r": r, "lambda": lambda, "f": f_threshold(r).expect("r in range"), "psi": psi,
        "summary": format!("psi(1/2) = lambda * f(1/2) = {psi}"),
    }));

    let tx = map.eval(&x, KIND).expect("exceptional point is in the domain");
    let residual = fixed_point_residual(&any, &x, KIND).expect("in domain");
    out.push(json!({
        "record": "demo", "item": "residual", "provenance": "worked-example",
        "x": x, "image": tx, "residual": residual,
        "summary": format!("||(4,5) - T(4,5)|| = ||(4,5) - (4,0)|| = {residual}"),
    }));

    let antecedent_lhs = psi * residual;
    out.push(json!({
        "record": "demo", "item": "antecedent", "provenance": "worked-example",
        "psi_antecedent_lhs": antecedent_lhs,
        "summary": format!("psi * 5 = {antecedent_lhs}"),
    }));

    let d = dist(&x, &y, KIND).expect("same dimension");
    out.push(json!({
        "record": "demo", "item": "exceptional_distance", "provenance": "corrected",
        "x": x, "y": y, "norm": KIND, "distance": d, "printed_distance": PRINTED_DISTANCE,
        "summary": format!(
            "||(4,5) - (5,4)||_2 = sqrt(2) = {d:.12}; the worked example prints {PRINTED_DISTANCE}"
        ),
    }));

    let special = PairSample::from_pairs(vec![(x.clone(), y.clone()), (y.clone(), x.clone())]).expect("valid pairs");
    let special_report = certify(&any, &cond, &special, KIND).expect("in domain");
    out.push(json!({
        "record": "demo", "item": "vacuity", "provenance": "derived",
        "pairs_checked": special_report.pairs_checked,
        "antecedent_hits": special_report.antecedent_hits,
        "antecedent_lhs": antecedent_lhs, "distance": d,
        "holds_with_printed_distance": antecedent_lhs <= PRINTED_DISTANCE,
        "verdict": special_report.verdict,
        "summary": format!(
            "2.5 > {d:.6} (and 2.5 > {PRINTED_DISTANCE}): the antecedent fails for both orderings, \
             so the implication holds vacuously at the exceptional pair"
        ),
    }));

    for (a, b) in [
        ([1.0, 2.0], [3.0, -1.0]),
        ([0.0, 0.0], [2.0, 2.0]),
        ([-3.0, 1.0], [6.0, 7.0]),
    ] {
        let (a, b) = (v(&a), v(&b));
        let gap = map_gap(&map, B, &a, &b, KIND).expect("default region");
        let d = dist(&a, &b, KIND).expect("same dimension");
        out.push(json!({
            "record": "demo", "item": "default_region_equality", "provenance": "derived",
            "x": a, "y": b, "enriched_gap": gap, "distance": d, "equal": gap == d,
            "summary": format!("default region: ||b(x-y) + Tx - Ty|| = {gap} = ||x-y|| for x = {a}, y = {b}"),
        }));
    }

    let restricted = make_pair_sample(&restricted_pairs(), &any).expect("valid sample");
    let restricted_report = certify(&any, &cond, &restricted, KIND).expect("in domain");
    out.push(json!({
        "record": "demo", "item": "restricted_certificate", "provenance": "computed",
        "pairs_checked": restricted_report.pairs_checked,
        "antecedent_hits": restricted_report.antecedent_hits,
        "verdict": restricted_report.verdict,
        "summary": format!(
            "restricted sample (exceptional pair both ways + 5 default pairs): {}",
            restricted_report.verdict
        ),
    }));

    let cfg = SolveConfig::new(x.clone()).tol(1e-8);
    let trace = picard_solve(&map, B, &cfg, KIND).expect("solver stays in the domain");
    let apriori = apriori_bound(&trace, r).expect("valid ratio");
    out.push(json!({
        "record": "demo", "item": "solver", "provenance": "computed",
        "x0": x, "b": B, "tol": cfg.tol,
        "converged": trace.converged, "iterations": trace.iterations_used,
        "limit": trace.last(), "estimated_ratio": trace.estimated_ratio,
        "first_steps": &trace.step_norms[..trace.step_norms.len().min(4)],
        "apriori_violations": apriori.len(),
        "summary": format!(
            "averaged iteration from (4,5): {} in {} iterations, limit {}, ratio {}; \
             the a-priori bound r^n * step_0 fails at {} steps because the first step leaves the exceptional point",
            if trace.converged { "converged" } else { "not converged" },
            trace.iterations_used,
            trace.last(),
            trace.estimated_ratio.map_or_else(|| "n/a".into(), |q| format!("{q:.6}")),
            apriori.len(),
        ),
    }));

    let zero_residual = fixed_point_residual(&any, &zero, KIND).expect("in domain");
    out.push(json!({
        "record": "demo", "item": "fixed_point", "provenance": "derived",
        "x": zero, "residual": zero_residual,
        "summary": format!("fixed point (0,0), residual {zero_residual}"),
    }));

    let grid = make_pair_sample(&grid_pairs(), &any).expect("valid grid");
    let grid_report = certify(&any, &cond, &grid, KIND).expect("in domain");
    let w = find_witness(&grid_report, &[4.0, 5.0], &[-10.0, 5.0]);
    out.push(json!({
        "record": "demo", "item": "global_witness", "provenance": "computed",
        "grid": "[-10,10]^2, 21 points per axis",
        "pairs_checked": grid_report.pairs_checked,
        "violations": grid_report.violations.len(),
        "witness": w.map(|w| json!({
            "pair": [&w.x, &w.y],
            "antecedent_lhs": w.antecedent_lhs, "antecedent_rhs": w.antecedent_rhs,
            "consequent_lhs": w.consequent_lhs, "consequent_rhs": w.consequent_rhs,
        })),
        "caveat": "the worked example only examines the exceptional pair; on a grid the enriched condition \
                   fails, so the example does not satisfy the hypothesis on the whole plane",
        "summary": match w {
            Some(w) => format!(
                "grid search: {} violations, e.g. x = {}, y = {}: {} > {}",
                grid_report.violations.len(), w.x, w.y, w.consequent_lhs, w.consequent_rhs
            ),
            None => format!("grid search: {} violations", grid_report.violations.len()),
        },
    }));

    let unique = uniqueness_certify(&map, lambda, &zero, r, std::slice::from_ref(&x), KIND).expect("zero is fixed");
    let uw = unique.violations.first();
    out.push(json!({
        "record": "demo", "item": "uniqueness_witness", "provenance": "derived",
        "z": zero, "r": r, "verdict": unique.verdict,
        "x": uw.map(|w| &w.x),
        "consequent_lhs": uw.map(|w| w.consequent_lhs),
        "consequent_rhs": uw.map(|w| w.consequent_rhs),
        "summary": match uw {
            Some(w) => format!(
                "||T_lambda(4,5) - z|| = {:.3} > r * ||(4,5) - z|| = {:.3}",
                w.consequent_lhs, w.consequent_rhs
            ),
            None => "uniqueness check passed at (4,5)".into(),
        },
    }));
    out
}
