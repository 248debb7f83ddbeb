//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbfix_cli::demo;
use sbfix_core::conditions::{certify_multi, certify_single, enriched_gap, PairSample};
use sbfix_core::maps::{AffineRule, Entry};
use sbfix_core::solver::apriori_bound;
use sbfix_core::{
    averaged_apply, certify, dist, f_threshold, hausdorff, make_pair_sample, norm, picard_solve, picard_solve_multi,
    uniqueness_certify, AnyMap, ConditionKind, MapSpec, Matrix, MultiMapSpec, NormKind, PairSpec, PointSet,
    SolveConfig, Vector,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const NORMS: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn vector(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> Vector {
    Vector::new((0..dim).map(|_| rng.gen_range(-half_width..half_width)).collect()).unwrap()
}

fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

fn threshold_regression() -> Outcome {
    ensure(f_threshold(0.0).unwrap() == 1.0, || "f(0) != 1".into())?;

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    ensure((golden * golden - (1.0 - golden)).abs() <= 1e-12, || {
        "r^2 != 1 - r at the golden branch".into()
    })?;
    let left = f_threshold(golden).unwrap();
    let right = f_threshold(f64::from_bits(golden.to_bits() + 1)).unwrap();
    ensure((left - right).abs() <= 1e-12, || {
        format!("jump at golden branch: {left} vs {right}")
    })?;

    let half = std::f64::consts::FRAC_1_SQRT_2;
    ensure((2.0 - 2f64.sqrt() - 1.0 / (1.0 + half)).abs() <= 1e-12, || {
        "2 - sqrt2 != 1/(1 + 1/sqrt2)".into()
    })?;
    let left = f_threshold(f64::from_bits(half.to_bits() - 1)).unwrap();
    let right = f_threshold(half).unwrap();
    ensure((left - right).abs() <= 1e-12, || {
        format!("jump at 1/sqrt2: {left} vs {right}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut rs: Vec<f64> = (0..10_000).map(|_| rng.gen_range(0.0..1.0)).collect();
    rs.sort_by(f64::total_cmp);
    let values: Vec<f64> = rs.iter().map(|&r| f_threshold(r).unwrap()).collect();
    let bad = values.windows(2).filter(|w| w[1] > w[0]).count();
    ensure(bad == 0, || format!("{bad} increases among 10^4 samples"))?;
    Ok("f(0)=1, both branch joins within 1e-12, nonincreasing on 10^4 samples".into())
}

fn lambda_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let rows = (0..3)
            .map(|_| (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let t = MapSpec::affine(Matrix::from_rows(rows).unwrap(), vector(&mut rng, 3, 10.0)).unwrap();
        let (x, y) = (vector(&mut rng, 3, 100.0), vector(&mut rng, 3, 100.0));
        let b = rng.gen_range(0.0..=10.0);
        let kind = NORMS[i % 3];
        let lambda = 1.0 / (b + 1.0);
        let lhs = enriched_gap(b, &x, &y, &t.eval(&x, kind).unwrap(), &t.eval(&y, kind).unwrap(), kind);
        let ax = averaged_apply(&t, lambda, &x, kind).unwrap();
        let ay = averaged_apply(&t, lambda, &y, kind).unwrap();
        let rhs = (b + 1.0) * norm(&(&ax - &ay), kind);
        let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || format!("sample {i}: {lhs} vs {rhs} (relative {rel:e})"))?;
    }
    Ok(format!("10^3 samples, worst relative gap {worst:.2e}"))
}

fn example_regression() -> Outcome {
    let map = demo::example_map();
    let any = AnyMap::from(map.clone());
    let kind = NormKind::L2;
    let cond = demo::example_condition();
    let ConditionKind::SuzukiBerinde(p) = cond else {
        unreachable!()
    };
    let x = v(&[4.0, 5.0]);
    let psi = sbfix_core::psi_single(p.r(), p.lambda()).unwrap();
    let residual = sbfix_core::fixed_point_residual(&any, &x, kind).unwrap();
    ensure(psi * residual == 2.5, || format!("psi * residual = {}", psi * residual))?;
    let d = dist(&x, &v(&[5.0, 4.0]), kind).unwrap();
    ensure((d - 2f64.sqrt()).abs() <= 1e-12, || format!("distance {d}"))?;

    let restricted = make_pair_sample(&demo::restricted_pairs(), &any).unwrap();
    let report = certify(&any, &cond, &restricted, kind).unwrap();
    ensure(report.is_certified(), || {
        format!("restricted sample verdict {}", report.verdict)
    })?;

    let grid = make_pair_sample(&demo::grid_pairs(), &any).unwrap();
    let report = certify(&any, &cond, &grid, kind).unwrap();
    let w = report
        .violations
        .iter()
        .find(|w| w.x == x && w.y == v(&[-10.0, 5.0]))
        .ok_or("grid run lacks the ((4,5), (-10,5)) witness")?;
    ensure(w.consequent_lhs == 18.0 && w.consequent_rhs == 14.0, || {
        format!("witness consequent {} vs {}", w.consequent_lhs, w.consequent_rhs)
    })?;

    let records = demo::records();
    let antecedent = records
        .iter()
        .find(|r| r["item"] == "antecedent")
        .ok_or("demo lacks antecedent")?;
    ensure(antecedent["psi_antecedent_lhs"] == 2.5, || {
        "demo antecedent differs".into()
    })?;
    Ok(format!(
        "psi*5 = 2.5, distance = sqrt2, restricted sample certified, grid: {} violations incl. 18 vs 14",
        report.violations.len()
    ))
}

fn example_solver() -> Outcome {
    let map = demo::example_map();
    let cfg = SolveConfig::new(v(&[4.0, 5.0])).tol(1e-8);
    let trace = picard_solve(&map, demo::B, &cfg, NormKind::L2).map_err(|e| e.to_string())?;
    ensure(trace.converged && trace.iterations_used <= 60, || {
        format!("converged={} after {}", trace.converged, trace.iterations_used)
    })?;
    let limit = norm(trace.last(), NormKind::L2);
    ensure(limit <= 1e-7, || format!("limit {} is not (0,0)", trace.last()))?;
    let ratio = trace.estimated_ratio.ok_or("no ratio estimate")?;
    ensure((ratio - 0.5).abs() <= 1e-6, || format!("estimated ratio {ratio}"))?;
    let bad = apriori_bound(&trace, 0.5).map_err(|e| e.to_string())?;
    ensure(bad.is_empty(), || {
        let first = bad[0];
        format!(
            "converged in {} iterations with ratio {ratio}, but the a-priori bound r^n*step_0 fails at {} steps; \
             first at n={}: step {:.6} > bound {:.6} (the step off (4,5) is not halved)",
            trace.iterations_used,
            bad.len(),
            first.n,
            first.actual,
            first.bound
        )
    })?;
    Ok(format!("{} iterations, ratio {ratio}", trace.iterations_used))
}

/// A 3x3 matrix with the given operator-norm bound under `kind`.
fn contraction(rng: &mut ChaCha8Rng, kind: NormKind) -> (Matrix, f64) {
    let rows: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let raw = Matrix::from_rows(rows.clone()).unwrap().operator_norm_bound(kind);
    let target = rng.gen_range(0.2..0.9);
    let scaled = rows
        .into_iter()
        .map(|r| r.into_iter().map(|a| a * target / raw).collect())
        .collect();
    let m = Matrix::from_rows(scaled).unwrap();
    let q = m.operator_norm_bound(kind);
    (m, q)
}

fn oracle_fixed_point(a: &Matrix, c: &Vector) -> Vector {
    let m = Matrix3::from_fn(|i, j| if i == j { 1.0 } else { 0.0 } - a.get(i, j));
    let rhs = Vector3::from_column_slice(c.coords());
    let z = m.lu().solve(&rhs).expect("I - A is invertible when ||A|| < 1");
    v(z.as_slice())
}

fn affine_instance(seed: u64, kind: NormKind) -> (MapSpec, Matrix, Vector, f64, Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, q) = contraction(&mut rng, kind);
    let c = vector(&mut rng, 3, 10.0);
    let z = oracle_fixed_point(&a, &c);
    (MapSpec::affine(a.clone(), c.clone()).unwrap(), a, c, q, z)
}

fn banach_picard() -> Outcome {
    let mut worst_oracle = 0.0f64;
    let mut worst_spread = 0.0f64;
    for seed in 0..30u64 {
        let kind = NORMS[seed as usize % 3];
        let (t, _, _, q, z) = affine_instance(100 + seed, kind);
        ensure(q < 1.0, || format!("instance {seed}: norm bound {q}"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let mut limits = Vec::new();
        for start in 0..10 {
            let cfg = SolveConfig::new(vector(&mut rng, 3, 100.0)).tol(1e-13).max_iter(10_000);
            let trace = picard_solve(&t, 0.0, &cfg, kind).map_err(|e| e.to_string())?;
            ensure(trace.converged, || {
                format!("instance {seed} start {start} did not converge")
            })?;
            let err = dist(trace.last(), &z, NormKind::LInf).unwrap();
            worst_oracle = worst_oracle.max(err);
            ensure(err <= 1e-8, || {
                format!("instance {seed} start {start}: {err:e} from the LU solution")
            })?;
            limits.push(trace.last().clone());
        }
        for p in &limits {
            for r in &limits {
                let gap = dist(p, r, NormKind::LInf).unwrap();
                worst_spread = worst_spread.max(gap);
                ensure(gap <= 1e-7, || format!("instance {seed}: starts disagree by {gap:e}"))?;
            }
        }
    }
    Ok(format!(
        "30 instances x 10 starts; worst oracle gap {worst_oracle:.1e}, worst spread {worst_spread:.1e}"
    ))
}

fn random_table(rng: &mut ChaCha8Rng) -> MapSpec {
    let dim = rng.gen_range(1..=3);
    let size = rng.gen_range(2..=12);
    let entries = (0..size)
        .map(|_| Entry::new(vector(rng, dim, 5.0), vector(rng, dim, 5.0)))
        .collect();
    MapSpec::Tabulated { entries }
}

fn reduction_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut certified, mut violated) = (0, 0);
    for i in 0..50 {
        let t = random_table(&mut rng);
        let b = rng.gen_range(0.0..5.0);
        let theta = rng.gen_range(0.0..(b + 1.0));
        let kind = NORMS[i % 3];
        let lambda = 1.0 / (b + 1.0);
        let sample = PairSample::all_pairs(t.finite_domain().unwrap(), PairSpec::Exhaustive).unwrap();
        let direct = certify_single(&t, &ConditionKind::suzuki_berinde(b, theta).unwrap(), &sample, kind)
            .map_err(|e| e.to_string())?;
        let averaged = t.to_averaged(lambda).unwrap();
        let reduced = certify_single(
            &averaged,
            &ConditionKind::suzuki(theta * lambda).unwrap(),
            &sample,
            kind,
        )
        .map_err(|e| e.to_string())?;
        let pairs = |r: &sbfix_core::CertificateReport| -> Vec<(usize, Vector, Vector)> {
            r.violations
                .iter()
                .map(|w| (w.index, w.x.clone(), w.y.clone()))
                .collect()
        };
        ensure(
            direct.verdict == reduced.verdict && pairs(&direct) == pairs(&reduced),
            || {
                format!(
                    "map {i}: direct {} ({} witnesses) vs averaged {} ({} witnesses)",
                    direct.verdict,
                    direct.violations.len(),
                    reduced.verdict,
                    reduced.violations.len()
                )
            },
        )?;
        if direct.is_certified() {
            certified += 1;
        } else {
            violated += 1;
        }
    }
    Ok(format!(
        "50 maps agree pair-by-pair ({certified} certified, {violated} violated)"
    ))
}

fn naive_hausdorff(a: &PointSet, b: &PointSet, kind: NormKind) -> f64 {
    let one_way = |p: &PointSet, q: &PointSet| {
        let mut worst = 0.0f64;
        for x in p.points() {
            let mut best = f64::INFINITY;
            for y in q.points() {
                best = best.min(dist(x, y, kind).unwrap());
            }
            worst = worst.max(best);
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

fn random_set(rng: &mut ChaCha8Rng, dim: usize, kind: NormKind) -> PointSet {
    let size = rng.gen_range(1..=50);
    PointSet::new((0..size).map(|_| vector(rng, dim, 10.0)).collect(), kind).unwrap()
}

fn hausdorff_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let dim = rng.gen_range(1..=4);
        let kind = NORMS[i % 3];
        let (a, b) = (random_set(&mut rng, dim, kind), random_set(&mut rng, dim, kind));
        let h = hausdorff(&a, &b, kind).unwrap();
        let oracle = naive_hausdorff(&a, &b, kind);
        ensure(h == oracle, || format!("pair {i}: {h} vs oracle {oracle}"))?;
        ensure(h == hausdorff(&b, &a, kind).unwrap(), || {
            format!("pair {i}: asymmetric")
        })?;
    }
    for i in 0..200 {
        let dim = rng.gen_range(1..=4);
        let kind = NORMS[i % 3];
        let (a, b, c) = (
            random_set(&mut rng, dim, kind),
            random_set(&mut rng, dim, kind),
            random_set(&mut rng, dim, kind),
        );
        let ac = hausdorff(&a, &c, kind).unwrap();
        let via = hausdorff(&a, &b, kind).unwrap() + hausdorff(&b, &c, kind).unwrap();
        ensure(ac <= via + 1e-9, || format!("triple {i}: {ac} > {via}"))?;
        ensure(hausdorff(&a, &a, kind).unwrap() == 0.0, || {
            format!("triple {i}: H(A,A) != 0")
        })?;
    }
    Ok("200 pairs exact against the double loop; symmetry and triangle on 200 triples".into())
}

fn multivalued_pipeline() -> Outcome {
    let quarter = MultiMapSpec::AffineFamily {
        rules: vec![AffineRule {
            a: Matrix::scaled_identity(1, 0.25),
            c: v(&[0.0]),
        }],
    };
    let any = AnyMap::from(quarter.clone());
    let cond = ConditionKind::multi_suzuki_berinde(0.0, 0.25).unwrap();
    let spec = PairSpec::Random {
        lower: vec![-100.0],
        upper: vec![100.0],
        count: 500,
        seed: 8,
    };
    let sample = make_pair_sample(&spec, &any).unwrap();
    let report = certify_multi(&quarter, &cond, &sample, NormKind::L2).map_err(|e| e.to_string())?;
    ensure(report.is_certified(), || {
        format!("{} violations", report.violations.len())
    })?;
    for (x, y) in sample.iter() {
        let tx = quarter.eval(x, NormKind::L2).unwrap();
        let ty = quarter.eval(y, NormKind::L2).unwrap();
        let h = hausdorff(&tx, &ty, NormKind::L2).unwrap();
        let expected = (x[0] - y[0]).abs() / 4.0;
        ensure(h == expected, || format!("H(T{x}, T{y}) = {h}, expected {expected}"))?;
    }

    let trace = picard_solve_multi(&quarter, 0.0, &SolveConfig::new(v(&[8.0])).tol(1e-12), NormKind::L2)
        .map_err(|e| e.to_string())?;
    ensure(trace.converged && trace.last()[0].abs() <= 1e-10, || {
        format!("limit {}", trace.last())
    })?;
    let ratio = trace.estimated_ratio.ok_or("no ratio estimate")?;
    ensure((ratio - 0.25).abs() <= 1e-6, || format!("ratio {ratio}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut rejected = 0;
    for _ in 0..200 {
        let b = rng.gen_range(0.0..4.0);
        let theta = rng.gen_range(0.0..(b + 1.0));
        let limit = 1.0 / (theta / (b + 1.0) + 1.0);
        let gamma = rng.gen_range(0.0..1.0);
        let built = ConditionKind::multi_gamma(b, theta, gamma);
        if gamma > limit {
            ensure(built.is_err(), || {
                format!("accepted gamma {gamma} > {limit} (b={b}, theta={theta})")
            })?;
            rejected += 1;
        } else if gamma > 0.0 {
            ensure(built.is_ok(), || {
                format!("rejected admissible gamma {gamma} <= {limit}")
            })?;
        }
    }
    Ok(format!(
        "certified on 500 pairs, solver ratio {ratio}, {rejected} inadmissible gammas rejected"
    ))
}

fn uniqueness() -> Outcome {
    let kind = NormKind::L2;
    // Instance 1 of the Banach/Picard criterion, which uses the L2 norm.
    let (t, _, _, q, z) = affine_instance(101, kind);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let samples: Vec<Vector> = (0..100).map(|_| vector(&mut rng, 3, 50.0)).collect();
    let report = uniqueness_certify(&t, 1.0, &z, q, &samples, kind).map_err(|e| e.to_string())?;
    ensure(report.is_certified(), || {
        format!("{} violations on the affine instance", report.violations.len())
    })?;

    let map = demo::example_map();
    let report =
        uniqueness_certify(&map, 0.5, &v(&[0.0, 0.0]), 0.5, &[v(&[4.0, 5.0])], kind).map_err(|e| e.to_string())?;
    let w = report.violations.first().ok_or("no witness for the example")?;
    ensure(
        (w.consequent_lhs - 4.717).abs() < 1e-3 && (w.consequent_rhs - 3.202).abs() < 1e-3,
        || format!("witness {} vs {}", w.consequent_lhs, w.consequent_rhs),
    )?;
    Ok(format!(
        "affine instance passes 100 samples; example witness {:.3} vs {:.3}",
        w.consequent_lhs, w.consequent_rhs
    ))
}

fn determinism() -> Outcome {
    let problems = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems");
    let mut compared = 0;
    for (name, extra) in [
        ("two_point_grid.json", vec!["--all-witnesses"]),
        ("affine_banach_random.json", vec!["--seed", "42"]),
        ("multi_quarter.json", vec!["--seed", "3", "--pair-count", "200"]),
    ] {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_sbfix"))
                .arg("check")
                .args(&extra)
                .arg(problems.join(name))
                .output()
                .expect("binary runs")
        };
        let (a, b) = (run(), run());
        ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
            format!("{name}: outputs differ")
        })?;
        ensure(a.status.code() == b.status.code(), || {
            format!("{name}: exit codes differ")
        })?;
        compared += a.stdout.len();
    }
    Ok(format!("3 problems, {compared} bytes identical across runs"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("threshold regression", threshold_regression),
        ("lambda identity", lambda_identity),
        ("worked example", example_regression),
        ("solver on the worked example", example_solver),
        ("Banach/Picard property", banach_picard),
        ("reduction equivalence", reduction_equivalence),
        ("Hausdorff correctness", hausdorff_correctness),
        ("multivalued pipeline", multivalued_pipeline),
        ("uniqueness certifier", uniqueness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
