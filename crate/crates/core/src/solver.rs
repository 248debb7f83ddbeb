//! Picard iteration on the averaged operator `T_λ` with residual traces and
//! geometric-decay diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{averaged_set, multi_residual, single_residual, Averaged, MultiMapSpec, SelfMap};
use crate::space::{dist_unchecked, norm, NormKind, Vector, EPS_CMP};

/// Ratios in the trailing window used for `estimated_ratio`.
pub const RATIO_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub x0: Vector,
    /// Threshold for both the step norm and the residual, applied as
    /// `tol * (1 + ‖u_n‖)`.
    pub tol: f64,
    pub max_iter: usize,
    /// When set, every step with `step[n+1] > r * step[n] + ε` is flagged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_check: Option<f64>,
}

impl SolveConfig {
    pub fn new(x0: Vector) -> Self {
        SolveConfig {
            x0,
            tol: 1e-8,
            max_iter: 1000,
            decay_check: None,
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn decay_check(mut self, r: f64) -> Self {
        self.decay_check = Some(r);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be >= 1"));
        }
        if let Some(r) = self.decay_check {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::invalid(format!("decay_check ratio {r} is outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// History of a Picard run. Entry `n` of `step_norms` is ‖u_{n+1} − u_n‖,
/// computed at iterate `u_n`; the final iterate's step is the one that
/// passed (or failed) the convergence test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<Vector>,
    pub step_norms: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Index of the final iterate.
    pub iterations_used: usize,
    pub estimated_ratio: Option<f64>,
    /// Steps `n` with `step[n+1] > r * step[n] + ε` under `decay_check`.
    pub decay_violations: Vec<usize>,
}

impl IterationTrace {
    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("trace holds at least x0")
    }

    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("trace holds at least x0")
    }
}

/// Largest ratio of consecutive nonzero step norms over the last
/// [`RATIO_WINDOW`] ratios; `None` with fewer than three nonzero steps.
pub fn estimate_ratio(step_norms: &[f64]) -> Option<f64> {
    let nonzero = step_norms.iter().filter(|s| **s > 0.0).count();
    if nonzero < 3 {
        return None;
    }
    let ratios: Vec<f64> = step_norms
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let tail = &ratios[ratios.len().saturating_sub(RATIO_WINDOW)..];
    tail.iter().copied().reduce(f64::max)
}

fn decay_violations(step_norms: &[f64], r: Option<f64>) -> Vec<usize> {
    let Some(r) = r else { return Vec::new() };
    step_norms
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > r * w[0] + EPS_CMP)
        .map(|(n, _)| n)
        .collect()
}

/// Shared driver: `next` produces the successor of `u_n`, `residual` its
/// fixed-point residual.
fn iterate<N, R>(cfg: &SolveConfig, kind: NormKind, mut next: N, residual: R) -> Result<IterationTrace>
where
    N: FnMut(&Vector) -> Result<Vector>,
    R: Fn(&Vector) -> Result<f64>,
{
    cfg.validate()?;
    let tag = |index: usize| {
        move |e: Error| match e {
            Error::Domain { point } => Error::IterateOutsideDomain { index, point },
            e => e,
        }
    };
    let mut iterates = vec![cfg.x0.clone()];
    let mut step_norms = Vec::new();
    let mut residuals = Vec::new();
    let mut converged = false;

    for n in 0..=cfg.max_iter {
        let u = &iterates[n];
        let res = residual(u).map_err(tag(n))?;
        residuals.push(res);
        let succ = next(u).map_err(tag(n))?;
        if !succ.is_finite() {
            return Err(Error::Divergence { index: n + 1 });
        }
        let step = dist_unchecked(&succ, u, kind);
        step_norms.push(step);
        // step = λ·residual, so the residual test is the binding one for λ < 1.
        let threshold = cfg.tol * (1.0 + norm(u, kind));
        if step <= threshold && res <= threshold {
            converged = true;
            break;
        }
        if n == cfg.max_iter {
            break;
        }
        iterates.push(succ);
    }

    let iterations_used = iterates.len() - 1;
    Ok(IterationTrace {
        estimated_ratio: estimate_ratio(&step_norms),
        decay_violations: decay_violations(&step_norms, cfg.decay_check),
        iterates,
        step_norms,
        residuals,
        converged,
        iterations_used,
    })
}

/// Iterates `u_{n+1} = T_λ u_n` with λ = 1/(b+1) from `cfg.x0`.
pub fn picard_solve<M: SelfMap + ?Sized>(map: &M, b: f64, cfg: &SolveConfig, kind: NormKind) -> Result<IterationTrace> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid(format!("b must be >= 0, got {b}")));
    }
    let averaged = Averaged::new(map, 1.0 / (b + 1.0))?;
    iterate(
        cfg,
        kind,
        |u| averaged.apply(u, kind),
        |u| single_residual(map, u, kind),
    )
}

/// Multivalued Picard iteration: the successor of `u_n` is the point of
/// `T_λ(u_n)` nearest to `u_n`, ties broken by lexicographic order. The
/// step norm equals λ·d(u_n, Tu_n), so the stopping rule matches
/// [`picard_solve`].
pub fn picard_solve_multi(map: &MultiMapSpec, b: f64, cfg: &SolveConfig, kind: NormKind) -> Result<IterationTrace> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid(format!("b must be >= 0, got {b}")));
    }
    let lambda = 1.0 / (b + 1.0);
    let next = |u: &Vector| -> Result<Vector> {
        let candidates = averaged_set(map, lambda, u, kind)?;
        let best = candidates
            .iter()
            .map(|p| (dist_unchecked(p, u, kind), p))
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.lex_cmp(b.1)))
            .map(|(_, p)| p.clone())
            .expect("point sets are nonempty");
        Ok(best)
    };
    iterate(cfg, kind, next, |u| multi_residual(map, u, kind))
}

/// One step whose norm exceeds the geometric bound `rⁿ·step_norms[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundViolation {
    pub n: usize,
    pub bound: f64,
    pub actual: f64,
}

/// Checks ‖u_n − u_{n+1}‖ ≤ rⁿ‖u_0 − T_λu_0‖ along the trace and returns
/// every step that breaks it. An empty list certifies the decay claim on
/// this trajectory.
pub fn apriori_bound(trace: &IterationTrace, r: f64) -> Result<Vec<BoundViolation>> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::invalid(format!("r = {r} is outside [0, 1)")));
    }
    let Some(&first) = trace.step_norms.first() else {
        return Err(Error::invalid("trace has no steps"));
    };
    let mut bound = first;
    let mut out = Vec::new();
    for (n, &actual) in trace.step_norms.iter().enumerate() {
        if n > 0 {
            bound *= r;
        }
        if actual > bound + EPS_CMP {
            out.push(BoundViolation { n, bound, actual });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{AffineRule, Entry, MapSpec, Matrix, SetEntry};

    const L2: NormKind = NormKind::L2;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn example_map() -> MapSpec {
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

    fn scalar_affine(a: f64, c: f64) -> MapSpec {
        MapSpec::affine(Matrix::scaled_identity(1, a), v(&[c])).unwrap()
    }

    fn scalar_family(rules: &[(f64, f64)]) -> MultiMapSpec {
        MultiMapSpec::AffineFamily {
            rules: rules
                .iter()
                .map(|&(a, c)| AffineRule {
                    a: Matrix::scaled_identity(1, a),
                    c: v(&[c]),
                })
                .collect(),
        }
    }

    #[test]
    fn stops_only_when_residual_meets_tolerance() {
        // T = 0.5x + 1, b = 1: step = residual / 2, so the residual test binds.
        let m = MapSpec::affine(Matrix::scaled_identity(1, 0.5), v(&[1.0])).unwrap();
        let cfg = SolveConfig::new(v(&[0.0])).tol(1e-6);
        let trace = picard_solve(&m, 1.0, &cfg, L2).unwrap();
        assert!(trace.converged);
        let z = trace.last();
        let threshold = cfg.tol * (1.0 + norm(z, L2));
        assert!(trace.final_residual() <= threshold);
        assert!(*trace.step_norms.last().unwrap() <= threshold);
        let prev = trace.residuals[trace.residuals.len() - 2];
        assert!(prev > cfg.tol * (1.0 + norm(&trace.iterates[trace.iterates.len() - 2], L2)));
    }

    #[test]
    fn example_map_iterates_halve_to_origin() {
        let cfg = SolveConfig::new(v(&[4.0, 5.0])).tol(1e-8).max_iter(200);
        let trace = picard_solve(&example_map(), 1.0, &cfg, L2).unwrap();
        assert_eq!(
            &trace.iterates[1..4],
            &[v(&[4.0, 2.5]), v(&[2.0, 1.25]), v(&[1.0, 0.625])]
        );
        assert!(trace.converged);
        assert!(trace.iterations_used <= 60);
        assert!(norm(trace.last(), L2) < 1e-7);
        assert!((trace.estimated_ratio.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(trace.iterates.len(), trace.step_norms.len());
        assert_eq!(trace.iterates.len(), trace.residuals.len());
    }

    #[test]
    fn identity_converges_immediately() {
        let id = MapSpec::identity(3).unwrap();
        for b in [0.0, 2.0] {
            let trace = picard_solve(&id, b, &SolveConfig::new(v(&[1.0, -2.0, 3.0])), L2).unwrap();
            assert!(trace.converged);
            assert_eq!(trace.iterations_used, 0);
            assert_eq!(trace.final_residual(), 0.0);
            assert_eq!(trace.estimated_ratio, None);
        }
    }

    #[test]
    fn affine_half_plus_one() {
        let trace = picard_solve(
            &scalar_affine(0.5, 1.0),
            0.0,
            &SolveConfig::new(v(&[0.0])).tol(1e-12),
            L2,
        )
        .unwrap();
        assert_eq!(&trace.iterates[1..4], &[v(&[1.0]), v(&[1.5]), v(&[1.75])]);
        assert!((trace.last()[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn doubling_map_does_not_converge() {
        let cfg = SolveConfig::new(v(&[1.0])).max_iter(20).decay_check(0.5);
        let trace = picard_solve(&scalar_affine(2.0, 0.0), 0.0, &cfg, L2).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations_used, 20);
        assert_eq!(trace.last()[0], 2f64.powi(20));
        assert_eq!(trace.decay_violations.len(), 20);
        assert_eq!(trace.estimated_ratio, Some(2.0));
    }

    #[test]
    fn overflow_is_divergence() {
        let cfg = SolveConfig::new(v(&[1.0])).max_iter(100);
        let err = picard_solve(&scalar_affine(1e300, 0.0), 0.0, &cfg, L2).unwrap_err();
        assert!(matches!(err, Error::Divergence { index: 2 }));
    }

    #[test]
    fn leaving_a_table_names_the_iterate() {
        let tab = MapSpec::Tabulated {
            entries: vec![Entry::new(v(&[4.0]), v(&[0.0])), Entry::new(v(&[2.0]), v(&[2.0 / 3.0]))],
        };
        // 4 -> 2 -> 4/3, which is not tabulated.
        let err = picard_solve(&tab, 1.0, &SolveConfig::new(v(&[4.0])), L2).unwrap_err();
        assert_eq!(
            err,
            Error::IterateOutsideDomain {
                index: 2,
                point: v(&[4.0 / 3.0])
            }
        );
    }

    #[test]
    fn config_validation() {
        let m = scalar_affine(0.5, 0.0);
        assert!(picard_solve(&m, 0.0, &SolveConfig::new(v(&[1.0])).tol(0.0), L2).is_err());
        assert!(picard_solve(&m, 0.0, &SolveConfig::new(v(&[1.0])).max_iter(0), L2).is_err());
        assert!(picard_solve(&m, -1.0, &SolveConfig::new(v(&[1.0])), L2).is_err());
    }

    #[test]
    fn multi_quarter_map() {
        let trace = picard_solve_multi(&scalar_family(&[(0.25, 0.0)]), 0.0, &SolveConfig::new(v(&[8.0])), L2).unwrap();
        assert_eq!(&trace.iterates[1..4], &[v(&[2.0]), v(&[0.5]), v(&[0.125])]);
        assert!(trace.converged);
        assert!((trace.estimated_ratio.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn multi_fixed_point_is_kept() {
        let id = scalar_family(&[(1.0, 0.0)]);
        let trace = picard_solve_multi(&id, 3.0, &SolveConfig::new(v(&[-7.0])), L2).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations_used, 0);
        assert_eq!(trace.final_residual(), 0.0);

        let zero_or_self = scalar_family(&[(0.0, 0.0), (1.0, 0.0)]);
        let trace = picard_solve_multi(&zero_or_self, 0.0, &SolveConfig::new(v(&[5.0])), L2).unwrap();
        assert_eq!(trace.iterations_used, 0);
        assert_eq!(trace.last(), &v(&[5.0]));
    }

    #[test]
    fn multi_ties_break_lexicographically() {
        let tab = MultiMapSpec::SetTabulated {
            entries: vec![
                SetEntry {
                    input: v(&[0.0]),
                    output: vec![v(&[1.0]), v(&[-1.0])],
                },
                SetEntry {
                    input: v(&[-1.0]),
                    output: vec![v(&[-1.0])],
                },
            ],
        };
        let trace = picard_solve_multi(&tab, 0.0, &SolveConfig::new(v(&[0.0])), L2).unwrap();
        assert_eq!(trace.iterates[1], v(&[-1.0]));
        assert!(trace.converged);
    }

    #[test]
    fn apriori_examples() {
        // From (4, 5) the first step leaves the exceptional point and the
        // second is not half of the first: 2.358 > 1.25.
        let cfg = SolveConfig::new(v(&[4.0, 5.0]));
        let trace = picard_solve(&example_map(), 1.0, &cfg, L2).unwrap();
        let bad = apriori_bound(&trace, 0.5).unwrap();
        assert_eq!(bad[0].n, 1);
        assert!(bad.len() > 10);
        assert!((bad[0].actual - 22.25f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(bad[0].bound, 1.25);

        // Inside the default region the steps halve exactly.
        let trace = picard_solve(&example_map(), 1.0, &SolveConfig::new(v(&[4.0, 2.5])), L2).unwrap();
        assert!(apriori_bound(&trace, 0.5).unwrap().is_empty());

        let trace = picard_solve(
            &MapSpec::identity(2).unwrap(),
            1.0,
            &SolveConfig::new(v(&[1.0, 1.0])),
            L2,
        )
        .unwrap();
        assert!(apriori_bound(&trace, 0.3).unwrap().is_empty());

        let cfg = SolveConfig::new(v(&[1.0])).max_iter(10);
        let trace = picard_solve(&scalar_affine(2.0, 0.0), 0.0, &cfg, L2).unwrap();
        assert_eq!(apriori_bound(&trace, 0.1).unwrap().len(), 10);

        assert!(apriori_bound(&trace, 1.0).is_err());
    }

    #[test]
    fn ratio_needs_three_nonzero_steps() {
        assert_eq!(estimate_ratio(&[1.0, 0.5]), None);
        assert_eq!(estimate_ratio(&[1.0, 0.5, 0.0, 0.0]), None);
        assert_eq!(estimate_ratio(&[1.0, 0.5, 0.25]), Some(0.5));
        // Early transients outside the window are ignored.
        assert_eq!(
            estimate_ratio(&[1.0, 4.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]),
            Some(0.5)
        );
    }
}
