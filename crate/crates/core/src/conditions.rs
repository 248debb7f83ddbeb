//! Threshold functions and sample-based certifiers for implicative
//! contraction conditions.
//!
//! Every condition has the shape "antecedent(x, y) implies consequent(x, y)".
//! A certifier walks a finite, reproducible [`PairSample`], evaluates both
//! sides with tolerance [`EPS_CMP`], and records each failed implication as a
//! [`Witness`]. A clean run is reported as certified *on the sample*; it is
//! never a proof over all of ℝⁿ.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{averaged_apply, single_residual, AnyMap, ContractionParams, MapSpec, MultiMapSpec};
use crate::space::{dist_point_set, dist_unchecked, hausdorff, norm, NormKind, PointSet, Vector, EPS_CMP};

/// (√5 − 1)/2, where the threshold leaves its constant branch.
pub const GOLDEN_BRANCH: f64 = 0.618_033_988_749_894_9;
/// 1/√2, where the threshold switches to 1/(1 + r).
pub const SQRT_HALF_BRANCH: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn check_ratio(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::invalid(format!("contraction ratio r = {r} is outside [0, 1)")))
    }
}

fn check_weight(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda = {lambda} is outside (0, 1]")))
    }
}

/// The nonincreasing threshold f: [0, 1) → (1/2, 1].
pub fn f_threshold(r: f64) -> Result<f64> {
    check_ratio(r)?;
    Ok(if r <= GOLDEN_BRANCH {
        1.0
    } else if r < SQRT_HALF_BRANCH {
        (1.0 - r) / (r * r)
    } else {
        1.0 / (1.0 + r)
    })
}

/// ψ(r) = λ·f(r), the antecedent weight of the single-valued enriched
/// condition.
pub fn psi_single(r: f64, lambda: f64) -> Result<f64> {
    check_weight(lambda)?;
    Ok(lambda * f_threshold(r)?)
}

/// ψ(r) = λ/(1 + r), the antecedent weight of the multivalued condition.
pub fn psi_multi(r: f64, lambda: f64) -> Result<f64> {
    check_ratio(r)?;
    check_weight(lambda)?;
    Ok(lambda / (1.0 + r))
}

/// The implicative conditions that can be certified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionKind {
    /// d(Tx, Ty) ≤ r·d(x, y) for every pair.
    Banach { r: f64 },
    /// f(r)·d(x, Tx) ≤ d(x, y) ⇒ d(Tx, Ty) ≤ r·d(x, y).
    Suzuki { r: f64 },
    /// ½·d(x, Tx) < d(x, y) ⇒ d(Tx, Ty) < d(x, y).
    SuzukiStrict,
    /// x ≠ y ⇒ d(Tx, Ty) < d(x, y).
    Edelstein,
    /// ψ(r)‖x − Tx‖ ≤ ‖x − y‖ ⇒ ‖b(x − y) + Tx − Ty‖ ≤ θ‖x − y‖.
    SuzukiBerinde(ContractionParams),
    /// s‖x − Tx‖ ≤ ‖x − y‖ ⇒ ‖b(x − y) + Tx − Ty‖ ≤ θ‖x − y‖, 0 < s ≤ ψ(r).
    GammaFamily(ContractionParams),
    /// (λ/2)‖x − Tx‖ < ‖x − y‖ ⇒ ‖b(x − y) + Tx − Ty‖ < ‖x − y‖.
    CompactBerinde(ContractionParams),
    /// λ/(1 + r)·d(x, Tx) ≤ ‖x − y‖ ⇒ H(bx + Tx, by + Ty) ≤ θ‖x − y‖.
    MultiSuzukiBerinde(ContractionParams),
    /// γλ·d(x, Tx) ≤ ‖x − y‖ ⇒ H(bx + Tx, by + Ty) ≤ θ‖x − y‖, (θλ + 1)γ ≤ 1.
    MultiGamma(ContractionParams),
    /// γλ·d(x, Tx) < ‖x − y‖ ⇒ H(bx + Tx, by + Ty) < ‖x − y‖, 0 < γ ≤ ½.
    MultiCompactGamma(ContractionParams),
}

impl ConditionKind {
    pub const TAGS: [&'static str; 10] = [
        "banach",
        "suzuki",
        "suzuki_strict",
        "edelstein",
        "suzuki_berinde",
        "gamma_family",
        "compact_berinde",
        "multi_suzuki_berinde",
        "multi_gamma",
        "multi_compact_gamma",
    ];

    pub fn banach(r: f64) -> Result<Self> {
        let c = ConditionKind::Banach { r };
        c.validate()?;
        Ok(c)
    }

    pub fn suzuki(r: f64) -> Result<Self> {
        let c = ConditionKind::Suzuki { r };
        c.validate()?;
        Ok(c)
    }

    pub fn suzuki_berinde(b: f64, theta: f64) -> Result<Self> {
        Ok(ConditionKind::SuzukiBerinde(ContractionParams::new(b, theta)?))
    }

    pub fn gamma_family(b: f64, theta: f64, s: f64) -> Result<Self> {
        let c = ConditionKind::GammaFamily(ContractionParams::new(b, theta)?.with_s(s)?);
        c.validate()?;
        Ok(c)
    }

    pub fn compact_berinde(b: f64) -> Result<Self> {
        Ok(ConditionKind::CompactBerinde(ContractionParams::from_b(b)?))
    }

    pub fn multi_suzuki_berinde(b: f64, theta: f64) -> Result<Self> {
        Ok(ConditionKind::MultiSuzukiBerinde(ContractionParams::new(b, theta)?))
    }

    pub fn multi_gamma(b: f64, theta: f64, gamma: f64) -> Result<Self> {
        let c = ConditionKind::MultiGamma(ContractionParams::new(b, theta)?.with_gamma(gamma)?);
        c.validate()?;
        Ok(c)
    }

    pub fn multi_compact_gamma(b: f64, gamma: f64) -> Result<Self> {
        let c = ConditionKind::MultiCompactGamma(ContractionParams::from_b(b)?.with_gamma(gamma)?);
        c.validate()?;
        Ok(c)
    }

    /// Builds a condition from its tag and a parameter block. The
    /// classical conditions read their ratio from `params.r()`.
    pub fn from_tag(tag: &str, params: &ContractionParams) -> Result<Self> {
        let c = match tag {
            "banach" => ConditionKind::Banach { r: params.r() },
            "suzuki" => ConditionKind::Suzuki { r: params.r() },
            "suzuki_strict" => ConditionKind::SuzukiStrict,
            "edelstein" => ConditionKind::Edelstein,
            "suzuki_berinde" => ConditionKind::SuzukiBerinde(*params),
            "gamma_family" => ConditionKind::GammaFamily(*params),
            "compact_berinde" => ConditionKind::CompactBerinde(*params),
            "multi_suzuki_berinde" => ConditionKind::MultiSuzukiBerinde(*params),
            "multi_gamma" => ConditionKind::MultiGamma(*params),
            "multi_compact_gamma" => ConditionKind::MultiCompactGamma(*params),
            other => {
                return Err(Error::condition(format!(
                    "unknown condition '{other}' (expected one of {})",
                    Self::TAGS.join(", ")
                )))
            }
        };
        c.validate()?;
        Ok(c)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ConditionKind::Banach { .. } => "banach",
            ConditionKind::Suzuki { .. } => "suzuki",
            ConditionKind::SuzukiStrict => "suzuki_strict",
            ConditionKind::Edelstein => "edelstein",
            ConditionKind::SuzukiBerinde(_) => "suzuki_berinde",
            ConditionKind::GammaFamily(_) => "gamma_family",
            ConditionKind::CompactBerinde(_) => "compact_berinde",
            ConditionKind::MultiSuzukiBerinde(_) => "multi_suzuki_berinde",
            ConditionKind::MultiGamma(_) => "multi_gamma",
            ConditionKind::MultiCompactGamma(_) => "multi_compact_gamma",
        }
    }

    pub fn is_multi(&self) -> bool {
        matches!(
            self,
            ConditionKind::MultiSuzukiBerinde(_) | ConditionKind::MultiGamma(_) | ConditionKind::MultiCompactGamma(_)
        )
    }

    /// Re-checks the parameter ranges of the condition.
    pub fn validate(&self) -> Result<()> {
        let range = |e: Error| Error::condition(e.to_string());
        match *self {
            ConditionKind::Banach { r } | ConditionKind::Suzuki { r } => check_ratio(r).map_err(range),
            ConditionKind::SuzukiStrict | ConditionKind::Edelstein => Ok(()),
            ConditionKind::SuzukiBerinde(p)
            | ConditionKind::CompactBerinde(p)
            | ConditionKind::MultiSuzukiBerinde(p) => {
                ContractionParams::new(p.b(), p.theta()).map_err(range)?;
                Ok(())
            }
            ConditionKind::GammaFamily(p) => {
                let s = p
                    .s()
                    .ok_or_else(|| Error::condition("gamma_family requires a threshold s"))?;
                let psi = psi_single(p.r(), p.lambda()).map_err(range)?;
                if !(s > 0.0 && s <= psi) {
                    return Err(Error::condition(format!(
                        "s = {s} must lie in (0, psi(r)] = (0, {psi}]"
                    )));
                }
                Ok(())
            }
            ConditionKind::MultiGamma(p) => {
                let g = p
                    .gamma()
                    .ok_or_else(|| Error::condition("multi_gamma requires gamma"))?;
                if !(g > 0.0 && g < 1.0) {
                    return Err(Error::condition(format!("gamma = {g} must lie in (0, 1)")));
                }
                if (p.r() + 1.0) * g > 1.0 {
                    return Err(Error::condition(format!(
                        "(theta*lambda + 1)*gamma = {} exceeds 1",
                        (p.r() + 1.0) * g
                    )));
                }
                Ok(())
            }
            ConditionKind::MultiCompactGamma(p) => {
                let g = p
                    .gamma()
                    .ok_or_else(|| Error::condition("multi_compact_gamma requires gamma"))?;
                if !(g > 0.0 && g <= 0.5) {
                    return Err(Error::condition(format!("gamma = {g} must lie in (0, 1/2]")));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionKind::Banach { r } | ConditionKind::Suzuki { r } => write!(f, "{}(r={r})", self.tag()),
            ConditionKind::SuzukiStrict | ConditionKind::Edelstein => f.write_str(self.tag()),
            ConditionKind::SuzukiBerinde(p)
            | ConditionKind::CompactBerinde(p)
            | ConditionKind::MultiSuzukiBerinde(p)
            | ConditionKind::GammaFamily(p)
            | ConditionKind::MultiGamma(p)
            | ConditionKind::MultiCompactGamma(p) => {
                write!(f, "{}(b={}, theta={}", self.tag(), p.b(), p.theta())?;
                if let Some(s) = p.s() {
                    write!(f, ", s={s}")?;
                }
                if let Some(g) = p.gamma() {
                    write!(f, ", gamma={g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// One side of an implication: `lhs ≤ rhs` or `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Ineq {
    lhs: f64,
    rhs: f64,
    strict: bool,
}

impl Ineq {
    fn le(lhs: f64, rhs: f64) -> Self {
        Ineq {
            lhs,
            rhs,
            strict: false,
        }
    }

    fn lt(lhs: f64, rhs: f64) -> Self {
        Ineq { lhs, rhs, strict: true }
    }

    fn as_antecedent(&self) -> bool {
        if self.strict {
            self.lhs < self.rhs - EPS_CMP
        } else {
            self.lhs <= self.rhs + EPS_CMP
        }
    }

    fn as_consequent(&self) -> bool {
        if !self.strict {
            self.lhs <= self.rhs + EPS_CMP
        } else if self.rhs > EPS_CMP {
            self.lhs < self.rhs - EPS_CMP
        } else {
            self.lhs <= EPS_CMP
        }
    }
}

/// Where a pair sample comes from; together with the map it fully
/// determines the pair list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairSpec {
    /// Every ordered pair of the map's finite domain, including x = y.
    Exhaustive,
    /// A tensor grid with `steps` evenly spaced points per axis.
    Grid {
        lower: Vec<f64>,
        upper: Vec<f64>,
        steps: usize,
    },
    /// `count` pairs drawn uniformly from the box by ChaCha8 seeded with `seed`.
    Random {
        lower: Vec<f64>,
        upper: Vec<f64>,
        count: usize,
        #[serde(default)]
        seed: u64,
    },
    /// A literal list of ordered pairs.
    Explicit { pairs: Vec<[Vector; 2]> },
}

/// A finite realization of "for all x, y": distinct evaluation points plus
/// ordered pairs of indices into them.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    provenance: PairSpec,
    points: Vec<Vector>,
    pairs: Vec<(usize, usize)>,
}

const MAX_PAIRS: usize = 100_000_000;

impl PairSample {
    pub fn provenance(&self) -> &PairSpec {
        &self.provenance
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> (&Vector, &Vector) {
        let (a, b) = self.pairs[i];
        (&self.points[a], &self.points[b])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vector, &Vector)> + '_ {
        self.pairs.iter().map(|&(a, b)| (&self.points[a], &self.points[b]))
    }

    /// All ordered pairs of `points`.
    pub fn all_pairs(points: Vec<Vector>, provenance: PairSpec) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("pair sample domain is empty"));
        }
        let n = points.len();
        if n.checked_mul(n).is_none_or(|p| p > MAX_PAIRS) {
            return Err(Error::invalid(format!("{n} points give too many pairs")));
        }
        let pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        Ok(PairSample {
            provenance,
            points,
            pairs,
        })
    }

    /// The given ordered pairs, in order.
    pub fn from_pairs(pairs: Vec<(Vector, Vector)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("pair sample is empty"));
        }
        let spec = PairSpec::Explicit {
            pairs: pairs.iter().map(|(x, y)| [x.clone(), y.clone()]).collect(),
        };
        let mut points = Vec::with_capacity(2 * pairs.len());
        let mut idx = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            points.push(x);
            points.push(y);
            idx.push((points.len() - 2, points.len() - 1));
        }
        Ok(PairSample {
            provenance: spec,
            points,
            pairs: idx,
        })
    }
}

fn check_box(lower: &[f64], upper: &[f64], dim: usize) -> Result<()> {
    if lower.len() != dim || upper.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if lower.len() != dim { lower.len() } else { upper.len() },
        });
    }
    for (i, (lo, hi)) in lower.iter().zip(upper).enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::invalid(format!("bad bounds on axis {i}: [{lo}, {hi}]")));
        }
    }
    Ok(())
}

fn grid_points(lower: &[f64], upper: &[f64], steps: usize) -> Result<Vec<Vector>> {
    let dim = lower.len();
    let total = u32::try_from(dim)
        .ok()
        .and_then(|d| steps.checked_pow(d))
        .filter(|&t| t <= 1_000_000)
        .ok_or_else(|| Error::invalid(format!("grid with {steps}^{dim} points is too large")))?;
    let axis = |k: usize, i: usize| {
        if steps == 1 {
            lower[k]
        } else {
            lower[k] + (upper[k] - lower[k]) * i as f64 / (steps - 1) as f64
        }
    };
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut coords = vec![0.0; dim];
        for k in (0..dim).rev() {
            coords[k] = axis(k, rem % steps);
            rem /= steps;
        }
        points.push(Vector::new(coords)?);
    }
    Ok(points)
}

/// Realizes a [`PairSpec`] for a map of dimension `map.dim()`.
pub fn make_pair_sample(spec: &PairSpec, map: &AnyMap) -> Result<PairSample> {
    let dim = map.dim();
    match spec {
        PairSpec::Exhaustive => {
            let domain = map
                .finite_domain()
                .ok_or_else(|| Error::invalid("exhaustive pairs need a tabulated map; use a grid or random sample"))?;
            PairSample::all_pairs(domain, spec.clone())
        }
        PairSpec::Grid { lower, upper, steps } => {
            check_box(lower, upper, dim)?;
            if *steps == 0 {
                return Err(Error::invalid("grid needs at least one step per axis"));
            }
            PairSample::all_pairs(grid_points(lower, upper, *steps)?, spec.clone())
        }
        PairSpec::Random {
            lower,
            upper,
            count,
            seed,
        } => {
            check_box(lower, upper, dim)?;
            if *count == 0 || *count > MAX_PAIRS {
                return Err(Error::invalid(format!("random pair count {count} is out of range")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut draw = || -> Result<Vector> {
                Vector::new(
                    lower
                        .iter()
                        .zip(upper)
                        .map(|(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
                        .collect(),
                )
            };
            let mut points = Vec::with_capacity(2 * count);
            for _ in 0..*count {
                points.push(draw()?);
                points.push(draw()?);
            }
            Ok(PairSample {
                provenance: spec.clone(),
                pairs: (0..*count).map(|i| (2 * i, 2 * i + 1)).collect(),
                points,
            })
        }
        PairSpec::Explicit { pairs } => {
            for [x, y] in pairs {
                x.check_dim(dim)?;
                y.check_dim(dim)?;
            }
            let mut sample = PairSample::from_pairs(pairs.iter().map(|[x, y]| (x.clone(), y.clone())).collect())?;
            sample.provenance = spec.clone();
            Ok(sample)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "certified-on-sample")]
    CertifiedOnSample,
    #[serde(rename = "violated")]
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedOnSample => "certified-on-sample",
            Verdict::Violated => "violated",
        })
    }
}

/// A pair whose antecedent held but whose consequent failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Position of the pair in the sample.
    pub index: usize,
    pub x: Vector,
    pub y: Vector,
    pub antecedent_lhs: f64,
    pub antecedent_rhs: f64,
    pub consequent_lhs: f64,
    pub consequent_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub condition: String,
    pub pairs_checked: usize,
    pub antecedent_hits: usize,
    pub violations: Vec<Witness>,
    pub verdict: Verdict,
}

impl CertificateReport {
    fn from_parts(condition: String, pairs_checked: usize, antecedent_hits: usize, violations: Vec<Witness>) -> Self {
        let verdict = if violations.is_empty() {
            Verdict::CertifiedOnSample
        } else {
            Verdict::Violated
        };
        CertificateReport {
            condition,
            pairs_checked,
            antecedent_hits,
            violations,
            verdict,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedOnSample
    }
}

/// ‖b(x − y) + Tx − Ty‖.
pub fn enriched_gap(b: f64, x: &Vector, y: &Vector, tx: &Vector, ty: &Vector, kind: NormKind) -> f64 {
    let coords: Vec<f64> = (0..x.dim()).map(|i| b * (x[i] - y[i]) + tx[i] - ty[i]).collect();
    kind.eval(&coords)
}

enum Image {
    Single(Vector),
    Multi(PointSet),
}

fn evaluate_points(map: &AnyMap, points: &[Vector], kind: NormKind) -> Vec<Result<Image>> {
    points
        .iter()
        .map(|p| match map {
            AnyMap::Single(m) => m.eval(p, kind).map(Image::Single),
            AnyMap::Multi(m) => m.eval(p, kind).map(Image::Multi),
        })
        .collect()
}

fn single_pair(
    cond: &ConditionKind,
    x: &Vector,
    y: &Vector,
    tx: &Vector,
    ty: &Vector,
    kind: NormKind,
) -> Result<(Ineq, Ineq)> {
    let dxy = dist_unchecked(x, y, kind);
    let dxtx = dist_unchecked(x, tx, kind);
    let dtxty = || dist_unchecked(tx, ty, kind);
    Ok(match *cond {
        ConditionKind::Banach { r } => (Ineq::le(0.0, 0.0), Ineq::le(dtxty(), r * dxy)),
        ConditionKind::Suzuki { r } => (Ineq::le(f_threshold(r)? * dxtx, dxy), Ineq::le(dtxty(), r * dxy)),
        ConditionKind::SuzukiStrict => (Ineq::lt(0.5 * dxtx, dxy), Ineq::lt(dtxty(), dxy)),
        ConditionKind::Edelstein => (Ineq::lt(0.0, dxy), Ineq::lt(dtxty(), dxy)),
        ConditionKind::SuzukiBerinde(p) => (
            Ineq::le(psi_single(p.r(), p.lambda())? * dxtx, dxy),
            Ineq::le(enriched_gap(p.b(), x, y, tx, ty, kind), p.theta() * dxy),
        ),
        ConditionKind::GammaFamily(p) => (
            Ineq::le(p.s().unwrap_or_default() * dxtx, dxy),
            Ineq::le(enriched_gap(p.b(), x, y, tx, ty, kind), p.theta() * dxy),
        ),
        ConditionKind::CompactBerinde(p) => (
            Ineq::lt(0.5 * p.lambda() * dxtx, dxy),
            Ineq::lt(enriched_gap(p.b(), x, y, tx, ty, kind), dxy),
        ),
        _ => unreachable!("multivalued condition on a single-valued pair"),
    })
}

fn multi_pair(
    cond: &ConditionKind,
    x: &Vector,
    y: &Vector,
    tx: &PointSet,
    ty: &PointSet,
    kind: NormKind,
) -> Result<(Ineq, Ineq)> {
    let p = match *cond {
        ConditionKind::MultiSuzukiBerinde(p) | ConditionKind::MultiGamma(p) | ConditionKind::MultiCompactGamma(p) => p,
        _ => unreachable!("single-valued condition on a multivalued pair"),
    };
    let dxy = dist_unchecked(x, y, kind);
    let dxtx = dist_point_set(x, tx, kind)?;
    // bx + Tx as the translate {bx + s : s ∈ Tx}.
    let gap = || -> Result<f64> {
        let sx = tx.translate(&x.scale(p.b()), kind)?;
        let sy = ty.translate(&y.scale(p.b()), kind)?;
        hausdorff(&sx, &sy, kind)
    };
    let gamma = p.gamma().unwrap_or_default();
    Ok(match cond {
        ConditionKind::MultiSuzukiBerinde(_) => (
            Ineq::le(psi_multi(p.r(), p.lambda())? * dxtx, dxy),
            Ineq::le(gap()?, p.theta() * dxy),
        ),
        ConditionKind::MultiGamma(_) => (
            Ineq::le(gamma * p.lambda() * dxtx, dxy),
            Ineq::le(gap()?, p.theta() * dxy),
        ),
        _ => (Ineq::lt(gamma * p.lambda() * dxtx, dxy), Ineq::lt(gap()?, dxy)),
    })
}

/// Checks `cond` on every ordered pair of `sample`. Witnesses are reported
/// in sample order.
pub fn certify(map: &AnyMap, cond: &ConditionKind, sample: &PairSample, kind: NormKind) -> Result<CertificateReport> {
    cond.validate()?;
    match (map.is_multi(), cond.is_multi()) {
        (false, true) => {
            return Err(Error::condition(format!(
                "{} needs a multivalued map (set_tabulated or affine_family)",
                cond.tag()
            )))
        }
        (true, false) => {
            return Err(Error::condition(format!(
                "{} needs a single-valued map (tabulated, affine or piecewise_override)",
                cond.tag()
            )))
        }
        _ => {}
    }
    let dim = map.dim();
    for p in sample.points() {
        p.check_dim(dim)?;
    }
    let images = evaluate_points(map, sample.points(), kind);

    let mut hits = 0;
    let mut violations = Vec::new();
    for (index, &(i, j)) in sample.pairs.iter().enumerate() {
        let (x, y) = (&sample.points[i], &sample.points[j]);
        let (ix, iy) = match (&images[i], &images[j]) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                return Err(Error::PairOutsideDomain {
                    index,
                    x: x.clone(),
                    y: y.clone(),
                })
            }
        };
        let (ante, cons) = match (ix, iy) {
            (Image::Single(tx), Image::Single(ty)) => single_pair(cond, x, y, tx, ty, kind)?,
            (Image::Multi(tx), Image::Multi(ty)) => multi_pair(cond, x, y, tx, ty, kind)?,
            _ => unreachable!(),
        };
        if !ante.as_antecedent() {
            continue;
        }
        hits += 1;
        if !cons.as_consequent() {
            violations.push(Witness {
                index,
                x: x.clone(),
                y: y.clone(),
                antecedent_lhs: ante.lhs,
                antecedent_rhs: ante.rhs,
                consequent_lhs: cons.lhs,
                consequent_rhs: cons.rhs,
            });
        }
    }
    Ok(CertificateReport::from_parts(
        cond.to_string(),
        sample.len(),
        hits,
        violations,
    ))
}

/// Checks ‖T_λx − z‖ ≤ r‖x − z‖ for every sample x ≠ z, where z must be a
/// numerical fixed point of `map`. A clean report rules out any other fixed
/// point among the samples.
pub fn uniqueness_certify(
    map: &MapSpec,
    lambda: f64,
    z: &Vector,
    r: f64,
    samples: &[Vector],
    kind: NormKind,
) -> Result<CertificateReport> {
    check_ratio(r)?;
    check_weight(lambda)?;
    let residual = single_residual(map, z, kind)?;
    if residual > EPS_CMP * (1.0 + norm(z, kind)) {
        return Err(Error::Precondition(format!(
            "{z} is not a fixed point (residual {residual:e})"
        )));
    }
    let mut hits = 0;
    let mut violations = Vec::new();
    for (index, x) in samples.iter().enumerate() {
        x.check_dim(z.dim())?;
        let dxz = dist_unchecked(x, z, kind);
        if dxz <= EPS_CMP {
            continue;
        }
        hits += 1;
        let tx = averaged_apply(map, lambda, x, kind).map_err(|e| match e {
            Error::Domain { .. } => Error::PairOutsideDomain {
                index,
                x: x.clone(),
                y: z.clone(),
            },
            e => e,
        })?;
        let lhs = dist_unchecked(&tx, z, kind);
        let cons = Ineq::le(lhs, r * dxz);
        if !cons.as_consequent() {
            violations.push(Witness {
                index,
                x: x.clone(),
                y: z.clone(),
                antecedent_lhs: 0.0,
                antecedent_rhs: dxz,
                consequent_lhs: cons.lhs,
                consequent_rhs: cons.rhs,
            });
        }
    }
    Ok(CertificateReport::from_parts(
        format!("uniqueness(lambda={lambda}, r={r})"),
        samples.len(),
        hits,
        violations,
    ))
}

/// Convenience wrapper for single-valued maps.
pub fn certify_single(
    map: &MapSpec,
    cond: &ConditionKind,
    sample: &PairSample,
    kind: NormKind,
) -> Result<CertificateReport> {
    certify(&AnyMap::Single(map.clone()), cond, sample, kind)
}

/// Convenience wrapper for multivalued maps.
pub fn certify_multi(
    map: &MultiMapSpec,
    cond: &ConditionKind,
    sample: &PairSample,
    kind: NormKind,
) -> Result<CertificateReport> {
    certify(&AnyMap::Multi(map.clone()), cond, sample, kind)
}
