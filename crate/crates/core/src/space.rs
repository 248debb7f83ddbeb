//! Points of ℝⁿ, the ℓ1/ℓ2/ℓ∞ norms, and the Pompeiu–Hausdorff metric on
//! finite point sets.
//!
//! Closed bounded sets are represented by finite samples, so every infimum
//! and supremum below is a min or max over finitely many candidates.

use std::fmt;
use std::ops::{Add, Index, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every equality or ordering decision on reals.
pub const EPS_CMP: f64 = 1e-9;

/// A point of ℝⁿ with n ≥ 1 and finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("vector must have dimension >= 1"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("coordinate {i} is not finite ({})", coords[i])));
        }
        Ok(Vector(coords))
    }

    /// Builds a vector from arithmetic results; callers check finiteness
    /// where overflow is possible.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|c| alpha * c).collect())
    }

    /// `(1 - lambda) * self + lambda * other`, the averaging step shared by
    /// every T_λ evaluation. Evaluated as `x + λ(s − x)` so that `s = x`
    /// maps to `x` exactly; `λ = 1` returns `other` unchanged.
    pub fn blend(&self, other: &Vector, lambda: f64) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        if lambda == 1.0 {
            return other.clone();
        }
        Vector(self.0.iter().zip(&other.0).map(|(x, s)| x + lambda * (s - x)).collect())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    /// Lexicographic order on coordinates, used for deterministic tie-breaks.
    pub fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The norm equipping ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    #[default]
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl NormKind {
    pub fn eval(self, coords: &[f64]) -> f64 {
        match self {
            NormKind::L1 => coords.iter().map(|c| c.abs()).sum(),
            NormKind::L2 => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormKind::LInf => coords.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" | "l_inf" | "inf" => Ok(NormKind::LInf),
            other => Err(Error::invalid(format!(
                "unknown norm '{other}' (expected l1, l2 or linf)"
            ))),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn norm(v: &Vector, kind: NormKind) -> f64 {
    kind.eval(v.coords())
}

/// d(x, y) = ‖x − y‖.
pub fn dist(x: &Vector, y: &Vector, kind: NormKind) -> Result<f64> {
    y.check_dim(x.dim())?;
    Ok(dist_unchecked(x, y, kind))
}

pub(crate) fn dist_unchecked(x: &Vector, y: &Vector, kind: NormKind) -> f64 {
    let c = x.coords();
    let d = y.coords();
    match kind {
        NormKind::L1 => c.iter().zip(d).map(|(a, b)| (a - b).abs()).sum(),
        NormKind::L2 => c.iter().zip(d).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
        NormKind::LInf => c.iter().zip(d).fold(0.0, |m, (a, b)| m.max((a - b).abs())),
    }
}

/// A finite, nonempty set of points of equal dimension. Points closer than
/// [`EPS_CMP`] under the construction norm are merged, keeping the first.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PointSet {
    points: Vec<Vector>,
}

impl PointSet {
    pub fn new(points: Vec<Vector>, kind: NormKind) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::invalid("point set must be nonempty"));
        };
        let dim = first.dim();
        let mut kept: Vec<Vector> = Vec::with_capacity(points.len());
        for p in points {
            p.check_dim(dim)?;
            if !kept.iter().any(|q| dist_unchecked(q, &p, kind) <= EPS_CMP) {
                kept.push(p);
            }
        }
        Ok(PointSet { points: kept })
    }

    pub fn singleton(p: Vector) -> Self {
        PointSet { points: vec![p] }
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Vector, kind: NormKind) -> bool {
        p.dim() == self.dim() && self.iter().any(|q| dist_unchecked(q, p, kind) <= EPS_CMP)
    }

    /// The translate `{ offset + s : s ∈ self }`.
    pub fn translate(&self, offset: &Vector, kind: NormKind) -> Result<PointSet> {
        offset.check_dim(self.dim())?;
        PointSet::new(self.iter().map(|s| offset + s).collect(), kind)
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Vector;
    type IntoIter = std::slice::Iter<'a, Vector>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// d(a, B) = min over b ∈ B of ‖a − b‖.
pub fn dist_point_set(a: &Vector, set: &PointSet, kind: NormKind) -> Result<f64> {
    a.check_dim(set.dim())?;
    Ok(set
        .iter()
        .map(|b| dist_unchecked(a, b, kind))
        .fold(f64::INFINITY, f64::min))
}

/// D(A, B) = max over a ∈ A of d(a, B). Zero iff A ⊆ B up to tolerance.
pub fn excess(a: &PointSet, b: &PointSet, kind: NormKind) -> Result<f64> {
    b.points[0].check_dim(a.dim())?;
    let mut worst = 0.0_f64;
    for p in a {
        // Once some q is within `worst` of p, p cannot raise the maximum.
        let mut nearest = f64::INFINITY;
        for q in b {
            nearest = nearest.min(dist_unchecked(p, q, kind));
            if nearest <= worst {
                break;
            }
        }
        worst = worst.max(nearest);
    }
    Ok(worst)
}

/// Pompeiu–Hausdorff distance H(A, B) = max{D(A, B), D(B, A)}.
pub fn hausdorff(a: &PointSet, b: &PointSet, kind: NormKind) -> Result<f64> {
    Ok(excess(a, b, kind)?.max(excess(b, a, kind)?))
}
