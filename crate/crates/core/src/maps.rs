//! Single- and multi-valued self-maps of ℝⁿ and their averaged transforms
//! `T_λ = (1 − λ)I + λT`.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::space::{dist_point_set, dist_unchecked, norm, NormKind, PointSet, Vector, EPS_CMP};

/// A dense real matrix, serialized row-major as an array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::invalid("matrix must be nonempty"));
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::invalid(format!(
                    "matrix row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(Error::invalid(format!("matrix row {i} has a non-finite entry")));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, alpha: f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = alpha;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Operator norm induced by `kind`. Exact for ℓ1 (max column sum) and
    /// ℓ∞ (max row sum); for ℓ2 this is the Frobenius norm, an upper bound.
    pub fn operator_norm_bound(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::L1 => (0..self.cols)
                .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::LInf => (0..self.rows)
                .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::L2 => self.data.iter().map(|a| a * a).sum::<f64>().sqrt(),
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.data.chunks(m.cols).map(<[f64]>::to_vec).collect()
    }
}

fn affine_apply(a: &Matrix, c: &Vector, x: &Vector) -> Result<Vector> {
    x.check_dim(a.cols())?;
    let out = (0..a.rows())
        .map(|i| {
            let row = a.row(i);
            row.iter().zip(x.coords()).map(|(aij, xj)| aij * xj).sum::<f64>() + c[i]
        })
        .collect();
    Ok(Vector::from_raw(out))
}

fn validate_affine(a: &Matrix, c: &Vector) -> Result<usize> {
    if a.rows() != a.cols() {
        return Err(Error::invalid(format!(
            "affine matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    c.check_dim(a.rows())?;
    Ok(a.rows())
}

/// One `input -> output` row of a tabulated map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub input: Vector,
    pub output: Vector,
}

impl Entry {
    pub fn new(input: Vector, output: Vector) -> Self {
        Entry { input, output }
    }
}

fn lookup<'a>(entries: &'a [Entry], x: &Vector, kind: NormKind) -> Option<&'a Entry> {
    entries
        .iter()
        .filter(|e| e.input.dim() == x.dim())
        .map(|e| (dist_unchecked(&e.input, x, kind), e))
        .filter(|(d, _)| *d <= EPS_CMP)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, e)| e)
}

fn check_distinct<'a>(inputs: impl Iterator<Item = &'a Vector>, kind: NormKind, what: &str) -> Result<()> {
    let inputs: Vec<&Vector> = inputs.collect();
    for (i, p) in inputs.iter().enumerate() {
        for q in &inputs[..i] {
            if dist_unchecked(p, q, kind) <= EPS_CMP {
                return Err(Error::invalid(format!("duplicate {what} input {p}")));
            }
        }
    }
    Ok(())
}

/// A single-valued self-map `T: ℝⁿ → ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapSpec {
    /// Total on a finite domain; evaluation elsewhere is a domain error.
    Tabulated { entries: Vec<Entry> },
    /// `x ↦ Ax + c`.
    Affine {
        #[serde(rename = "A", alias = "a")]
        a: Matrix,
        c: Vector,
    },
    /// `default` everywhere except at the override inputs.
    PiecewiseOverride {
        default: Box<MapSpec>,
        overrides: Vec<Entry>,
    },
}

impl MapSpec {
    pub fn identity(dim: usize) -> Result<Self> {
        Ok(MapSpec::Affine {
            a: Matrix::identity(dim),
            c: Vector::zeros(dim)?,
        })
    }

    pub fn affine(a: Matrix, c: Vector) -> Result<Self> {
        validate_affine(&a, &c)?;
        Ok(MapSpec::Affine { a, c })
    }

    /// Checks structural invariants and returns the dimension.
    pub fn validate(&self, kind: NormKind) -> Result<usize> {
        match self {
            MapSpec::Tabulated { entries } => {
                let first = entries
                    .first()
                    .ok_or_else(|| Error::invalid("tabulated map needs at least one entry"))?;
                let dim = first.input.dim();
                for e in entries {
                    e.input.check_dim(dim)?;
                    e.output.check_dim(dim)?;
                }
                check_distinct(entries.iter().map(|e| &e.input), kind, "tabulated")?;
                Ok(dim)
            }
            MapSpec::Affine { a, c } => validate_affine(a, c),
            MapSpec::PiecewiseOverride { default, overrides } => {
                let dim = default.validate(kind)?;
                for e in overrides {
                    e.input.check_dim(dim)?;
                    e.output.check_dim(dim)?;
                }
                check_distinct(overrides.iter().map(|e| &e.input), kind, "override")?;
                Ok(dim)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MapSpec::Tabulated { entries } => entries.first().map_or(0, |e| e.input.dim()),
            MapSpec::Affine { c, .. } => c.dim(),
            MapSpec::PiecewiseOverride { default, .. } => default.dim(),
        }
    }

    /// Tx.
    pub fn eval(&self, x: &Vector, kind: NormKind) -> Result<Vector> {
        match self {
            MapSpec::Tabulated { entries } => lookup(entries, x, kind)
                .map(|e| e.output.clone())
                .ok_or_else(|| Error::Domain { point: x.clone() }),
            MapSpec::Affine { a, c } => affine_apply(a, c, x),
            MapSpec::PiecewiseOverride { default, overrides } => match lookup(overrides, x, kind) {
                Some(e) => Ok(e.output.clone()),
                None => default.eval(x, kind),
            },
        }
    }

    /// The finite domain of a tabulated map, or `None` when the map is
    /// defined on all of ℝⁿ.
    pub fn finite_domain(&self) -> Option<Vec<Vector>> {
        match self {
            MapSpec::Tabulated { entries } => Some(entries.iter().map(|e| e.input.clone()).collect()),
            MapSpec::Affine { .. } => None,
            MapSpec::PiecewiseOverride { default, overrides } => {
                let mut dom = default.finite_domain()?;
                for e in overrides {
                    if !dom.contains(&e.input) {
                        dom.push(e.input.clone());
                    }
                }
                Some(dom)
            }
        }
    }

    /// Builds `T_λ` as a plain map of the same shape.
    pub fn to_averaged(&self, lambda: f64) -> Result<MapSpec> {
        check_lambda(lambda)?;
        let blend = |e: &Entry| Entry::new(e.input.clone(), e.input.blend(&e.output, lambda));
        Ok(match self {
            MapSpec::Tabulated { entries } => MapSpec::Tabulated {
                entries: entries.iter().map(blend).collect(),
            },
            MapSpec::Affine { a, c } => {
                let n = a.rows();
                let rows = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let id = if i == j { 1.0 - lambda } else { 0.0 };
                                id + lambda * a.get(i, j)
                            })
                            .collect()
                    })
                    .collect();
                MapSpec::Affine {
                    a: Matrix::from_rows(rows)?,
                    c: c.scale(lambda),
                }
            }
            MapSpec::PiecewiseOverride { default, overrides } => MapSpec::PiecewiseOverride {
                default: Box::new(default.to_averaged(lambda)?),
                overrides: overrides.iter().map(blend).collect(),
            },
        })
    }
}

/// Anything that maps a point to a point; lets the solver iterate either a
/// [`MapSpec`] or its lazily averaged form.
pub trait SelfMap {
    fn apply(&self, x: &Vector, kind: NormKind) -> Result<Vector>;
}

impl SelfMap for MapSpec {
    fn apply(&self, x: &Vector, kind: NormKind) -> Result<Vector> {
        self.eval(x, kind)
    }
}

/// `T_λ` evaluated on demand through [`averaged_apply`].
#[derive(Debug, Clone, Copy)]
pub struct Averaged<'a, M: ?Sized> {
    map: &'a M,
    lambda: f64,
}

impl<'a, M: SelfMap + ?Sized> Averaged<'a, M> {
    pub fn new(map: &'a M, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Averaged { map, lambda })
    }
}

impl<M: SelfMap + ?Sized> SelfMap for Averaged<'_, M> {
    fn apply(&self, x: &Vector, kind: NormKind) -> Result<Vector> {
        averaged_apply(self.map, self.lambda, x, kind)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("averaging weight {lambda} is outside (0, 1]")))
    }
}

/// `T_λx = (1 − λ)x + λTx`. With λ = 1 this is exactly `Tx`.
pub fn averaged_apply<M: SelfMap + ?Sized>(map: &M, lambda: f64, x: &Vector, kind: NormKind) -> Result<Vector> {
    check_lambda(lambda)?;
    let tx = map.apply(x, kind)?;
    x.check_dim(tx.dim())?;
    Ok(x.blend(&tx, lambda))
}

/// One rule `x ↦ Ax + c` of an affine family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRule {
    #[serde(rename = "A", alias = "a")]
    pub a: Matrix,
    pub c: Vector,
}

/// One `input -> {outputs}` row of a set-valued table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetEntry {
    pub input: Vector,
    pub output: Vec<Vector>,
}

/// A multivalued map `T: ℝⁿ → CB(ℝⁿ)` with finite images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MultiMapSpec {
    SetTabulated {
        entries: Vec<SetEntry>,
    },
    /// `Tx = { A_i x + c_i : i }`.
    AffineFamily {
        rules: Vec<AffineRule>,
    },
}

impl MultiMapSpec {
    pub fn validate(&self, kind: NormKind) -> Result<usize> {
        match self {
            MultiMapSpec::SetTabulated { entries } => {
                let first = entries
                    .first()
                    .ok_or_else(|| Error::invalid("set-tabulated map needs at least one entry"))?;
                let dim = first.input.dim();
                for e in entries {
                    e.input.check_dim(dim)?;
                    if e.output.is_empty() {
                        return Err(Error::invalid(format!("image of {} is empty", e.input)));
                    }
                    for s in &e.output {
                        s.check_dim(dim)?;
                    }
                }
                check_distinct(entries.iter().map(|e| &e.input), kind, "set-tabulated")?;
                Ok(dim)
            }
            MultiMapSpec::AffineFamily { rules } => {
                let first = rules
                    .first()
                    .ok_or_else(|| Error::invalid("affine family needs at least one rule"))?;
                let dim = validate_affine(&first.a, &first.c)?;
                for r in rules {
                    if validate_affine(&r.a, &r.c)? != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: r.c.dim(),
                        });
                    }
                }
                Ok(dim)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MultiMapSpec::SetTabulated { entries } => entries.first().map_or(0, |e| e.input.dim()),
            MultiMapSpec::AffineFamily { rules } => rules.first().map_or(0, |r| r.c.dim()),
        }
    }

    /// The image set Tx.
    pub fn eval(&self, x: &Vector, kind: NormKind) -> Result<PointSet> {
        match self {
            MultiMapSpec::SetTabulated { entries } => {
                let hit = entries
                    .iter()
                    .filter(|e| e.input.dim() == x.dim())
                    .map(|e| (dist_unchecked(&e.input, x, kind), e))
                    .filter(|(d, _)| *d <= EPS_CMP)
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, e)| e)
                    .ok_or_else(|| Error::Domain { point: x.clone() })?;
                PointSet::new(hit.output.clone(), kind)
            }
            MultiMapSpec::AffineFamily { rules } => {
                let image = rules
                    .iter()
                    .map(|r| affine_apply(&r.a, &r.c, x))
                    .collect::<Result<Vec<_>>>()?;
                PointSet::new(image, kind)
            }
        }
    }

    pub fn finite_domain(&self) -> Option<Vec<Vector>> {
        match self {
            MultiMapSpec::SetTabulated { entries } => Some(entries.iter().map(|e| e.input.clone()).collect()),
            MultiMapSpec::AffineFamily { .. } => None,
        }
    }
}

/// `T_λ(x) = { (1 − λ)x + λs : s ∈ Tx }`, the translate of λTx by (1 − λ)x.
pub fn averaged_set(map: &MultiMapSpec, lambda: f64, x: &Vector, kind: NormKind) -> Result<PointSet> {
    check_lambda(lambda)?;
    let image = map.eval(x, kind)?;
    x.check_dim(image.dim())?;
    PointSet::new(image.iter().map(|s| x.blend(s, lambda)).collect(), kind)
}

/// Either flavour of map, as it appears in a problem file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AnyMap {
    Single(MapSpec),
    Multi(MultiMapSpec),
}

impl<'de> Deserialize<'de> for AnyMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(deserializer)?;
        let tag = value
            .get("type")
            .and_then(|t| t.as_str())
            .ok_or_else(|| D::Error::custom("map is missing a string \"type\" field"))?;
        match tag {
            "tabulated" | "affine" | "piecewise_override" => {
                serde_json::from_value(value).map(AnyMap::Single).map_err(D::Error::custom)
            }
            "set_tabulated" | "affine_family" => {
                serde_json::from_value(value).map(AnyMap::Multi).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!(
                "unknown map type '{other}' (expected tabulated, affine, piecewise_override, set_tabulated or affine_family)"
            ))),
        }
    }
}

impl AnyMap {
    pub fn validate(&self, kind: NormKind) -> Result<usize> {
        match self {
            AnyMap::Single(m) => m.validate(kind),
            AnyMap::Multi(m) => m.validate(kind),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyMap::Single(m) => m.dim(),
            AnyMap::Multi(m) => m.dim(),
        }
    }

    pub fn finite_domain(&self) -> Option<Vec<Vector>> {
        match self {
            AnyMap::Single(m) => m.finite_domain(),
            AnyMap::Multi(m) => m.finite_domain(),
        }
    }

    pub fn is_multi(&self) -> bool {
        matches!(self, AnyMap::Multi(_))
    }
}

impl From<MapSpec> for AnyMap {
    fn from(m: MapSpec) -> Self {
        AnyMap::Single(m)
    }
}

impl From<MultiMapSpec> for AnyMap {
    fn from(m: MultiMapSpec) -> Self {
        AnyMap::Multi(m)
    }
}

/// ‖x − Tx‖ for single-valued maps, d(x, Tx) for multivalued ones.
pub fn fixed_point_residual(map: &AnyMap, x: &Vector, kind: NormKind) -> Result<f64> {
    match map {
        AnyMap::Single(m) => single_residual(m, x, kind),
        AnyMap::Multi(m) => multi_residual(m, x, kind),
    }
}

pub fn single_residual<M: SelfMap + ?Sized>(map: &M, x: &Vector, kind: NormKind) -> Result<f64> {
    let tx = map.apply(x, kind)?;
    x.check_dim(tx.dim())?;
    Ok(norm(&(x - &tx), kind))
}

pub fn multi_residual(map: &MultiMapSpec, x: &Vector, kind: NormKind) -> Result<f64> {
    dist_point_set(x, &map.eval(x, kind)?, kind)
}

/// Parameters `(b, θ)` of an enriched condition, with `λ = 1/(b+1)` and
/// `r = θλ` derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ContractionParams {
    b: f64,
    theta: f64,
    lambda: f64,
    r: f64,
    s: Option<f64>,
    gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawParams {
    b: f64,
    theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

impl TryFrom<RawParams> for ContractionParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let mut p = ContractionParams::new(raw.b, raw.theta)?;
        if let Some(s) = raw.s {
            p = p.with_s(s)?;
        }
        if let Some(g) = raw.gamma {
            p = p.with_gamma(g)?;
        }
        Ok(p)
    }
}

impl From<ContractionParams> for RawParams {
    fn from(p: ContractionParams) -> Self {
        RawParams {
            b: p.b,
            theta: p.theta,
            s: p.s,
            gamma: p.gamma,
        }
    }
}

impl ContractionParams {
    /// Requires `b ≥ 0` and `0 ≤ θ < b + 1`.
    pub fn new(b: f64, theta: f64) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::invalid(format!("b must be a finite number >= 0, got {b}")));
        }
        if !(theta.is_finite() && theta >= 0.0 && theta < b + 1.0) {
            return Err(Error::invalid(format!(
                "theta must lie in [0, b+1) = [0, {}), got {theta}",
                b + 1.0
            )));
        }
        let lambda = 1.0 / (b + 1.0);
        let r = theta * lambda;
        if r >= 1.0 {
            // θ < b+1 can still round to r = 1 for θ within an ulp of b+1.
            return Err(Error::invalid(format!("r = theta/(b+1) rounds to {r}, must be < 1")));
        }
        Ok(ContractionParams {
            b,
            theta,
            lambda,
            r,
            s: None,
            gamma: None,
        })
    }

    /// Parameters for a condition that only uses `b`.
    pub fn from_b(b: f64) -> Result<Self> {
        Self::new(b, 0.0)
    }

    pub fn with_s(mut self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::invalid(format!("s must be > 0, got {s}")));
        }
        self.s = Some(s);
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        self.gamma = Some(gamma);
        Ok(self)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> Option<f64> {
        self.s
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }
}
