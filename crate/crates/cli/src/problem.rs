//! Problem files: parsing, overrides, validation and digests.

use std::fmt;
use std::path::Path;

use sbfix_core::{AnyMap, ConditionKind, ContractionParams, NormKind, PairSpec, SolveConfig, Vector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// The on-disk problem description. Every section except `map` and
/// `dimension` is optional; subcommands demand what they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    #[serde(default)]
    pub norm: NormKind,
    pub map: AnyMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_check: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub norm: Option<NormKind>,
    pub seed: Option<u64>,
    pub pair_count: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub x0: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    Io(String),
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    Field {
        field: &'static str,
        message: String,
    },
}

impl ProblemError {
    fn field(field: &'static str, message: impl fmt::Display) -> Self {
        ProblemError::Field {
            field,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::Io(msg) => write!(f, "{msg}"),
            ProblemError::Parse { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            ProblemError::Field { field, message } => write!(f, "field `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ProblemError {}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProblemError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical serialization; parsing it back yields an equal problem.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("problem files always serialize")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// Applies command-line overrides. A seed or pair count only affects
    /// random pair samples.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(norm) = o.norm {
            self.norm = norm;
        }
        if let Some(PairSpec::Random { count, seed, .. }) = self.pairs.as_mut() {
            if let Some(s) = o.seed {
                *seed = s;
            }
            if let Some(c) = o.pair_count {
                *count = c;
            }
        }
        if o.tol.is_some() || o.max_iter.is_some() || o.x0.is_some() {
            let solve = self.solve.get_or_insert_with(SolveSection::default);
            solve.tol = o.tol.or(solve.tol);
            solve.max_iter = o.max_iter.or(solve.max_iter);
            solve.x0 = o.x0.clone().or(solve.x0.take());
        }
    }

    /// Checks dimensions and parameter ranges and resolves the condition.
    pub fn validate(&self) -> Result<Problem, ProblemError> {
        if self.dimension == 0 {
            return Err(ProblemError::field("dimension", "must be at least 1"));
        }
        let dim = self
            .map
            .validate(self.norm)
            .map_err(|e| ProblemError::field("map", e))?;
        if dim != self.dimension {
            return Err(ProblemError::field(
                "map",
                format!("map has dimension {dim}, but `dimension` is {}", self.dimension),
            ));
        }
        let condition = match &self.condition {
            Some(tag) => Some(self.resolve_condition(tag)?),
            None => None,
        };
        let params = self.params(condition.is_some())?;
        if let Some(PairSpec::Explicit { pairs }) = &self.pairs {
            for [x, y] in pairs {
                if x.dim() != dim || y.dim() != dim {
                    return Err(ProblemError::field(
                        "pairs",
                        format!("pair ({x}, {y}) has the wrong dimension"),
                    ));
                }
            }
        }
        let solve = match &self.solve {
            Some(section) => Some(self.solve_config(section)?),
            None => None,
        };
        Ok(Problem {
            file: self.clone(),
            params,
            condition,
            solve,
        })
    }

    fn resolve_condition(&self, tag: &str) -> Result<ConditionKind, ProblemError> {
        if !ConditionKind::TAGS.contains(&tag) {
            return Err(ProblemError::field(
                "condition",
                format!(
                    "unknown tag '{tag}' (expected one of {})",
                    ConditionKind::TAGS.join(", ")
                ),
            ));
        }
        let needs_theta = !matches!(
            tag,
            "suzuki_strict" | "edelstein" | "compact_berinde" | "multi_compact_gamma"
        );
        if needs_theta && self.theta.is_none() {
            return Err(ProblemError::field("theta", format!("required by condition '{tag}'")));
        }
        if tag == "gamma_family" && self.s.is_none() {
            return Err(ProblemError::field("s", "required by condition 'gamma_family'"));
        }
        if matches!(tag, "multi_gamma" | "multi_compact_gamma") && self.gamma.is_none() {
            return Err(ProblemError::field("gamma", format!("required by condition '{tag}'")));
        }
        let params = self.params(true)?;
        let cond = ConditionKind::from_tag(tag, &params).map_err(|e| ProblemError::field("condition", e))?;
        if cond.is_multi() != self.map.is_multi() {
            let (c, m) = if cond.is_multi() {
                ("multivalued", "single-valued")
            } else {
                ("single-valued", "multivalued")
            };
            return Err(ProblemError::field(
                "condition",
                format!("'{tag}' is a {c} condition but the map is {m}"),
            ));
        }
        Ok(cond)
    }

    fn params(&self, strict: bool) -> Result<ContractionParams, ProblemError> {
        let b = self.b.unwrap_or(0.0);
        let mut p = ContractionParams::new(b, self.theta.unwrap_or(0.0)).map_err(|e| {
            if self.theta.is_some() {
                ProblemError::field("theta", e)
            } else {
                ProblemError::field("b", e)
            }
        })?;
        if let Some(s) = self.s {
            match p.with_s(s) {
                Ok(q) => p = q,
                Err(e) if strict => return Err(ProblemError::field("s", e)),
                Err(_) => {}
            }
        }
        if let Some(g) = self.gamma {
            match p.with_gamma(g) {
                Ok(q) => p = q,
                Err(e) if strict => return Err(ProblemError::field("gamma", e)),
                Err(_) => {}
            }
        }
        Ok(p)
    }

    fn solve_config(&self, section: &SolveSection) -> Result<SolveConfig, ProblemError> {
        let x0 = match &section.x0 {
            Some(x0) => x0.clone(),
            None => {
                return Err(ProblemError::field(
                    "solve.x0",
                    "missing starting point (set it or pass --x0)",
                ))
            }
        };
        if x0.dim() != self.dimension {
            return Err(ProblemError::field(
                "solve.x0",
                format!("{x0} has dimension {}, expected {}", x0.dim(), self.dimension),
            ));
        }
        let mut cfg = SolveConfig::new(x0);
        if let Some(tol) = section.tol {
            cfg = cfg.tol(tol);
        }
        if let Some(m) = section.max_iter {
            cfg = cfg.max_iter(m);
        }
        if let Some(r) = section.decay_check {
            cfg = cfg.decay_check(r);
        }
        cfg.validate().map_err(|e| ProblemError::field("solve", e))?;
        Ok(cfg)
    }
}

/// A validated problem with its derived parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub file: ProblemFile,
    pub params: ContractionParams,
    pub condition: Option<ConditionKind>,
    pub solve: Option<SolveConfig>,
}

impl Problem {
    pub fn norm(&self) -> NormKind {
        self.file.norm
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}
