//! Point-set files and `%.12g`-style number formatting.

use std::fmt;

use sbfix_core::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct PointFileError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for PointFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for PointFileError {}

/// Parses one point per line, coordinates separated by whitespace. Blank
/// lines and lines starting with `#` are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Vector>, PointFileError> {
    let mut points: Vec<Vector> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| PointFileError { line: i + 1, message };
        let coords = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| err(format!("'{tok}' is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        let point = Vector::new(coords).map_err(|e| err(e.to_string()))?;
        if let Some(first) = points.first() {
            if first.dim() != point.dim() {
                return Err(err(format!(
                    "expected {} coordinates, found {}",
                    first.dim(),
                    point.dim()
                )));
            }
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(PointFileError {
            line: 0,
            message: "file contains no points".into(),
        });
    }
    Ok(points)
}

/// Parses `"4,5"` or `"4 5"` into a vector.
pub fn parse_vector(text: &str) -> Result<Vector, String> {
    let coords = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    Vector::new(coords).map_err(|e| e.to_string())
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
