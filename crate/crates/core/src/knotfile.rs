//! Knot definition files.
//!
//! ```text
//! # comments run to the end of the line
//! [curve]
//! x = sin(u) + 2*cos(2*u)
//! y = cos(u) - 2*cos(2*u)
//! z = -sin(3*u)
//! period = 2*pi
//!
//! [field]
//! p = cos(3*u)
//! q = sin(3*u)
//! z0 = 0, 0, 0
//! ```
//!
//! The field section is optional and takes either `p`, `q` or `P1`, `P2`,
//! `Q`. Keys may come in any order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::Vector3;

use crate::bending::FieldRecipe;
use crate::curve::CurveDefinition;
use crate::expr::{parse, Expr, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub struct KnotFileError {
    /// 1-based line, or 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for KnotFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for KnotFileError {}

#[derive(Debug, Clone)]
pub struct KnotSpec {
    pub curve: CurveDefinition,
    pub field: Option<FieldRecipe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Curve,
    Field,
}

struct Entry {
    line: usize,
    value: String,
}

fn err(line: usize, message: impl Into<String>) -> KnotFileError {
    KnotFileError {
        line,
        message: message.into(),
    }
}

fn expression(key: &str, entry: &Entry) -> Result<Expr, KnotFileError> {
    parse(&entry.value).map_err(|e: ParseError| err(entry.line, format!("{key}: {e}")))
}

fn constant(e: &Expr) -> Option<f64> {
    if !e.is_constant() {
        return None;
    }
    e.evaluate(0.0).ok().filter(|v| v.is_finite())
}

fn vector(entry: &Entry) -> Result<Vector3<f64>, KnotFileError> {
    let parts: Vec<&str> = entry.value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(err(entry.line, format!("z0: expected three comma-separated values, found {}", parts.len())));
    }
    let mut v = Vector3::zeros();
    for (k, p) in parts.iter().enumerate() {
        let e = parse(p).map_err(|e| err(entry.line, format!("z0 component {}: {e}", k + 1)))?;
        v[k] = constant(&e).ok_or_else(|| err(entry.line, format!("z0 component {} is not a finite constant", k + 1)))?;
    }
    Ok(v)
}

/// Parses the text of a knot file.
pub fn parse_knot_spec(text: &str) -> Result<KnotSpec, KnotFileError> {
    let mut sections: BTreeMap<Section, (usize, BTreeMap<String, Entry>)> = BTreeMap::new();
    let mut current: Option<Section> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("unterminated section header `{content}`")))?
                .trim();
            let section = match name {
                "curve" => Section::Curve,
                "field" => Section::Field,
                _ => return Err(err(line, format!("unknown section `[{name}]`"))),
            };
            if sections.contains_key(&section) {
                return Err(err(line, format!("duplicate section `[{name}]`")));
            }
            sections.insert(section, (line, BTreeMap::new()));
            current = Some(section);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let section = current.ok_or_else(|| err(line, format!("`{key}` appears before any section")))?;
        let allowed: &[&str] = match section {
            Section::Curve => &["x", "y", "z", "period"],
            Section::Field => &["p", "q", "P1", "P2", "Q", "z0"],
        };
        if !allowed.contains(&key) {
            return Err(err(line, format!("unknown key `{key}`")));
        }
        let entries = &mut sections.get_mut(&section).expect("section was inserted").1;
        if entries.contains_key(key) {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let (curve_line, curve) = sections
        .get(&Section::Curve)
        .ok_or_else(|| err(0, "missing `[curve]` section"))?;
    let get = |key: &str| {
        curve
            .get(key)
            .ok_or_else(|| err(*curve_line, format!("`[curve]` is missing `{key}`")))
    };
    let x = expression("x", get("x")?)?;
    let y = expression("y", get("y")?)?;
    let z = expression("z", get("z")?)?;
    let period_entry = get("period")?;
    let period = constant(&expression("period", period_entry)?)
        .filter(|p| *p > 0.0)
        .ok_or_else(|| err(period_entry.line, "period must be a positive constant"))?;

    let field = match sections.get(&Section::Field) {
        None => None,
        Some((line, entries)) => {
            let has = |k: &str| entries.contains_key(k);
            let z0 = entries.get("z0").map(vector).transpose()?.unwrap_or_else(Vector3::zeros);
            let frenet = has("p") || has("q");
            let general = has("P1") || has("P2") || has("Q");
            let need = |k: &str| {
                entries
                    .get(k)
                    .ok_or_else(|| err(*line, format!("`[field]` is missing `{k}`")))
                    .and_then(|e| expression(k, e))
            };
            let recipe = match (frenet, general) {
                (true, true) => return Err(err(*line, "`[field]` mixes p, q with P1, P2, Q")),
                (false, false) => return Err(err(*line, "`[field]` needs p, q or P1, P2, Q")),
                (true, false) => FieldRecipe::frenet(need("p")?, need("q")?),
                (false, true) => FieldRecipe::general(need("P1")?, need("P2")?, need("Q")?),
            };
            Some(recipe.with_offset(z0))
        }
    };
    Ok(KnotSpec {
        curve: CurveDefinition::new(x, y, z, period),
        field,
    })
}

/// Reads and parses a knot file.
pub fn read_knot_spec(path: &Path) -> Result<KnotSpec, KnotFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
    parse_knot_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bending::Integrand;

    const TREFOIL: &str = "\
# trefoil
[curve]
x = sin(u)+2*cos(2*u)
y = cos(u)-2*cos(2*u)   # inline comment
z = -sin(3*u)
period = 2*pi

[field]
q = sin(3*u)
p = cos(3*u)
z0 = 1, -2, 0.5
";

    #[test]
    fn parses_curve_and_field() {
        let spec = parse_knot_spec(TREFOIL).unwrap();
        assert_eq!(spec.curve.period, 2.0 * std::f64::consts::PI);
        assert_eq!(spec.curve.x.evaluate(0.0).unwrap(), 2.0);
        let field = spec.field.unwrap();
        assert_eq!(field.z0, Vector3::new(1.0, -2.0, 0.5));
        assert!(matches!(field.integrand, Integrand::Frenet { .. }));
    }

    #[test]
    fn field_is_optional() {
        let spec = parse_knot_spec("[curve]\nx=cos(u)\ny=sin(u)\nz=0\nperiod=2*pi\n").unwrap();
        assert!(spec.field.is_none());
    }

    #[test]
    fn expression_errors_carry_line_and_offset() {
        let e = parse_knot_spec("[curve]\nx = 2*\ny=sin(u)\nz=0\nperiod=1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("offset 2"), "{}", e.message);
    }

    #[test]
    fn structural_errors() {
        assert!(parse_knot_spec("x = u\n").is_err());
        assert!(parse_knot_spec("[curve]\nx=u\n").unwrap_err().message.contains("missing"));
        assert!(parse_knot_spec("[curve]\nx=u\nx=u\n").unwrap_err().message.contains("duplicate"));
        assert!(parse_knot_spec("[knot]\n").is_err());
        let base = "[curve]\nx=cos(u)\ny=sin(u)\nz=0\nperiod=";
        assert!(parse_knot_spec(&format!("{base}u\n")).is_err());
        assert!(parse_knot_spec(&format!("{base}-1\n")).is_err());
        let mixed = format!("{base}1\n[field]\np=1\nQ=1\n");
        assert!(parse_knot_spec(&mixed).unwrap_err().message.contains("mixes"));
        let bad_z0 = format!("{base}1\n[field]\np=1\nq=0\nz0 = 1, 2\n");
        assert!(parse_knot_spec(&bad_z0).is_err());
    }
}
