//! JSON files for spaces, operators, norms and run configurations.
//!
//! Numeric entries may be JSON numbers or strings holding a decimal or a
//! rational `"p/q"`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::norms::NormSpec;
use crate::operators::LinOp;
use crate::order::OrderedSpace;

/// A real number read from a JSON number or a numeric string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Scalar(pub f64);

/// Parses `"p/q"`, an integer or a decimal.
pub fn parse_scalar(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = if s.contains('/') {
        let r = BigRational::from_str(s).map_err(|e| format!("bad rational `{s}`: {e}"))?;
        r.to_f64().ok_or_else(|| format!("rational `{s}` is out of range"))?
    } else {
        s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("number `{s}` is not finite"))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string \"p/q\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Ok(Scalar(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Ok(Scalar(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                parse_scalar(v).map(Scalar).map_err(E::custom)
            }
        }

        d.deserialize_any(ScalarVisitor)
    }
}

fn to_matrix(rows: &[Vec<Scalar>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Parse(format!(
            "{what}: row {i} has {} entries, expected {n}",
            rows[i].len()
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j].0))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<Scalar>> {
    m.row_iter().map(|r| r.iter().map(|&v| Scalar(v)).collect()).collect()
}

/// `{"dim": n, "dual_rays": [[...], ...], "name": "..."}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub dim: usize,
    pub dual_rays: Vec<Vec<Scalar>>,
    #[serde(default)]
    pub name: String,
}

impl SpaceFile {
    pub fn from_space(space: &OrderedSpace) -> Self {
        Self {
            dim: space.dim(),
            dual_rays: from_matrix(space.phi()),
            name: space.name().to_string(),
        }
    }

    pub fn build(&self) -> Result<OrderedSpace> {
        if self.dual_rays.is_empty() {
            return Err(Error::Parse("dual_rays: at least one functional is required".into()));
        }
        let phi = to_matrix(&self.dual_rays, "dual_rays")?;
        if phi.ncols() != self.dim {
            return Err(Error::Parse(format!(
                "dual_rays: rows have {} entries but dim is {}",
                phi.ncols(),
                self.dim
            )));
        }
        Ok(OrderedSpace::new(phi)?.with_name(self.name.clone()))
    }
}

/// `{"matrix": [[...]], "space": "...", "domain_basis": [[...]]}`. The
/// domain basis lists basis vectors, one per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub matrix: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_basis: Option<Vec<Vec<Scalar>>>,
}

impl OperatorFile {
    pub fn from_op(op: &LinOp) -> Self {
        Self {
            matrix: from_matrix(op.matrix()),
            space: (!op.space_name().is_empty()).then(|| op.space_name().to_string()),
            domain_basis: op.domain().map(|d| from_matrix(&d.transpose())),
        }
    }

    pub fn build(&self) -> Result<LinOp> {
        let m = to_matrix(&self.matrix, "matrix")?;
        let mut op = LinOp::new(m)?;
        if let Some(name) = &self.space {
            op = op.with_space_name(name.clone());
        }
        if let Some(basis) = &self.domain_basis {
            let b = to_matrix(basis, "domain_basis")?.transpose();
            op = op.with_domain(b)?;
        }
        Ok(op)
    }
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_space(text: &str) -> Result<OrderedSpace> {
    parse_json::<SpaceFile>(text, "space")?.build()
}

pub fn load_space(path: impl AsRef<Path>) -> Result<OrderedSpace> {
    let path = path.as_ref();
    parse_json::<SpaceFile>(&read(path)?, &path.display().to_string())?.build()
}

pub fn space_to_json(space: &OrderedSpace) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_space(space)).expect("space serializes")
}

/// Parses an operator and, when a space is given, checks the dimension and
/// that a named operator names that space.
pub fn parse_operator(text: &str, space: Option<&OrderedSpace>) -> Result<LinOp> {
    let file: OperatorFile = parse_json(text, "operator")?;
    let op = file.build()?;
    if let Some(s) = space {
        if op.dim() != s.dim() {
            return Err(Error::Dimension(format!(
                "operator of dimension {} on a space of dimension {}",
                op.dim(),
                s.dim()
            )));
        }
        if let Some(name) = &file.space {
            if !s.name().is_empty() && name != s.name() {
                return Err(Error::InvalidInput(format!(
                    "operator is for space `{name}`, not `{}`",
                    s.name()
                )));
            }
        }
        if file.space.is_none() {
            return Ok(op.with_space_name(s.name()));
        }
    }
    Ok(op)
}

pub fn load_operator(path: impl AsRef<Path>, space: Option<&OrderedSpace>) -> Result<LinOp> {
    let path = path.as_ref();
    parse_operator(&read(path)?, space)
        .map_err(|e| relabel(e, path))
}

pub fn operator_to_json(op: &LinOp) -> String {
    serde_json::to_string_pretty(&OperatorFile::from_op(op)).expect("operator serializes")
}

pub fn parse_norm(text: &str) -> Result<NormSpec> {
    parse_json(text, "norm")
}

pub fn load_norm(path: impl AsRef<Path>) -> Result<NormSpec> {
    let path = path.as_ref();
    parse_json(&read(path)?, &path.display().to_string())
}

/// Any configuration type with `deny_unknown_fields`.
pub fn load_config<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    parse_json(&read(path)?, &path.display().to_string())
}

fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("3/4").unwrap(), 0.75);
        assert_eq!(parse_scalar("-1/3").unwrap(), -1.0 / 3.0);
        assert_eq!(parse_scalar("2").unwrap(), 2.0);
        assert_eq!(parse_scalar(" 0.125 ").unwrap(), 0.125);
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("inf").is_err());
    }

    #[test]
    fn space_round_trip() {
        let text = r#"{"dim": 3, "name": "four_ray",
            "dual_rays": [[1, 1, 1], ["1", "-1", 1], [-1, "1/1", 1.0], [-1, -1, "1"]]}"#;
        let s = parse_space(text).unwrap();
        assert_eq!(s.phi(), catalog::four_ray().phi());
        assert_eq!(s.name(), "four_ray");
        let again = parse_space(&space_to_json(&s)).unwrap();
        assert_eq!(again.phi(), s.phi());
    }

    #[test]
    fn space_errors() {
        let missing = parse_space(r#"{"dual_rays": [[1]]}"#).unwrap_err();
        assert!(matches!(&missing, Error::Parse(m) if m.contains("missing field `dim`")), "{missing}");
        let unknown = parse_space(r#"{"dim": 1, "dual_rays": [[1]], "rays": 1}"#).unwrap_err();
        assert!(matches!(&unknown, Error::Parse(m) if m.contains("unknown field `rays`")));
        let ragged = parse_space(r#"{"dim": 2, "dual_rays": [[1, 0], [1]]}"#).unwrap_err();
        assert!(matches!(&ragged, Error::Parse(m) if m.contains("row 1")));
        let wrong_dim = parse_space(r#"{"dim": 3, "dual_rays": [[1, 0], [0, 1]]}"#).unwrap_err();
        assert!(matches!(wrong_dim, Error::Parse(_)));
        let not_pointed = parse_space(r#"{"dim": 2, "dual_rays": [[1, 0]]}"#).unwrap_err();
        assert!(matches!(not_pointed, Error::NotPointed { .. }));
        let bad = parse_space("{\"dim\": 1,\n \"dual_rays\": [[\"x\"]]}").unwrap_err();
        assert!(bad.to_string().contains("line 2"), "{bad}");
    }

    #[test]
    fn operator_round_trip() {
        let s = catalog::standard(3).with_name("std3");
        let text = r#"{"matrix": [[1, 0, 0], [0, "1/2", 0], [0, 0, 2]],
            "domain_basis": [[1, 0, 0], [0, 1, 0]]}"#;
        let op = parse_operator(text, Some(&s)).unwrap();
        assert_eq!(op.space_name(), "std3");
        assert_eq!(op.domain().unwrap().ncols(), 2);
        let again = parse_operator(&operator_to_json(&op), Some(&s)).unwrap();
        assert_eq!(again.matrix(), op.matrix());
        assert!((again.domain().unwrap() - op.domain().unwrap()).amax() < 1e-15);
        let wrong = parse_operator(r#"{"matrix": [[1, 0], [0, 1]]}"#, Some(&s)).unwrap_err();
        assert!(matches!(wrong, Error::Dimension(_)));
        let other = parse_operator(r#"{"matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "space": "x"}"#, Some(&s));
        assert!(other.is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(parse_norm(r#"{"kind": "sup"}"#).unwrap(), NormSpec::Sup);
        assert!(parse_norm(r#"{"kind": "order_unit"}"#).is_err());
    }
}
