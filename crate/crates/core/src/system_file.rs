//! JSON system and triple definitions.
//!
//! ```json
//! { "R": [[4]], "B": [[0], [2]], "L": [[0], [1]], "weights": ["1/2", "1/2"] }
//! ```
//!
//! Rationals may be JSON numbers or `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{AifsError, Result};
use crate::hadamard::{check_hadamard, HadamardTriple};
use crate::ifs::AffineSystem;
use crate::linalg::{format_rational, parse_rational, ExpansiveIntMatrix, Rational, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
            Number::Float(f) => parse_rational(&f.to_string()),
            Number::Text(s) => parse_rational(s),
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        Number::Text(format_rational(r))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(rename = "R")]
    pub r: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Number>>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Number>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

fn vectors(rows: &[Vec<Number>]) -> Result<Vec<Vector>> {
    rows.iter().map(|r| r.iter().map(Number::to_rational).collect()).collect()
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AifsError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system files serialize")
    }

    pub fn from_parts(r: &ExpansiveIntMatrix, b: &[Vector], l: Option<&[Vector]>) -> Self {
        let conv = |v: &[Vector]| v.iter().map(|x| x.iter().map(Number::from_rational).collect()).collect();
        Self { r: r.rows(), b: conv(b), l: l.map(conv), weights: None, labels: BTreeMap::new() }
    }

    pub fn matrix(&self) -> Result<ExpansiveIntMatrix> {
        ExpansiveIntMatrix::new(self.r.clone())
    }

    pub fn digits(&self) -> Result<Vec<Vector>> {
        vectors(&self.b)
    }

    pub fn dual_digits(&self) -> Result<Option<Vec<Vector>>> {
        self.l.as_deref().map(vectors).transpose()
    }

    pub fn system(&self) -> Result<AffineSystem> {
        let weights = self.weights.as_ref().map(|w| w.iter().map(Number::to_rational).collect::<Result<Vec<_>>>()).transpose()?;
        AffineSystem::new(self.matrix()?, self.digits()?, weights)
    }

    /// Requires `L` with `|L| = |B|`; certification is left to the caller.
    pub fn triple(&self) -> Result<HadamardTriple> {
        let l = self.dual_digits()?.ok_or_else(|| AifsError::InvalidSystem("a triple needs the key L".into()))?;
        check_hadamard(&self.matrix()?, &self.digits()?, &l)
    }

    pub fn has_triple(&self) -> bool {
        self.l.is_some()
    }
}
