//! The map document format.
//!
//! A document is one JSON object per line:
//!
//! ```json
//! {"maps": [{"name": "omega-z", "h": "identity", "g": {"poly": [[0, 0], [0, 0], [0.5, 0]]}}]}
//! ```
//!
//! Each map gives either `h` and `g` as expressions, or `h` and `omega` as
//! polynomials (then `g` is the antiderivative of `ω·h'` vanishing at 0).
//! Complex numbers are `[re, im]`. Expressions are tagged objects:
//! `{"poly": [c0, c1, …]}`, `{"mobius": [a, b, c, d]}`, `"exp"`, `"identity"`,
//! `{"const": c}`, `{"add": [e, e]}`, `{"mul": [e, e]}`, `{"div": [num, den]}`,
//! `{"compose": [outer, inner]}` and `{"scale": [c, e]}`.

use std::sync::Arc;

use hschwarz::{AnalyticExpr, HarmonicMap, Mobius};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct ComplexDoc(pub Complex64);

impl From<[f64; 2]> for ComplexDoc {
    fn from([re, im]: [f64; 2]) -> Self {
        Self(Complex64::new(re, im))
    }
}

impl From<ComplexDoc> for [f64; 2] {
    fn from(c: ComplexDoc) -> Self {
        [c.0.re, c.0.im]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ExprDoc {
    Poly(Vec<ComplexDoc>),
    Mobius([ComplexDoc; 4]),
    Exp,
    Identity,
    Const(ComplexDoc),
    Add(Box<ExprDoc>, Box<ExprDoc>),
    Mul(Box<ExprDoc>, Box<ExprDoc>),
    Div(Box<ExprDoc>, Box<ExprDoc>),
    Compose(Box<ExprDoc>, Box<ExprDoc>),
    Scale(ComplexDoc, Box<ExprDoc>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub name: String,
    pub h: ExprDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<ExprDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<ExprDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub maps: Vec<MapEntry>,
}

impl ExprDoc {
    pub fn to_expr(&self) -> Result<AnalyticExpr, String> {
        let pair = |a: &ExprDoc, b: &ExprDoc| -> Result<(Arc<AnalyticExpr>, Arc<AnalyticExpr>), String> {
            Ok((Arc::new(a.to_expr()?), Arc::new(b.to_expr()?)))
        };
        Ok(match self {
            Self::Poly(c) if c.is_empty() => return Err("polynomial needs at least one coefficient".into()),
            Self::Poly(c) => AnalyticExpr::Polynomial(c.iter().map(|x| x.0).collect()),
            Self::Mobius([a, b, c, d]) => AnalyticExpr::Mobius(Mobius::new(a.0, b.0, c.0, d.0).map_err(|e| e.to_string())?),
            Self::Exp => AnalyticExpr::Exp,
            Self::Identity => AnalyticExpr::Identity,
            Self::Const(c) => AnalyticExpr::Constant(c.0),
            Self::Add(a, b) => {
                let (a, b) = pair(a, b)?;
                AnalyticExpr::Add(a, b)
            }
            Self::Mul(a, b) => {
                let (a, b) = pair(a, b)?;
                AnalyticExpr::Mul(a, b)
            }
            Self::Div(a, b) => {
                let (a, b) = pair(a, b)?;
                AnalyticExpr::Div(a, b)
            }
            Self::Compose(a, b) => {
                let (a, b) = pair(a, b)?;
                AnalyticExpr::Compose(a, b)
            }
            Self::Scale(k, e) => AnalyticExpr::Scale(k.0, Arc::new(e.to_expr()?)),
        })
    }

    pub fn from_expr(e: &AnalyticExpr) -> Self {
        let b = |e: &AnalyticExpr| Box::new(Self::from_expr(e));
        match e {
            AnalyticExpr::Polynomial(c) => Self::Poly(c.iter().copied().map(ComplexDoc).collect()),
            AnalyticExpr::Mobius(m) => Self::Mobius(m.coefficients().map(ComplexDoc)),
            AnalyticExpr::Exp => Self::Exp,
            AnalyticExpr::Identity => Self::Identity,
            AnalyticExpr::Constant(c) => Self::Const(ComplexDoc(*c)),
            AnalyticExpr::Add(x, y) => Self::Add(b(x), b(y)),
            AnalyticExpr::Mul(x, y) => Self::Mul(b(x), b(y)),
            AnalyticExpr::Div(x, y) => Self::Div(b(x), b(y)),
            AnalyticExpr::Compose(x, y) => Self::Compose(b(x), b(y)),
            AnalyticExpr::Scale(k, x) => Self::Scale(ComplexDoc(*k), b(x)),
        }
    }
}

impl MapEntry {
    /// `h` and `g` form.
    pub fn from_map(name: impl Into<String>, f: &HarmonicMap) -> Self {
        Self { name: name.into(), h: ExprDoc::from_expr(f.h()), g: Some(ExprDoc::from_expr(f.g())), omega: None }
    }

    pub fn to_map(&self) -> Result<HarmonicMap, String> {
        let h = self.h.to_expr().map_err(|e| format!("h: {e}"))?;
        match (&self.g, &self.omega) {
            (Some(g), None) => {
                let g = g.to_expr().map_err(|e| format!("g: {e}"))?;
                HarmonicMap::new(g, h).map_err(|e| e.to_string())
            }
            (None, Some(omega)) => {
                let omega = omega.to_expr().map_err(|e| format!("omega: {e}"))?;
                match (h.as_polynomial(), omega.as_polynomial()) {
                    (Some(hp), Some(wp)) => HarmonicMap::from_dilatation(hp, wp).map_err(|e| e.to_string()),
                    _ => Err("omega form needs polynomial h and omega".into()),
                }
            }
            _ => Err("exactly one of g and omega must be given".into()),
        }
    }
}

impl MapDocument {
    pub fn from_maps<'a>(maps: impl IntoIterator<Item = (&'a str, &'a HarmonicMap)>) -> Self {
        Self { maps: maps.into_iter().map(|(n, f)| MapEntry::from_map(n, f)).collect() }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }
}

/// All documents in a JSON-lines text, with parse errors located by line and field path.
pub fn parse_documents(text: &str) -> Result<Vec<MapDocument>, CliError> {
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        docs.push(parse_line(line, i + 1)?);
    }
    Ok(docs)
}

fn parse_line(text: &str, line: usize) -> Result<MapDocument, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Input(format!("line {line}: at `{}`: {}", e.path(), e.inner())))
}

/// Named maps declared in a JSON-lines text, validated.
#[derive(Debug, Clone)]
pub struct MapCatalog {
    entries: Vec<(String, usize, MapEntry)>,
}

impl MapCatalog {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<(String, usize, MapEntry)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line = i + 1;
            let doc = parse_line(raw, line)?;
            for (k, entry) in doc.maps.iter().enumerate() {
                if entries.iter().any(|(n, _, _)| *n == entry.name) {
                    return Err(CliError::Input(format!("line {line}: at `maps[{k}].name`: duplicate map `{}`", entry.name)));
                }
                entries.push((entry.name.clone(), line, entry.clone()));
            }
        }
        Ok(Self { entries })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _, _)| n.as_str())
    }

    pub fn entry(&self, name: &str) -> Option<&MapEntry> {
        self.entries.iter().find(|(n, _, _)| n == name).map(|(_, _, e)| e)
    }

    /// The validated map called `name`.
    pub fn map(&self, name: &str) -> Result<HarmonicMap, CliError> {
        let (_, line, entry) = self
            .entries
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| CliError::Input(format!("no map named `{name}`")))?;
        entry.to_map().map_err(|e| CliError::Input(format!("line {line}: map `{name}`: {e}")))
    }
}
