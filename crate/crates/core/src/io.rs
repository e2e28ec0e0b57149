//! JSON documents for fundamental data and computed results.
//!
//! Input:
//!
//! ```json
//! {
//!   "field": { "kind": "cyclotomic", "m": 6 },
//!   "n": 1,
//!   "r": 3,
//!   "matrices": [[["z"]], [["z"]], [["z^4"]]],
//!   "braids": ["b1", [1, -2]],
//!   "relations": ["b1^2"]
//! }
//! ```
//!
//! `kind` is `rational`, `prime` (with `p`) or `cyclotomic` (with `m`).
//! Entries are integers or element expressions; braids are expressions or
//! lists of signed generator indices. `relations` is optional and holds
//! braids on as many strands as there are braids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{parse_braid, BraidError, BraidExpr};
use crate::field::{FieldError, FieldSpec};
use crate::linalg::Matrix;
use crate::radon::{FundamentalData, RadonError, RadonResult};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("{path}: {source}")]
    Entry { path: String, source: FieldError },
    #[error("{path}: {source}")]
    Braid { path: String, source: BraidError },
    #[error(transparent)]
    Data(#[from] RadonError),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum BraidDoc {
    Text(String),
    Letters(Vec<i32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub field: FieldDoc,
    pub n: usize,
    pub r: usize,
    pub matrices: Vec<Vec<Vec<EntryDoc>>>,
    pub braids: Vec<BraidDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<BraidDoc>>,
}

/// A parsed input document.
#[derive(Debug, Clone)]
pub struct Input {
    pub data: FundamentalData,
    pub relations: Vec<BraidExpr>,
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> InputError {
    InputError::Schema { path: path.into(), msg: msg.into() }
}

pub fn field_from_doc(doc: &FieldDoc) -> Result<FieldSpec, InputError> {
    let need =
        |v: Option<u64>, key: &str| v.ok_or_else(|| schema("field", format!("kind `{}` needs `{key}`", doc.kind)));
    let spec = match doc.kind.as_str() {
        "rational" | "Q" => {
            if doc.p.is_some() || doc.m.is_some() {
                return Err(schema("field", "kind `rational` takes no parameters"));
            }
            Ok(FieldSpec::rational())
        }
        "prime" | "GF" => FieldSpec::prime(need(doc.p, "p")?),
        "cyclotomic" => FieldSpec::cyclotomic(need(doc.m, "m")?),
        other => return Err(schema("field.kind", format!("unknown field kind `{other}`"))),
    };
    spec.map_err(|e| schema("field", e.to_string()))
}

pub fn field_to_doc(k: &FieldSpec) -> FieldDoc {
    use crate::field::FieldKind;
    match k.kind() {
        FieldKind::Rational => FieldDoc { kind: "rational".into(), p: None, m: None },
        FieldKind::Prime(p) => FieldDoc { kind: "prime".into(), p: Some(p), m: None },
        FieldKind::Cyclotomic(m) => FieldDoc { kind: "cyclotomic".into(), p: None, m: Some(m) },
    }
}

/// Parse a matrix given as rows of entries.
pub fn matrix_from_doc(k: &FieldSpec, rows: &[Vec<EntryDoc>], path: &str) -> Result<Matrix, InputError> {
    let width = rows.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(schema(format!("{path}[{i}]"), format!("row has {} entries, expected {width}", row.len())));
        }
        let mut parsed = Vec::with_capacity(width);
        for (j, e) in row.iter().enumerate() {
            let x = match e {
                EntryDoc::Int(v) => Ok(k.from_i64(*v)),
                EntryDoc::Text(s) => k.parse_element(s),
            };
            parsed.push(x.map_err(|source| InputError::Entry { path: format!("{path}[{i}][{j}]"), source })?);
        }
        out.push(parsed);
    }
    if out.is_empty() {
        return Ok(Matrix::zeros(k, 0, 0));
    }
    Matrix::from_rows(k, out).map_err(|e| schema(path, e.to_string()))
}

pub fn braid_from_doc(doc: &BraidDoc, strands: usize, path: &str) -> Result<BraidExpr, InputError> {
    match doc {
        BraidDoc::Text(s) => parse_braid(s, strands).map_err(|source| InputError::Braid { path: path.into(), source }),
        BraidDoc::Letters(ls) => {
            if let Some(&l) = ls.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize >= strands) {
                let source = BraidError::StrandOutOfRange { generator: l as i64, strands };
                return Err(InputError::Braid { path: path.into(), source });
            }
            Ok(BraidExpr::from_letters(ls))
        }
    }
}

impl Input {
    pub fn from_doc(doc: &InputDoc) -> Result<Self, InputError> {
        let k = field_from_doc(&doc.field)?;
        let g = doc
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| matrix_from_doc(&k, m, &format!("matrices[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let omegas = doc
            .braids
            .iter()
            .enumerate()
            .map(|(i, b)| braid_from_doc(b, doc.r, &format!("braids[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let strands = doc.braids.len();
        let relations = doc
            .relations
            .iter()
            .flatten()
            .enumerate()
            .map(|(i, b)| braid_from_doc(b, strands, &format!("relations[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let data = FundamentalData::new(k, doc.n, doc.r, g, omegas)?;
        Ok(Input { data, relations })
    }
}

pub fn parse_input(text: &str) -> Result<Input, InputError> {
    let doc: InputDoc = serde_json::from_str(text)?;
    Input::from_doc(&doc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsDoc {
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(rename = "W")]
    pub w: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub product_ok: bool,
    pub strand_ok: bool,
    pub vankampen_ok: bool,
    pub vankampen_failures: Vec<usize>,
    pub rank: i64,
    pub rank_matches: bool,
    pub product_identity: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations_ok: Option<bool>,
    pub warnings: Vec<String>,
}

pub type MatrixDoc = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDoc {
    pub field: FieldDoc,
    pub dims: DimsDoc,
    pub trafodat: MatrixDoc,
    pub gtilde: Vec<MatrixDoc>,
    pub report: ReportDoc,
}

impl OutputDoc {
    pub fn from_result(k: &FieldSpec, res: &RadonResult) -> Self {
        let (e, h, w) = res.dims();
        let v = &res.report.validation;
        OutputDoc {
            field: field_to_doc(k),
            dims: DimsDoc { e, h, w },
            trafodat: res.spaces.trafodat.to_strings(),
            gtilde: res.gtilde.iter().map(Matrix::to_strings).collect(),
            report: ReportDoc {
                product_ok: v.product_ok,
                strand_ok: v.strand_ok,
                vankampen_ok: v.vankampen_ok,
                vankampen_failures: v.vankampen_failures.clone(),
                rank: res.report.rank,
                rank_matches: res.report.rank_matches,
                product_identity: res.report.product_identity,
                relations_ok: None,
                warnings: res.report.warnings.clone(),
            },
        }
    }

    /// The output tuple parsed back into matrices.
    pub fn tuple(&self) -> Result<Vec<Matrix>, InputError> {
        let k = field_from_doc(&self.field)?;
        self.gtilde
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let rows: Vec<Vec<EntryDoc>> =
                    m.iter().map(|r| r.iter().cloned().map(EntryDoc::Text).collect()).collect();
                matrix_from_doc(&k, &rows, &format!("gtilde[{i}]"))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_braids() {
        let text = r#"{"field": {"kind": "cyclotomic", "m": 6}, "n": 1, "r": 3,
            "matrices": [[["z"]], [["z"]], [["z^4"]]], "braids": ["b1", [1, -2]], "relations": ["b1^2"]}"#;
        let input = parse_input(text).unwrap();
        assert_eq!(input.data.g.len(), 3);
        assert_eq!(input.data.omegas[1].to_string(), "b1 b2^-1");
        assert_eq!(input.relations.len(), 1);
        let ints = r#"{"field": {"kind": "prime", "p": 5}, "n": 2, "r": 2,
            "matrices": [[[1, 1], [0, 1]], [[1, -1], ["0", "1"]]], "braids": []}"#;
        let input = parse_input(ints).unwrap();
        assert_eq!(input.data.g[1], Matrix::from_ints(&FieldSpec::prime(5).unwrap(), &[[1, 4], [0, 1]]));
    }

    #[test]
    fn reports_paths() {
        let bad_entry = r#"{"field": {"kind": "rational"}, "n": 1, "r": 2,
            "matrices": [[["1"]], [["1 +"]]], "braids": []}"#;
        let err = parse_input(bad_entry).unwrap_err().to_string();
        assert!(err.starts_with("matrices[1][0][0]:"), "{err}");
        let bad_braid = r#"{"field": {"kind": "rational"}, "n": 1, "r": 2,
            "matrices": [[["1"]], [["1"]]], "braids": ["b1", [2]]}"#;
        let err = parse_input(bad_braid).unwrap_err().to_string();
        assert!(err.starts_with("braids[1]:"), "{err}");
        let syntax = "{\n  \"field\": {\"kind\": \"rational\"},\n  \"n\": 1,,\n}";
        let err = parse_input(syntax).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let unknown = r#"{"field": {"kind": "real"}, "n": 1, "r": 0, "matrices": [], "braids": []}"#;
        assert!(parse_input(unknown).unwrap_err().to_string().contains("unknown field kind"));
        let missing = r#"{"field": {"kind": "prime"}, "n": 1, "r": 0, "matrices": [], "braids": []}"#;
        assert!(parse_input(missing).unwrap_err().to_string().contains("needs `p`"));
        let ragged = r#"{"field": {"kind": "rational"}, "n": 2, "r": 1, "matrices": [[[1, 0], [1]]], "braids": []}"#;
        assert!(parse_input(ragged).unwrap_err().to_string().starts_with("matrices[0][1]:"));
        let shape = r#"{"field": {"kind": "rational"}, "n": 2, "r": 1, "matrices": [[[1]]], "braids": []}"#;
        assert!(matches!(parse_input(shape), Err(InputError::Data(RadonError::MatrixShape { .. }))));
    }
}
