//! Matrix files.
//!
//! CSV: one matrix row per line, comma-separated scalar literals, no header.
//!
//! JSON: `{"rows": 2, "cols": 2, "entries": [["3","6"],["5","10"]], "r": [...], "c": [...]}`
//! where `rows`, `cols`, `r` and `c` are optional and every scalar is a string.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Marginals, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` is JSON, anything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// A matrix together with any marginals stored alongside it.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDocument<T> {
    pub matrix: Matrix<T>,
    pub r: Option<Vec<T>>,
    pub c: Option<Vec<T>>,
}

impl<T: Scalar> MatrixDocument<T> {
    /// Stored marginals, falling back to all-ones for square matrices.
    pub fn marginals(&self) -> Result<Marginals<T>> {
        match (&self.r, &self.c) {
            (Some(r), Some(c)) => Marginals::new(r.clone(), c.clone()),
            (None, None) => Marginals::default_for(&self.matrix),
            _ => Err(Error::InvalidArgument("both r and c must be given".into())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    entries: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<String>>,
}

fn parse_list<T: Scalar>(items: &[String]) -> Result<Vec<T>> {
    items.iter().map(|s| T::parse_literal(s)).collect()
}

/// Parses `"1,1,2"` into a scalar vector.
pub fn parse_vector<T: Scalar>(text: &str) -> Result<Vec<T>> {
    text.split(',').map(|s| T::parse_literal(s.trim())).collect()
}

pub fn parse_csv<T: Scalar>(text: &str) -> Result<Matrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        rows.push(record.iter().map(T::parse_literal).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(rows)
}

pub fn parse_json<T: Scalar>(text: &str) -> Result<MatrixDocument<T>> {
    let doc: JsonMatrix = serde_json::from_str(text)?;
    let rows = doc.entries.iter().map(|row| parse_list(row)).collect::<Result<Vec<_>>>()?;
    let matrix = Matrix::from_rows(rows)?;
    if let Some(declared) = doc.rows.filter(|&m| m != matrix.rows()) {
        return Err(Error::DeclaredShape { what: "rows", declared, actual: matrix.rows() });
    }
    if let Some(declared) = doc.cols.filter(|&n| n != matrix.cols()) {
        return Err(Error::DeclaredShape { what: "cols", declared, actual: matrix.cols() });
    }
    let r = doc.r.as_deref().map(parse_list).transpose()?;
    let c = doc.c.as_deref().map(parse_list).transpose()?;
    Ok(MatrixDocument { matrix, r, c })
}

pub fn to_csv<T: Scalar>(a: &Matrix<T>) -> String {
    a.render_rows().iter().map(|row| row.join(",") + "\n").collect()
}

pub fn to_json<T: Scalar>(doc: &MatrixDocument<T>) -> Result<String> {
    let render = |v: &Vec<T>| v.iter().map(Scalar::render).collect();
    let json = JsonMatrix {
        rows: Some(doc.matrix.rows()),
        cols: Some(doc.matrix.cols()),
        entries: doc.matrix.render_rows(),
        r: doc.r.as_ref().map(render),
        c: doc.c.as_ref().map(render),
    };
    Ok(serde_json::to_string_pretty(&json)?)
}

pub fn read_document<T: Scalar>(path: &Path, format: Format) -> Result<MatrixDocument<T>> {
    let text = fs::read_to_string(path)?;
    match format {
        Format::Csv => Ok(MatrixDocument { matrix: parse_csv(&text)?, r: None, c: None }),
        Format::Json => parse_json(&text),
    }
}

pub fn read_matrix<T: Scalar>(path: &Path, format: Format) -> Result<Matrix<T>> {
    read_document(path, format).map(|doc| doc.matrix)
}

pub fn write_document<T: Scalar>(path: &Path, format: Format, doc: &MatrixDocument<T>) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(&doc.matrix),
        Format::Json => to_json(doc)? + "\n",
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn write_matrix<T: Scalar>(path: &Path, format: Format, a: &Matrix<T>) -> Result<()> {
    write_document(path, format, &MatrixDocument { matrix: a.clone(), r: None, c: None })
}
