//! JSON file formats shared with the CLI.
//!
//! Matrices: `{"p": 3, "entries": [[…]], "mode": "exact"|"float"}` with
//! entries given as integers, decimal strings, or `"num/den"` strings.
//! Parry lists: `{"p": 2, "sequences": [{"preperiod": […], "period": […]}]}`.
//! Bases: `{"betas": ["2.561…", …]}`, as produced by `solve`; extra fields
//! are accepted and ignored so solver output can be fed straight back in.

use serde::{Deserialize, Serialize};

use crate::cyclic_matrix::{CycMatrix, CyclicMatrixError};
use crate::digit_seq::{DigitSeqError, EpDigits, ParryList};
use crate::scalar::{parse_rational, rational_to_string, Rational, Real};
use crate::solver::{AltBase, SolveError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix entry at row {row}, column {col} is not a number, decimal, or num/den string")]
    BadEntry { row: usize, col: usize },
    #[error("unknown matrix mode {0:?} (expected \"exact\" or \"float\")")]
    UnknownMode(String),
    #[error("declared p = {declared} but found {found} rows/sequences")]
    SizeMismatch { declared: usize, found: usize },
    #[error("beta {0:?} is not a decimal literal")]
    BadBeta(String),
    #[error(transparent)]
    Matrix(#[from] CyclicMatrixError),
    #[error(transparent)]
    DigitSeq(#[from] DigitSeqError),
    #[error(transparent)]
    Base(#[from] SolveError),
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    p: usize,
    entries: Vec<Vec<serde_json::Value>>,
    #[serde(default = "default_mode")]
    mode: String,
}

fn default_mode() -> String {
    "exact".to_owned()
}

/// A matrix read from disk, in whichever scalar mode the file declared.
pub enum MatrixData {
    Exact(CycMatrix<Rational>),
    Float(CycMatrix<Real>),
}

fn value_to_rational(v: &serde_json::Value, row: usize, col: usize) -> Result<Rational, IoError> {
    let text = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        _ => return Err(IoError::BadEntry { row, col }),
    };
    parse_rational(&text).map_err(|_| IoError::BadEntry { row, col })
}

/// Parse a matrix file; float mode rounds the entries to `bits`.
pub fn read_matrix(json: &str, bits: usize) -> Result<MatrixData, IoError> {
    let file: MatrixFile = serde_json::from_str(json)?;
    if file.entries.len() != file.p {
        return Err(IoError::SizeMismatch {
            declared: file.p,
            found: file.entries.len(),
        });
    }
    let mut rows = Vec::with_capacity(file.p);
    for (r, row) in file.entries.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (c, v) in row.iter().enumerate() {
            out.push(value_to_rational(v, r, c)?);
        }
        rows.push(out);
    }
    match file.mode.as_str() {
        "exact" => Ok(MatrixData::Exact(CycMatrix::from_rows(rows)?)),
        "float" => {
            let rows = rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|q| Real::from_rational(&q, bits))
                        .collect()
                })
                .collect();
            Ok(MatrixData::Float(CycMatrix::from_rows(rows)?))
        }
        other => Err(IoError::UnknownMode(other.to_owned())),
    }
}

/// Serialize an exact matrix (integers stay bare, fractions become strings).
pub fn write_matrix(m: &CycMatrix<Rational>) -> String {
    let entries: Vec<Vec<serde_json::Value>> = m
        .rows()
        .map(|row| {
            row.iter()
                .map(|q| {
                    if q.is_integer() {
                        match i64::try_from(q.numer().clone()) {
                            Ok(v) => serde_json::Value::from(v),
                            Err(_) => serde_json::Value::from(rational_to_string(q)),
                        }
                    } else {
                        serde_json::Value::from(rational_to_string(q))
                    }
                })
                .collect()
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "p": m.size(),
        "entries": entries,
        "mode": "exact",
    }))
    .expect("serializing a matrix cannot fail")
}

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    #[serde(default)]
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ParryListFile {
    p: usize,
    sequences: Vec<SequenceFile>,
}

pub fn read_parry_list(json: &str) -> Result<ParryList, IoError> {
    let file: ParryListFile = serde_json::from_str(json)?;
    if file.sequences.len() != file.p {
        return Err(IoError::SizeMismatch {
            declared: file.p,
            found: file.sequences.len(),
        });
    }
    let seqs = file
        .sequences
        .into_iter()
        .map(|s| EpDigits::new(s.preperiod, s.period))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParryList::new(seqs)?)
}

pub fn write_parry_list(list: &ParryList) -> String {
    let sequences: Vec<SequenceFile> = list
        .seqs()
        .iter()
        .map(|s| SequenceFile {
            preperiod: s.preperiod().to_vec(),
            period: s.period().to_vec(),
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "p": list.p(),
        "sequences": sequences,
    }))
    .expect("serializing a Parry list cannot fail")
}

#[derive(Deserialize)]
struct BaseFile {
    betas: Vec<String>,
}

/// Read a base from solver-output JSON, or from an inline comma-separated
/// list of decimal betas.
pub fn read_base(input: &str, bits: usize) -> Result<AltBase, IoError> {
    let betas: Vec<String> = if input.trim_start().starts_with('{') {
        let file: BaseFile = serde_json::from_str(input)?;
        file.betas
    } else {
        input.split(',').map(|s| s.trim().to_owned()).collect()
    };
    let betas = betas
        .iter()
        .map(|s| Real::parse_decimal(s, bits).map_err(|_| IoError::BadBeta(s.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AltBase::new(betas, bits)?)
}

/// Decimal strings for the betas, sized to the base's precision.
pub fn format_betas(base: &AltBase) -> Vec<String> {
    let digits = Real::decimal_digits_for(base.precision_bits());
    base.betas()
        .iter()
        .map(|b| b.to_decimal_string(digits))
        .collect()
}
