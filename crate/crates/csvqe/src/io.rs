//! Hamiltonian and report file formats.
//!
//! Hamiltonian schema (one JSON document):
//! `{"n_qubits": 4, "terms": [["XZXI", [0.7, 0.0]], ...], "metadata": {...}}`
//!
//! Report schema:
//! `{"pipeline": [...], "rows": [{"qubits": k, "terms": t, "energy": e, "delta_e": d}]}`
//! with a CSV mirror using the header `qubits,terms,energy,delta_e`.

use crate::pauli::{PauliError, PauliSum, PauliTerm, PauliWord, HERMITICITY_TOLERANCE};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("term {term:?} has {got} characters, expected {expected}")]
    LengthMismatch {
        term: String,
        got: usize,
        expected: usize,
    },
    #[error("invalid Pauli term {term:?}: {source}")]
    BadTerm {
        term: String,
        source: PauliError,
    },
    #[error("Hamiltonian is not Hermitian: max |Im c| = {max_imag:.3e}")]
    NonHermitian { max_imag: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// On-disk Hamiltonian document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub n_qubits: usize,
    pub terms: Vec<(String, [f64; 2])>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl HamiltonianFile {
    pub fn from_sum(h: &PauliSum, metadata: BTreeMap<String, String>) -> Self {
        HamiltonianFile {
            n_qubits: h.n_qubits(),
            terms: h
                .iter()
                .map(|(w, c)| (w.to_string(), [c.re, c.im]))
                .collect(),
            metadata,
        }
    }

    pub fn to_sum(&self) -> Result<PauliSum, IoError> {
        let mut sum = PauliSum::new(self.n_qubits.max(1));
        for (text, [re, im]) in &self.terms {
            if text.len() != self.n_qubits {
                return Err(IoError::LengthMismatch {
                    term: text.clone(),
                    got: text.len(),
                    expected: self.n_qubits,
                });
            }
            let word = PauliWord::parse(text).map_err(|source| IoError::BadTerm {
                term: text.clone(),
                source,
            })?;
            sum.add_term(PauliTerm::new(word, Complex64::new(*re, *im)))
                .map_err(|source| IoError::BadTerm {
                    term: text.clone(),
                    source,
                })?;
        }
        if sum.max_imag() > HERMITICITY_TOLERANCE {
            return Err(IoError::NonHermitian {
                max_imag: sum.max_imag(),
            });
        }
        Ok(sum)
    }
}

/// Load a Hamiltonian document; the returned sum is deduplicated and
/// validated Hermitian.
pub fn load_hamiltonian(path: &Path) -> Result<(PauliSum, BTreeMap<String, String>), IoError> {
    let text = std::fs::read_to_string(path)?;
    let file = parse_hamiltonian(&text)?;
    let sum = file.to_sum()?;
    Ok((sum, file.metadata))
}

pub fn parse_hamiltonian(text: &str) -> Result<HamiltonianFile, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::ParseError {
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn save_hamiltonian(
    path: &Path,
    h: &PauliSum,
    metadata: BTreeMap<String, String>,
) -> Result<(), IoError> {
    let file = HamiltonianFile::from_sum(h, metadata);
    let mut out = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut out, &file).map_err(|e| IoError::ParseError {
        line: 0,
        message: e.to_string(),
    })?;
    out.write_all(b"\n")?;
    Ok(())
}

/// One keep-level of a reduction sweep.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub qubits: usize,
    pub terms: usize,
    pub energy: f64,
    pub delta_e: f64,
}

/// Pipeline report serialized as JSON (and optionally CSV).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct ReductionReport {
    pub pipeline: Vec<String>,
    pub rows: Vec<ReportRow>,
}

pub fn save_report(path: &Path, report: &ReductionReport) -> Result<(), IoError> {
    let mut out = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| IoError::ParseError {
        line: 0,
        message: e.to_string(),
    })?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<ReductionReport, IoError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::ParseError {
        line: e.line(),
        message: e.to_string(),
    })
}

/// CSV mirror of the report rows, header `qubits,terms,energy,delta_e`.
pub fn report_csv(report: &ReductionReport) -> String {
    let mut out = String::from("qubits,terms,energy,delta_e\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.qubits, row.terms, row.energy, row.delta_e
        ));
    }
    out
}

pub fn save_report_csv(path: &Path, report: &ReductionReport) -> Result<(), IoError> {
    std::fs::write(path, report_csv(report))?;
    Ok(())
}
