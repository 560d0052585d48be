//! Scenario files and CSV / JSON output.
//!
//! Scenario JSON:
//! `{"alphabet": [..], "p_tilde_1": [..], "p_tilde_2": [..], "q": [..], "lambda_1": x, "lambda_2": y}`

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::mixture::MixtureScenario;
use crate::pmf::{Alphabet, Label, Pmf, Weight};
use crate::sweep::SweepResult;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: field `{field}`: {source}")]
    Invalid {
        path: PathBuf,
        field: &'static str,
        #[source]
        source: Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub alphabet: Vec<Label>,
    pub p_tilde_1: Vec<f64>,
    pub p_tilde_2: Vec<f64>,
    pub q: Vec<f64>,
    pub lambda_1: f64,
    pub lambda_2: f64,
}

impl ScenarioFile {
    pub fn from_scenario(s: &MixtureScenario) -> Self {
        Self {
            alphabet: s.alphabet().labels().to_vec(),
            p_tilde_1: s.p_tilde_1().mass().to_vec(),
            p_tilde_2: s.p_tilde_2().mass().to_vec(),
            q: s.q().mass().to_vec(),
            lambda_1: s.lambda_1().get(),
            lambda_2: s.lambda_2().get(),
        }
    }

    /// Validates every field; the error names the offending one.
    pub fn into_scenario(self) -> Result<MixtureScenario, (&'static str, Error)> {
        let alphabet = Arc::new(Alphabet::new(self.alphabet).map_err(|e| ("alphabet", e))?);
        let pmf = |field, mass| Pmf::new(alphabet.clone(), mass).map_err(|e| (field, e));
        let p_tilde_1 = pmf("p_tilde_1", self.p_tilde_1)?;
        let p_tilde_2 = pmf("p_tilde_2", self.p_tilde_2)?;
        let q = pmf("q", self.q)?;
        let lambda_1 = Weight::new(self.lambda_1).map_err(|e| ("lambda_1", e))?;
        let lambda_2 = Weight::new(self.lambda_2).map_err(|e| ("lambda_2", e))?;
        MixtureScenario::new(p_tilde_1, p_tilde_2, q, lambda_1, lambda_2)
            .map_err(|e| ("alphabet", e))
    }
}

pub fn parse_scenario(text: &str, path: &Path) -> Result<MixtureScenario, FileError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_scenario()
        .map_err(|(field, source)| FileError::Invalid {
            path: path.to_path_buf(),
            field,
            source,
        })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<MixtureScenario, FileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}

/// Pretty JSON; floats use shortest round-trip formatting, so loading the
/// output reproduces every value bit for bit.
pub fn scenario_to_json(s: &MixtureScenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
}

pub fn save_scenario(s: &MixtureScenario, path: impl AsRef<Path>) -> Result<(), FileError> {
    let path = path.as_ref();
    fs::write(path, scenario_to_json(s) + "\n").map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Decimal rendering with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header is the axis names followed by `sjsd_nats`; one line per record in
/// stored (row-major) order, `\n` line endings.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{},sjsd_nats", result.axis_names.join(","))?;
    for rec in &result.records {
        let mut line = String::new();
        for p in &rec.params {
            line.push_str(&format_f64(*p));
            line.push(',');
        }
        line.push_str(&format_f64(rec.sjsd));
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<(), FileError> {
    let path = path.as_ref();
    let wrap = |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(wrap)?;
    write_csv(result, io::BufWriter::new(file)).map_err(wrap)
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn emit_json<T: Serialize + ?Sized>(
    value: &T,
    path: impl AsRef<Path>,
) -> Result<(), FileError> {
    let path = path.as_ref();
    let wrap = |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(wrap)?;
    write_json(value, io::BufWriter::new(file)).map_err(wrap)
}
