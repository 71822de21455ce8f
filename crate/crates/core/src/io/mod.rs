//! Instance files: canonical JSON for all problems, PSPLIB single-mode files
//! for RCPSP and the plain matrix format for TSPTW.

mod psplib;
mod tsptw_matrix;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::rcpsp::RcpspInstance;
use crate::models::smswt::SmsInstance;
use crate::models::tsptw::TsptwInstance;
use crate::models::InstanceError;

pub use psplib::parse_psplib;
pub use tsptw_matrix::parse_tsptw_matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Smswt,
    Rcpsp,
    Tsptw,
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "smswt" => Ok(ProblemKind::Smswt),
            "rcpsp" => Ok(ProblemKind::Rcpsp),
            "tsptw" => Ok(ProblemKind::Tsptw),
            _ => Err(format!("unknown problem kind `{s}`")),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Smswt => "smswt",
            ProblemKind::Rcpsp => "rcpsp",
            ProblemKind::Tsptw => "tsptw",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Auto,
    Json,
    Psplib,
    TsptwMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Smswt(SmsInstance),
    Rcpsp(RcpspInstance),
    Tsptw(TsptwInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Smswt(_) => ProblemKind::Smswt,
            Instance::Rcpsp(_) => ProblemKind::Rcpsp,
            Instance::Tsptw(_) => ProblemKind::Tsptw,
        }
    }

    pub fn to_json(&self) -> String {
        let out = match self {
            Instance::Smswt(i) => serde_json::to_string_pretty(i),
            Instance::Rcpsp(i) => serde_json::to_string_pretty(i),
            Instance::Tsptw(i) => serde_json::to_string_pretty(i),
        };
        out.expect("instances always serialize")
    }

    fn validate(&self) -> Result<(), InstanceError> {
        match self {
            Instance::Smswt(i) => i.validate(),
            Instance::Rcpsp(i) => i.validate().map(|_| ()),
            Instance::Tsptw(i) => i.validate(),
        }
    }
}

/// A syntax error at a 1-based line (0 when the line is unknown).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Invalid { path: String, source: InstanceError },
    #[error("{path}: format {format:?} does not hold {kind} instances")]
    UnknownFormat {
        path: String,
        format: Format,
        kind: ProblemKind,
    },
}

pub fn parse_json(kind: ProblemKind, text: &str) -> Result<Instance, ParseError> {
    let err = |e: serde_json::Error| ParseError::at(e.line(), e.to_string());
    Ok(match kind {
        ProblemKind::Smswt => Instance::Smswt(serde_json::from_str(text).map_err(err)?),
        ProblemKind::Rcpsp => Instance::Rcpsp(serde_json::from_str(text).map_err(err)?),
        ProblemKind::Tsptw => Instance::Tsptw(serde_json::from_str(text).map_err(err)?),
    })
}

fn resolve_format(path: &Path, text: &str, kind: ProblemKind) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("sm") => Format::Psplib,
        _ if text.trim_start().starts_with('{') => Format::Json,
        _ if kind == ProblemKind::Rcpsp => Format::Psplib,
        _ if kind == ProblemKind::Tsptw => Format::TsptwMatrix,
        _ => Format::Json,
    }
}

/// Parses `text` as a `kind` instance and validates it.
pub fn parse(text: &str, kind: ProblemKind, format: Format, path: &Path) -> Result<Instance, IoError> {
    let name = path.display().to_string();
    let format = match format {
        Format::Auto => resolve_format(path, text, kind),
        f => f,
    };
    let parsed = match (format, kind) {
        (Format::Json, _) => parse_json(kind, text),
        (Format::Psplib, ProblemKind::Rcpsp) => parse_psplib(text).map(Instance::Rcpsp),
        (Format::TsptwMatrix, ProblemKind::Tsptw) => parse_tsptw_matrix(text).map(Instance::Tsptw),
        _ => {
            return Err(IoError::UnknownFormat { path: name, format, kind });
        }
    };
    let inst = parsed.map_err(|source| IoError::Parse { path: name.clone(), source })?;
    inst.validate().map_err(|source| IoError::Invalid { path: name, source })?;
    Ok(inst)
}

pub fn load(path: &Path, kind: ProblemKind, format: Format) -> Result<Instance, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text, kind, format, path)
}

/// Reads a token as an integer, accepting a zero fractional part (`12.0`).
pub(crate) fn parse_int(tok: &str, line: usize) -> Result<i64, ParseError> {
    if let Ok(v) = tok.parse::<i64>() {
        return Ok(v);
    }
    match tok.parse::<f64>() {
        Ok(f) if f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15 => Ok(f as i64),
        Ok(_) => Err(ParseError::at(line, format!("`{tok}` is not an integer"))),
        Err(_) => Err(ParseError::at(line, format!("`{tok}` is not a number"))),
    }
}
