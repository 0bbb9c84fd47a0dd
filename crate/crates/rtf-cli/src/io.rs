//! On-disk formats: JSON for parameter banks, state-space realizations, and
//! modal decompositions; CSV for time series.
//!
//! Floats are written in the shortest representation that parses back to the
//! same bits, so `save` followed by `load` is the identity and re-saving
//! reproduces the file byte for byte.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rtf_core::convert::ModalParams;
use rtf_core::linalg::Matrix;
use rtf_core::params::NumeratorForm;
use rtf_core::statespace::DenseSsm;
use rtf_core::{Complex64, RtfParams, Signal};

/// Errors surfaced by the file layer.
#[derive(Debug)]
pub enum IoError {
    /// The file is not syntactically valid JSON/CSV.
    ParseError(String),
    /// The document parses but violates the schema (shapes, field domains).
    SchemaError(String),
    /// The document declares an unsupported format version.
    VersionError(u64),
    /// Underlying filesystem failure.
    Io(std::io::Error),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::ParseError(msg) => write!(f, "parse error: {msg}"),
            IoError::SchemaError(msg) => write!(f, "schema error: {msg}"),
            IoError::VersionError(v) => write!(f, "unsupported format version {v} (expected 1)"),
            IoError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for IoError {}

impl From<std::io::Error> for IoError {
    fn from(e: std::io::Error) -> Self {
        IoError::Io(e)
    }
}

fn json_error(e: serde_json::Error) -> IoError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => IoError::ParseError(e.to_string()),
        _ => IoError::SchemaError(e.to_string()),
    }
}

fn schema(msg: impl Into<String>) -> IoError {
    IoError::SchemaError(msg.into())
}

// ---------------------------------------------------------------------------
// Parameter banks
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    version: u64,
    state_size: usize,
    channels: usize,
    num_denominators: usize,
    h0: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    numerator_form: String,
    trained_length: Option<usize>,
}

/// Reads and validates an [`RtfParams`] JSON document.
pub fn load_params(path: &Path) -> Result<RtfParams, IoError> {
    let text = fs::read_to_string(path)?;
    let doc: ParamsFile = serde_json::from_str(&text).map_err(json_error)?;
    if doc.version != 1 {
        return Err(IoError::VersionError(doc.version));
    }
    let form = match doc.numerator_form.as_str() {
        "corrected" => NumeratorForm::Corrected,
        "truncated" => NumeratorForm::Truncated,
        other => return Err(schema(format!("unknown numerator_form {other:?}"))),
    };
    if doc.h0.len() != doc.channels {
        return Err(schema("h0 length must equal channels"));
    }
    if doc.a.len() != doc.num_denominators {
        return Err(schema("a row count must equal num_denominators"));
    }
    if doc.b.len() != doc.channels {
        return Err(schema("b row count must equal channels"));
    }
    if doc.a.iter().chain(doc.b.iter()).any(|row| row.len() != doc.state_size) {
        return Err(schema("every a and b row must have state_size entries"));
    }
    RtfParams::new(doc.a, doc.b, doc.h0, form, doc.trained_length)
        .map_err(|e| schema(e.to_string()))
}

/// Writes an [`RtfParams`] JSON document (pretty-printed, trailing newline).
pub fn save_params(path: &Path, params: &RtfParams) -> Result<(), IoError> {
    let doc = ParamsFile {
        version: 1,
        state_size: params.state_size(),
        channels: params.channels(),
        num_denominators: params.num_denominators(),
        h0: params.h0.clone(),
        a: params.a.clone(),
        b: params.b.clone(),
        numerator_form: match params.numerator_form() {
            NumeratorForm::Corrected => "corrected".into(),
            NumeratorForm::Truncated => "truncated".into(),
        },
        trained_length: params.trained_length(),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(json_error)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Time series
// ---------------------------------------------------------------------------

/// Reads a `t,c0,c1,...` CSV into a channel-major [`Signal`].
pub fn load_signal(path: &Path) -> Result<Signal, IoError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| schema("empty signal file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        return Err(schema("header must be t,c0,c1,..."));
    }
    for (i, col) in cols[1..].iter().enumerate() {
        if *col != format!("c{i}") {
            return Err(schema(format!("unexpected header column {col:?}")));
        }
    }
    let channels = cols.len() - 1;
    let mut samples = vec![Vec::new(); channels];
    for (t, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != channels + 1 {
            return Err(schema(format!("row {t} has {} fields, expected {}", fields.len(), channels + 1)));
        }
        let row_t: usize = fields[0]
            .parse()
            .map_err(|_| IoError::ParseError(format!("bad time index {:?}", fields[0])))?;
        if row_t != t {
            return Err(schema(format!("time indices must be contiguous from 0, got {row_t} at row {t}")));
        }
        for (c, field) in fields[1..].iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| IoError::ParseError(format!("bad float {field:?}")))?;
            samples[c].push(v);
        }
    }
    Signal::new(samples).map_err(|e| schema(e.to_string()))
}

/// Writes channel-major rows as the `t,c0,c1,...` CSV.
pub fn save_signal(path: &Path, signal: &Signal) -> Result<(), IoError> {
    fs::write(path, signal_to_csv(&signal.samples))?;
    Ok(())
}

/// Shared CSV body builder for signals and kernels (same column layout).
pub fn signal_to_csv(rows: &[Vec<f64>]) -> String {
    let channels = rows.len();
    let length = rows.first().map_or(0, |r| r.len());
    let mut out = String::from("t");
    for c in 0..channels {
        out.push_str(&format!(",c{c}"));
    }
    out.push('\n');
    for t in 0..length {
        out.push_str(&format!("{t}"));
        for row in rows {
            out.push_str(&format!(",{}", row[t]));
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Dense state space and modal decompositions
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SsmFile {
    version: u64,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    h0: f64,
}

/// Reads a dense single-channel realization `{a, b, c, h0}`.
pub fn load_ssm(path: &Path) -> Result<DenseSsm, IoError> {
    let text = fs::read_to_string(path)?;
    let doc: SsmFile = serde_json::from_str(&text).map_err(json_error)?;
    if doc.version != 1 {
        return Err(IoError::VersionError(doc.version));
    }
    let n = doc.a.len();
    if doc.a.iter().any(|row| row.len() != n) {
        return Err(schema("a must be square"));
    }
    let mut a = Matrix::zeros(n.max(1), n.max(1));
    for (i, row) in doc.a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            a.set(i, j, v);
        }
    }
    DenseSsm::new(a, doc.b, doc.c, doc.h0).map_err(|e| schema(e.to_string()))
}

/// Writes a dense single-channel realization.
pub fn save_ssm(path: &Path, ssm: &DenseSsm) -> Result<(), IoError> {
    let n = ssm.state_size();
    let a = (0..n)
        .map(|i| (0..n).map(|j| ssm.a.get(i, j)).collect())
        .collect();
    let doc = SsmFile { version: 1, a, b: ssm.b.clone(), c: ssm.c.clone(), h0: ssm.h0 };
    let mut text = serde_json::to_string_pretty(&doc).map_err(json_error)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ModalFile {
    version: u64,
    /// `[re, im]` pairs.
    poles: Vec<[f64; 2]>,
    residues: Vec<[f64; 2]>,
    h0: f64,
}

/// Reads a modal decomposition (residue/pole pairs plus feedthrough).
pub fn load_modal(path: &Path) -> Result<ModalParams, IoError> {
    let text = fs::read_to_string(path)?;
    let doc: ModalFile = serde_json::from_str(&text).map_err(json_error)?;
    if doc.version != 1 {
        return Err(IoError::VersionError(doc.version));
    }
    if doc.poles.len() != doc.residues.len() || doc.poles.is_empty() {
        return Err(schema("poles and residues must be equal-length and nonempty"));
    }
    Ok(ModalParams {
        poles: doc.poles.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        residues: doc.residues.iter().map(|r| Complex64::new(r[0], r[1])).collect(),
        h0: doc.h0,
    })
}

/// Writes a modal decomposition.
pub fn save_modal(path: &Path, modal: &ModalParams) -> Result<(), IoError> {
    let doc = ModalFile {
        version: 1,
        poles: modal.poles.iter().map(|p| [p.re, p.im]).collect(),
        residues: modal.residues.iter().map(|r| [r.re, r.im]).collect(),
        h0: modal.h0,
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(json_error)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
