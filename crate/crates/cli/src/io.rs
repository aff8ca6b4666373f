use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ptlab::io::MatrixDocument;
use ptlab::ComplexMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// CSV floats: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_text(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    if bytes.starts_with(&[0xEF, 0xBB, 0xBF]) {
        return Err(CliError::parse(format!("{}: byte order mark not allowed", path.display())));
    }
    String::from_utf8(bytes).map_err(|_| CliError::parse(format!("{}: not valid UTF-8", path.display())))
}

/// Reads `PATH` or `PATH#key`; the key selects a field of a JSON object,
/// so `construct` output can be fed back directly.
pub fn load_json(spec: &str) -> CliResult<Value> {
    let (path, key) = match spec.rsplit_once('#') {
        Some((p, k)) if !k.is_empty() && !k.contains('/') => (p, Some(k)),
        _ => (spec, None),
    };
    let text = read_text(Path::new(path))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{path}: malformed JSON: {e}")))?;
    match key {
        None => Ok(value),
        Some(k) => match value.get(k) {
            Some(v) if !v.is_null() => Ok(v.clone()),
            _ => Err(CliError::parse(format!("{path}: no field \"{k}\""))),
        },
    }
}

pub fn load_matrix(spec: &str) -> CliResult<ComplexMatrix> {
    let doc: MatrixDocument =
        serde_json::from_value(load_json(spec)?).map_err(|e| CliError::parse(format!("{spec}: not a matrix document: {e}")))?;
    Ok(doc.to_matrix()?)
}

/// Inline JSON, or `@PATH` to read it from a file.
pub fn parse_params<T: DeserializeOwned>(arg: &str) -> CliResult<T> {
    serde_json::from_value(params_value(arg)?).map_err(|e| CliError::parse(format!("invalid parameters: {e}")))
}

pub fn params_value(arg: &str) -> CliResult<Value> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("malformed JSON parameters: {e}")))
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Long-format entries `name,row,col,re,im`.
    pub fn matrices<'a>(items: impl IntoIterator<Item = (&'a str, &'a ComplexMatrix)>) -> Self {
        let mut t = Table::new(&["name", "row", "col", "re", "im"]);
        for (name, m) in items {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let z = m.get(i, j);
                    t.push(vec![name.to_string(), i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
                }
            }
        }
        t
    }
}

pub struct Sink {
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Sink {
    fn write_bytes(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.out {
            Some(path) => fs::write(path, bytes)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    pub fn emit<T: Serialize>(&self, json: &T, table: impl FnOnce() -> Table) -> CliResult<()> {
        match self.format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(json)
                    .map_err(|e| CliError::new(crate::error::EXIT_OTHER, format!("serialization failed: {e}")))?;
                text.push('\n');
                self.write_bytes(text.as_bytes())
            }
            Format::Csv => {
                let t = table();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::new(crate::error::EXIT_OTHER, e.to_string()))?;
                self.write_bytes(&bytes)
            }
        }
    }
}
