//! Text formats. Tables are CSV preceded by `# key=value` comment lines that
//! echo the effective settings; single records are `key=value` lines.

use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Real numbers are written in scientific notation with 17 significant digits,
/// enough to round-trip any `f64`.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

#[derive(Debug, Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Record {
        Record::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Record {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Record {
        self.push(key, real(value))
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn render(&self) -> String {
        self.fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

pub struct Table {
    settings: Record,
    columns: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(settings: Record, columns: &'static [&'static str]) -> Table {
        Table { settings, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String, CliError> {
        let mut out: String = self.settings.fields().iter().map(|(k, v)| format!("# {k}={v}\n")).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Output(format!("csv encoding failed: {e}"));
        w.write_record(self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(format!("csv encoding failed: {e}")))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is valid UTF-8"));
        Ok(out)
    }
}

/// Write `text` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(format!("cannot write to standard output: {e}")))
        }
    }
}
