//! CSV, JSON and plot-data emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// RFC 4180: CRLF records, fields quoted only when needed.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("fields are UTF-8")
    }
}

/// Everything a subcommand produces.
pub struct Artifacts {
    /// File stem for the JSON document.
    pub json_name: &'static str,
    pub json: Value,
    /// File stem for the main table.
    pub csv_name: &'static str,
    pub table: Table,
    /// Further tables, written only to the output directory.
    pub extra: Vec<(&'static str, Table)>,
    /// Whitespace-separated columns for plotting tools.
    pub plot: Option<(&'static str, String)>,
    /// Shown on stderr when stdout carries CSV.
    pub summary: Vec<String>,
    /// Written to the output directory whatever the formats.
    pub json_always: bool,
    /// Human-readable stdout form, used when no format is requested.
    pub text: Option<String>,
}

pub struct Sink {
    /// `None` prints the text form if there is one, CSV otherwise.
    pub stdout: Option<Format>,
    pub files: Vec<Format>,
    pub dir: Option<PathBuf>,
}

impl Sink {
    pub fn emit(&self, a: &Artifacts) -> Result<(), Failure> {
        let shown = match (self.stdout, &a.text) {
            (Some(Format::Json), _) => pretty(&a.json) + "\n",
            (None, Some(text)) => text.clone(),
            _ => {
                for line in &a.summary {
                    eprintln!("{line}");
                }
                a.table.to_csv()
            }
        };
        // A closed pipe (`| head`) is not an error.
        let mut stdout = std::io::stdout().lock();
        match stdout
            .write_all(shown.as_bytes())
            .and_then(|_| stdout.flush())
        {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                return Err(Failure::Config(format!("cannot write to stdout: {e}")))
            }
            _ => {}
        }
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        if self.files.contains(&Format::Json) || a.json_always {
            write(&dir.join(format!("{}.json", a.json_name)), &pretty(&a.json))?;
        }
        if self.files.contains(&Format::Csv) {
            write(&dir.join(format!("{}.csv", a.csv_name)), &a.table.to_csv())?;
            for (name, t) in &a.extra {
                write(&dir.join(format!("{name}.csv")), &t.to_csv())?;
            }
        }
        if let Some((name, text)) = &a.plot {
            write(&dir.join(format!("{name}.dat")), text)?;
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

/// JSON number, or null for NaN and infinities.
pub fn jnum(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -7.0 / 6.0, 1e-300, 123456.789] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn csv_quotes_and_crlf() {
        let mut t = Table::new(["k", "index"]);
        t.push(vec!["1".into(), "1,2".into()]);
        assert_eq!(t.to_csv(), "k,index\r\n1,\"1,2\"\r\n");
    }
}
