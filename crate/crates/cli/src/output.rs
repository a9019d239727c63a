//! Deterministic emission: RFC-4180 CSV with unit-annotated headers, or a
//! JSON object {config, results, diagnostics}. All floats are printed at
//! 17 significant digits so identical configs produce identical bytes.

use std::io::{self, Write};
use std::path::Path;

use erange_core::{Error, ObservableValue, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV cell: numbers go through the fixed float format, everything else
/// is passed to the csv writer verbatim (which handles quoting).
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Value + exponent cells for a possibly divergent observable: the value
/// column carries the "divergent" sentinel and the exponent column the
/// fitted growth exponent from the attached truncation scan.
pub fn observable_cells(v: &ObservableValue) -> (Cell, Cell) {
    match v {
        ObservableValue::Finite { value } => (Cell::Num(*value), Cell::Empty),
        ObservableValue::Divergent { evidence, .. } => (
            Cell::Text("divergent".into()),
            match evidence {
                Some(scan) => Cell::Num(scan.growth_exponent),
                None => Cell::Empty,
            },
        ),
    }
}

pub struct Report {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub results: Vec<Value>,
    pub diagnostics: Value,
}

impl Report {
    fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(w);
        out.write_record(&self.headers).map_err(io_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|c| c.render())).map_err(io_err)?;
        }
        out.flush().map_err(|e| io_err(csv::Error::from(e)))?;
        Ok(())
    }

    fn write_json<W: Write>(&self, w: W, config: &RunConfig) -> Result<()> {
        let doc = serde_json::json!({
            "config": config,
            "results": self.results,
            "diagnostics": self.diagnostics,
        });
        let mut ser = serde_json::Serializer::with_formatter(w, SigFigFormatter);
        doc.serialize(&mut ser)
            .map_err(|e| Error::Numeric(format!("json serialization failed: {e}")))?;
        Ok(())
    }

    /// Writes to the config's output path (or stdout) in its format. The
    /// file is created up front so an unwritable path fails before any
    /// compute that follows this call elsewhere.
    pub fn write(&self, config: &RunConfig) -> Result<()> {
        match &config.out {
            Some(path) => {
                let f = create(path)?;
                match config.format {
                    OutputFormat::Csv => self.write_csv(f),
                    OutputFormat::Json => {
                        self.write_json(f, config)?;
                        Ok(())
                    }
                }
            }
            None => {
                let stdout = io::stdout();
                match config.format {
                    OutputFormat::Csv => self.write_csv(stdout.lock()),
                    OutputFormat::Json => {
                        self.write_json(stdout.lock(), config)?;
                        println!();
                        Ok(())
                    }
                }
            }
        }
    }
}

pub fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))
}

fn io_err(e: csv::Error) -> Error {
    Error::Numeric(format!("csv write failed: {e}"))
}

/// Compact JSON, but every f64 rendered at 17 significant digits.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Observable as a JSON value with floats left as numbers (the formatter
/// handles digits); divergent values keep their tagged structure.
pub fn observable_json(v: &ObservableValue) -> Value {
    serde_json::to_value(v).expect("observable serializes")
}
