//! Tabular results rendered as JSON or versioned CSV from the same rows.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

/// Round to 12 significant digits so output does not depend on the last
/// few bits of a computation.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(round12(x))
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    /// CSV text; numbers use the same digits as JSON.
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(x) => serde_json::to_string(x).expect("finite float"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) => s.serialize_f64(*x),
            Cell::Int(n) => s.serialize_u64(*n),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Empty => s.serialize_none(),
        }
    }
}

/// Rows sharing one ordered set of columns.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

struct RowRef<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct Document<'a> {
    schema: u32,
    command: &'static str,
    rows: Vec<RowRef<'a>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for {}",
            self.command
        );
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let doc = Document {
                    schema: SCHEMA,
                    command: self.command,
                    rows: self.rows.iter().map(|r| RowRef(&self.columns, r)).collect(),
                };
                let mut out = serde_json::to_vec_pretty(&doc)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = format!("# schema={SCHEMA}\n").into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&self.columns)?;
                    for row in &self.rows {
                        w.write_record(row.iter().map(Cell::csv_text))?;
                    }
                    w.flush()?;
                }
                Ok(out)
            }
        }
    }
}

/// Replace `path` with `bytes` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    // Temporary files are created private; results are ordinary files.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = table.render(format)?;
    match out {
        Some(path) => write_atomic(path, &bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
