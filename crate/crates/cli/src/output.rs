//! Tabular output: CSV with fixed display precision, JSON with 17
//! significant digits, and a metadata block carried alongside the rows.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// One cell of an output row.
#[derive(Debug, Clone)]
pub enum Cell {
    Str(String),
    Float(f64),
    /// Optional float, rendered as an empty CSV field / JSON null.
    OptFloat(Option<f64>),
    Int(u64),
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

/// Ordered metadata entries (version, seed, method, timing, ...).
#[derive(Debug, Clone, Default)]
pub struct Metadata {
    entries: Vec<(String, Cell)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<Cell>) {
        self.entries.push((key.to_string(), value.into()));
    }

    fn to_json(&self) -> serde_json::Value {
        let mut meta = serde_json::Map::new();
        for (k, v) in &self.entries {
            meta.insert(k.clone(), cell_to_json(v));
        }
        serde_json::Value::Object(meta)
    }
}

/// Column-ordered output of one subcommand.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Fixed-precision float for CSV display; negative zero normalized away.
fn format_float(v: f64, precision: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let s = format!("{v:.precision$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn cell_to_csv(cell: &Cell, precision: usize) -> String {
    match cell {
        Cell::Str(s) => s.clone(),
        Cell::Float(v) => format_float(*v, precision),
        Cell::OptFloat(Some(v)) => format_float(*v, precision),
        Cell::OptFloat(None) => String::new(),
        Cell::Int(v) => v.to_string(),
    }
}

pub fn write_csv<W: Write>(w: W, table: &Table, precision: usize) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|c| cell_to_csv(c, precision)))?;
    }
    writer.flush()
}

pub fn write_csv_file(path: &Path, table: &Table, precision: usize) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(io::BufWriter::new(file), table, precision)
}

/// serde_json formatter printing every float with 17 significant digits.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn cell_to_json(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::Str(s) => serde_json::Value::String(s.clone()),
        Cell::Float(v) | Cell::OptFloat(Some(v)) => serde_json::Number::from_f64(*v)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
        Cell::OptFloat(None) => serde_json::Value::Null,
        Cell::Int(v) => serde_json::Value::Number((*v).into()),
    }
}

fn serialize_sigfig(value: &serde_json::Value) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigFormatter);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    Ok(buf)
}

pub fn write_json<W: Write>(mut w: W, table: &Table, metadata: &Metadata) -> io::Result<()> {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (col, cell) in table.columns.iter().zip(row.iter()) {
                obj.insert(col.clone(), cell_to_json(cell));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut root = serde_json::Map::new();
    root.insert("metadata".to_string(), metadata.to_json());
    root.insert("rows".to_string(), serde_json::Value::Array(rows));
    let buf = serialize_sigfig(&serde_json::Value::Object(root))?;
    w.write_all(&buf)?;
    writeln!(w)
}

pub fn write_metadata_file(path: &Path, metadata: &Metadata) -> io::Result<()> {
    let buf = serialize_sigfig(&metadata.to_json())?;
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&buf)?;
    writeln!(w)
}
