//! Tables, JSON/CSV rendering and atomic file output.
//!
//! Every float is written as `{:.16e}` (17 significant digits), so identical
//! runs give byte-identical files. Infinite values never appear as numbers:
//! they are the string `"inf"` next to a `<name>_infinite` flag.

use std::io::{self, Write};
use std::path::Path;

use scarf_core::Extended;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => num(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A JSON number; non-finite input becomes `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// One table row, built column by column.
#[derive(Debug, Default)]
pub struct Row(Vec<(String, Cell)>);

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, name: &str, v: f64) -> Self {
        let cell = if v.is_finite() { Cell::Num(v) } else { Cell::Null };
        self.0.push((name.into(), cell));
        self
    }

    pub fn opt(self, name: &str, v: Option<f64>) -> Self {
        match v {
            Some(v) => self.num(name, v),
            None => self.null(name),
        }
    }

    pub fn int(mut self, name: &str, v: i64) -> Self {
        self.0.push((name.into(), Cell::Int(v)));
        self
    }

    pub fn opt_int(mut self, name: &str, v: Option<i64>) -> Self {
        self.0.push((name.into(), v.map_or(Cell::Null, Cell::Int)));
        self
    }

    pub fn flag(mut self, name: &str, v: bool) -> Self {
        self.0.push((name.into(), Cell::Bool(v)));
        self
    }

    pub fn text(mut self, name: &str, v: impl Into<String>) -> Self {
        self.0.push((name.into(), Cell::Text(v.into())));
        self
    }

    pub fn null(mut self, name: &str) -> Self {
        self.0.push((name.into(), Cell::Null));
        self
    }

    /// Two columns: the value (or `"inf"`) and `<name>_infinite`.
    pub fn ext(mut self, name: &str, v: Extended<f64>) -> Self {
        let (cell, inf) = match v {
            Extended::Finite(x) => (Cell::Num(x), false),
            Extended::Infinite => (Cell::Text("inf".into()), true),
        };
        self.0.push((name.into(), cell));
        self.0.push((format!("{name}_infinite"), Cell::Bool(inf)));
        self
    }

    /// Same columns as [`Row::ext`], both empty.
    pub fn ext_missing(self, name: &str) -> Self {
        let flag = format!("{name}_infinite");
        self.null(name).null(&flag)
    }
}

#[derive(Debug, Clone, PartialEq)]
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

    /// Table whose columns are taken from the first row.
    pub fn from_rows(rows: Vec<Row>) -> Self {
        let columns = rows
            .first()
            .map(|r| r.0.iter().map(|(k, _)| k.clone()).collect())
            .unwrap_or_default();
        let mut t = Table {
            columns,
            rows: Vec::new(),
        };
        for r in rows {
            t.push(r);
        }
        t
    }

    pub fn push(&mut self, row: Row) {
        let names: Vec<&str> = row.0.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(names, self.columns, "row columns differ from table header");
        self.rows.push(row.0.into_iter().map(|(_, v)| v).collect());
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.clone(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A command's result: metadata plus named tables. CSV output carries only
/// the primary (first) table.
#[derive(Debug)]
pub struct Document {
    pub command: &'static str,
    pub meta: Vec<(String, Value)>,
    pub tables: Vec<(String, Table)>,
}

impl Document {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            meta: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, v: Value) -> Self {
        self.meta.push((key.into(), v));
        self
    }

    pub fn table(mut self, name: &str, t: Table) -> Self {
        self.tables.push((name.into(), t));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn to_json_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("schema".into(), Value::from(1));
        obj.insert("command".into(), Value::from(self.command));
        for (k, v) in &self.meta {
            obj.insert(k.clone(), v.clone());
        }
        for (k, t) in &self.tables {
            obj.insert(k.clone(), t.to_json());
        }
        Value::Object(obj)
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = to_json_bytes(&self.to_json_value())?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => match self.tables.first() {
                Some((_, t)) => t.to_csv(),
                None => Ok(Vec::new()),
            },
        }
    }
}

/// Pretty printer that writes every float with 17 significant digits.
struct FixedFloats(PrettyFormatter<'static>);

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_bytes(v: &Value) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    serde::Serialize::serialize(v, &mut ser).map_err(io::Error::other)?;
    Ok(out)
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
