use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // NaN and infinities have no JSON literal
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Everything one command emits: the parameter block, optional scalar
/// results, and a table.
#[derive(Debug, Default)]
pub struct Artifact {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Artifact {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn columns<S: AsRef<str>>(&mut self, names: &[S]) {
        self.columns = names.iter().map(|s| s.as_ref().to_string()).collect();
    }

    fn write_csv<W: Write>(&self, mut out: W, timestamp: Option<u64>) -> io::Result<()> {
        writeln!(out, "# fcount {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# command: {}", self.command)?;
        for (k, v) in &self.params {
            writeln!(out, "# {k}: {v}")?;
        }
        if let Some(seed) = self.seed {
            writeln!(out, "# seed: {seed}")?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# {k}: {}", v.to_csv())?;
        }
        if let Some(ts) = timestamp {
            writeln!(out, "# generated_unix: {ts}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.flush()
    }

    fn to_json(&self, timestamp: Option<u64>) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("tool".into(), json!("fcount"));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        doc.insert("command".into(), json!(self.command));
        doc.insert("params".into(), Value::Object(params));
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("summary".into(), Value::Object(summary));
        if let Some(ts) = timestamp {
            doc.insert("generated_unix".into(), json!(ts));
        }
        doc.insert("columns".into(), json!(self.columns));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn emit(&self, format: Format, path: Option<&Path>, stamp: bool) -> io::Result<()> {
        let timestamp = stamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        let mut sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        match format {
            Format::Csv => self.write_csv(&mut sink, timestamp)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut sink, &self.to_json(timestamp))?;
                writeln!(sink)?;
            }
        }
        sink.flush()
    }
}
