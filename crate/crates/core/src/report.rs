//! Ordered records and their CSV / JSON-lines serialization.
//!
//! Floats are printed with 12 significant digits (`%.12g` style), so reports
//! are byte-stable across runs and platforms.

use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    UInt(u128),
    Float(f64),
    Bool(bool),
    Str(String),
    Empty,
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v as u128)
    }
}

impl From<u128> for Value {
    fn from(v: u128) -> Self {
        Value::UInt(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v as i128)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::UInt(v as u128)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::UInt(v as u128)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

/// Formats like C's `%.12g`.
pub fn fmt_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::UInt(v) => v.to_string(),
            Value::Float(v) => fmt_g12(*v),
            Value::Bool(v) => v.to_string(),
            Value::Str(s) => s.clone(),
            Value::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Float(v) if !v.is_finite() => "null".into(),
            Value::Str(s) => serde_json::to_string(s).expect("string serializes"),
            Value::Empty => "null".into(),
            other => other.text(),
        }
    }
}

/// One output row with a fixed column order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn push(&mut self, key: &'static str, value: impl Into<Value>) {
        self.fields.push((key, value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> Vec<&'static str> {
        self.fields.iter().map(|(k, _)| *k).collect()
    }

    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("key"), v.json()))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "jsonl" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Streams records; a CSV header is written before the first row.
pub struct RecordWriter<W: Write> {
    format: Format,
    out: W,
    header: bool,
}

fn csv_line<S: AsRef<[u8]>>(fields: &[S]) -> std::io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(fields)?;
    w.into_inner().map_err(|e| e.into_error())
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, format: Format) -> Self {
        RecordWriter {
            format,
            out,
            header: false,
        }
    }

    /// Writes the CSV header even if no row follows.
    pub fn write_header(&mut self, keys: &[&'static str]) -> std::io::Result<()> {
        if self.format == Format::Csv && !self.header {
            self.out.write_all(&csv_line(keys)?)?;
            self.header = true;
        }
        Ok(())
    }

    pub fn write(&mut self, rec: &Record) -> std::io::Result<()> {
        match self.format {
            Format::Csv => {
                self.write_header(&rec.keys())?;
                let row: Vec<String> = rec.fields.iter().map(|(_, v)| v.text()).collect();
                self.out.write_all(&csv_line(&row)?)
            }
            Format::Json => writeln!(self.out, "{}", rec.to_json()),
        }
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}
