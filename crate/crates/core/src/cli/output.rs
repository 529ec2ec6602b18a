//! Record serialisation for the command line: aligned text, CSV, or JSON.

use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<u32> for Field {
    fn from(v: u32) -> Self {
        Field::Int(v as i64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Str(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Str(v)
    }
}

/// One output record: ordered snake_case keys with values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputRecord {
    fields: Vec<(&'static str, Field)>,
}

impl OutputRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &'static str, value: impl Into<Field>) -> &mut Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Field>) -> Self {
        self.push(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|(k, _)| *k)
    }
}

/// Formats `x` with `digits` significant digits, `%g` style: fixed notation
/// for decimal exponents in `[-4, digits)`, scientific otherwise, trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn render(field: &Field, digits: usize) -> String {
    match field {
        Field::Num(v) => format_sig(*v, digits),
        Field::Int(v) => v.to_string(),
        Field::Bool(v) => v.to_string(),
        Field::Str(s) => s.clone(),
    }
}

fn json_value(field: &Field, digits: usize) -> Value {
    match field {
        Field::Num(v) if v.is_finite() => {
            let text = format_sig(*v, digits);
            let parsed: f64 = text.parse().expect("format_sig emits a valid float");
            serde_json::Number::from_f64(parsed).map_or(Value::Null, Value::Number)
        }
        Field::Num(_) => Value::Null,
        Field::Int(v) => Value::from(*v),
        Field::Bool(v) => Value::Bool(*v),
        Field::Str(s) => Value::String(s.clone()),
    }
}

fn csv_cell(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// Union of keys in first-seen order, so records with optional fields still
/// share one header.
fn header(records: &[OutputRecord]) -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = Vec::new();
    for rec in records {
        for k in rec.keys() {
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
    }
    keys
}

pub fn write_records(records: &[OutputRecord], format: Format, digits: usize) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            let objects: Vec<Value> = records
                .iter()
                .map(|rec| {
                    let map: Map<String, Value> = rec
                        .fields
                        .iter()
                        .map(|(k, v)| (k.to_string(), json_value(v, digits)))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            let doc = if objects.len() == 1 {
                objects.into_iter().next().expect("one record")
            } else {
                Value::Array(objects)
            };
            out.push_str(&serde_json::to_string_pretty(&doc).expect("serialisable"));
            out.push('\n');
        }
        Format::Csv => {
            let keys = header(records);
            out.push_str(&keys.join(","));
            out.push('\n');
            for rec in records {
                let row: Vec<String> = keys
                    .iter()
                    .map(|k| {
                        rec.get(k)
                            .map_or(String::new(), |v| csv_cell(render(v, digits)))
                    })
                    .collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        Format::Text if records.len() == 1 => {
            let rec = &records[0];
            let width = rec.keys().map(str::len).max().unwrap_or(0);
            for (k, v) in &rec.fields {
                let _ = writeln!(out, "{k:<width$}  {}", render(v, digits));
            }
        }
        Format::Text => {
            let keys = header(records);
            let cells: Vec<Vec<String>> = records
                .iter()
                .map(|rec| {
                    keys.iter()
                        .map(|k| rec.get(k).map_or("-".to_string(), |v| render(v, digits)))
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = keys
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    cells
                        .iter()
                        .map(|row| row[i].len())
                        .chain([k.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |items: Vec<&str>| -> String {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            out.push_str(&line(keys.clone()));
            out.push('\n');
            for row in &cells {
                out.push_str(&line(row.iter().map(String::as_str).collect()));
                out.push('\n');
            }
        }
    }
    out
}
