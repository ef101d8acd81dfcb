//! Bit-stable report serialization: JSON with sorted keys and 17 significant
//! digits, CSV with a header row, and a plain aligned table.

use std::io::{self, Write};
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Serializes non-finite floats as strings (`"inf"`, `"-inf"`, `"nan"`).
pub fn finite_or_string<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Float as 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct StableFloats;

impl Formatter for StableFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// JSON text with object keys sorted and floats at 17 significant digits.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    // `Value` objects are BTreeMap-backed, which sorts the keys.
    let value = serde_json::to_value(report)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, StableFloats);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("JSON is UTF-8"))
}

/// Parses a report back into a JSON value.
pub fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

/// A rectangular table of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e.to_string())
}

/// Flattens a JSON object into a two-column key/value table.
pub fn value_table(value: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    fn walk(prefix: &str, v: &Value, t: &mut Table) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, t);
                }
            }
            Value::Number(n) => t.push(vec![
                prefix.to_string(),
                n.as_f64()
                    .filter(|_| n.is_f64())
                    .map(fmt_f64)
                    .unwrap_or_else(|| n.to_string()),
            ]),
            Value::String(s) => t.push(vec![prefix.to_string(), s.clone()]),
            other => t.push(vec![prefix.to_string(), other.to_string()]),
        }
    }
    walk("", value, &mut t);
    t
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        zeta: u32,
        alpha: f64,
        #[serde(serialize_with = "finite_or_string")]
        gap: f64,
    }

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let s = Sample {
            zeta: 3,
            alpha: 2.0 - 3f64.sqrt(),
            gap: f64::INFINITY,
        };
        let text = to_json(&s).unwrap();
        assert_eq!(
            text,
            "{\"alpha\":2.6794919243112281e-1,\"gap\":\"inf\",\"zeta\":3}\n"
        );
        let back = parse_json(&text).unwrap();
        assert_eq!(back["alpha"].as_f64().unwrap(), 2.0 - 3f64.sqrt());
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn csv_has_header() {
        let mut t = Table::new(&["n", "ball"]);
        t.push(vec!["0".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "n,ball\n0,1\n");
    }
}
