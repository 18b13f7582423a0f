//! CSV and JSON rendering of command output.

use cmc_moduli::export::fmt_f64;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Pretty JSON with a trailing newline.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// One-row CSV of a record; nested objects and arrays become dotted columns.
pub fn csv_record<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("output types serialize");
    let mut cols = Vec::new();
    flatten("", &value, &mut cols);
    csv_table(
        &cols.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>(),
        &[cols.iter().map(|(_, v)| v.clone()).collect()],
    )
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output")
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::Number(n) if n.is_f64() => {
            out.push((prefix.to_string(), fmt_f64(n.as_f64().unwrap_or(f64::NAN))))
        }
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), String::new())),
    }
}
