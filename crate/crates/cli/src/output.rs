//! CSV and JSON rendering of command results.

use std::io::Write;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A command result: the JSON document, plus the rows that make up its
/// CSV form and lines that only go to stderr in CSV mode.
pub struct Rendered {
    pub json: Value,
    pub rows: Vec<Value>,
    pub notes: Vec<String>,
}

impl Rendered {
    /// A plain table; the JSON document is `{"rows": [...]}`.
    pub fn table<T: Serialize>(rows: &[T]) -> Result<Self> {
        let rows: Vec<Value> = rows.iter().map(serde_json::to_value).collect::<Result<_, _>>()?;
        Ok(Self {
            json: serde_json::json!({ "rows": rows }),
            rows,
            notes: Vec::new(),
        })
    }

    /// A single record rendered as a one-row table.
    pub fn record<T: Serialize>(record: &T) -> Result<Self> {
        let json = serde_json::to_value(record)?;
        Ok(Self {
            rows: vec![json.clone()],
            json,
            notes: Vec::new(),
        })
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => csv_bytes(&self.rows),
        }
    }
}

fn csv_bytes(rows: &[Value]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(map)) => map.keys().cloned().collect(),
        _ => Vec::new(),
    };
    if !header.is_empty() {
        writer.write_record(&header)?;
    }
    for row in rows {
        let cells: Vec<String> = header.iter().map(|k| cell(row.get(k).unwrap_or(&Value::Null))).collect();
        writer.write_record(&cells)?;
    }
    writer.into_inner().context("flushing CSV output")
}

fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format_sig12(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => value.to_string(),
    }
}

/// Twelve significant digits, positional notation unless the magnitude is
/// extreme.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding may carry into a new leading digit
        let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
        let leading_zeros = if exponent < 0 { (-exponent) as usize } else { 0 };
        if digits > 12 + leading_zeros && decimals > 0 {
            let decimals = decimals - 1;
            return format!("{x:.decimals$}");
        }
        s
    } else {
        format!("{x:.11e}")
    }
}

pub fn emit(rendered: &Rendered, format: Format, path: Option<&std::path::Path>) -> Result<()> {
    let bytes = rendered.encode(format)?;
    match path {
        Some(p) => std::fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    if format == Format::Csv {
        for note in &rendered.notes {
            eprintln!("{note}");
        }
    }
    Ok(())
}
