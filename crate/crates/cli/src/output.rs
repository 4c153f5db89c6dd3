//! Output helpers: fixed-precision JSON, JSON lines and CSV files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use nwa_core::assess::{fmt_sig, round_sig};
use serde_json::Value;

/// Serializes `value` with every float rounded to nine significant digits.
pub fn to_value<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    Ok(v)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            if let Some(x) = serde_json::Number::from_f64(r) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_value(value)?)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, json_string(value)?).with_context(|| format!("writing {}", path.display()))
}

/// Writes `value` to `path`, or to stdout if no path is given.
pub fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(json_string(value)?.as_bytes())?;
            Ok(())
        }
    }
}

/// One compact JSON object per line.
pub fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, &to_value(item)?)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// A CSV file with the given header; rows are written through [`Csv::row`].
pub struct Csv {
    writer: csv::Writer<File>,
}

impl Csv {
    pub fn create(path: &Path, header: &[&str]) -> Result<Csv> {
        let mut writer = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        writer.write_record(header)?;
        Ok(Csv { writer })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// A float formatted for CSV at nine significant digits.
pub fn num(v: f64) -> String {
    fmt_sig(v)
}
