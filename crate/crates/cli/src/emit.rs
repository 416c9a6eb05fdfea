//! Output in the three formats. JSON floats carry 17 significant digits.

use std::io::{self, Write};

use anyhow::Result;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::args::Format;

/// Compact JSON with every float written as `{:.16e}`.
struct Precise;

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{v:.8e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf)?)
}

/// Rows for CSV and text output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

pub fn joined(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

/// Result of one command.
pub struct Emitted {
    pub json: Value,
    pub table: Table,
    /// False when a mathematical verdict came out negative.
    pub ok: bool,
}

fn write_csv(out: &mut dyn Write, t: &Table) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&t.headers)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_text(out: &mut dyn Write, t: &Table) -> Result<()> {
    if t.rows.len() == 1 {
        let width = t.headers.iter().map(String::len).max().unwrap_or(0);
        for (h, v) in t.headers.iter().zip(&t.rows[0]) {
            writeln!(out, "{h:<width$}  {v}")?;
        }
        return Ok(());
    }
    let widths: Vec<usize> = (0..t.headers.len())
        .map(|k| t.rows.iter().map(|r| r[k].len()).chain([t.headers[k].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(&t.headers))?;
    for r in &t.rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

pub fn write(out: &mut dyn Write, e: &Emitted, format: Format) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", to_json(&e.json)?)?,
        Format::Csv => write_csv(out, &e.table)?,
        Format::Text => write_text(out, &e.table)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&json!({"x": 0.1, "n": 3, "y": -2.5e-300})).unwrap();
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"n":3,"y":-2.5000000000000000e-300}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn table_numbers() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(2.220446049250313e-16), "2.220446049250313e-16");
        assert_eq!(num(-3e20), "-3e20");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn empty_table_is_header_only_csv() {
        let mut buf = Vec::new();
        let e = Emitted {
            json: json!([]),
            table: Table::new(["eps", "outcome"]),
            ok: true,
        };
        write(&mut buf, &e, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "eps,outcome\n");
    }

    #[test]
    fn csv_quotes_separators() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1,2".into(), "say \"hi\"".into()]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &t).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n\"1,2\",\"say \"\"hi\"\"\"\n");
    }
}
