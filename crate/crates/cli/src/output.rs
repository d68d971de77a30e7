//! CSV output: LF line endings and numbers rounded to 12 significant digits.

use std::io::Write;

use crate::CliError;

/// Rounds to 12 significant digits, then prints the shortest text that
/// reads back to the rounded value.
pub fn number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn optional(v: Option<f64>) -> String {
    v.map(number).unwrap_or_default()
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            debug_assert_eq!(r.len(), self.header.len());
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_string(&self) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Output(e.to_string())
}
