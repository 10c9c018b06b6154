use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rectangular table of reals plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, Value>,
}

impl OutputTable {
    pub fn new(header: &[&str]) -> Self {
        OutputTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row arity must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer(&mut *out, self)?;
                writeln!(out)
            }
        }
    }

    /// Metadata as `# key: json` comment lines, then an RFC 4180 table.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&x| format_real(x)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest form for integral values, otherwise 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.16e}")
    }
}
