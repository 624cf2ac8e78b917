use std::io::{self, Write};

use serde::Serialize;

use crate::protocol::Scheme;

pub const CSV_VERSION_LINE: &str = "# gc3-results v1";
pub const CSV_HEADER: &str = "N,scheme,trials,failures,p_hat,ci_low,ci_high,mean_energy,mean_edges,t,bound_sum,bound_closed,bound_naive,lower_energy,flags";

/// One `(N, scheme)` cell. Simulation columns are empty for formula-only rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub scheme: Scheme,
    pub trials: Option<u64>,
    pub failures: Option<u64>,
    pub p_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub mean_energy: Option<f64>,
    pub mean_edges: Option<f64>,
    pub t: Option<u32>,
    pub bound_sum: Option<f64>,
    pub bound_closed: Option<f64>,
    pub bound_naive: Option<f64>,
    pub lower_energy: Option<f64>,
    /// `formula:precondition` for each failed precondition and
    /// `formula:vacuous` for probability bounds above 1.
    pub flags: Vec<String>,
}

fn float(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.11e}")).unwrap_or_default()
}

fn int<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        [
            self.n.to_string(),
            self.scheme.name().to_string(),
            int(self.trials),
            int(self.failures),
            float(self.p_hat),
            float(self.ci_low),
            float(self.ci_high),
            float(self.mean_energy),
            float(self.mean_edges),
            int(self.t),
            float(self.bound_sum),
            float(self.bound_closed),
            float(self.bound_naive),
            float(self.lower_energy),
            self.flags.join(";"),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Streams CSV rows as they arrive; JSON is written as one document on
/// [`RowWriter::finish`].
pub struct RowWriter<W: Write> {
    out: W,
    format: Format,
    rows: Vec<ResultRow>,
    header_written: bool,
}

impl<W: Write> RowWriter<W> {
    pub fn new(out: W, format: Format) -> Self {
        Self {
            out,
            format,
            rows: Vec::new(),
            header_written: false,
        }
    }

    fn header(&mut self) -> io::Result<()> {
        if !self.header_written && self.format == Format::Csv {
            writeln!(self.out, "{CSV_VERSION_LINE}")?;
            writeln!(self.out, "{CSV_HEADER}")?;
        }
        self.header_written = true;
        Ok(())
    }

    pub fn push(&mut self, row: &ResultRow) -> io::Result<()> {
        self.header()?;
        match self.format {
            Format::Csv => {
                writeln!(self.out, "{}", row.csv_line())?;
                self.out.flush()
            }
            Format::Json => {
                self.rows.push(row.clone());
                Ok(())
            }
        }
    }

    /// `extra` is attached to the JSON document (e.g. sweep summaries); CSV
    /// output ignores it.
    pub fn finish(mut self, extra: Option<serde_json::Value>) -> io::Result<W> {
        self.header()?;
        if self.format == Format::Json {
            let mut doc = serde_json::json!({ "schema": "gc3-results/1", "rows": self.rows });
            if let Some(extra) = extra {
                doc["summary"] = extra;
            }
            serde_json::to_writer_pretty(&mut self.out, &doc)?;
            writeln!(self.out)?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}
