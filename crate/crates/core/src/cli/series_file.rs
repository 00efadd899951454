//! CSV time series: a header row, one row per recorded time, and optionally a
//! trailing `# ...` comment line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::reference::Series;

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeriesFile {
    pub t: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
    /// Text of trailing comment lines, without the `#`.
    pub comments: Vec<String>,
}

impl SeriesFile {
    pub fn new(t: Vec<f64>) -> Self {
        SeriesFile { t, columns: Vec::new(), comments: Vec::new() }
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.t.len(), "column `{name}` length");
        self.columns.push((name.to_string(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn header(&self) -> Vec<&str> {
        std::iter::once("t").chain(self.columns.iter().map(|(n, _)| n.as_str())).collect()
    }

    pub fn write(&self, path: &Path, trailer: Option<&str>) -> std::io::Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(self.header())?;
            for (k, t) in self.t.iter().enumerate() {
                let row = std::iter::once(format_float(*t)).chain(self.columns.iter().map(|(_, v)| format_float(v[k])));
                w.write_record(row)?;
            }
            w.flush()?;
        }
        if let Some(text) = trailer {
            writeln!(out, "# {text}")?;
        }
        out.flush()
    }

    pub fn to_series(&self) -> Series {
        Series { t: self.t.clone(), columns: self.columns.clone() }
    }
}

#[derive(Debug)]
pub struct ReadError(String);

impl std::fmt::Display for ReadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ReadError {}

pub fn read_series(path: &Path) -> Result<SeriesFile, ReadError> {
    let text = std::fs::read_to_string(path).map_err(|e| ReadError(e.to_string()))?;
    let comments = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| ReadError(format!("header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("t") {
        return Err(ReadError("first column must be `t`".into()));
    }
    let mut series = SeriesFile::new(Vec::new());
    series.columns = header[1..].iter().map(|n| (n.clone(), Vec::new())).collect();
    series.comments = comments;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ReadError(format!("row {}: {e}", k + 1)))?;
        let parse = |s: &str| s.parse::<f64>().map_err(|_| ReadError(format!("row {}: invalid number `{s}`", k + 1)));
        let mut fields = record.iter();
        let t = parse(fields.next().unwrap_or(""))?;
        if let Some(&prev) = series.t.last() {
            if !(t > prev) {
                return Err(ReadError(format!("row {}: time is not increasing", k + 1)));
            }
        }
        series.t.push(t);
        for (column, field) in series.columns.iter_mut().zip(fields) {
            column.1.push(parse(field)?);
        }
    }
    Ok(series)
}
