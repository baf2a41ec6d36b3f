//! Tab-separated and JSON output.
//!
//! Sweep tables put `delta` in the first column and one column per method;
//! an empty cell marks a method that was inapplicable at that step.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use lti_reach::discretize::Method;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One (δ, method) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub delta: f64,
    pub method: String,
    /// `ρ(d, Ω₀)`, absent when the method does not apply.
    pub support: Option<f64>,
    pub seconds: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub methods: Vec<String>,
    /// `(δ, one entry per method)`.
    pub rows: Vec<(f64, Vec<Option<f64>>)>,
}

/// Column names: method labels, or short names when labels collide.
pub fn column_names(methods: &[Method]) -> Vec<String> {
    let labels: Vec<String> = methods.iter().map(Method::label).collect();
    let mut sorted = labels.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() == labels.len() {
        labels
    } else {
        methods.iter().map(Method::short_name).collect()
    }
}

impl SweepTable {
    /// Builds the table from records laid out δ-major, `methods.len()` per row.
    pub fn from_records(
        records: &[SweepRecord],
        methods: Vec<String>,
        pick: impl Fn(&SweepRecord) -> Option<f64>,
    ) -> Self {
        let width = methods.len().max(1);
        let rows = records
            .chunks(width)
            .map(|row| (row[0].delta, row.iter().map(&pick).collect()))
            .collect();
        SweepTable { methods, rows }
    }

    pub fn write_tsv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
        let err = |e: csv::Error| CliError::Output(e.to_string());
        let mut header = vec!["delta".to_string()];
        header.extend(self.methods.iter().cloned());
        out.write_record(&header).map_err(err)?;
        for (delta, vals) in &self.rows {
            let mut rec = vec![delta.to_string()];
            rec.extend(vals.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            out.write_record(&rec).map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_tsv<R: Read>(r: R) -> Result<Self, CliError> {
        let mut rd = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(r);
        let err = |e: csv::Error| CliError::Output(e.to_string());
        let header = rd.headers().map_err(err)?.clone();
        if header.get(0) != Some("delta") {
            return Err(CliError::Output("first column must be \"delta\"".into()));
        }
        let methods = header.iter().skip(1).map(String::from).collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::Output(format!("not a number: {s:?}")))
        };
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(err)?;
            let delta = num(&rec[0])?;
            let vals = rec
                .iter()
                .skip(1)
                .map(|s| if s.is_empty() { Ok(None) } else { num(s).map(Some) })
                .collect::<Result<_, _>>()?;
            rows.push((delta, vals));
        }
        Ok(SweepTable { methods, rows })
    }
}

pub fn create_file(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok((path, BufWriter::new(f)))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let (path, mut w) = create_file(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes rows of cells as tab-separated values.
pub fn write_rows<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    let err = |e: csv::Error| CliError::Output(e.to_string());
    out.write_record(header).map_err(err)?;
    for r in rows {
        out.write_record(r).map_err(err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}
