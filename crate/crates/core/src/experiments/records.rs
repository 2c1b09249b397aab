use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 14] = [
    "trial_idx",
    "seed",
    "n",
    "d",
    "eps",
    "p",
    "L1",
    "L2",
    "component_count",
    "gap_count",
    "merged",
    "isolated_class_count",
    "max_isolated_internal",
    "wall_time_ms",
];

/// Statistics of one percolation trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_idx: u64,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub p: f64,
    #[serde(rename = "L1")]
    pub l1: usize,
    #[serde(rename = "L2")]
    pub l2: usize,
    pub component_count: usize,
    pub gap_count: Option<usize>,
    pub merged: Option<bool>,
    pub isolated_class_count: Option<usize>,
    pub max_isolated_internal: Option<usize>,
    /// Filled only when timing is enabled, so that untimed output is reproducible.
    pub wall_time_ms: Option<f64>,
    /// Dense mode: probes whose ball misses every large component. Not a CSV column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense_zero_probes: Option<usize>,
    /// Full size multiset, kept only when a size dump was requested.
    #[serde(skip)]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    Csv,
    Json,
}

impl RecordFormat {
    /// `.json` selects JSON; anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => RecordFormat::Json,
            _ => RecordFormat::Csv,
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source: e,
    }
}

/// Writes the header and one row per record, LF terminated.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.trial_idx.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.eps.to_string(),
            r.p.to_string(),
            r.l1.to_string(),
            r.l2.to_string(),
            r.component_count.to_string(),
            opt(&r.gap_count),
            opt(&r.merged),
            opt(&r.isolated_class_count),
            opt(&r.max_isolated_internal),
            opt(&r.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = row.get(i).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("column {}: cannot parse {raw:?}", CSV_COLUMNS[i]),
    })
}

fn opt_field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: usize) -> Result<Option<T>> {
    if row.get(i).unwrap_or("").is_empty() {
        Ok(None)
    } else {
        field(row, i, line).map(Some)
    }
}

/// Parses records written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        out.push(TrialRecord {
            trial_idx: field(&row, 0, line)?,
            seed: field(&row, 1, line)?,
            n: field(&row, 2, line)?,
            d: field(&row, 3, line)?,
            eps: field(&row, 4, line)?,
            p: field(&row, 5, line)?,
            l1: field(&row, 6, line)?,
            l2: field(&row, 7, line)?,
            component_count: field(&row, 8, line)?,
            gap_count: opt_field(&row, 9, line)?,
            merged: opt_field(&row, 10, line)?,
            isolated_class_count: opt_field(&row, 11, line)?,
            max_isolated_internal: opt_field(&row, 12, line)?,
            wall_time_ms: opt_field(&row, 13, line)?,
            dense_zero_probes: None,
            sizes: None,
        });
    }
    Ok(out)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match RecordFormat::from_path(path) {
        RecordFormat::Csv => read_csv(file),
        RecordFormat::Json => serde_json::from_reader(file).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        }),
    }
}

/// Writes records to `path` as CSV or a JSON array.
pub fn emit_records(records: &[TrialRecord], format: RecordFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        RecordFormat::Csv => write_csv(records, &mut out).map_err(|e| csv_err(path, e))?,
        RecordFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Json {
                path: path.to_path_buf(),
                source: e,
            })?;
            out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Size dump: rows `trial_idx,size,count`, one per distinct component size,
/// sizes descending within a trial. Records without sizes are skipped.
pub fn write_size_dump<W: Write>(records: &[TrialRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["trial_idx", "size", "count"])?;
    for r in records {
        let Some(sizes) = &r.sizes else { continue };
        let mut i = 0;
        while i < sizes.len() {
            let s = sizes[i];
            let run = sizes[i..].iter().take_while(|&&x| x == s).count();
            w.write_record([r.trial_idx.to_string(), s.to_string(), run.to_string()])?;
            i += run;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_size_dump(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_size_dump(records, &mut out).map_err(|e| csv_err(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}
