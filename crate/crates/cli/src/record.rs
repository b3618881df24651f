//! Run records: raw per-`(n, rep)` observables as CSV plus a JSON manifest
//! with the configuration, aggregates and provenance.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use blockbeta_core::report::mean_and_se;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const CSV_NAME: &str = "runs.csv";
pub const RECORD_NAME: &str = "record.json";
pub const VERSION_TAG: &str = concat!("blockbeta ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub n: usize,
    pub rep: usize,
    pub f_vector: Vec<usize>,
    pub volume_deficit: Option<f64>,
    pub seed_stream: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub reps: usize,
    pub f0_mean: f64,
    pub f0_se: f64,
    pub f_means: Vec<f64>,
    pub volume_deficit_mean: Option<f64>,
    pub volume_deficit_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub exponent: f64,
    pub log_power: u32,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub dim: usize,
    /// Absent when some beta is negative.
    pub predicted: Option<Prediction>,
    pub rows: Vec<RawRow>,
    pub aggregates: Vec<Aggregate>,
    pub wall_clock_seconds: f64,
    pub csv_sha256: String,
}

/// Groups rows by `n` in order of appearance and sums in row order, so the
/// result depends only on the rows.
pub fn aggregate(rows: &[RawRow], dim: usize) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let n = rows[start].n;
        let end = start + rows[start..].iter().take_while(|r| r.n == n).count();
        let group = &rows[start..end];
        let f0: Vec<f64> = group.iter().map(|r| r.f_vector[0] as f64).collect();
        let (f0_mean, f0_se) = mean_and_se(&f0);
        let f_means =
            (0..dim).map(|j| group.iter().map(|r| r.f_vector[j] as f64).sum::<f64>() / group.len() as f64).collect();
        let deficits: Option<Vec<f64>> = group.iter().map(|r| r.volume_deficit).collect();
        let (vd_mean, vd_se) = match deficits {
            Some(v) => {
                let (m, se) = mean_and_se(&v);
                (Some(m), Some(se))
            }
            None => (None, None),
        };
        out.push(Aggregate {
            n,
            reps: group.len(),
            f0_mean,
            f0_se,
            f_means,
            volume_deficit_mean: vd_mean,
            volume_deficit_se: vd_se,
        });
        start = end;
    }
    out
}

pub fn csv_header(dim: usize) -> Vec<String> {
    let mut h = vec!["n".to_string(), "rep".to_string()];
    h.extend((0..dim).map(|j| format!("f_{j}")));
    h.push("volume_deficit".into());
    h.push("seed_stream".into());
    h
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(rows: &[RawRow], dim: usize) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let path = PathBuf::from(CSV_NAME);
    w.write_record(csv_header(dim)).map_err(CliError::csv(&path))?;
    for r in rows {
        let mut rec = vec![r.n.to_string(), r.rep.to_string()];
        rec.extend(r.f_vector.iter().map(|f| f.to_string()));
        rec.push(r.volume_deficit.map(format_float).unwrap_or_default());
        rec.push(r.seed_stream.to_string());
        w.write_record(&rec).map_err(CliError::csv(&path))?;
    }
    w.into_inner().map_err(|e| CliError::Record { path, message: e.to_string() })
}

pub fn read_csv(path: &Path) -> Result<(usize, Vec<RawRow>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
    let header: Vec<String> = rdr.headers().map_err(CliError::csv(path))?.iter().map(String::from).collect();
    let bad = |message: String| CliError::Record { path: path.to_path_buf(), message };
    if header.len() < 5 {
        return Err(bad(format!("header has {} columns", header.len())));
    }
    let dim = header.len() - 4;
    if header != csv_header(dim) {
        return Err(bad(format!("unexpected header {}", header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(CliError::csv(path))?;
        let line = i + 2;
        let int = |k: usize| -> Result<u64> {
            rec[k].parse::<u64>().map_err(|e| bad(format!("line {line}, column {}: {e}", header[k])))
        };
        let deficit = match &rec[dim + 2] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|e| bad(format!("line {line}, volume_deficit: {e}")))?),
        };
        rows.push(RawRow {
            n: int(0)? as usize,
            rep: int(1)? as usize,
            f_vector: (0..dim).map(|j| int(2 + j).map(|v| v as usize)).collect::<Result<_>>()?,
            volume_deficit: deficit,
            seed_stream: int(dim + 3)?,
        });
    }
    Ok((dim, rows))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunRecord {
    /// Writes `runs.csv` and `record.json` into `dir`, creating it.
    pub fn save(&mut self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        let bytes = write_csv(&self.rows, self.dim)?;
        self.csv_sha256 = sha256_hex(&bytes);
        let csv_path = dir.join(CSV_NAME);
        fs::write(&csv_path, &bytes).map_err(CliError::io(&csv_path))?;
        let json_path = dir.join(RECORD_NAME);
        let mut f = fs::File::create(&json_path).map_err(CliError::io(&json_path))?;
        serde_json::to_writer_pretty(&mut f, self).map_err(CliError::json(&json_path))?;
        writeln!(f).map_err(CliError::io(&json_path))?;
        Ok(())
    }

    /// Loads a record from its directory (or its `record.json`). The raw
    /// rows are taken from the CSV, which must match the manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let dir =
            if path.is_dir() { path.to_path_buf() } else { path.parent().unwrap_or(Path::new(".")).to_path_buf() };
        let json_path = if path.is_dir() { dir.join(RECORD_NAME) } else { path.to_path_buf() };
        let text = fs::read_to_string(&json_path).map_err(CliError::io(&json_path))?;
        let mut record: RunRecord = serde_json::from_str(&text).map_err(CliError::json(&json_path))?;
        let csv_path = dir.join(CSV_NAME);
        let bytes = fs::read(&csv_path).map_err(CliError::io(&csv_path))?;
        if sha256_hex(&bytes) != record.csv_sha256 {
            return Err(CliError::Record { path: csv_path, message: "checksum does not match record.json".into() });
        }
        let (dim, rows) = read_csv(&csv_path)?;
        if dim != record.dim || rows != record.rows {
            return Err(CliError::Record { path: csv_path, message: "rows differ from record.json".into() });
        }
        record.rows = rows;
        if aggregate(&record.rows, record.dim) != record.aggregates {
            return Err(CliError::Record {
                path: json_path,
                message: "aggregates are not reproducible from the raw rows".into(),
            });
        }
        Ok(record)
    }
}
