use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError, TrialRecord};

pub const CRATE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads and validates a JSON experiment config.
pub fn read_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(io_err(path))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Results table with header
/// `penalty,s,replicate,seed,rel_error,success,outer_iters,wall_time`.
pub fn write_records_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record([
            "penalty",
            "s",
            "replicate",
            "seed",
            "rel_error",
            "success",
            "outer_iters",
            "wall_time",
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        let mut rec: TrialRecord = row?;
        rec.converged = true;
        out.push(rec);
    }
    Ok(out)
}

/// Success rate of one `(penalty, s)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub penalty: String,
    pub s: usize,
    pub success_rate: f64,
}

/// Rates per `(penalty, s)`, in order of first appearance.
pub fn success_table(records: &[TrialRecord]) -> Vec<RateRow> {
    let mut order: Vec<(String, usize)> = Vec::new();
    let mut counts: BTreeMap<(String, usize), (usize, usize)> = BTreeMap::new();
    for r in records {
        let key = (r.penalty.clone(), r.s);
        let entry = counts.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (0, 0)
        });
        entry.0 += r.success as usize;
        entry.1 += 1;
    }
    order
        .into_iter()
        .map(|key| {
            let (hits, total) = counts[&key];
            RateRow {
                penalty: key.0,
                s: key.1,
                success_rate: hits as f64 / total as f64,
            }
        })
        .collect()
}

/// Plot data `penalty,s,success_rate`.
pub fn write_success_csv<W: Write>(out: W, rows: &[RateRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["penalty", "s", "success_rate"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Two-column numeric table, e.g. `t,scaled_penalty`.
pub fn write_curve_csv<W: Write>(
    out: W,
    header: [&str; 2],
    rows: impl IntoIterator<Item = (f64, f64)>,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (a, b) in rows {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Sidecar JSON describing a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub crate_version: String,
    /// Seconds since the Unix epoch at write time.
    pub timestamp: u64,
    pub records: usize,
    /// Per penalty, the number of trials whose solver did not converge.
    pub not_converged: BTreeMap<String, usize>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, records: &[TrialRecord]) -> Self {
        let mut not_converged = BTreeMap::new();
        for r in records {
            *not_converged.entry(r.penalty.clone()).or_insert(0) += (!r.converged) as usize;
        }
        Self {
            config: config.clone(),
            crate_version: CRATE_VERSION.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            records: records.len(),
            not_converged,
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, manifest)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(io_err(path))?;
    Ok(())
}
