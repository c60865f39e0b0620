//! Result records and their CSV / JSONL emission.
//!
//! Schemas are stable:
//! - `steps.csv`: step, loss, test_acc, tau, rho_a, r, lr_effective, arm, seed
//! - `sweep.csv`: param, loss_ratio, retained_acc, flip_fraction,
//!   direction_id, seed
//!
//! Floats use Rust's shortest round-trip formatting; non-finite values are
//! the literals `inf`, `-inf`, `nan`. A divergent run keeps its rows (the
//! diverging step logs `inf` loss) and sets `divergent=true` in
//! `summary.json`.

use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub step: usize,
    pub loss: f64,
    pub test_acc: f64,
    pub tau: f64,
    pub rho_a: f64,
    pub r: f64,
    pub lr_effective: f64,
    pub arm: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Sweep parameter: r, T, or tau depending on the experiment.
    pub param: f64,
    pub loss_ratio: f64,
    pub retained_acc: f64,
    pub flip_fraction: f64,
    pub direction_id: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    pub steps: Vec<StepRow>,
    pub sweeps: Vec<SweepRow>,
    pub divergent: bool,
    /// Experiment-level scalars (medians, IQRs, onset stds, ...).
    pub summary: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => s
            .parse()
            .map_err(|_| Error::Config(format!("bad float {s:?}"))),
    }
}

pub const STEPS_HEADER: &str = "step,loss,test_acc,tau,rho_a,r,lr_effective,arm,seed";
pub const SWEEP_HEADER: &str = "param,loss_ratio,retained_acc,flip_fraction,direction_id,seed";

pub fn steps_to_csv(rows: &[StepRow]) -> String {
    let mut out = String::from(STEPS_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.step,
            format_f64(r.loss),
            format_f64(r.test_acc),
            format_f64(r.tau),
            format_f64(r.rho_a),
            format_f64(r.r),
            format_f64(r.lr_effective),
            r.arm,
            r.seed
        )
        .unwrap();
    }
    out
}

pub fn sweeps_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_f64(r.param),
            format_f64(r.loss_ratio),
            format_f64(r.retained_acc),
            format_f64(r.flip_fraction),
            r.direction_id,
            r.seed
        )
        .unwrap();
    }
    out
}

pub fn parse_steps_csv(text: &str) -> Result<Vec<StepRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != STEPS_HEADER {
        return Err(Error::Malformed(1, format!("bad header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::Malformed(i + 2, line.into()));
        }
        rows.push(StepRow {
            step: f[0]
                .parse()
                .map_err(|_| Error::Malformed(i + 2, line.into()))?,
            loss: parse_f64(f[1])?,
            test_acc: parse_f64(f[2])?,
            tau: parse_f64(f[3])?,
            rho_a: parse_f64(f[4])?,
            r: parse_f64(f[5])?,
            lr_effective: parse_f64(f[6])?,
            arm: f[7].to_string(),
            seed: f[8]
                .parse()
                .map_err(|_| Error::Malformed(i + 2, line.into()))?,
        });
    }
    Ok(rows)
}

pub fn parse_sweeps_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != SWEEP_HEADER {
        return Err(Error::Malformed(1, format!("bad header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(Error::Malformed(i + 2, line.into()));
        }
        rows.push(SweepRow {
            param: parse_f64(f[0])?,
            loss_ratio: parse_f64(f[1])?,
            retained_acc: parse_f64(f[2])?,
            flip_fraction: parse_f64(f[3])?,
            direction_id: f[4].to_string(),
            seed: f[5]
                .parse()
                .map_err(|_| Error::Malformed(i + 2, line.into()))?,
        });
    }
    Ok(rows)
}

fn steps_to_jsonl(rows: &[StepRow]) -> String {
    let mut out = String::new();
    for r in rows {
        writeln!(
            out,
            r#"{{"step":{},"loss":"{}","test_acc":"{}","tau":"{}","rho_a":"{}","r":"{}","lr_effective":"{}","arm":"{}","seed":{}}}"#,
            r.step,
            format_f64(r.loss),
            format_f64(r.test_acc),
            format_f64(r.tau),
            format_f64(r.rho_a),
            format_f64(r.r),
            format_f64(r.lr_effective),
            r.arm,
            r.seed
        )
        .unwrap();
    }
    out
}

fn sweeps_to_jsonl(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for r in rows {
        writeln!(
            out,
            r#"{{"param":"{}","loss_ratio":"{}","retained_acc":"{}","flip_fraction":"{}","direction_id":"{}","seed":{}}}"#,
            format_f64(r.param),
            format_f64(r.loss_ratio),
            format_f64(r.retained_acc),
            format_f64(r.flip_fraction),
            r.direction_id,
            r.seed
        )
        .unwrap();
    }
    out
}

fn summary_json(record: &RunRecord) -> String {
    let mut out = String::from("{\n");
    writeln!(out, "  \"divergent\": {},", record.divergent).unwrap();
    let entries: Vec<String> = record
        .summary
        .iter()
        .map(|(k, v)| format!("  \"{k}\": \"{}\"", format_f64(*v)))
        .collect();
    out.push_str(&entries.join(",\n"));
    if !entries.is_empty() {
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

/// Write `steps.{csv|jsonl}`, `sweep.{csv|jsonl}`, and `summary.json` under
/// `out_dir`.
pub fn emit(record: &RunRecord, format: Format, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    match format {
        Format::Csv => {
            std::fs::write(out_dir.join("steps.csv"), steps_to_csv(&record.steps))?;
            std::fs::write(out_dir.join("sweep.csv"), sweeps_to_csv(&record.sweeps))?;
        }
        Format::Jsonl => {
            std::fs::write(out_dir.join("steps.jsonl"), steps_to_jsonl(&record.steps))?;
            std::fs::write(out_dir.join("sweep.jsonl"), sweeps_to_jsonl(&record.sweeps))?;
        }
    }
    std::fs::write(out_dir.join("summary.json"), summary_json(record))?;
    Ok(())
}

/// Median of a nonempty slice (copied and sorted).
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Interquartile range via linear-interpolation quartiles.
pub fn iqr(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let frac = pos - lo as f64;
        if lo + 1 < v.len() {
            v[lo] * (1.0 - frac) + v[lo + 1] * frac
        } else {
            v[lo]
        }
    };
    q(0.75) - q(0.25)
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}
