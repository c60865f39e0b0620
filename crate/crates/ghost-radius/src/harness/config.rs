//! Flat `key = value` experiment configuration.
//!
//! The file format is one assignment per line, `#` comments, blank lines
//! ignored. Every key has a default, so an empty file is a valid config.
//! Grids are comma-separated numbers. CLI overrides arrive through
//! [`RawConfig::set`] before [`ExperimentConfig::from_raw`].
//!
//! Keys: seed, n_seeds, out_dir, arch, optimizer (adam|sgd), lr, momentum,
//! steps, eta_max, grad_clip, rho_mode (jvp|finite_diff), rho_every,
//! spike_step, spike_multiplier, spike_hold, arm, r_grid, t_grid, tau_grid,
//! n_random_dirs, r_targets, fixed_lrs, collapse_threshold, loss_target,
//! loss_ratio_threshold, dataset (blobs|csv), blobs_classes, blobs_dim,
//! blobs_per_class, blobs_spread, blobs_seed, split, csv_path, csv_label,
//! weights, slopes, logits, target, delta_grid, tau, beta.

use crate::controller::RhoMode;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Parsed but untyped key=value map.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    map: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Malformed(lineno + 1, line.to_string()));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { map })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad number {s:?}"))),
        }
    }

    fn get_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad integer {s:?}"))),
        }
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.get_u64(key, default as u64)? as usize)
    }

    fn get_string(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    fn get_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => parse_list(s).map_err(|e| Error::Config(format!("{key}: {e}"))),
        }
    }
}

pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {tok:?}"))
        })
        .collect()
}

/// Where samples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Blobs {
        n_classes: usize,
        dim: usize,
        per_class: usize,
        spread: f64,
        seed: u64,
    },
    Csv {
        path: PathBuf,
        label_column: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub source: DatasetSource,
    /// Train fraction of the seeded shuffle.
    pub split: f64,
}

/// Fully typed experiment configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Replication seeds: `seed .. seed + n_seeds`.
    pub n_seeds: usize,
    pub out_dir: PathBuf,
    pub arch: String,
    pub optimizer: String,
    pub lr: f64,
    pub momentum: f64,
    pub steps: usize,
    pub eta_max: f64,
    pub grad_clip: f64,
    pub rho_mode: RhoMode,
    pub rho_every: usize,
    pub spike_step: usize,
    pub spike_multiplier: f64,
    pub spike_hold: usize,
    /// Restrict spike/target-r runs to one arm; `None` runs all.
    pub arm: Option<String>,
    pub r_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub n_random_dirs: usize,
    pub r_targets: Vec<f64>,
    pub fixed_lrs: Vec<f64>,
    pub collapse_threshold: f64,
    pub loss_target: f64,
    pub loss_ratio_threshold: f64,
    pub dataset: DatasetSpec,
    /// Scalar-experiment inputs (zeros, radius, klcheck, crossover).
    pub weights: Vec<f64>,
    pub slopes: Vec<f64>,
    pub logits: Vec<f64>,
    pub target: usize,
    pub delta_grid: Vec<f64>,
    pub tau: f64,
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let seed = raw.get_u64("seed", 1)?;
        let dataset = DatasetSpec {
            source: match raw.get_string("dataset", "blobs").as_str() {
                "blobs" => DatasetSource::Blobs {
                    n_classes: raw.get_usize("blobs_classes", 10)?,
                    dim: raw.get_usize("blobs_dim", 16)?,
                    per_class: raw.get_usize("blobs_per_class", 50)?,
                    spread: raw.get_f64("blobs_spread", 2.0)?,
                    seed: raw.get_u64("blobs_seed", 7)?,
                },
                "csv" => DatasetSource::Csv {
                    path: PathBuf::from(raw.get_string("csv_path", "data.csv")),
                    label_column: raw.get_string("csv_label", "label"),
                },
                other => {
                    return Err(Error::Config(format!("unknown dataset {other:?}")));
                }
            },
            split: raw.get_f64("split", 0.8)?,
        };
        let rho_mode = match raw.get_string("rho_mode", "jvp").as_str() {
            "jvp" => RhoMode::Jvp,
            "finite_diff" => RhoMode::FiniteDiff,
            other => return Err(Error::Config(format!("unknown rho_mode {other:?}"))),
        };
        let cfg = Self {
            seed,
            dataset,
            n_seeds: raw.get_usize("n_seeds", 5)?,
            out_dir: PathBuf::from(raw.get_string("out_dir", "out")),
            arch: raw.get_string("arch", "mlp_relu"),
            optimizer: raw.get_string("optimizer", "adam"),
            lr: raw.get_f64("lr", 0.01)?,
            momentum: raw.get_f64("momentum", 0.9)?,
            steps: raw.get_usize("steps", 300)?,
            eta_max: raw.get_f64("eta_max", 1.0)?,
            grad_clip: raw.get_f64("grad_clip", 1.0)?,
            rho_mode,
            rho_every: raw.get_usize("rho_every", 1)?,
            spike_step: raw.get_usize("spike_step", 50)?,
            spike_multiplier: raw.get_f64("spike_multiplier", 1000.0)?,
            spike_hold: raw.get_usize("spike_hold", 150)?,
            arm: raw.get("arm").map(|s| s.to_string()),
            r_grid: raw.get_list("r_grid", &log_grid(0.01, 100.0, 25))?,
            t_grid: raw.get_list("t_grid", &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0])?,
            tau_grid: raw.get_list("tau_grid", &log_grid(1e-4, 1e4, 321))?,
            n_random_dirs: raw.get_usize("n_random_dirs", 20)?,
            r_targets: raw.get_list("r_targets", &[0.5, 1.0, 2.0, 4.0])?,
            fixed_lrs: raw.get_list("fixed_lrs", &[0.05, 0.5])?,
            collapse_threshold: raw.get_f64("collapse_threshold", 2.0)?,
            loss_target: raw.get_f64("loss_target", 0.1)?,
            loss_ratio_threshold: raw.get_f64("loss_ratio_threshold", 1.5)?,
            weights: raw.get_list("weights", &[1.0, 1.0])?,
            slopes: raw.get_list("slopes", &[0.0, 1.0])?,
            logits: raw.get_list("logits", &[2.0, 0.0])?,
            target: raw.get_usize("target", 0)?,
            delta_grid: raw.get_list("delta_grid", &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0])?,
            tau: raw.get_f64("tau", 0.1)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, grid) in [
            ("r_grid", &self.r_grid),
            ("t_grid", &self.t_grid),
            ("tau_grid", &self.tau_grid),
            ("r_targets", &self.r_targets),
            ("delta_grid", &self.delta_grid),
        ] {
            if grid.is_empty() {
                return Err(Error::Config(format!("{name} must be nonempty")));
            }
            if grid.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Config(format!("{name} entries must be positive")));
            }
        }
        if !(self.dataset.split > 0.0 && self.dataset.split < 1.0) {
            return Err(Error::Config("split must be in (0, 1)".into()));
        }
        if self.n_seeds == 0 || self.rho_every == 0 {
            return Err(Error::Config("n_seeds and rho_every must be >= 1".into()));
        }
        if !(self.spike_multiplier > 0.0) {
            return Err(Error::Config("spike_multiplier must be positive".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.n_seeds as u64).map(|i| self.seed + i).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_config() {
        let cfg = ExperimentConfig::from_raw(&RawConfig::default()).unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.n_seeds, 5);
        assert_eq!(cfg.arch, "mlp_relu");
        assert_eq!(cfg.t_grid.len(), 8);
        assert_eq!(cfg.seeds(), vec![1, 2, 3, 4, 5]);
        match cfg.dataset.source {
            DatasetSource::Blobs {
                n_classes,
                dim,
                per_class,
                ..
            } => {
                assert_eq!((n_classes, dim, per_class), (10, 16, 50));
            }
            _ => panic!("default dataset should be blobs"),
        }
    }

    #[test]
    fn parse_and_override() {
        let mut raw = RawConfig::parse(
            "# comment\n\nseed = 9\nr_grid = 0.1, 1, 10\narch=linear\nspike_multiplier = 100\n",
        )
        .unwrap();
        raw.set("seed", "11");
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.r_grid, vec![0.1, 1.0, 10.0]);
        assert_eq!(cfg.arch, "linear");
        assert_eq!(cfg.spike_multiplier, 100.0);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = RawConfig::parse("seed = 1\nnot an assignment\n").unwrap_err();
        match err {
            Error::Malformed(line, text) => {
                assert_eq!(line, 2);
                assert!(text.contains("not an assignment"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn invalid_values_rejected() {
        let raw = RawConfig::parse("r_grid = 1, -2\n").unwrap();
        assert!(ExperimentConfig::from_raw(&raw).is_err());
        let raw = RawConfig::parse("split = 1.5\n").unwrap();
        assert!(ExperimentConfig::from_raw(&raw).is_err());
        let raw = RawConfig::parse("lr = abc\n").unwrap();
        assert!(ExperimentConfig::from_raw(&raw).is_err());
        let raw = RawConfig::parse("rho_mode = magic\n").unwrap();
        assert!(ExperimentConfig::from_raw(&raw).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 100.0, 25);
        assert_eq!(g.len(), 25);
        assert!((g[0] - 0.01).abs() < 1e-12);
        assert!((g[24] - 100.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
