//! Deterministic datasets: seeded Gaussian blobs and a CSV loader.
//!
//! Features are standardized to zero mean and unit variance using train-set
//! statistics; the train/test split is a seeded shuffle, so the same spec
//! always yields the same bytes.

use super::config::{DatasetSource, DatasetSpec};
use crate::autonet::Batch;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Batch,
    pub test: Batch,
    pub n_classes: usize,
    pub dim: usize,
}

/// Standard normal via Box-Muller; two uniforms per draw keeps the stream
/// layout independent of call parity.
pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    let (rows, labels, n_classes, seed) = match &spec.source {
        DatasetSource::Blobs {
            n_classes,
            dim,
            per_class,
            spread,
            seed,
        } => {
            if *n_classes < 2 || *dim == 0 || *per_class == 0 {
                return Err(Error::Config("blobs need >= 2 classes, dim/per_class >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            // class centers at scale 2.0: separated but overlapping at the
            // default within-class spread, so accuracy rewards precision
            let centers: Vec<Vec<f64>> = (0..*n_classes)
                .map(|_| (0..*dim).map(|_| 2.0 * normal(&mut rng)).collect())
                .collect();
            let mut rows = Vec::with_capacity(n_classes * per_class);
            let mut labels = Vec::with_capacity(n_classes * per_class);
            for (c, center) in centers.iter().enumerate() {
                for _ in 0..*per_class {
                    rows.push(
                        center
                            .iter()
                            .map(|&m| m + spread * normal(&mut rng))
                            .collect(),
                    );
                    labels.push(c);
                }
            }
            (rows, labels, *n_classes, *seed)
        }
        DatasetSource::Csv { path, label_column } => {
            let (rows, labels, n_classes) = load_csv(path, label_column)?;
            (rows, labels, n_classes, 0x00c5_413f)
        }
    };

    let n = rows.len();
    let n_train = ((n as f64) * spec.split).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Config(format!(
            "split {} leaves an empty train or test set",
            spec.split
        )));
    }

    // seeded Fisher-Yates over indices
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_1117);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let take = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            idx.iter().map(|&i| rows[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (mut train_x, train_y) = take(&order[..n_train]);
    let (mut test_x, test_y) = take(&order[n_train..]);

    // standardize with train statistics
    let dim = train_x[0].len();
    let nt = train_x.len() as f64;
    let mut mean = vec![0.0; dim];
    for row in &train_x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / nt;
        }
    }
    let mut std = vec![0.0; dim];
    for row in &train_x {
        for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m) / nt;
        }
    }
    for s in &mut std {
        *s = s.sqrt().max(1e-8);
    }
    for row in train_x.iter_mut().chain(test_x.iter_mut()) {
        for ((v, m), s) in row.iter_mut().zip(&mean).zip(&std) {
            *v = (*v - m) / s;
        }
    }

    Ok(Dataset {
        train: Batch::new(train_x, train_y)?,
        test: Batch::new(test_x, test_y)?,
        n_classes,
        dim,
    })
}

/// CSV with a header row; `label_column` holds nonnegative integer class
/// ids, every other column is a feature.
fn load_csv(path: &Path, label_column: &str) -> Result<(Vec<Vec<f64>>, Vec<usize>, usize)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Malformed(1, "empty file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let label_idx = columns
        .iter()
        .position(|&c| c == label_column)
        .ok_or_else(|| Error::Config(format!("label column {label_column:?} not in header")))?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::Malformed(
                lineno + 1,
                format!("expected {} fields, got {}", columns.len(), fields.len()),
            ));
        }
        let label: usize = fields[label_idx]
            .parse()
            .map_err(|_| Error::Malformed(lineno + 1, format!("bad label {:?}", fields[label_idx])))?;
        let mut row = Vec::with_capacity(columns.len() - 1);
        for (i, f) in fields.iter().enumerate() {
            if i == label_idx {
                continue;
            }
            row.push(f.parse::<f64>().map_err(|_| {
                Error::Malformed(lineno + 1, format!("bad feature {f:?} in column {:?}", columns[i]))
            })?);
        }
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::NoSamples);
    }
    let n_classes = labels.iter().max().unwrap() + 1;
    if n_classes < 2 {
        return Err(Error::Config("need >= 2 classes".into()));
    }
    if labels.iter().any(|&l| l >= n_classes) {
        unreachable!("max bound");
    }
    Ok((rows, labels, n_classes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs_spec() -> DatasetSpec {
        DatasetSpec {
            source: DatasetSource::Blobs {
                n_classes: 10,
                dim: 16,
                per_class: 50,
                spread: 1.0,
                seed: 7,
            },
            split: 0.8,
        }
    }

    #[test]
    fn blobs_counts_and_split() {
        let d = load_dataset(&blobs_spec()).unwrap();
        assert_eq!(d.train.len(), 400);
        assert_eq!(d.test.len(), 100);
        assert_eq!(d.n_classes, 10);
        assert_eq!(d.dim, 16);
    }

    #[test]
    fn blobs_deterministic() {
        let a = load_dataset(&blobs_spec()).unwrap();
        let b = load_dataset(&blobs_spec()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn train_statistics_standardized() {
        let d = load_dataset(&blobs_spec()).unwrap();
        let nt = d.train.len() as f64;
        for j in 0..d.dim {
            let mean: f64 = d.train.inputs.iter().map(|r| r[j]).sum::<f64>() / nt;
            let var: f64 = d.train.inputs.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / nt;
            assert!(mean.abs() < 1e-10);
            assert!((var - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn blobs_linearly_learnable_signal() {
        // nearest-centroid on standardized features should do far better
        // than chance; sanity check that classes are separated
        let d = load_dataset(&blobs_spec()).unwrap();
        let mut centroids = vec![vec![0.0; d.dim]; d.n_classes];
        let mut counts = vec![0usize; d.n_classes];
        for (x, &y) in d.train.inputs.iter().zip(&d.train.labels) {
            counts[y] += 1;
            for (c, v) in centroids[y].iter_mut().zip(x) {
                *c += v;
            }
        }
        for (c, &n) in centroids.iter_mut().zip(&counts) {
            for v in c {
                *v /= n as f64;
            }
        }
        let mut hits = 0;
        for (x, &y) in d.test.inputs.iter().zip(&d.test.labels) {
            let pred = (0..d.n_classes)
                .min_by(|&a, &b| {
                    let da: f64 = x.iter().zip(&centroids[a]).map(|(v, c)| (v - c).powi(2)).sum();
                    let db: f64 = x.iter().zip(&centroids[b]).map(|(v, c)| (v - c).powi(2)).sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            if pred == y {
                hits += 1;
            }
        }
        assert!(hits >= 90, "only {hits}/100 nearest-centroid hits");
    }

    #[test]
    fn csv_roundtrip_shapes() {
        let dir = std::env::temp_dir().join("ghost_radius_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("toy.csv");
        std::fs::write(
            &path,
            "x0, x1, label\n1.0, 2.0, 0\n-1.0, 0.5, 1\n0.3, 0.4, 0\n2.0, -1.0, 1\n0.0, 0.1, 1\n",
        )
        .unwrap();
        let spec = DatasetSpec {
            source: DatasetSource::Csv {
                path: path.clone(),
                label_column: "label".into(),
            },
            split: 0.6,
        };
        let d = load_dataset(&spec).unwrap();
        assert_eq!(d.n_classes, 2);
        assert_eq!(d.dim, 2);
        assert_eq!(d.train.len() + d.test.len(), 5);
    }

    #[test]
    fn csv_malformed_row_reports_line() {
        let dir = std::env::temp_dir().join("ghost_radius_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "x0, label\n1.0, 0\noops\n").unwrap();
        let spec = DatasetSpec {
            source: DatasetSource::Csv {
                path,
                label_column: "label".into(),
            },
            split: 0.5,
        };
        match load_dataset(&spec) {
            Err(Error::Malformed(3, _)) => {}
            other => panic!("expected malformed line 3, got {other:?}"),
        }
    }
}
