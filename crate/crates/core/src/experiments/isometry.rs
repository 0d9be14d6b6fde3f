use std::io::Write;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use super::Summary;
use crate::compression::{CompressionModel, ScalingMode};
use crate::error::{Error, Result};
use crate::method::Reduction;
use crate::projection::SparseProjection;
use crate::seed::Seed;
use crate::volume::{ImageStack, Topology};

pub const SCHEMA: &str = "isometry.v1: method,k,record,i,j,value (record = pair|mean|std|iqr|excluded)";

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryConfig {
    pub methods: Vec<Reduction>,
    pub k_grid: Vec<usize>,
    pub pairs: usize,
    pub train_frac: f64,
    pub seed: Seed,
}

/// Distance-preservation ratios for one (method, k) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryReport {
    pub method: Reduction,
    pub k: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// `(i, j, eta)` with `i`, `j` indices into the test samples.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Sampled pairs with identical images.
    pub excluded: usize,
}

impl IsometryReport {
    pub fn etas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.2).collect()
    }

    pub fn summary(&self) -> Option<Summary> {
        Summary::of(&self.etas())
    }
}

/// Train/test split of sample columns from a seeded shuffle.
pub fn split_columns(n: usize, train_frac: f64, seed: Seed) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&train_frac) {
        return Err(Error::InvalidData(format!("train fraction {train_frac} not in [0, 1)")));
    }
    let mut cols: Vec<usize> = (0..n).collect();
    cols.shuffle(&mut seed.rng());
    let n_train = ((n as f64) * train_frac).round() as usize;
    let test = cols.split_off(n_train.min(n));
    if test.len() < 2 {
        return Err(Error::InvalidData(format!(
            "{} test samples left; at least 2 are needed",
            test.len()
        )));
    }
    let mut train = cols;
    train.sort_unstable();
    let mut test = test;
    test.sort_unstable();
    Ok((train, test))
}

fn squared_distance<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Learns each reduction on the training columns and measures
/// `||f(x_i) - f(x_j)||² / ||x_i - x_j||²` on random pairs of test columns.
/// Cluster reductions use the scaled mode. The same pairs are used for every
/// (method, k) cell.
pub fn isometry(stack: &ImageStack, topology: &Topology, config: &IsometryConfig) -> Result<Vec<IsometryReport>> {
    let (train_cols, test_cols) = split_columns(stack.n_samples(), config.train_frac, config.seed.derive(0))?;
    let train = if train_cols.is_empty() {
        // nothing to learn from; clusterers see the test data
        stack.select_samples(&test_cols)?
    } else {
        stack.select_samples(&train_cols)?
    };
    let test = stack.select_samples(&test_cols)?;
    let test_data = test.data();
    let n_test = test_cols.len();

    let mut rng = config.seed.derive(1).rng();
    let pairs: Vec<(usize, usize)> = (0..config.pairs)
        .map(|_| {
            let i = rng.random_range(0..n_test);
            let mut j = rng.random_range(0..n_test - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect();
    let original: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| squared_distance(test_data.column(i).iter(), test_data.column(j).iter()))
        .collect();

    let mut reports = Vec::new();
    for (mi, &method) in config.methods.iter().enumerate() {
        for (ki, &k) in config.k_grid.iter().enumerate() {
            let cell_seed = config.seed.derive(2 + (mi * config.k_grid.len() + ki) as u64);
            let reduced = reduce_test(method, &train, topology, test_data, k, cell_seed)?;
            let mut out = Vec::with_capacity(pairs.len());
            let mut excluded = 0;
            for (&(i, j), &denom) in pairs.iter().zip(&original) {
                if denom == 0.0 {
                    excluded += 1;
                    continue;
                }
                let num = squared_distance(reduced.column(i).iter(), reduced.column(j).iter());
                out.push((i, j, num / denom));
            }
            reports.push(IsometryReport {
                method,
                k,
                n_train: train_cols.len(),
                n_test,
                pairs: out,
                excluded,
            });
        }
    }
    Ok(reports)
}

fn reduce_test(
    method: Reduction,
    train: &ImageStack,
    topology: &Topology,
    test: &Array2<f64>,
    k: usize,
    seed: Seed,
) -> Result<Array2<f64>> {
    match method {
        Reduction::Cluster(m) => {
            let labeling = m.cluster(train, topology, k, seed)?;
            CompressionModel::new(labeling, ScalingMode::Scaled).reduce_columns(test)
        }
        Reduction::RandomProjection => {
            let proj = SparseProjection::new(test.nrows(), k, seed)?;
            let mut out = Array2::zeros((k, test.ncols()));
            for (c, col) in test.columns().into_iter().enumerate() {
                let projected = proj.project(&col.to_vec())?;
                out.column_mut(c).assign(&ndarray::ArrayView1::from(&projected));
            }
            Ok(out)
        }
    }
}

/// Per-pair rows followed by mean, std, IQR and excluded-count rows for
/// every (method, k) cell.
pub fn write_isometry_csv<W: Write>(out: W, reports: &[IsometryReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "k", "record", "i", "j", "value"])?;
    for r in reports {
        let (m, k) = (r.method.to_string(), r.k.to_string());
        for &(i, j, eta) in &r.pairs {
            w.write_record([&m, &k, "pair", &i.to_string(), &j.to_string(), &eta.to_string()])?;
        }
        if let Some(s) = r.summary() {
            for (name, v) in [("mean", s.mean), ("std", s.std), ("iqr", s.iqr())] {
                w.write_record([&m, &k, name, "", "", &v.to_string()])?;
            }
        }
        w.write_record([&m, &k, "excluded", "", "", &r.excluded.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
