use std::io::Write;

use super::Summary;
use crate::compression::{CompressionModel, ScalingMode};
use crate::error::Result;
use crate::fast::fast_cluster;
use crate::synth::{subject_condition_stack, SubjectConditionSpec, SubjectConditionStack};
use crate::volume::{build_lattice_topology, Connectivity};
use ndarray::Array2;

pub const SCHEMA: &str =
    "denoise.v1: k,record,voxel,value (record = voxel|excluded|min|q1|median|q3|max|mean)";

/// Below this fraction of the voxel's mean square, a variance is treated as 0.
const DEGENERATE_REL: f64 = 1e-24;

/// Per-voxel variance components of a subjects × conditions design.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceComponents {
    /// Variance across conditions within a subject, averaged over subjects.
    pub between_condition: Vec<f64>,
    /// Variance across subjects within a condition, averaged over conditions.
    pub between_subject: Vec<f64>,
    /// Mean square of the voxel's values, the scale for degeneracy tests.
    pub scale: Vec<f64>,
}

impl VarianceComponents {
    /// `between_condition / between_subject`, or `None` when either is
    /// numerically zero.
    pub fn ratio(&self, voxel: usize) -> Option<f64> {
        let tiny = DEGENERATE_REL * self.scale[voxel];
        let (num, den) = (self.between_condition[voxel], self.between_subject[voxel]);
        (num > tiny && den > tiny).then(|| num / den)
    }
}

fn sample_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n < 2 {
        return 0.0;
    }
    let mean = sum / n as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
}

/// Variances use the `n - 1` denominator; with a single condition the
/// between-condition variance is 0.
pub fn variance_components(data: &Array2<f64>, subjects: usize, conditions: usize) -> VarianceComponents {
    assert_eq!(data.ncols(), subjects * conditions);
    let p = data.nrows();
    let mut out = VarianceComponents {
        between_condition: vec![0.0; p],
        between_subject: vec![0.0; p],
        scale: vec![0.0; p],
    };
    for (v, row) in data.rows().into_iter().enumerate() {
        let at = |s: usize, c: usize| row[s * conditions + c];
        out.between_condition[v] = (0..subjects)
            .map(|s| sample_variance((0..conditions).map(move |c| at(s, c))))
            .sum::<f64>()
            / subjects as f64;
        out.between_subject[v] = (0..conditions)
            .map(|c| sample_variance((0..subjects).map(move |s| at(s, c))))
            .sum::<f64>()
            / conditions as f64;
        out.scale[v] = row.iter().map(|x| x * x).sum::<f64>() / row.len() as f64;
    }
    out
}

/// Distribution of per-voxel log variance-ratio quotients for one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseReport {
    pub k: usize,
    /// `(voxel, log(ratio_compressed / ratio_raw))` for valid voxels.
    pub log_quotients: Vec<(usize, f64)>,
    /// Voxels with a zero variance in either representation.
    pub excluded: usize,
}

impl DenoiseReport {
    pub fn summary(&self) -> Option<Summary> {
        let values: Vec<f64> = self.log_quotients.iter().map(|q| q.1).collect();
        Summary::of(&values)
    }
}

/// Compares the signal-to-noise variance ratio before and after fast-cluster
/// compression, one report per `k`.
///
/// Clusters are learned on all maps of the design. Ratios are computed on
/// `expand(reduce(x))` in mean mode so that every voxel has a compressed value.
pub fn denoise(spec: &SubjectConditionSpec, k_grid: &[usize]) -> Result<Vec<DenoiseReport>> {
    let design = subject_condition_stack(spec)?;
    denoise_design(&design, k_grid)
}

pub fn denoise_design(design: &SubjectConditionStack, k_grid: &[usize]) -> Result<Vec<DenoiseReport>> {
    let stack = &design.stack;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let raw = variance_components(stack.data(), design.subjects, design.conditions);
    let mut reports = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let labeling = fast_cluster(stack, &topology, k)?.labeling;
        let model = CompressionModel::new(labeling, ScalingMode::Mean);
        let smoothed = model.expand_columns(&model.reduce_columns(stack.data())?)?;
        let compressed = variance_components(&smoothed, design.subjects, design.conditions);
        let mut log_quotients = Vec::new();
        let mut excluded = 0;
        for v in 0..stack.n_voxels() {
            match (raw.ratio(v), compressed.ratio(v)) {
                (Some(r), Some(c)) => log_quotients.push((v, (c / r).ln())),
                _ => excluded += 1,
            }
        }
        reports.push(DenoiseReport {
            k,
            log_quotients,
            excluded,
        });
    }
    Ok(reports)
}

pub fn write_denoise_csv<W: Write>(out: W, reports: &[DenoiseReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "record", "voxel", "value"])?;
    for r in reports {
        let k = r.k.to_string();
        for &(v, q) in &r.log_quotients {
            w.write_record([&k, "voxel", &v.to_string(), &q.to_string()])?;
        }
        w.write_record([&k, "excluded", "", &r.excluded.to_string()])?;
        if let Some(s) = r.summary() {
            for (name, value) in [
                ("min", s.min),
                ("q1", s.q1),
                ("median", s.median),
                ("q3", s.q3),
                ("max", s.max),
                ("mean", s.mean),
            ] {
                w.write_record([&k, name, "", &value.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
