//! Cluster-based compression operators and the isometry ratio.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::projection::SparseProjection;

/// How cluster values are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalingMode {
    /// Component `i` is the mean over cluster `i`.
    Mean,
    /// Mean times `sqrt(size)`: reduce is an isometry on cluster-constant
    /// signals and a contraction elsewhere.
    #[default]
    Scaled,
}

/// A linear map from `input_dim()` to `output_dim()` dimensions.
pub trait Reducer {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn reduce(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Compression by cluster averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionModel {
    labeling: Labeling,
    sizes: Vec<usize>,
    mode: ScalingMode,
}

impl CompressionModel {
    pub fn new(labeling: Labeling, mode: ScalingMode) -> Self {
        let sizes = labeling.sizes();
        CompressionModel {
            labeling,
            sizes,
            mode,
        }
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mode(&self) -> ScalingMode {
        self.mode
    }

    fn factor(&self, cluster: usize) -> f64 {
        match self.mode {
            ScalingMode::Mean => 1.0,
            ScalingMode::Scaled => (self.sizes[cluster] as f64).sqrt(),
        }
    }

    /// Cluster-wise reduction of a `p`-vector.
    pub fn reduce(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.labeling.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labeling.len(),
                found: x.len(),
            });
        }
        let mut sums = vec![0.0; self.sizes.len()];
        for (&v, &l) in x.iter().zip(self.labeling.labels()) {
            sums[l] += v;
        }
        Ok(sums
            .iter()
            .enumerate()
            .map(|(c, s)| s / self.sizes[c] as f64 * self.factor(c))
            .collect())
    }

    /// Broadcasts cluster values back onto voxels.
    pub fn expand(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sizes.len(),
                found: z.len(),
            });
        }
        let values: Vec<f64> = z.iter().enumerate().map(|(c, v)| v / self.factor(c)).collect();
        Ok(self.labeling.labels().iter().map(|&l| values[l]).collect())
    }

    /// Reduces every column of a `p × n` matrix, giving `k × n`.
    pub fn reduce_columns(&self, data: &Array2<f64>) -> Result<Array2<f64>> {
        if data.nrows() != self.labeling.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labeling.len(),
                found: data.nrows(),
            });
        }
        let mut out = Array2::<f64>::zeros((self.sizes.len(), data.ncols()));
        for (row, &l) in data.rows().into_iter().zip(self.labeling.labels()) {
            let mut acc = out.row_mut(l);
            acc += &row;
        }
        for (c, mut row) in out.rows_mut().into_iter().enumerate() {
            row *= self.factor(c) / self.sizes[c] as f64;
        }
        Ok(out)
    }

    /// Inverse of [`reduce_columns`](Self::reduce_columns) up to averaging.
    pub fn expand_columns(&self, reduced: &Array2<f64>) -> Result<Array2<f64>> {
        if reduced.nrows() != self.sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sizes.len(),
                found: reduced.nrows(),
            });
        }
        let mut out = Array2::<f64>::zeros((self.labeling.len(), reduced.ncols()));
        for (mut row, &l) in out.rows_mut().into_iter().zip(self.labeling.labels()) {
            row.assign(&reduced.row(l));
            row /= self.factor(l);
        }
        Ok(out)
    }
}

impl Reducer for CompressionModel {
    fn input_dim(&self) -> usize {
        self.labeling.len()
    }

    fn output_dim(&self) -> usize {
        self.sizes.len()
    }

    fn reduce(&self, x: &[f64]) -> Result<Vec<f64>> {
        CompressionModel::reduce(self, x)
    }
}

impl Reducer for SparseProjection {
    fn input_dim(&self) -> usize {
        SparseProjection::input_dim(self)
    }

    fn output_dim(&self) -> usize {
        SparseProjection::output_dim(self)
    }

    fn reduce(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.project(x)
    }
}

fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `||f(x1) - f(x2)||² / ||x1 - x2||²`.
///
/// Every reducer here is linear, so this is computed as `||f(x1 - x2)||²`
/// over `||x1 - x2||²`.
pub fn isometry_ratio(f: &dyn Reducer, x1: &[f64], x2: &[f64]) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x1.len(),
            found: x2.len(),
        });
    }
    let diff: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
    let denom = squared_norm(&diff);
    if denom == 0.0 {
        return Err(Error::DegeneratePair);
    }
    Ok(squared_norm(&f.reduce(&diff)?) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_cluster(mode: ScalingMode) -> CompressionModel {
        CompressionModel::new(Labeling::new(vec![0, 0]).unwrap(), mode)
    }

    #[test]
    fn two_voxel_cluster_arithmetic() {
        assert_eq!(one_cluster(ScalingMode::Mean).reduce(&[2.0, 0.0]).unwrap(), vec![1.0]);
        let scaled = one_cluster(ScalingMode::Scaled).reduce(&[2.0, 0.0]).unwrap();
        assert!((scaled[0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(one_cluster(ScalingMode::Mean).expand(&[1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn identity_labeling_is_identity_map() {
        let x = [1.5, -2.0, 0.25];
        for mode in [ScalingMode::Mean, ScalingMode::Scaled] {
            let m = CompressionModel::new(Labeling::identity(3), mode);
            assert_eq!(m.reduce(&x).unwrap(), x.to_vec());
            assert_eq!(m.expand(&x).unwrap(), x.to_vec());
        }
    }

    #[test]
    fn eta_examples() {
        let (x1, x2) = ([2.0, 0.0], [0.0, 0.0]);
        let mean = isometry_ratio(&one_cluster(ScalingMode::Mean), &x1, &x2).unwrap();
        let scaled = isometry_ratio(&one_cluster(ScalingMode::Scaled), &x1, &x2).unwrap();
        assert!((mean - 0.25).abs() < 1e-15);
        assert!((scaled - 0.5).abs() < 1e-15);

        // difference constant within every cluster
        let m = CompressionModel::new(Labeling::new(vec![0, 0, 1]).unwrap(), ScalingMode::Scaled);
        let eta = isometry_ratio(&m, &[3.0, 3.0, -1.0], &[1.0, 1.0, 0.0]).unwrap();
        assert!((eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_mismatched_inputs() {
        let m = one_cluster(ScalingMode::Scaled);
        assert!(matches!(isometry_ratio(&m, &[1.0, 2.0], &[1.0, 2.0]), Err(Error::DegeneratePair)));
        assert!(m.reduce(&[1.0]).is_err());
        assert!(m.expand(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn column_ops_match_vector_ops() {
        let m = CompressionModel::new(Labeling::new(vec![0, 1, 0, 1, 1]).unwrap(), ScalingMode::Scaled);
        let data = Array2::from_shape_fn((5, 2), |(i, j)| (i * 3 + j) as f64);
        let reduced = m.reduce_columns(&data).unwrap();
        for j in 0..2 {
            let col: Vec<f64> = data.column(j).to_vec();
            let r = m.reduce(&col).unwrap();
            for c in 0..2 {
                assert!((reduced[[c, j]] - r[c]).abs() < 1e-12);
            }
            let e = m.expand(&r).unwrap();
            let ec = m.expand_columns(&reduced).unwrap();
            for v in 0..5 {
                assert!((ec[[v, j]] - e[v]).abs() < 1e-12);
            }
        }
    }
}
