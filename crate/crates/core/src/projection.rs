//! Very sparse random projections.
//!
//! Each entry of the `k × p` matrix is `+sqrt(s)` or `-sqrt(s)` with
//! probability `1/(2s)` each and zero otherwise, with `s = sqrt(p)`, and the
//! whole matrix is scaled by `1/sqrt(k)` so that squared norms are preserved
//! in expectation. Only nonzeros are stored, column by column.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::Seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseProjection {
    k: usize,
    p: usize,
    seed: Seed,
    magnitude: f64,
    col_start: Vec<usize>,
    rows: Vec<u32>,
    negative: Vec<bool>,
}

impl SparseProjection {
    /// Draws a `k × p` projection from `seed`.
    pub fn new(p: usize, k: usize, seed: Seed) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidData("projection input dimension must be >= 1".into()));
        }
        if k == 0 || k > u32::MAX as usize {
            return Err(Error::InvalidData(format!("projection output dimension {k} out of range")));
        }
        let s = (p as f64).sqrt();
        let density = 1.0 / s;
        let mut rng = seed.rng();
        let mut col_start = Vec::with_capacity(p + 1);
        let mut rows = Vec::new();
        let mut negative = Vec::new();
        col_start.push(0);
        for _ in 0..p {
            for row in 0..k {
                let u: f64 = rng.random();
                if u < density {
                    rows.push(row as u32);
                    negative.push(u < 0.5 * density);
                }
            }
            col_start.push(rows.len());
        }
        Ok(SparseProjection {
            k,
            p,
            seed,
            magnitude: (s / k as f64).sqrt(),
            col_start,
            rows,
            negative,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.p
    }

    pub fn output_dim(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Absolute value shared by every nonzero entry, `sqrt(sqrt(p) / k)`.
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    /// Nonzeros of column `j` as `(row, value)`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_start[j]..self.col_start[j + 1];
        self.rows[range.clone()]
            .iter()
            .zip(&self.negative[range])
            .map(|(&r, &neg)| (r as usize, if neg { -self.magnitude } else { self.magnitude }))
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.k];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (r, v) in self.column(j) {
                out[r] += v * xj;
            }
        }
        Ok(out)
    }
}

/// Convenience wrapper around [`SparseProjection::new`].
pub fn make_projection(p: usize, k: usize, seed: Seed) -> Result<SparseProjection> {
    SparseProjection::new(p, k, seed)
}
