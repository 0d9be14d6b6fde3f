//! Surjective voxel-to-cluster maps.

use crate::error::{Error, Result};

/// A surjective map from `len()` items onto cluster ids `0..n_clusters()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl Labeling {
    /// Validates that `labels` covers every id in `0..max+1`.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let n_clusters = labels.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; n_clusters];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidLabeling(format!(
                "label {missing} is unused; labels must cover 0..{n_clusters}"
            )));
        }
        Ok(Labeling { labels, n_clusters })
    }

    /// Relabels arbitrary group keys so clusters are numbered by their
    /// smallest member index.
    pub fn from_keys(keys: &[usize]) -> Self {
        let bound = keys.iter().max().map_or(0, |&m| m + 1);
        let mut remap = vec![usize::MAX; bound];
        let mut next = 0;
        let labels = keys
            .iter()
            .map(|&key| {
                if remap[key] == usize::MAX {
                    remap[key] = next;
                    next += 1;
                }
                remap[key]
            })
            .collect();
        Labeling {
            labels,
            n_clusters: next,
        }
    }

    pub fn identity(len: usize) -> Self {
        Labeling {
            labels: (0..len).collect(),
            n_clusters: len,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Member indices of every cluster, each list ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.n_clusters];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }

    /// `next ∘ self`: items map through `self` and then through `next`.
    pub fn then(&self, next: &Labeling) -> Result<Labeling> {
        if next.len() != self.n_clusters {
            return Err(Error::DimensionMismatch {
                expected: self.n_clusters,
                found: next.len(),
            });
        }
        Ok(Labeling {
            labels: self.labels.iter().map(|&l| next.labels[l]).collect(),
            n_clusters: next.n_clusters,
        })
    }

    /// Renumbers clusters by smallest member index.
    pub fn canonical(&self) -> Labeling {
        Labeling::from_keys(&self.labels)
    }

    /// True when both labelings induce the same partition.
    pub fn same_partition(&self, other: &Labeling) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}
