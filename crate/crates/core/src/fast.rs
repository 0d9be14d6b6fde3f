//! Recursive nearest-neighbor agglomeration.
//!
//! Each round weights the current topology by distances between cluster
//! means, links every cluster to its nearest neighbor, and contracts the
//! resulting components. Every non-isolated component of a 1-NN graph has at
//! least two members, so a connected topology shrinks by half or more per
//! round and the whole procedure is linear in the number of voxels. The
//! cluster budget `k` caps every round: once the component count would drop
//! below `k`, only the cheapest nearest-neighbor links are kept.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::{capped_components, nearest_neighbor_graph, weight_edges};
use crate::labeling::Labeling;
use crate::volume::{connected_component_count, ImageStack, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct FastClusterResult {
    pub labeling: Labeling,
    /// Rounds of agglomeration performed.
    pub iterations: usize,
    /// Cluster count before the first round and after each round.
    pub per_iteration_counts: Vec<usize>,
}

/// Clusters the voxels of `stack` into exactly `k` spatially connected groups.
pub fn fast_cluster(stack: &ImageStack, topology: &Topology, k: usize) -> Result<FastClusterResult> {
    let p = stack.n_voxels();
    if topology.n_nodes() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: topology.n_nodes(),
        });
    }
    if k == 0 || k > p {
        return Err(Error::InvalidK { k, p });
    }
    let components = connected_component_count(topology);
    if components > k {
        return Err(Error::InfeasibleK {
            k,
            reason: format!("topology has {components} connected components"),
        });
    }

    let mut labeling = Labeling::identity(p);
    let mut counts = vec![p];
    let mut data = stack.data().clone();
    let mut topo = topology.clone();
    let mut q = p;
    while q > k {
        let nn = nearest_neighbor_graph(&weight_edges(&data, &topo));
        let step = capped_components(&nn, k);
        if step.n_clusters() >= q {
            // unreachable while components <= k, kept so the loop always terminates
            return Err(Error::InfeasibleK {
                k,
                reason: format!("agglomeration stalled at {q} clusters"),
            });
        }
        data = reduce_means(&data, &step);
        topo = contract_topology(&topo, &step);
        labeling = labeling.then(&step)?;
        q = step.n_clusters();
        counts.push(q);
    }
    Ok(FastClusterResult {
        labeling,
        iterations: counts.len() - 1,
        per_iteration_counts: counts,
    })
}

/// Row `c` of the output is the mean of the rows of `data` labeled `c`.
pub fn reduce_means(data: &Array2<f64>, labeling: &Labeling) -> Array2<f64> {
    assert_eq!(data.nrows(), labeling.len());
    let mut out = Array2::<f64>::zeros((labeling.n_clusters(), data.ncols()));
    let mut sizes = vec![0usize; labeling.n_clusters()];
    for (row, &l) in data.rows().into_iter().zip(labeling.labels()) {
        let mut acc = out.row_mut(l);
        acc += &row;
        sizes[l] += 1;
    }
    for (mut row, &s) in out.rows_mut().into_iter().zip(&sizes) {
        row /= s as f64;
    }
    out
}

/// Quotient graph: clusters `a != b` are adjacent when any edge joins a
/// member of `a` to a member of `b`.
pub fn contract_topology(topology: &Topology, labeling: &Labeling) -> Topology {
    assert_eq!(topology.n_nodes(), labeling.len());
    let mut edges: Vec<(usize, usize)> = topology
        .edges()
        .iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (labeling.label(i), labeling.label(j));
            (a != b).then(|| (a.min(b), a.max(b)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Topology::from_sorted_unchecked(labeling.n_clusters(), edges)
}
