//! Brute-force reference implementations and random input generators shared
//! by the integration tests. Nothing here calls into the code paths it is
//! used to check.

#![allow(dead_code)]

use featagg::{GridShape, LinkageKind, Mask, Seed};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    Seed(seed).rng()
}

/// Voxel coordinates, in voxel order.
pub fn voxel_coords(mask: &Mask) -> Vec<Vec<usize>> {
    let dims = mask.shape().dims().to_vec();
    mask.voxel_cells()
        .iter()
        .map(|&cell| {
            let mut rest = cell;
            let mut c = vec![0; dims.len()];
            for a in (0..dims.len()).rev() {
                c[a] = rest % dims[a];
                rest /= dims[a];
            }
            c
        })
        .collect()
}

/// Every voxel pair at Manhattan distance exactly 1, by quadratic scan.
pub fn lattice_edges_oracle(mask: &Mask) -> Vec<(usize, usize)> {
    let coords = voxel_coords(mask);
    let mut out = Vec::new();
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let manhattan: usize = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| a.abs_diff(*b))
                .sum();
            if manhattan == 1 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Component count by repeated flood fill over an adjacency matrix.
pub fn components_oracle(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in edges {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if adj[v][u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    count
}

pub fn group_by_mean_oracle(data: &Array2<f64>, labels: &[usize], n_clusters: usize) -> Array2<f64> {
    let mut out = Array2::zeros((n_clusters, data.ncols()));
    for c in 0..n_clusters {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        for col in 0..data.ncols() {
            let s: f64 = members.iter().map(|&i| data[[i, col]]).sum();
            out[[c, col]] = s / members.len() as f64;
        }
    }
    out
}

/// Cluster pairs joined by some edge, by scanning every pair of clusters.
pub fn contract_oracle(edges: &[(usize, usize)], labels: &[usize], n_clusters: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n_clusters {
        for b in a + 1..n_clusters {
            let joined = edges.iter().any(|&(i, j)| {
                (labels[i] == a && labels[j] == b) || (labels[i] == b && labels[j] == a)
            });
            if joined {
                out.push((a, b));
            }
        }
    }
    out
}

fn euclid(data: &Array2<f64>, i: usize, j: usize) -> f64 {
    data.row(i)
        .iter()
        .zip(data.row(j).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn sse(data: &Array2<f64>, members: &[usize]) -> f64 {
    let n = members.len() as f64;
    let mut total = 0.0;
    for col in 0..data.ncols() {
        let mean = members.iter().map(|&i| data[[i, col]]).sum::<f64>() / n;
        total += members.iter().map(|&i| (data[[i, col]] - mean).powi(2)).sum::<f64>();
    }
    total
}

/// Naive constrained agglomeration: every step scans all cluster pairs and
/// recomputes their dissimilarity (average linkage keeps a dense table
/// updated by its size-weighted rule). Returns cluster id per voxel, where a
/// cluster's id is its smallest member.
pub fn agglomerative_oracle(
    data: &Array2<f64>,
    edges: &[(usize, usize)],
    k: usize,
    kind: LinkageKind,
) -> Vec<usize> {
    let p = data.nrows();
    let mut label: Vec<usize> = (0..p).collect();
    let mut members: Vec<Vec<usize>> = (0..p).map(|i| vec![i]).collect();
    let mut alive = vec![true; p];
    let mut avg: Vec<Vec<Option<f64>>> = vec![vec![None; p]; p];
    for &(i, j) in edges {
        let d = euclid(data, i, j);
        avg[i][j] = Some(d);
        avg[j][i] = Some(d);
    }
    let mut n_clusters = p;
    while n_clusters > k {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..p {
            for b in a + 1..p {
                if !(alive[a] && alive[b]) {
                    continue;
                }
                let crossing: Vec<f64> = edges
                    .iter()
                    .filter(|&&(i, j)| {
                        (label[i] == a && label[j] == b) || (label[i] == b && label[j] == a)
                    })
                    .map(|&(i, j)| euclid(data, i, j))
                    .collect();
                if crossing.is_empty() {
                    continue;
                }
                let cost = match kind {
                    LinkageKind::Single => crossing.iter().cloned().fold(f64::INFINITY, f64::min),
                    LinkageKind::Complete => crossing.iter().cloned().fold(0.0, f64::max),
                    LinkageKind::Average => avg[a][b].expect("adjacent clusters have a value"),
                    LinkageKind::Ward => {
                        let union: Vec<usize> = members[a].iter().chain(&members[b]).copied().collect();
                        sse(data, &union) - sse(data, &members[a]) - sse(data, &members[b])
                    }
                };
                let better = match best {
                    None => true,
                    Some((c, _, _)) => cost < c,
                };
                if better {
                    best = Some((cost, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("feasible k");
        let (na, nb) = (members[a].len() as f64, members[b].len() as f64);
        for c in 0..p {
            if !alive[c] || c == a || c == b {
                continue;
            }
            let merged = match (avg[a][c], avg[b][c]) {
                (Some(x), Some(y)) => Some((na * x + nb * y) / (na + nb)),
                (x, None) => x,
                (None, y) => y,
            };
            avg[a][c] = merged;
            avg[c][a] = merged;
        }
        let moved = std::mem::take(&mut members[b]);
        for &v in &moved {
            label[v] = a;
        }
        members[a].extend(moved);
        alive[b] = false;
        n_clusters -= 1;
    }
    label
}

/// Minimum total weight over all spanning forests, by enumerating every
/// edge subset of the right size.
pub fn mst_weight_oracle(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let plain: Vec<(usize, usize)> = edges.iter().map(|&(i, j, _)| (i, j)).collect();
    let need = n - components_oracle(n, &plain);
    let m = edges.len();
    let mut best = f64::INFINITY;
    for subset in 0u64..(1u64 << m) {
        if subset.count_ones() as usize != need {
            continue;
        }
        let chosen: Vec<(usize, usize)> = (0..m).filter(|b| subset >> b & 1 == 1).map(|b| plain[b]).collect();
        // acyclic with `need` edges iff it leaves n - need components
        if components_oracle(n, &chosen) != n - need {
            continue;
        }
        let w: f64 = (0..m).filter(|b| subset >> b & 1 == 1).map(|b| edges[b].2).sum();
        best = best.min(w);
    }
    best
}

/// Random 2D or 3D shape with at most `max_edge` cells per axis.
pub fn random_shape(rng: &mut impl Rng, max_edge: usize) -> GridShape {
    let ndim = rng.random_range(2..=3);
    let dims: Vec<usize> = (0..ndim).map(|_| rng.random_range(1..=max_edge)).collect();
    GridShape::new(&dims).unwrap()
}

/// Bernoulli mask, never empty.
pub fn random_mask(rng: &mut impl Rng, shape: GridShape, density: f64) -> Mask {
    let n = shape.n_cells();
    let mut inside: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < density).collect();
    if !inside.iter().any(|&b| b) {
        inside[rng.random_range(0..n)] = true;
    }
    Mask::new(shape, inside).unwrap()
}

/// Random shape and Bernoulli mask in one go.
pub fn random_grid_mask(rng: &mut impl Rng, max_edge: usize, density: f64) -> Mask {
    let shape = random_shape(rng, max_edge);
    random_mask(rng, shape, density)
}

/// Restricts a mask to its largest face-connected component.
pub fn largest_component(mask: &Mask) -> Mask {
    let topo = featagg::build_lattice_topology(mask, featagg::Connectivity::Faces);
    let mut ds = featagg::graph::DisjointSet::new(mask.n_voxels());
    for &(i, j) in topo.edges() {
        ds.union(i, j);
    }
    let labels = ds.labeling();
    let sizes = labels.sizes();
    let biggest = (0..sizes.len()).max_by_key(|&c| (sizes[c], usize::MAX - c)).unwrap();
    let mut inside = vec![false; mask.shape().n_cells()];
    for (v, &cell) in mask.voxel_cells().iter().enumerate() {
        inside[cell] = labels.label(v) == biggest;
    }
    Mask::new(mask.shape().clone(), inside).unwrap()
}

pub fn random_data(rng: &mut impl Rng, p: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((p, n), |_| rng.random::<f64>() * 2.0 - 1.0)
}

pub fn random_labels(rng: &mut impl Rng, len: usize, max_clusters: usize) -> (Vec<usize>, usize) {
    let c = rng.random_range(1..=max_clusters.min(len));
    // first c items seed every cluster, the rest are random
    let mut labels: Vec<usize> = (0..len).map(|i| if i < c { i } else { rng.random_range(0..c) }).collect();
    for i in (1..len).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    (labels, c)
}
