//! Weighted-graph primitives shared by the clusterers.
//!
//! Ties are always broken by `(weight, smaller index, larger index)` so every
//! routine here is a deterministic function of its input.

use std::cmp::Ordering;

use ndarray::{Array2, ArrayView1};

use crate::labeling::Labeling;
use crate::volume::Topology;

/// Union-find with path halving and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
    count: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
            count: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.count -= 1;
        true
    }

    /// Number of disjoint sets.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Labels numbered by smallest member.
    pub fn labeling(&mut self) -> Labeling {
        let roots: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        Labeling::from_keys(&roots)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

impl WeightedEdge {
    /// Canonical `(w, i, j)` order.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        self.w
            .total_cmp(&other.w)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

/// Undirected graph with nonnegative finite weights and `i < j` on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_nodes: usize,
    edges: Vec<WeightedEdge>,
}

impl WeightedGraph {
    /// Panics on malformed edges; use for graphs built from trusted sources.
    pub fn new(n_nodes: usize, edges: Vec<WeightedEdge>) -> Self {
        for e in &edges {
            assert!(e.i < e.j && e.j < n_nodes, "bad edge ({}, {})", e.i, e.j);
            assert!(e.w.is_finite() && e.w >= 0.0, "bad weight {}", e.w);
        }
        WeightedGraph { n_nodes, edges }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

fn distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Weights every topology edge by the Euclidean distance between the
/// corresponding rows of `data`.
pub fn weight_edges(data: &Array2<f64>, topology: &Topology) -> WeightedGraph {
    assert!(topology.n_nodes() <= data.nrows());
    let edges = topology
        .edges()
        .iter()
        .map(|&(i, j)| WeightedEdge {
            i,
            j,
            w: distance(data.row(i), data.row(j)),
        })
        .collect();
    WeightedGraph {
        n_nodes: topology.n_nodes(),
        edges,
    }
}

/// Directed 1-nearest-neighbor graph: at most one out-edge per node.
#[derive(Debug, Clone, PartialEq)]
pub struct NnGraph {
    targets: Vec<Option<(usize, f64)>>,
}

impl NnGraph {
    pub fn n_nodes(&self) -> usize {
        self.targets.len()
    }

    /// Nearest neighbor of `i` and the edge weight, if `i` has any edge.
    pub fn target(&self, i: usize) -> Option<(usize, f64)> {
        self.targets[i]
    }

    pub fn targets(&self) -> &[Option<(usize, f64)>] {
        &self.targets
    }

    /// Mutual pairs collapse to a single edge.
    fn undirected_edges(&self) -> Vec<WeightedEdge> {
        let mut edges: Vec<WeightedEdge> = self
            .targets
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                t.map(|(j, w)| WeightedEdge {
                    i: i.min(j),
                    j: i.max(j),
                    w,
                })
            })
            .collect();
        edges.sort_by(WeightedEdge::cmp_key);
        edges.dedup_by(|a, b| a.i == b.i && a.j == b.j);
        edges
    }
}

/// For every node, its minimum-weight incident edge (ties to the smallest
/// neighbor index). Isolated nodes get no out-edge.
pub fn nearest_neighbor_graph(g: &WeightedGraph) -> NnGraph {
    let mut targets: Vec<Option<(usize, f64)>> = vec![None; g.n_nodes()];
    let mut offer = |from: usize, to: usize, w: f64| {
        let better = match targets[from] {
            None => true,
            Some((cur, cw)) => w.total_cmp(&cw).then(to.cmp(&cur)) == Ordering::Less,
        };
        if better {
            targets[from] = Some((to, w));
        }
    };
    for e in g.edges() {
        offer(e.i, e.j, e.w);
        offer(e.j, e.i, e.w);
    }
    NnGraph { targets }
}

/// Components of the undirected version of `nn`.
pub fn connected_components(nn: &NnGraph) -> Labeling {
    let mut ds = DisjointSet::new(nn.n_nodes());
    for (i, t) in nn.targets.iter().enumerate() {
        if let Some((j, _)) = *t {
            ds.union(i, j);
        }
    }
    ds.labeling()
}

/// Components of `nn` built by applying its edges cheapest first and
/// stopping as soon as only `cap` components remain.
///
/// When all edges together still leave more than `cap` components, they are
/// all applied and the result has more than `cap` clusters.
pub fn capped_components(nn: &NnGraph, cap: usize) -> Labeling {
    assert!(cap >= 1, "cap must be at least 1");
    let mut ds = DisjointSet::new(nn.n_nodes());
    for e in nn.undirected_edges() {
        if ds.count() <= cap {
            break;
        }
        ds.union(e.i, e.j);
    }
    ds.labeling()
}

/// Kruskal minimum spanning forest, edges considered in `(w, i, j)` order.
pub fn minimum_spanning_tree(g: &WeightedGraph) -> WeightedGraph {
    let mut edges = g.edges.clone();
    edges.sort_by(WeightedEdge::cmp_key);
    let mut ds = DisjointSet::new(g.n_nodes);
    let kept = edges
        .into_iter()
        .filter(|e| ds.union(e.i, e.j))
        .collect();
    WeightedGraph {
        n_nodes: g.n_nodes,
        edges: kept,
    }
}
