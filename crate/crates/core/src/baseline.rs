//! Comparison clusterers: randomized single linkage over the minimum
//! spanning tree, and connectivity-constrained agglomerative clustering.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{minimum_spanning_tree, weight_edges, DisjointSet, WeightedEdge};
use crate::labeling::Labeling;
use crate::seed::Seed;
use crate::volume::{connected_component_count, ImageStack, Topology};

/// Inter-cluster dissimilarity rule for [`agglomerative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkageKind {
    Single,
    Average,
    Complete,
    Ward,
}

impl LinkageKind {
    pub const ALL: [LinkageKind; 4] = [
        LinkageKind::Single,
        LinkageKind::Average,
        LinkageKind::Complete,
        LinkageKind::Ward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LinkageKind::Single => "single",
            LinkageKind::Average => "average",
            LinkageKind::Complete => "complete",
            LinkageKind::Ward => "ward",
        }
    }
}

impl fmt::Display for LinkageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkageKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        LinkageKind::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown linkage '{s}'"))
    }
}

fn check_k(p: usize, k: usize) -> Result<()> {
    if k == 0 || k > p {
        return Err(Error::InvalidK { k, p });
    }
    Ok(())
}

/// Cuts `k - c` random edges out of the minimum spanning forest (`c` trees),
/// never cutting an edge with a leaf endpoint, so no singleton is split off.
///
/// An edge is eligible while both its endpoints have degree >= 2 in the
/// current forest; the edge to cut is drawn uniformly among eligible edges
/// after every cut.
pub fn rand_single_linkage(
    stack: &ImageStack,
    topology: &Topology,
    k: usize,
    seed: Seed,
) -> Result<Labeling> {
    let p = stack.n_voxels();
    check_k(p, k)?;
    let forest = minimum_spanning_tree(&weight_edges(stack.data(), topology));
    let trees = p - forest.edges().len();
    if trees > k {
        return Err(Error::DisconnectedTopology { trees, k });
    }
    let edges: Vec<WeightedEdge> = forest.edges().to_vec();
    let mut degree = vec![0usize; p];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); p];
    for (id, e) in edges.iter().enumerate() {
        degree[e.i] += 1;
        degree[e.j] += 1;
        incident[e.i].push(id);
        incident[e.j].push(id);
    }

    // Eligible edge ids with O(1) removal through a position index.
    let mut eligible: Vec<usize> = Vec::new();
    let mut position = vec![usize::MAX; edges.len()];
    for (id, e) in edges.iter().enumerate() {
        if degree[e.i] >= 2 && degree[e.j] >= 2 {
            position[id] = eligible.len();
            eligible.push(id);
        }
    }
    let remove = |id: usize, eligible: &mut Vec<usize>, position: &mut Vec<usize>| {
        let at = position[id];
        if at == usize::MAX {
            return;
        }
        let last = *eligible.last().expect("non-empty");
        eligible.swap_remove(at);
        if last != id {
            position[last] = at;
        }
        position[id] = usize::MAX;
    };

    let mut alive = vec![true; edges.len()];
    let mut rng = seed.rng();
    for cut in 0..k - trees {
        if eligible.is_empty() {
            return Err(Error::InfeasibleK {
                k,
                reason: format!(
                    "only {cut} of {} spanning-tree edges could be cut without creating a singleton",
                    k - trees
                ),
            });
        }
        let id = eligible[rng.random_range(0..eligible.len())];
        remove(id, &mut eligible, &mut position);
        alive[id] = false;
        for v in [edges[id].i, edges[id].j] {
            degree[v] -= 1;
            if degree[v] == 1 {
                for &other in &incident[v] {
                    remove(other, &mut eligible, &mut position);
                }
            }
        }
    }

    let mut ds = DisjointSet::new(p);
    for (e, _) in edges.iter().zip(&alive).filter(|(_, &a)| a) {
        ds.union(e.i, e.j);
    }
    Ok(ds.labeling())
}

/// One agglomeration step: clusters `a < b` merged into `a` at `cost`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub cost: f64,
}

/// Result of [`agglomerate`]: the final partition plus the merge history.
#[derive(Debug, Clone, PartialEq)]
pub struct Agglomeration {
    pub labeling: Labeling,
    pub merges: Vec<Merge>,
}

/// Connectivity-constrained agglomerative clustering down to `k` clusters.
pub fn agglomerative(
    stack: &ImageStack,
    topology: &Topology,
    k: usize,
    kind: LinkageKind,
) -> Result<Labeling> {
    agglomerate(stack, topology, k, kind).map(|a| a.labeling)
}

/// Bottom-up merging restricted to pairs of clusters joined by a topology
/// edge. The globally cheapest adjacent pair merges first, ties going to the
/// smallest `(id, id)` pair; the merged cluster keeps the smaller id.
///
/// Dissimilarities start from the Euclidean distance between voxel rows and
/// are updated by the Lance-Williams rules:
///
/// * single: `min(d(a,c), d(b,c))`
/// * complete: `max(d(a,c), d(b,c))`
/// * average: `(|a| d(a,c) + |b| d(b,c)) / (|a| + |b|)`
///
/// A neighbor adjacent to only one of the merged clusters keeps the
/// dissimilarity it had with that cluster. Ward uses the variance increase
/// `|a||b| / (|a|+|b|) * ||mean_a - mean_b||^2`, evaluated from cluster means,
/// which is exactly the Ward Lance-Williams update and does not need values
/// for non-adjacent pairs.
pub fn agglomerate(
    stack: &ImageStack,
    topology: &Topology,
    k: usize,
    kind: LinkageKind,
) -> Result<Agglomeration> {
    let p = stack.n_voxels();
    check_k(p, k)?;
    if topology.n_nodes() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: topology.n_nodes(),
        });
    }
    let components = connected_component_count(topology);
    if components > k {
        return Err(Error::InfeasibleK {
            k,
            reason: format!("topology has {components} connected components"),
        });
    }
    if kind == LinkageKind::Single {
        return Ok(single_linkage(stack.data(), topology, k));
    }
    let mut engine = Engine::new(stack.data(), topology, kind);
    let mut merges = Vec::with_capacity(p - k);
    while engine.n_clusters > k {
        // Components <= k guarantees an adjacent pair exists.
        let merge = engine.pop_best().expect("adjacent pair while above k");
        engine.merge(merge.a, merge.b);
        merges.push(merge);
    }
    Ok(Agglomeration {
        labeling: engine.labeling(),
        merges,
    })
}

/// Single linkage restricted to topology edges is Kruskal's algorithm stopped
/// at `k` components; exact weight ties go to the smallest voxel pair.
fn single_linkage(data: &Array2<f64>, topology: &Topology, k: usize) -> Agglomeration {
    let p = data.nrows();
    let mut edges = weight_edges(data, topology).edges().to_vec();
    edges.sort_by(WeightedEdge::cmp_key);
    let mut ds = DisjointSet::new(p);
    // smallest member per root, which is the cluster id
    let mut min_member: Vec<usize> = (0..p).collect();
    let mut merges = Vec::with_capacity(p - k);
    for e in edges {
        if ds.count() <= k {
            break;
        }
        let (ri, rj) = (ds.find(e.i), ds.find(e.j));
        if ri == rj {
            continue;
        }
        let (ia, ib) = (min_member[ri], min_member[rj]);
        ds.union(ri, rj);
        let root = ds.find(ri);
        min_member[root] = ia.min(ib);
        merges.push(Merge {
            a: ia.min(ib),
            b: ia.max(ib),
            cost: e.w,
        });
    }
    Agglomeration {
        labeling: ds.labeling(),
        merges,
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    a: usize,
    b: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

struct Engine {
    kind: LinkageKind,
    n_clusters: usize,
    alive: Vec<bool>,
    size: Vec<usize>,
    parent: Vec<usize>,
    neighbors: Vec<HashMap<usize, f64>>,
    centroids: Array2<f64>,
    heap: BinaryHeap<Reverse<Candidate>>,
}

impl Engine {
    fn new(data: &Array2<f64>, topology: &Topology, kind: LinkageKind) -> Self {
        let p = data.nrows();
        let graph = weight_edges(data, topology);
        let mut neighbors: Vec<HashMap<usize, f64>> = vec![HashMap::new(); p];
        let mut heap = BinaryHeap::with_capacity(graph.edges().len());
        for e in graph.edges() {
            let cost = match kind {
                LinkageKind::Ward => 0.5 * e.w * e.w,
                _ => e.w,
            };
            neighbors[e.i].insert(e.j, cost);
            neighbors[e.j].insert(e.i, cost);
            heap.push(Reverse(Candidate { cost, a: e.i, b: e.j }));
        }
        let centroids = if kind == LinkageKind::Ward {
            data.clone()
        } else {
            Array2::zeros((0, 0))
        };
        Engine {
            kind,
            n_clusters: p,
            alive: vec![true; p],
            size: vec![1; p],
            parent: (0..p).collect(),
            neighbors,
            centroids,
            heap,
        }
    }

    fn pop_best(&mut self) -> Option<Merge> {
        while let Some(Reverse(c)) = self.heap.pop() {
            let current = self.alive[c.a] && self.alive[c.b];
            if current && self.neighbors[c.a].get(&c.b).map(|d| d.to_bits()) == Some(c.cost.to_bits()) {
                return Some(Merge {
                    a: c.a,
                    b: c.b,
                    cost: c.cost,
                });
            }
        }
        None
    }

    fn ward_cost(&self, a: usize, b: usize) -> f64 {
        let (na, nb) = (self.size[a] as f64, self.size[b] as f64);
        let sq: f64 = self
            .centroids
            .row(a)
            .iter()
            .zip(self.centroids.row(b).iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        na * nb / (na + nb) * sq
    }

    fn merge(&mut self, a: usize, b: usize) {
        debug_assert!(a < b);
        let (na, nb) = (self.size[a], self.size[b]);
        let from_a = std::mem::take(&mut self.neighbors[a]);
        let from_b = std::mem::take(&mut self.neighbors[b]);

        if self.kind == LinkageKind::Ward {
            let (wa, wb) = (na as f64, nb as f64);
            let merged = (&self.centroids.row(a) * wa + &self.centroids.row(b) * wb) / (wa + wb);
            self.centroids.row_mut(a).assign(&merged);
        }
        self.size[a] = na + nb;
        self.alive[b] = false;
        self.parent[b] = a;
        self.n_clusters -= 1;

        let mut combined: HashMap<usize, f64> = HashMap::with_capacity(from_a.len() + from_b.len());
        let others = from_a.keys().chain(from_b.keys()).copied().filter(|&c| c != a && c != b);
        for c in others {
            if combined.contains_key(&c) {
                continue;
            }
            let (da, db) = (from_a.get(&c).copied(), from_b.get(&c).copied());
            let cost = match self.kind {
                LinkageKind::Ward => self.ward_cost(a, c),
                LinkageKind::Single => pick(da, db, f64::min),
                LinkageKind::Complete => pick(da, db, f64::max),
                LinkageKind::Average => pick(da, db, |x, y| {
                    (na as f64 * x + nb as f64 * y) / (na + nb) as f64
                }),
            };
            combined.insert(c, cost);
            let theirs = &mut self.neighbors[c];
            theirs.remove(&b);
            theirs.insert(a, cost);
            self.heap.push(Reverse(Candidate {
                cost,
                a: a.min(c),
                b: a.max(c),
            }));
        }
        self.neighbors[a] = combined;
    }

    fn labeling(&self) -> Labeling {
        // parents always carry the smaller id, so one ascending pass resolves roots
        let mut roots = self.parent.clone();
        for i in 0..roots.len() {
            roots[i] = roots[self.parent[i]];
        }
        Labeling::from_keys(&roots)
    }
}

fn pick(a: Option<f64>, b: Option<f64>, both: impl Fn(f64, f64) -> f64) -> f64 {
    match (a, b) {
        (Some(x), Some(y)) => both(x, y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => unreachable!("neighbor of neither merged cluster"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{build_lattice_topology, clusters_are_connected, Connectivity, GridShape, Mask};

    fn chain_stack(values: &[f64]) -> (ImageStack, Topology) {
        let mask = Mask::full(GridShape::new(&[1, values.len()]).unwrap());
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap();
        (ImageStack::new(mask, data).unwrap(), topo)
    }

    #[test]
    fn path_tree_has_one_cuttable_edge() {
        let (s, t) = chain_stack(&[0.0, 1.0, 2.0, 3.0]);
        for seed in 0..20 {
            let l = rand_single_linkage(&s, &t, 2, Seed(seed)).unwrap();
            assert_eq!(l.labels(), &[0, 0, 1, 1]);
        }
        let l = rand_single_linkage(&s, &t, 1, Seed(0)).unwrap();
        assert_eq!(l.n_clusters(), 1);
    }

    #[test]
    fn path_tree_runs_out_of_eligible_edges() {
        let (s, t) = chain_stack(&[0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(
            rand_single_linkage(&s, &t, 3, Seed(0)),
            Err(Error::InfeasibleK { .. })
        ));
    }

    #[test]
    fn rand_single_disconnected() {
        let (s, _) = chain_stack(&[0.0, 1.0, 2.0, 3.0]);
        let t = Topology::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            rand_single_linkage(&s, &t, 1, Seed(0)),
            Err(Error::DisconnectedTopology { trees: 2, k: 1 })
        ));
        assert_eq!(rand_single_linkage(&s, &t, 2, Seed(0)).unwrap().labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn rand_single_is_seed_deterministic() {
        let mask = Mask::full(GridShape::new(&[6, 6]).unwrap());
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = Array2::from_shape_fn((36, 2), |(v, s)| ((v * 7 + s * 3) % 11) as f64 + 0.01 * v as f64);
        let stack = ImageStack::new(mask, data).unwrap();
        let a = rand_single_linkage(&stack, &topo, 5, Seed(3)).unwrap();
        let b = rand_single_linkage(&stack, &topo, 5, Seed(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_clusters(), 5);
        assert!(a.sizes().iter().all(|&s| s >= 2));
        assert!(clusters_are_connected(&topo, &a));
    }

    #[test]
    fn ward_chain() {
        let (s, t) = chain_stack(&[0.0, 1.0, 10.0]);
        let l = agglomerative(&s, &t, 2, LinkageKind::Ward).unwrap();
        assert_eq!(l.labels(), &[0, 0, 1]);
    }

    #[test]
    fn k_equals_p_is_identity() {
        let (s, t) = chain_stack(&[0.0, 4.0, 1.0]);
        for kind in LinkageKind::ALL {
            assert_eq!(agglomerative(&s, &t, 3, kind).unwrap(), Labeling::identity(3));
        }
    }

    #[test]
    fn merges_respect_topology() {
        // 0 and 2 are identical but only reachable through 1
        let (s, t) = chain_stack(&[0.0, 100.0, 0.0]);
        for kind in LinkageKind::ALL {
            let l = agglomerative(&s, &t, 2, kind).unwrap();
            assert!(clusters_are_connected(&t, &l), "{kind}");
        }
    }

    #[test]
    fn ward_merge_costs_sum_to_total_sum_of_squares() {
        let mask = Mask::full(GridShape::new(&[3, 4]).unwrap());
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = Array2::from_shape_fn((12, 3), |(v, s)| ((v * 5 + s * 7) % 13) as f64 * 0.3);
        let stack = ImageStack::new(mask, data.clone()).unwrap();
        let agg = agglomerate(&stack, &topo, 1, LinkageKind::Ward).unwrap();
        let total: f64 = agg.merges.iter().map(|m| m.cost).sum();
        let mean = data.mean_axis(ndarray::Axis(0)).unwrap();
        let sst: f64 = data.rows().into_iter().map(|r| (&r - &mean).mapv(|x| x * x).sum()).sum();
        assert!((total - sst).abs() < 1e-9 * sst.max(1.0), "{total} vs {sst}");
    }

    #[test]
    fn linkage_names_round_trip() {
        for kind in LinkageKind::ALL {
            assert_eq!(kind.name().parse::<LinkageKind>().unwrap(), kind);
        }
        assert!("median".parse::<LinkageKind>().is_err());
    }
}
