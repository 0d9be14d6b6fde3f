mod common;

use common::*;
use featagg::graph::{
    capped_components, connected_components, minimum_spanning_tree, nearest_neighbor_graph, weight_edges,
    WeightedEdge, WeightedGraph,
};
use featagg::{
    agglomerative, build_lattice_topology, clusters_are_connected, connected_component_count, contract_topology,
    fast_cluster, rand_single_linkage, reduce_means, Connectivity, GridShape, ImageStack, Labeling, LinkageKind,
    Seed, Topology,
};
use proptest::prelude::*;
use rand::Rng;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lattice_edges_match_manhattan_scan(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let shape = random_shape(&mut rng, 6);
        let mask = random_mask(&mut rng, shape, 0.7);
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let want = lattice_edges_oracle(&mask);
        prop_assert_eq!(topo.edges(), want.as_slice());
        prop_assert_eq!(
            connected_component_count(&topo),
            components_oracle(mask.n_voxels(), topo.edges())
        );
    }

    #[test]
    fn reduce_means_matches_group_by(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = rng.random_range(1..40);
        let n = rng.random_range(1..5);
        let data = random_data(&mut rng, p, n);
        let (labels, c) = random_labels(&mut rng, p, p);
        let got = reduce_means(&data, &Labeling::new(labels.clone()).unwrap());
        prop_assert_eq!(got, group_by_mean_oracle(&data, &labels, c));
    }

    #[test]
    fn contract_matches_pair_scan(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mask = random_grid_mask(&mut rng, 5, 0.8);
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let (labels, c) = random_labels(&mut rng, mask.n_voxels(), 8);
        let got = contract_topology(&topo, &Labeling::new(labels.clone()).unwrap());
        let want = contract_oracle(topo.edges(), &labels, c);
        prop_assert_eq!(got.edges(), want.as_slice());
    }

    #[test]
    fn weighted_edges_are_euclidean(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mask = random_grid_mask(&mut rng, 5, 0.8);
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = random_data(&mut rng, mask.n_voxels(), 3);
        let g = weight_edges(&data, &topo);
        prop_assert_eq!(g.edges().len(), topo.n_edges());
        for (e, &(i, j)) in g.edges().iter().zip(topo.edges()) {
            prop_assert_eq!((e.i, e.j), (i, j));
            let d: f64 = (0..3).map(|c| (data[[i, c]] - data[[j, c]]).powi(2)).sum::<f64>().sqrt();
            prop_assert!((e.w - d).abs() < 1e-12);
        }
    }

    #[test]
    fn nearest_neighbor_is_minimum_incident_edge(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mask = random_grid_mask(&mut rng, 5, 0.8);
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = random_data(&mut rng, mask.n_voxels(), 2);
        let g = weight_edges(&data, &topo);
        let nn = nearest_neighbor_graph(&g);
        for v in 0..mask.n_voxels() {
            let best = g
                .edges()
                .iter()
                .filter(|e| e.i == v || e.j == v)
                .map(|e| (e.w, if e.i == v { e.j } else { e.i }))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            prop_assert_eq!(nn.target(v).map(|(u, w)| (w, u)), best);
        }
    }

    #[test]
    fn capped_components_refine_components(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mask = random_grid_mask(&mut rng, 6, 0.9);
        let p = mask.n_voxels();
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = random_data(&mut rng, p, 2);
        let nn = nearest_neighbor_graph(&weight_edges(&data, &topo));
        let full = connected_components(&nn);
        let cap = rng.random_range(1..=p);
        let capped = capped_components(&nn, cap);
        prop_assert_eq!(capped.n_clusters(), cap.max(full.n_clusters()));
        // every capped cluster sits inside one uncapped component
        for i in 0..p {
            for j in 0..p {
                if capped.label(i) == capped.label(j) {
                    prop_assert_eq!(full.label(i), full.label(j));
                }
            }
        }
        prop_assert!(clusters_are_connected(&topo, &capped));
    }

    #[test]
    fn mst_weight_matches_exhaustive_search(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(1..=8);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < 0.45 {
                    edges.push(WeightedEdge { i, j, w: rng.random_range(0..10) as f64 });
                }
            }
        }
        let triples: Vec<_> = edges.iter().map(|e| (e.i, e.j, e.w)).collect();
        let plain: Vec<_> = edges.iter().map(|e| (e.i, e.j)).collect();
        let tree = minimum_spanning_tree(&WeightedGraph::new(n, edges));
        prop_assert_eq!(tree.edges().len(), n - components_oracle(n, &plain));
        prop_assert_eq!(tree.total_weight(), mst_weight_oracle(n, &triples));
    }

    #[test]
    fn agglomerative_matches_naive_merging(seed in any::<u64>(), kind_index in 0usize..4) {
        let kind = LinkageKind::ALL[kind_index];
        let mut rng = rng(seed);
        let dims = [rng.random_range(2..=3), rng.random_range(2..=4)];
        let mask = largest_component(&random_mask(&mut rng, GridShape::new(&dims).unwrap(), 0.9));
        let p = mask.n_voxels();
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = random_data(&mut rng, p, 2);
        let k = rng.random_range(1..=p);
        let stack = ImageStack::new(mask, data.clone()).unwrap();
        let got = agglomerative(&stack, &topo, k, kind).unwrap();
        let want = Labeling::from_keys(&agglomerative_oracle(&data, topo.edges(), k, kind));
        prop_assert!(got.same_partition(&want), "{} p={} k={}", kind, p, k);
    }

    #[test]
    fn fast_cluster_gives_exact_connected_k(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mask = largest_component(&random_grid_mask(&mut rng, 8, 0.8));
        let p = mask.n_voxels();
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let stack = ImageStack::new(mask, random_data(&mut rng, p, 3)).unwrap();
        let k = rng.random_range(1..=p);
        let r = fast_cluster(&stack, &topo, k).unwrap();
        prop_assert_eq!(r.labeling.n_clusters(), k);
        prop_assert!(clusters_are_connected(&topo, &r.labeling));
        prop_assert_eq!(*r.per_iteration_counts.last().unwrap(), k);
        prop_assert!(r.per_iteration_counts.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rand_single_never_leaves_singletons(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mask = largest_component(&random_grid_mask(&mut rng, 8, 0.9));
        let p = mask.n_voxels();
        prop_assume!(p >= 4);
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let stack = ImageStack::new(mask, random_data(&mut rng, p, 2)).unwrap();
        let k = rng.random_range(1..=p / 3);
        match rand_single_linkage(&stack, &topo, k, Seed(seed)) {
            Ok(l) => {
                prop_assert_eq!(l.n_clusters(), k);
                prop_assert!(l.sizes().iter().all(|&s| s >= 2));
                prop_assert!(clusters_are_connected(&topo, &l));
            }
            Err(e) => prop_assert!(e.is_feasibility(), "{}", e),
        }
    }
}

#[test]
fn ward_on_twelve_voxels_matches_oracle() {
    let mut rng = rng(12);
    for _ in 0..20 {
        let mask = featagg::Mask::full(GridShape::new(&[3, 4]).unwrap());
        let topo = build_lattice_topology(&mask, Connectivity::Faces);
        let data = random_data(&mut rng, 12, 3);
        let stack = ImageStack::new(mask, data.clone()).unwrap();
        for k in 1..=12 {
            let got = agglomerative(&stack, &topo, k, LinkageKind::Ward).unwrap();
            let want = Labeling::from_keys(&agglomerative_oracle(&data, topo.edges(), k, LinkageKind::Ward));
            assert!(got.same_partition(&want), "k={k}");
        }
    }
}

#[test]
fn disconnected_topology_needs_enough_clusters() {
    let topo = Topology::new(4, [(0, 1), (2, 3)]).unwrap();
    let mask = featagg::Mask::full(GridShape::new(&[1, 4]).unwrap());
    let stack = ImageStack::new(mask, ndarray::Array2::zeros((4, 1))).unwrap();
    for k in [1] {
        assert!(fast_cluster(&stack, &topo, k).unwrap_err().is_feasibility());
        assert!(agglomerative(&stack, &topo, k, LinkageKind::Average).unwrap_err().is_feasibility());
        assert!(rand_single_linkage(&stack, &topo, k, Seed(0)).unwrap_err().is_feasibility());
    }
    assert_eq!(fast_cluster(&stack, &topo, 2).unwrap().labeling.labels(), &[0, 0, 1, 1]);
}
