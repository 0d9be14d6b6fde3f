//! Feature agglomeration for signals on masked 2D/3D image lattices.
//!
//! The centerpiece is [`fast_cluster`], a linear-time clustering of lattice
//! voxels by recursive nearest-neighbor agglomeration. It yields exactly `k`
//! spatially connected clusters of even size, avoiding the giant-cluster
//! percolation of single linkage. A labeling becomes a compression operator
//! through [`CompressionModel`]: averaging voxels within clusters reduces a
//! `p`-dimensional image to `k` values, and the result can be expanded back
//! to voxel space.
//!
//! Baselines for comparison:
//!
//! - [`rand_single_linkage`]: random cuts of the minimum spanning tree that
//!   never split off singletons
//! - [`agglomerative`]: connectivity-constrained single, average, complete
//!   and Ward linkage
//! - [`SparseProjection`]: very sparse random projections
//!
//! [`synth`] generates smooth Gaussian random fields for experiments, and
//! [`experiments`] holds the percolation, isometry, denoising and timing
//! harnesses behind the `featagg` binary.
//!
//! ```
//! use featagg::{build_lattice_topology, fast_cluster, Connectivity, GridShape, Seed};
//! use featagg::synth::{smooth_random_field, SmoothFieldSpec};
//!
//! let spec = SmoothFieldSpec {
//!     shape: GridShape::cube(10).unwrap(),
//!     n: 5,
//!     fwhm: 4.0,
//!     noise_sigma: 0.5,
//!     seed: Seed(1),
//! };
//! let stack = smooth_random_field(&spec).unwrap().combined;
//! let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
//! let result = fast_cluster(&stack, &topology, 100).unwrap();
//! assert_eq!(result.labeling.n_clusters(), 100);
//! ```

pub mod baseline;
pub mod compression;
pub mod error;
pub mod experiments;
pub mod fast;
pub mod graph;
pub mod io;
pub mod labeling;
pub mod method;
pub mod projection;
pub mod seed;
pub mod synth;
pub mod volume;

pub use baseline::{agglomerate, agglomerative, rand_single_linkage, LinkageKind};
pub use compression::{isometry_ratio, CompressionModel, Reducer, ScalingMode};
pub use error::{Error, Result};
pub use fast::{contract_topology, fast_cluster, reduce_means, FastClusterResult};
pub use labeling::Labeling;
pub use method::{KSpec, Method, Reduction};
pub use projection::{make_projection, SparseProjection};
pub use seed::Seed;
pub use volume::{
    build_lattice_topology, clusters_are_connected, connected_component_count, Connectivity, GridShape,
    ImageStack, Mask, Topology,
};
