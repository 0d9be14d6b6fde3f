//! Masked image lattices and their neighborhood graphs.
//!
//! Voxels are the inside cells of a [`Mask`], numbered `0..p` in row-major
//! order over the grid. Everything downstream (edge order, tie-breaking,
//! labeling order) is defined in terms of that numbering.

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::graph::DisjointSet;
use crate::labeling::Labeling;

const MAX_CELLS: usize = i32::MAX as usize;

/// Voxel counts per axis of a 2D or 3D grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridShape {
    dims: Vec<usize>,
}

impl GridShape {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) {
            return Err(Error::InvalidShape(format!(
                "expected 2 or 3 axes, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape(format!("zero-length axis in {dims:?}")));
        }
        let cells = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::InvalidShape(format!("{dims:?} has more than 2^31-1 cells")))?;
        debug_assert!(cells >= 1);
        Ok(GridShape {
            dims: dims.to_vec(),
        })
    }

    /// A `edge × edge × edge` cube.
    pub fn cube(edge: usize) -> Result<Self> {
        Self::new(&[edge, edge, edge])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn n_cells(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: the last axis varies fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for a in (0..self.dims.len() - 1).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        strides
    }

    pub fn coords(&self, cell: usize) -> Vec<usize> {
        let mut rest = cell;
        let mut out = vec![0; self.dims.len()];
        for (a, &d) in self.dims.iter().enumerate().rev() {
            out[a] = rest % d;
            rest /= d;
        }
        out
    }
}

/// Boolean selection of grid cells. At least one cell must be inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    shape: GridShape,
    inside: Vec<bool>,
    cells: Vec<usize>,
}

impl Mask {
    pub fn new(shape: GridShape, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != shape.n_cells() {
            return Err(Error::DimensionMismatch {
                expected: shape.n_cells(),
                found: inside.len(),
            });
        }
        let cells: Vec<usize> = inside
            .iter()
            .enumerate()
            .filter_map(|(c, &b)| b.then_some(c))
            .collect();
        if cells.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(Mask {
            shape,
            inside,
            cells,
        })
    }

    pub fn full(shape: GridShape) -> Self {
        let n = shape.n_cells();
        Mask {
            shape,
            inside: vec![true; n],
            cells: (0..n).collect(),
        }
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    /// Number of inside voxels, `p`.
    pub fn n_voxels(&self) -> usize {
        self.cells.len()
    }

    /// Grid cell index of every voxel, ascending.
    pub fn voxel_cells(&self) -> &[usize] {
        &self.cells
    }

    /// Voxel index of every grid cell (`None` outside the mask).
    pub fn cell_to_voxel(&self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.inside.len()];
        for (v, &c) in self.cells.iter().enumerate() {
            map[c] = Some(v);
        }
        map
    }
}

/// A masked lattice carrying one feature row of `n` samples per voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageStack {
    mask: Mask,
    data: Array2<f64>,
}

impl ImageStack {
    pub fn new(mask: Mask, data: Array2<f64>) -> Result<Self> {
        if data.nrows() != mask.n_voxels() {
            return Err(Error::DimensionMismatch {
                expected: mask.n_voxels(),
                found: data.nrows(),
            });
        }
        if data.ncols() == 0 {
            return Err(Error::InvalidData("at least one sample is required".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry".into()));
        }
        Ok(ImageStack { mask, data })
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    /// `p × n` matrix, one row per voxel.
    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn n_voxels(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }

    /// The stack restricted to the given sample columns.
    pub fn select_samples(&self, columns: &[usize]) -> Result<ImageStack> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.n_samples()) {
            return Err(Error::DimensionMismatch {
                expected: self.n_samples(),
                found: bad + 1,
            });
        }
        ImageStack::new(self.mask.clone(), self.data.select(Axis(1), columns))
    }

    pub fn into_parts(self) -> (Mask, Array2<f64>) {
        (self.mask, self.data)
    }
}

/// Lattice neighborhood used to build topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Neighbors share a face: 4-connectivity in 2D, 6-connectivity in 3D.
    #[default]
    Faces,
}

/// Undirected simple graph over voxel indices, edges stored as sorted
/// `(i, j)` pairs with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    /// Normalizes endpoint order, sorts and deduplicates. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop at {a}")));
            }
            if a.max(b) >= n_nodes {
                return Err(Error::InvalidTopology(format!(
                    "edge ({a}, {b}) out of range for {n_nodes} nodes"
                )));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Topology {
            n_nodes,
            edges: out,
        })
    }

    pub(crate) fn from_sorted_unchecked(n_nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(i, j)| i < j && j < n_nodes));
        Topology { n_nodes, edges }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_nodes];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }
}

/// All pairs of inside cells adjacent along exactly one axis.
pub fn build_lattice_topology(mask: &Mask, connectivity: Connectivity) -> Topology {
    let Connectivity::Faces = connectivity;
    let shape = mask.shape();
    let strides = shape.strides();
    let to_voxel = mask.cell_to_voxel();
    let mut edges = Vec::with_capacity(mask.n_voxels() * shape.ndim());
    for (v, &cell) in mask.voxel_cells().iter().enumerate() {
        let coords = shape.coords(cell);
        for axis in 0..shape.ndim() {
            if coords[axis] + 1 < shape.dims()[axis] {
                if let Some(u) = to_voxel[cell + strides[axis]] {
                    edges.push((v, u));
                }
            }
        }
    }
    edges.sort_unstable();
    Topology::from_sorted_unchecked(mask.n_voxels(), edges)
}

/// Number of connected components, isolated voxels included.
pub fn connected_component_count(topology: &Topology) -> usize {
    let mut ds = DisjointSet::new(topology.n_nodes());
    for &(i, j) in topology.edges() {
        ds.union(i, j);
    }
    ds.count()
}

/// True when every cluster of `labeling` induces a connected subgraph of
/// `topology`.
pub fn clusters_are_connected(topology: &Topology, labeling: &Labeling) -> bool {
    let mut ds = DisjointSet::new(topology.n_nodes());
    for &(i, j) in topology.edges() {
        if labeling.label(i) == labeling.label(j) {
            ds.union(i, j);
        }
    }
    ds.count() == labeling.n_clusters()
}
