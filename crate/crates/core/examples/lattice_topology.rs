//! Builds the face-adjacency graph of a masked 2D grid and inspects it.

use featagg::{build_lattice_topology, connected_component_count, Connectivity, GridShape, Mask};

fn main() -> featagg::Result<()> {
    // 4x5 grid with a wall of outside cells in column 2
    let shape = GridShape::new(&[4, 5])?;
    let inside: Vec<bool> = (0..shape.n_cells()).map(|cell| cell % 5 != 2).collect();
    let mask = Mask::new(shape, inside)?;
    let topology = build_lattice_topology(&mask, Connectivity::Faces);

    println!("voxels: {}", mask.n_voxels());
    println!("edges: {}", topology.n_edges());
    println!("components: {}", connected_component_count(&topology));
    println!("degrees: {:?}", topology.degrees());

    let cube = Mask::full(GridShape::cube(3)?);
    let t = build_lattice_topology(&cube, Connectivity::Faces);
    println!("3x3x3 cube: {} voxels, {} edges", cube.n_voxels(), t.n_edges());
    Ok(())
}
