//! Doubly periodic mesh generators.
//!
//! Both generators produce uniform grids whose cell circumcenters coincide
//! with centroids, so the circumcentric twisted dual is immediately a
//! Voronoi diagram and the mesh pair is orthogonal.

use alloc::format;
use alloc::vec::Vec;

use crate::geom::Lattice;

use super::{MeshError, MeshPair, PrimalMesh};

/// Build an n×n doubly periodic square grid with the given edge length.
///
/// Straight cells are unit squares of side `spacing`; the twisted grid is
/// the half-cell-offset square grid with twisted vertices at cell centers.
///
/// Index layout (i fastest, all mod n): vertex (i,j) = j·n+i at
/// (i·spacing, j·spacing); x-edge (i,j) = j·n+i from (i,j) to (i+1,j);
/// y-edge (i,j) = n²+j·n+i from (i,j) to (i,j+1); cell (i,j) = j·n+i with
/// corner (i,j).
pub fn build_periodic_quad(n: usize, spacing: f64) -> Result<MeshPair, MeshError> {
    if n < 2 {
        return Err(MeshError::InvalidMeshSize(format!("quad grid needs n >= 2, got {n}")));
    }
    if !(spacing > 0.0) {
        return Err(MeshError::InvalidMeshSize(format!("spacing must be positive, got {spacing}")));
    }
    let len = n as f64 * spacing;
    let lattice = Lattice::new([len, 0.0], [0.0, len]);
    let vid = |i: usize, j: usize| (j % n) * n + (i % n);
    let ex = |i: usize, j: usize| (j % n) * n + (i % n);
    let ey = |i: usize, j: usize| n * n + (j % n) * n + (i % n);

    let mut vertex_pos = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertex_pos.push([i as f64 * spacing, j as f64 * spacing]);
        }
    }

    let mut edge_vertices = Vec::with_capacity(2 * n * n);
    let mut edge_vec = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            edge_vertices.push([vid(i, j), vid(i + 1, j)]);
            edge_vec.push([spacing, 0.0]);
        }
    }
    for j in 0..n {
        for i in 0..n {
            edge_vertices.push([vid(i, j), vid(i, j + 1)]);
            edge_vec.push([0.0, spacing]);
        }
    }

    // CCW loop of cell (i,j): bottom, right, top (reversed), left (reversed).
    let mut cell_loops = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cell_loops.push(alloc::vec![
                (ex(i, j), 1),
                (ey(i + 1, j), 1),
                (ex(i, j + 1), -1),
                (ey(i, j), -1),
            ]);
        }
    }

    MeshPair::from_primal(PrimalMesh { lattice, vertex_pos, edge_vertices, edge_vec, cell_loops })
}

/// Build a doubly periodic equilateral triangulation of the rhombic domain
/// spanned by n·a1, n·a2 with a1 = (s,0), a2 = (s/2, s·√3/2); the twisted
/// dual is the hexagonal Voronoi grid. `n` must be even so the hexagonal
/// tiling closes periodically.
///
/// Index layout (all mod n): vertex (i,j) = j·n+i at i·a1 + j·a2; edge
/// families: E (i,j)→(i+1,j) at j·n+i, NE (i,j)→(i,j+1) at n²+j·n+i,
/// NW (i+1,j)→(i,j+1) at 2n²+j·n+i; up-triangle (i,j) = j·n+i with corners
/// (i,j),(i+1,j),(i,j+1); down-triangle (i,j) = n²+j·n+i with corners
/// (i+1,j),(i+1,j+1),(i,j+1).
pub fn build_periodic_trihex(n: usize, spacing: f64) -> Result<MeshPair, MeshError> {
    if n < 2 || n % 2 != 0 {
        return Err(MeshError::InvalidMeshSize(format!(
            "trihex grid needs even n >= 2, got {n}"
        )));
    }
    if !(spacing > 0.0) {
        return Err(MeshError::InvalidMeshSize(format!("spacing must be positive, got {spacing}")));
    }
    let h = libm::sqrt(3.0) / 2.0 * spacing;
    let a1 = [spacing, 0.0];
    let a2 = [0.5 * spacing, h];
    let lattice = Lattice::new([n as f64 * a1[0], 0.0], [n as f64 * a2[0], n as f64 * a2[1]]);
    let vid = |i: usize, j: usize| (j % n) * n + (i % n);
    let e_east = |i: usize, j: usize| (j % n) * n + (i % n);
    let e_ne = |i: usize, j: usize| n * n + (j % n) * n + (i % n);
    let e_nw = |i: usize, j: usize| 2 * n * n + (j % n) * n + (i % n);

    let mut vertex_pos = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vertex_pos.push([i as f64 * a1[0] + j as f64 * a2[0], j as f64 * a2[1]]);
        }
    }

    let mut edge_vertices = Vec::with_capacity(3 * n * n);
    let mut edge_vec = Vec::with_capacity(3 * n * n);
    for j in 0..n {
        for i in 0..n {
            edge_vertices.push([vid(i, j), vid(i + 1, j)]);
            edge_vec.push(a1);
        }
    }
    for j in 0..n {
        for i in 0..n {
            edge_vertices.push([vid(i, j), vid(i, j + 1)]);
            edge_vec.push(a2);
        }
    }
    for j in 0..n {
        for i in 0..n {
            edge_vertices.push([vid(i + 1, j), vid(i, j + 1)]);
            edge_vec.push([a2[0] - a1[0], a2[1]]);
        }
    }

    // Up-triangles first, then down-triangles, both CCW.
    let mut cell_loops = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cell_loops.push(alloc::vec![
                (e_east(i, j), 1), // (i,j) → (i+1,j)
                (e_nw(i, j), 1),   // (i+1,j) → (i,j+1)
                (e_ne(i, j), -1),  // (i,j+1) → (i,j)
            ]);
        }
    }
    for j in 0..n {
        for i in 0..n {
            cell_loops.push(alloc::vec![
                (e_ne(i + 1, j), 1),   // (i+1,j) → (i+1,j+1)
                (e_east(i, j + 1), -1), // (i+1,j+1) → (i,j+1)
                (e_nw(i, j), -1),      // (i,j+1) → (i+1,j)
            ]);
        }
    }

    MeshPair::from_primal(PrimalMesh { lattice, vertex_pos, edge_vertices, edge_vec, cell_loops })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_counts_and_euler() {
        let m = build_periodic_quad(2, 1.0).unwrap();
        assert_eq!(m.topology.n_vertices, 4);
        assert_eq!(m.topology.n_edges, 8);
        assert_eq!(m.topology.n_cells, 4);
        // V − E + F = 0 on the torus.
        assert_eq!(
            m.topology.n_vertices as i64 - m.topology.n_edges as i64 + m.topology.n_cells as i64,
            0
        );
        assert!(m.orthogonal);
    }

    #[test]
    fn quad_areas_spacing_half() {
        let m = build_periodic_quad(3, 0.5).unwrap();
        for c in 0..m.topology.n_cells {
            assert!((m.geometry.cell_area[c] - 0.25).abs() < 1e-15);
        }
        for v in 0..m.topology.n_vertices {
            assert!((m.geometry.tcell_area[v] - 0.25).abs() < 1e-15);
        }
        let total: f64 = m.geometry.cell_area.iter().sum();
        assert!((total - 2.25).abs() < 1e-12);
        assert!((m.domain_area() - 2.25).abs() < 1e-12);
    }

    #[test]
    fn quad_edge_and_extended_edge_areas() {
        let m = build_periodic_quad(3, 1.0).unwrap();
        for e in 0..m.topology.n_edges {
            assert!((m.geometry.edge_len[e] - 1.0).abs() < 1e-15);
            assert!((m.geometry.tedge_len[e] - 1.0).abs() < 1e-15);
            // Two half-cell strips.
            assert!((m.geometry.ext_edge_area[e] - 1.0).abs() < 1e-14);
            for s in m.geometry.overlap_tcell_tedge[e] {
                assert!((s - 0.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn quad_overlaps_are_quarter_cells() {
        let m = build_periodic_quad(3, 1.0).unwrap();
        for v in 0..m.topology.n_vertices {
            assert_eq!(m.geometry.overlap_cell_tcell[v].len(), 4);
            for &a in &m.geometry.overlap_cell_tcell[v] {
                assert!((a - 0.25).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn trihex_counts() {
        let m = build_periodic_trihex(2, 1.0).unwrap();
        assert_eq!(m.topology.n_cells, 8); // triangles
        assert_eq!(m.topology.n_vertices, 4); // hexagon count on the dual
        assert_eq!(m.topology.n_edges, 12);
        assert!(m.orthogonal);
        for v in 0..m.topology.n_vertices {
            assert_eq!(m.topology.vertex_cells[v].len(), 6);
        }
    }

    #[test]
    fn trihex_area_partition() {
        let m = build_periodic_trihex(4, 1.0).unwrap();
        let s: f64 = m.geometry.cell_area.iter().sum();
        let st: f64 = m.geometry.tcell_area.iter().sum();
        assert!((s - m.domain_area()).abs() < 1e-12);
        assert!((st - m.domain_area()).abs() < 1e-12);
    }

    #[test]
    fn invalid_sizes_are_rejected() {
        assert!(matches!(build_periodic_quad(1, 1.0), Err(MeshError::InvalidMeshSize(_))));
        assert!(matches!(build_periodic_trihex(3, 1.0), Err(MeshError::InvalidMeshSize(_))));
        assert!(matches!(build_periodic_trihex(0, 1.0), Err(MeshError::InvalidMeshSize(_))));
    }
}
