//! Dual straight/twisted cell complexes on the doubly periodic plane.
//!
//! A [`MeshPair`] couples an inner-oriented *straight* grid (vertices v,
//! edges e, cells c) with its outer-oriented *twisted* Voronoi dual
//! (vertices ṽ, edges ẽ, cells c̃). The duality identifies straight k-cells
//! with twisted (2−k)-cells:
//!
//! * twisted vertex ṽ ↔ straight cell c (ṽ sits at the circumcenter of c),
//! * twisted edge ẽ ↔ straight edge e (ẽ crosses e),
//! * twisted cell c̃ ↔ straight vertex v (c̃ is the Voronoi cell of v).
//!
//! Twisted entities are *indexed by their straight duals*: ṽ_i is dual to
//! cell i, ẽ_i to edge i, c̃_i to vertex i. The duality bijections are stored
//! explicitly (and validated) but are identity maps under this convention.
//!
//! Orientation bookkeeping (index order: vertex-then-edge for `t_ve`):
//!
//! * `t_ve` = +1 if v is the head of e, −1 if the tail, so
//!   `(D1 x⁰)_e = Σ_v t_ve x_v = x_head − x_tail`.
//! * `n_ec` = +1 if e is traversed tail→head by the counterclockwise
//!   boundary loop of c, so `(D2 x¹)_c` is the CCW circulation.
//! * Induced twisted orientations: `t̃_ṽẽ = n_ec`, `ñ_ẽc̃ = −t_ve` under
//!   duality. Geometrically the twisted edge then runs from the dual of the
//!   right cell to the dual of the left cell of e, and the twisted normal m̂
//!   is parallel to the straight tangent t̂ (checked by validation).
//!
//! Because edges may wrap around the periodic domain (and, for n = 2
//! meshes, span exactly half of it), vertex coordinates alone do not
//! determine edge geometry. The primitive geometric data are therefore the
//! per-edge displacement vectors `edge_vec`; all polygons are unfolded by
//! accumulating them, never by minimum-image guessing between far points.

mod generators;
mod validate;

pub use generators::{build_periodic_quad, build_periodic_trihex};
pub use validate::{validate_mesh, InvariantFailure};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{self, Lattice, Point};

/// Incidence and orientation data for both grids.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshTopology {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_cells: usize,
    /// VE(e): `[tail, head]` vertices of each straight edge.
    pub edge_vertices: Vec<[usize; 2]>,
    /// CE(e): `[right, left]` cells of each straight edge, where *left* is
    /// the cell with `n_ec = +1` (the one whose CCW boundary traverses e
    /// tail→head). Doubles as VE(ẽ): the twisted edge runs right → left.
    pub edge_cells: Vec<[usize; 2]>,
    /// EC(c): CCW boundary loop of each cell as `(edge, n_ec)` pairs.
    pub cell_edges: Vec<Vec<(usize, i32)>>,
    /// VC(c): CCW vertex loop; vertex k is the tail of loop edge k.
    pub cell_vertices: Vec<Vec<usize>>,
    /// EV(v): edges incident to v, ordered CCW by outgoing direction.
    /// Doubles as EC(c̃) for the dual twisted cell.
    pub vertex_edges: Vec<Vec<usize>>,
    /// CV(v): cells around v, ordered so cell k lies between edges k and
    /// k+1 of `vertex_edges[v]` (cyclically).
    pub vertex_cells: Vec<Vec<usize>>,
    /// Duality bijections (identity under our indexing, stored explicitly).
    pub tvert_of_cell: Vec<usize>,
    pub tedge_of_edge: Vec<usize>,
    pub tcell_of_vertex: Vec<usize>,
}

/// Sizes, coordinates, and overlap areas for both grids.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshGeometry {
    pub lattice: Lattice,
    /// Straight vertex coordinates, wrapped into the fundamental domain.
    pub vertex_pos: Vec<Point>,
    /// Twisted vertex coordinates (cell circumcenters), wrapped.
    pub tvert_pos: Vec<Point>,
    /// Primitive datum: displacement tail→head of each straight edge.
    pub edge_vec: Vec<Point>,
    /// A_e: straight edge lengths.
    pub edge_len: Vec<f64>,
    /// Displacement of each twisted edge (dual of right cell → dual of left).
    pub tedge_vec: Vec<Point>,
    /// A_ẽ: twisted edge lengths.
    pub tedge_len: Vec<f64>,
    /// A_c: straight cell areas.
    pub cell_area: Vec<f64>,
    /// A_c̃: twisted cell areas, indexed by the dual vertex.
    pub tcell_area: Vec<f64>,
    /// A_{c̃,c}: overlap of twisted cell c̃(v) with cell c, aligned with
    /// `topology.vertex_cells[v]`.
    pub overlap_cell_tcell: Vec<Vec<f64>>,
    /// Ã_ẽ: extended edge areas (twice the kite spanned by VE(e) ∪ VE(ẽ);
    /// for orthogonal meshes this equals A_e·A_ẽ, the two half-cell strips).
    pub ext_edge_area: Vec<f64>,
    /// A_{c̃,ẽ}: overlap of the extended edge area with the twisted cells of
    /// the edge's `[tail, head]` vertices.
    pub overlap_tcell_tedge: Vec<[f64; 2]>,
    /// Cell polygon in local coordinates anchored at its first loop vertex
    /// (add `vertex_pos[cell_vertices[c][0]]` for absolute points).
    pub cell_poly: Vec<Vec<Point>>,
    /// Twisted cell polygon relative to its vertex v (circumcenters of
    /// CV(v) in `vertex_cells` order).
    pub tcell_poly: Vec<Vec<Point>>,
    /// Circumcenter relative to the cell polygon anchor.
    pub tvert_offset: Vec<Point>,
}

/// A validated pair of dual complexes.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshPair {
    pub topology: MeshTopology,
    pub geometry: MeshGeometry,
    /// True when straight and twisted edges are mutually perpendicular at
    /// every crossing (|t̂·m̂ − 1| ≤ 1e−12).
    pub orthogonal: bool,
}

/// Raw straight-grid data from which a [`MeshPair`] is constructed.
///
/// Cells are CCW boundary loops of *signed edges* (+1 = traversed
/// tail→head). Loops are given in terms of edges, not vertices, because on
/// the smallest periodic meshes two distinct edges can join the same vertex
/// pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalMesh {
    pub lattice: Lattice,
    pub vertex_pos: Vec<Point>,
    pub edge_vertices: Vec<[usize; 2]>,
    pub edge_vec: Vec<Point>,
    pub cell_loops: Vec<Vec<(usize, i32)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshError {
    /// Generator parameter out of range (n < 2, or odd n for trihex).
    InvalidMeshSize(String),
    /// Structurally inconsistent primal data.
    InvalidTopology(String),
    /// Degenerate geometry (zero-length edge, non-CCW cell, ...).
    InvalidGeometry(String),
}

impl core::fmt::Display for MeshError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MeshError::InvalidMeshSize(m) => write!(f, "invalid mesh size: {m}"),
            MeshError::InvalidTopology(m) => write!(f, "invalid topology: {m}"),
            MeshError::InvalidGeometry(m) => write!(f, "invalid geometry: {m}"),
        }
    }
}

impl core::error::Error for MeshError {}

/// Explicit induced twisted orientations (the duals of `n_ec` and `t_ve`).
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedOrientation {
    /// Per twisted edge ẽ (indexed by e): `(ṽ, t̃_ṽẽ)` for its two endpoints.
    pub tedge_tverts: Vec<[(usize, i32); 2]>,
    /// Per twisted cell c̃ (indexed by v): `(ẽ, ñ_ẽc̃)` for its boundary.
    pub tcell_tedges: Vec<Vec<(usize, i32)>>,
}

/// Induce the twisted orientations from the straight ones:
/// `t̃_ṽẽ = n_ec` and `ñ_ẽc̃ = −t_ve` under the duality bijections.
pub fn induce_twisted_orientation(topo: &MeshTopology) -> TwistedOrientation {
    let tedge_tverts = topo
        .edge_cells
        .iter()
        .map(|&[right, left]| {
            // t̃ = n_ec: the left cell (n = +1) is the head of ẽ.
            [
                (topo.tvert_of_cell[right], -1),
                (topo.tvert_of_cell[left], 1),
            ]
        })
        .collect();
    let tcell_tedges = (0..topo.n_vertices)
        .map(|v| {
            topo.vertex_edges[v]
                .iter()
                .map(|&e| (topo.tedge_of_edge[e], -topo.t_ve(v, e)))
                .collect()
        })
        .collect();
    TwistedOrientation { tedge_tverts, tcell_tedges }
}

impl MeshTopology {
    /// Orientation coefficient t_ve (+1 head, −1 tail, 0 if not incident).
    pub fn t_ve(&self, v: usize, e: usize) -> i32 {
        let [tail, head] = self.edge_vertices[e];
        if v == head {
            1
        } else if v == tail {
            -1
        } else {
            0
        }
    }

    /// Orientation coefficient n_ec (+1 if c is the left cell of e).
    pub fn n_ec(&self, e: usize, c: usize) -> i32 {
        let [right, left] = self.edge_cells[e];
        if c == left {
            1
        } else if c == right {
            -1
        } else {
            0
        }
    }

    /// ECP(e) = EC(CE(e)): edges of the two cells adjacent to e (with
    /// duplicates removed, e itself included).
    pub fn ecp(&self, e: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &c in &self.edge_cells[e] {
            for &(f, _) in &self.cell_edges[c] {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
        out
    }
}

impl MeshPair {
    /// Build the dual complex from primal (straight-grid) data.
    ///
    /// Performs the structural checks needed for construction to make sense;
    /// the full invariant suite lives in [`validate_mesh`].
    pub fn from_primal(primal: PrimalMesh) -> Result<MeshPair, MeshError> {
        build_pair(primal)
    }

    pub fn domain_area(&self) -> f64 {
        self.geometry.lattice.domain_area()
    }

    /// Absolute coordinates of the k-th corner of cell `c` (unwrapped
    /// relative to the cell anchor; may exit the fundamental domain).
    pub fn cell_corner(&self, c: usize, k: usize) -> Point {
        let anchor = self.geometry.vertex_pos[self.topology.cell_vertices[c][0]];
        geom::add(anchor, self.geometry.cell_poly[c][k])
    }
}

fn topo_err(msg: String) -> MeshError {
    MeshError::InvalidTopology(msg)
}

fn build_pair(primal: PrimalMesh) -> Result<MeshPair, MeshError> {
    let n_vertices = primal.vertex_pos.len();
    let n_edges = primal.edge_vertices.len();
    let n_cells = primal.cell_loops.len();
    if n_vertices == 0 || n_edges == 0 || n_cells == 0 {
        return Err(topo_err(String::from("empty mesh")));
    }
    if primal.edge_vec.len() != n_edges {
        return Err(topo_err(String::from("edge_vec length mismatch")));
    }

    for (e, &[a, b]) in primal.edge_vertices.iter().enumerate() {
        if a >= n_vertices || b >= n_vertices {
            return Err(topo_err(format!("edge {e} references missing vertex")));
        }
        if a == b {
            return Err(topo_err(format!("edge {e} is a self-loop")));
        }
    }

    // Vertex loops from edge loops: vertex k is the tail of loop edge k.
    let mut cell_vertices: Vec<Vec<usize>> = Vec::with_capacity(n_cells);
    for (c, loop_edges) in primal.cell_loops.iter().enumerate() {
        if loop_edges.len() < 3 {
            return Err(topo_err(format!("cell {c} has fewer than 3 edges")));
        }
        let mut verts = Vec::with_capacity(loop_edges.len());
        for (k, &(e, s)) in loop_edges.iter().enumerate() {
            if e >= n_edges {
                return Err(topo_err(format!("cell {c} references missing edge {e}")));
            }
            if s != 1 && s != -1 {
                return Err(topo_err(format!("cell {c} has orientation not in {{-1,+1}}")));
            }
            let [tail, head] = primal.edge_vertices[e];
            let (from, to) = if s == 1 { (tail, head) } else { (head, tail) };
            let &(e_next, s_next) = &loop_edges[(k + 1) % loop_edges.len()];
            let [t2, h2] = primal.edge_vertices[e_next];
            let from_next = if s_next == 1 { t2 } else { h2 };
            if to != from_next {
                return Err(topo_err(format!("cell {c} boundary loop is not connected")));
            }
            verts.push(from);
        }
        let mut sorted = verts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != verts.len() {
            return Err(topo_err(format!("cell {c} visits a vertex twice")));
        }
        cell_vertices.push(verts);
    }

    // Each edge must be traversed exactly once in each direction.
    let mut edge_cells: Vec<[Option<usize>; 2]> = alloc::vec![[None, None]; n_edges];
    for (c, loop_edges) in primal.cell_loops.iter().enumerate() {
        for &(e, s) in loop_edges {
            let slot = if s == 1 { 1 } else { 0 }; // +1 → left cell
            if edge_cells[e][slot].is_some() {
                return Err(topo_err(format!("edge {e} traversed twice in the same direction")));
            }
            edge_cells[e][slot] = Some(c);
        }
    }
    let edge_cells: Vec<[usize; 2]> = edge_cells
        .into_iter()
        .enumerate()
        .map(|(e, [r, l])| match (r, l) {
            (Some(r), Some(l)) => Ok([r, l]),
            _ => Err(topo_err(format!("edge {e} is not shared by two cell traversals"))),
        })
        .collect::<Result<_, _>>()?;

    // Unfolded cell polygons and circumcenters.
    let mut cell_poly: Vec<Vec<Point>> = Vec::with_capacity(n_cells);
    let mut cell_area = Vec::with_capacity(n_cells);
    let mut tvert_offset = Vec::with_capacity(n_cells);
    for (c, loop_edges) in primal.cell_loops.iter().enumerate() {
        let mut poly = Vec::with_capacity(loop_edges.len());
        let mut p: Point = [0.0, 0.0];
        for &(e, s) in loop_edges {
            poly.push(p);
            p = geom::add(p, geom::scale(primal.edge_vec[e], s as f64));
        }
        let gap = geom::norm(p);
        let scale = geom::norm(geom::sub(poly[1], poly[0])).max(1.0);
        if gap > 1e-9 * scale {
            return Err(MeshError::InvalidGeometry(format!(
                "cell {c} boundary does not close (gap {gap:e})"
            )));
        }
        let area = geom::polygon_signed_area(&poly);
        if area <= 0.0 {
            return Err(MeshError::InvalidGeometry(format!(
                "cell {c} is not counterclockwise (signed area {area:e})"
            )));
        }
        tvert_offset.push(geom::circumcenter(poly[0], poly[1], poly[2]));
        cell_area.push(area);
        cell_poly.push(poly);
    }

    let tvert_pos: Vec<Point> = (0..n_cells)
        .map(|c| {
            let anchor = primal.vertex_pos[cell_vertices[c][0]];
            primal.lattice.wrap(geom::add(anchor, tvert_offset[c]))
        })
        .collect();

    // CCW-ordered edges around each vertex.
    let mut vertex_edges: Vec<Vec<usize>> = alloc::vec![Vec::new(); n_vertices];
    for (e, &[tail, head]) in primal.edge_vertices.iter().enumerate() {
        vertex_edges[tail].push(e);
        vertex_edges[head].push(e);
    }
    for (v, edges) in vertex_edges.iter_mut().enumerate() {
        if edges.len() < 3 {
            return Err(topo_err(format!("vertex {v} has valence {} < 3", edges.len())));
        }
        edges.sort_by(|&a, &b| {
            let angle = |e: usize| {
                let d = if primal.edge_vertices[e][0] == v {
                    primal.edge_vec[e]
                } else {
                    geom::scale(primal.edge_vec[e], -1.0)
                };
                libm::atan2(d[1], d[0])
            };
            angle(a).partial_cmp(&angle(b)).expect("finite edge angles")
        });
    }

    // Cells per vertex (unordered helper).
    let mut cells_at_vertex: Vec<Vec<usize>> = alloc::vec![Vec::new(); n_vertices];
    for (c, verts) in cell_vertices.iter().enumerate() {
        for &v in verts {
            cells_at_vertex[v].push(c);
        }
    }

    // CV(v): the unique cell between consecutive CCW edges.
    let mut vertex_cells: Vec<Vec<usize>> = Vec::with_capacity(n_vertices);
    for v in 0..n_vertices {
        let edges = &vertex_edges[v];
        let mut ring = Vec::with_capacity(edges.len());
        for k in 0..edges.len() {
            let e0 = edges[k];
            let e1 = edges[(k + 1) % edges.len()];
            let mut found = None;
            for &c in &cells_at_vertex[v] {
                let has = |e: usize| primal.cell_loops[c].iter().any(|&(f, _)| f == e);
                if has(e0) && has(e1) {
                    if found.is_some() {
                        return Err(topo_err(format!(
                            "vertex {v}: edges {e0},{e1} share more than one cell"
                        )));
                    }
                    found = Some(c);
                }
            }
            ring.push(found.ok_or_else(|| {
                topo_err(format!("vertex {v}: no cell between consecutive edges {e0},{e1}"))
            })?);
        }
        vertex_cells.push(ring);
    }

    let topology = MeshTopology {
        n_vertices,
        n_edges,
        n_cells,
        edge_vertices: primal.edge_vertices.clone(),
        edge_cells,
        cell_edges: primal.cell_loops.clone(),
        cell_vertices,
        vertex_edges,
        vertex_cells,
        tvert_of_cell: (0..n_cells).collect(),
        tedge_of_edge: (0..n_edges).collect(),
        tcell_of_vertex: (0..n_vertices).collect(),
    };

    // Circumcenter of cell c relative to a vertex v on its boundary.
    let cc_rel = |c: usize, v: usize| -> Point {
        let k = topology.cell_vertices[c]
            .iter()
            .position(|&w| w == v)
            .expect("vertex on cell boundary");
        geom::sub(tvert_offset[c], cell_poly[c][k])
    };

    // Twisted edges: dual of right cell → dual of left cell.
    let mut tedge_vec = Vec::with_capacity(n_edges);
    let mut tedge_len = Vec::with_capacity(n_edges);
    let mut edge_len = Vec::with_capacity(n_edges);
    for e in 0..n_edges {
        let [right, left] = topology.edge_cells[e];
        let tail = topology.edge_vertices[e][0];
        let d = geom::sub(cc_rel(left, tail), cc_rel(right, tail));
        let len = geom::norm(d);
        let elen = geom::norm(primal.edge_vec[e]);
        if len <= 0.0 || elen <= 0.0 {
            return Err(MeshError::InvalidGeometry(format!("edge {e} degenerate")));
        }
        tedge_vec.push(d);
        tedge_len.push(len);
        edge_len.push(elen);
    }

    // Twisted cell polygons (circumcenters of CV(v) relative to v).
    let mut tcell_poly = Vec::with_capacity(n_vertices);
    let mut tcell_area = Vec::with_capacity(n_vertices);
    for v in 0..n_vertices {
        let poly: Vec<Point> = topology.vertex_cells[v].iter().map(|&c| cc_rel(c, v)).collect();
        let area = geom::polygon_signed_area(&poly);
        if area <= 0.0 {
            return Err(MeshError::InvalidGeometry(format!(
                "twisted cell at vertex {v} is not counterclockwise"
            )));
        }
        tcell_area.push(area);
        tcell_poly.push(poly);
    }

    // Overlaps A_{c̃,c} by convex clipping in the frame of v.
    let mut overlap_cell_tcell = Vec::with_capacity(n_vertices);
    for v in 0..n_vertices {
        let mut overlaps = Vec::with_capacity(topology.vertex_cells[v].len());
        for &c in &topology.vertex_cells[v] {
            let k = topology.cell_vertices[c]
                .iter()
                .position(|&w| w == v)
                .expect("vertex on cell boundary");
            let cell_rel: Vec<Point> = cell_poly[c]
                .iter()
                .map(|&p| geom::sub(p, cell_poly[c][k]))
                .collect();
            let inter = geom::clip_convex(&tcell_poly[v], &cell_rel);
            overlaps.push(if inter.len() >= 3 {
                geom::polygon_signed_area(&inter)
            } else {
                0.0
            });
        }
        overlap_cell_tcell.push(overlaps);
    }

    // Extended edge areas: twice the kite (v_tail, ṽ_right, v_head, ṽ_left),
    // split along the edge into the two twisted-cell pieces.
    let mut ext_edge_area = Vec::with_capacity(n_edges);
    let mut overlap_tcell_tedge = Vec::with_capacity(n_edges);
    for e in 0..n_edges {
        let [right, left] = topology.edge_cells[e];
        let tail = topology.edge_vertices[e][0];
        let p_tail: Point = [0.0, 0.0];
        let p_head = primal.edge_vec[e];
        let cc_r = cc_rel(right, tail);
        let cc_l = cc_rel(left, tail);
        let tri = |a: Point, b: Point, c: Point| {
            0.5 * geom::cross(geom::sub(b, a), geom::sub(c, a)).abs()
        };
        let at_tail = 2.0 * tri(p_tail, cc_r, cc_l);
        let at_head = 2.0 * tri(p_head, cc_r, cc_l);
        overlap_tcell_tedge.push([at_tail, at_head]);
        ext_edge_area.push(at_tail + at_head);
    }

    let vertex_pos: Vec<Point> = primal.vertex_pos.iter().map(|&p| primal.lattice.wrap(p)).collect();

    let geometry = MeshGeometry {
        lattice: primal.lattice,
        vertex_pos,
        tvert_pos,
        edge_vec: primal.edge_vec,
        edge_len,
        tedge_vec,
        tedge_len,
        cell_area,
        tcell_area,
        overlap_cell_tcell,
        ext_edge_area,
        overlap_tcell_tedge,
        cell_poly,
        tcell_poly,
        tvert_offset,
    };

    // Orthogonality: twisted normal m̂ parallel to straight tangent t̂.
    let orthogonal = (0..n_edges).all(|e| {
        let t_hat = geom::scale(geometry.edge_vec[e], 1.0 / geometry.edge_len[e]);
        let s_hat = geom::scale(geometry.tedge_vec[e], 1.0 / geometry.tedge_len[e]);
        let m_hat = geom::rot_cw(s_hat);
        (geom::dot(t_hat, m_hat) - 1.0).abs() <= 1e-12
    });

    Ok(MeshPair { topology, geometry, orthogonal })
}
