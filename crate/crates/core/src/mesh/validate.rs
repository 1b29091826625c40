//! Mesh invariant checking.
//!
//! [`validate_mesh`] re-derives every structural and geometric invariant
//! from the stored fields and reports violations as data (an empty report
//! means the mesh is valid). Checks deliberately recompute from independent
//! fields so that a corrupted entry in any one array is caught by at least
//! one item.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom;

use super::MeshPair;

/// One failed mesh invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantFailure {
    /// Stable machine-readable name of the invariant.
    pub name: &'static str,
    /// Human-readable details (offending index, magnitudes).
    pub detail: String,
}

impl core::fmt::Display for InvariantFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.name, self.detail)
    }
}

/// Relative tolerance for geometric identities.
const GEOM_TOL: f64 = 1e-12;

/// Validate a mesh pair; returns a report of all failed invariants.
pub fn validate_mesh(mesh: &MeshPair) -> Vec<InvariantFailure> {
    let mut failures = Vec::new();
    let topo = &mesh.topology;
    let geo = &mesh.geometry;
    let mut fail = |name: &'static str, detail: String| {
        failures.push(InvariantFailure { name, detail });
    };

    // --- Duality maps are bijections.
    for (name, map, n) in [
        ("duality-cell-tvert", &topo.tvert_of_cell, topo.n_cells),
        ("duality-edge-tedge", &topo.tedge_of_edge, topo.n_edges),
        ("duality-vertex-tcell", &topo.tcell_of_vertex, topo.n_vertices),
    ] {
        let mut seen = vec![false; n];
        let mut ok = map.len() == n;
        for &t in map {
            if t >= n || seen[t] {
                ok = false;
                break;
            }
            seen[t] = true;
        }
        if !ok {
            fail(name, String::from("duality map is not a bijection"));
        }
    }

    // --- Every edge has exactly 2 distinct vertices and 2 distinct cells.
    for e in 0..topo.n_edges {
        let [a, b] = topo.edge_vertices[e];
        if a == b {
            fail("edge-two-vertices", format!("edge {e} is a self-loop"));
        }
        let [r, l] = topo.edge_cells[e];
        if r == l {
            fail("edge-two-cells", format!("edge {e} has the same cell on both sides"));
        }
    }

    // --- Euler characteristic of the torus.
    let chi = topo.n_vertices as i64 - topo.n_edges as i64 + topo.n_cells as i64;
    if chi != 0 {
        fail("euler-characteristic", format!("V - E + F = {chi}, expected 0"));
    }

    // --- Orientation consistency: cell loops vs edge_cells, and the
    // coboundary-of-coboundary test D2·D1 = 0 computed from raw incidence.
    for (c, loop_edges) in topo.cell_edges.iter().enumerate() {
        for &(e, s) in loop_edges {
            let expect = if s == 1 { topo.edge_cells[e][1] } else { topo.edge_cells[e][0] };
            if expect != c {
                fail(
                    "orientation-consistency",
                    format!("cell {c} traverses edge {e} with sign {s} but edge_cells disagrees"),
                );
            }
        }
    }
    for c in 0..topo.n_cells {
        // Row c of D2·D1: sum over boundary edges of signed vertex incidences.
        let mut acc: Vec<(usize, i32)> = Vec::new();
        for &(e, s) in &topo.cell_edges[c] {
            let [tail, head] = topo.edge_vertices[e];
            for (v, t) in [(tail, -1), (head, 1)] {
                match acc.iter_mut().find(|(w, _)| *w == v) {
                    Some((_, a)) => *a += s * t,
                    None => acc.push((v, s * t)),
                }
            }
        }
        if acc.iter().any(|&(_, a)| a != 0) {
            fail("coboundary-squared", format!("D2·D1 != 0 on cell {c}"));
        }
    }

    // --- ECP composition: e itself and all edges of CE(e), nothing else.
    for e in 0..topo.n_edges {
        let ecp = topo.ecp(e);
        if !ecp.contains(&e) {
            fail("ecp-composition", format!("ECP({e}) does not contain e"));
        }
        for &f in &ecp {
            let shares_cell = topo.edge_cells[e]
                .iter()
                .any(|&c| topo.cell_edges[c].iter().any(|&(g, _)| g == f));
            if !shares_cell {
                fail("ecp-composition", format!("edge {f} in ECP({e}) shares no cell with {e}"));
            }
        }
    }

    // --- Positivity of all sizes.
    let all_positive = geo.edge_len.iter().chain(&geo.tedge_len).chain(&geo.cell_area)
        .chain(&geo.tcell_area).chain(&geo.ext_edge_area).all(|&x| x > 0.0);
    if !all_positive {
        fail("positive-sizes", String::from("some length or area is not strictly positive"));
    }

    // --- Overlap partitions.
    let scale = geo.lattice.domain_area();
    for v in 0..topo.n_vertices {
        let sum: f64 = geo.overlap_cell_tcell[v].iter().sum();
        if (sum - geo.tcell_area[v]).abs() > GEOM_TOL * geo.tcell_area[v].max(1.0) {
            fail(
                "overlap-partition-tcell",
                format!("sum_c A_(c~,c) = {sum} != A_c~ = {} at vertex {v}", geo.tcell_area[v]),
            );
        }
    }
    let mut per_cell = vec![0.0; topo.n_cells];
    for v in 0..topo.n_vertices {
        for (k, &c) in topo.vertex_cells[v].iter().enumerate() {
            per_cell[c] += geo.overlap_cell_tcell[v][k];
        }
    }
    for c in 0..topo.n_cells {
        if (per_cell[c] - geo.cell_area[c]).abs() > GEOM_TOL * geo.cell_area[c].max(1.0) {
            fail(
                "overlap-partition-cell",
                format!("sum_c~ A_(c~,c) = {} != A_c = {} at cell {c}", per_cell[c], geo.cell_area[c]),
            );
        }
    }
    for e in 0..topo.n_edges {
        let sum: f64 = geo.overlap_tcell_tedge[e].iter().sum();
        if (sum - geo.ext_edge_area[e]).abs() > GEOM_TOL * geo.ext_edge_area[e].max(1.0) {
            fail(
                "overlap-partition-tedge",
                format!("sum A_(c~,e~) != ext edge area at edge {e}"),
            );
        }
    }
    let total_c: f64 = geo.cell_area.iter().sum();
    let total_tc: f64 = geo.tcell_area.iter().sum();
    if (total_c - scale).abs() > GEOM_TOL * scale || (total_tc - scale).abs() > GEOM_TOL * scale {
        fail(
            "total-area",
            format!("cell areas sum to {total_c}, twisted to {total_tc}, domain is {scale}"),
        );
    }

    // --- Edge displacement consistency with vertex coordinates.
    for e in 0..topo.n_edges {
        let [tail, head] = topo.edge_vertices[e];
        let d = geo.lattice.min_image(geo.vertex_pos[tail], geo.vertex_pos[head]);
        let gap = geom::norm(geom::sub(d, geo.edge_vec[e]));
        // min_image is ambiguous at exactly half the domain; accept either
        // representative by comparing lengths in that case.
        let mismatch = gap > 1e-9 * geo.edge_len[e]
            && (geom::norm(d) - geo.edge_len[e]).abs() > 1e-9 * geo.edge_len[e];
        if mismatch {
            fail("edge-vector-consistency", format!("edge {e} vector disagrees with endpoints"));
        }
    }

    // --- Cell boundary loops close geometrically.
    for c in 0..topo.n_cells {
        let mut p = [0.0, 0.0];
        for &(e, s) in &topo.cell_edges[c] {
            p = geom::add(p, geom::scale(geo.edge_vec[e], s as f64));
        }
        if geom::norm(p) > 1e-9 * libm::sqrt(geo.cell_area[c]) {
            fail("cell-loop-closure", format!("cell {c} boundary does not close"));
        }
    }

    // --- Orthogonality at every crossing: t^ parallel to m^.
    for e in 0..topo.n_edges {
        let t_hat = geom::scale(geo.edge_vec[e], 1.0 / geo.edge_len[e]);
        let s_hat = geom::scale(geo.tedge_vec[e], 1.0 / geo.tedge_len[e]);
        let dot = geom::dot(t_hat, geom::rot_cw(s_hat));
        if (dot - 1.0).abs() > GEOM_TOL {
            fail("orthogonality", format!("edge {e}: t^.m^ = {dot}, expected 1"));
        }
    }

    failures
}

#[cfg(test)]
mod tests {
    use super::super::{build_periodic_quad, build_periodic_trihex};
    use super::*;

    #[test]
    fn generated_meshes_are_valid() {
        for mesh in [
            build_periodic_quad(2, 1.0).unwrap(),
            build_periodic_quad(3, 1.0).unwrap(),
            build_periodic_quad(5, 0.25).unwrap(),
            build_periodic_trihex(2, 1.0).unwrap(),
            build_periodic_trihex(4, 0.5).unwrap(),
        ] {
            let report = validate_mesh(&mesh);
            assert!(report.is_empty(), "unexpected failures: {report:?}");
        }
    }

    #[test]
    fn flipped_orientation_is_detected() {
        let mut mesh = build_periodic_quad(3, 1.0).unwrap();
        mesh.topology.cell_edges[0][0].1 *= -1;
        let report = validate_mesh(&mesh);
        assert!(report.iter().any(|f| f.name == "orientation-consistency"));
        assert!(report.iter().any(|f| f.name == "coboundary-squared"));
    }

    #[test]
    fn perturbed_overlap_is_detected() {
        let mut mesh = build_periodic_quad(3, 1.0).unwrap();
        mesh.geometry.overlap_cell_tcell[0][0] += 0.1;
        let report = validate_mesh(&mesh);
        assert!(report.iter().any(|f| f.name.starts_with("overlap-partition")));
    }

    #[test]
    fn perturbed_area_is_detected() {
        let mut mesh = build_periodic_trihex(2, 1.0).unwrap();
        mesh.geometry.cell_area[3] *= 1.5;
        let report = validate_mesh(&mesh);
        assert!(!report.is_empty());
    }
}
