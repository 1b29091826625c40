//! Diagnostic CSV, tabular snapshots, and legacy-VTK output.
//! All decimal text uses 17 significant digits for bit-reproducible
//! regression baselines.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use swede_core::geom;
use swede_core::mesh::MeshPair;
use swede_core::swe_core::ModelState;

use crate::meshfile::fmt_g17;

/// One row of the diagnostics series.
#[derive(Clone, Copy, Debug)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    pub mass: f64,
    pub circulation: f64,
    pub energy: f64,
    pub potential_enstrophy: f64,
    pub dh_dt: f64,
    pub dpe_dt: f64,
    pub min_h: f64,
    pub max_u: f64,
}

pub const DIAGNOSTICS_HEADER: &str =
    "step,time,mass,circulation,energy,potential_enstrophy,dH_dt,dPE_dt,min_h,max_u";

pub fn diagnostics_to_string(rows: &[DiagnosticsRow]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.step,
            fmt_g17(r.time),
            fmt_g17(r.mass),
            fmt_g17(r.circulation),
            fmt_g17(r.energy),
            fmt_g17(r.potential_enstrophy),
            fmt_g17(r.dh_dt),
            fmt_g17(r.dpe_dt),
            fmt_g17(r.min_h),
            fmt_g17(r.max_u),
        );
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_diagnostics(rows: &[DiagnosticsRow], path: &Path) -> Result<(), String> {
    write_file(path, &diagnostics_to_string(rows))
}

/// Tabular snapshot: per-twisted-cell height DOFs and per-edge circulation
/// DOFs, with the carrier positions for external tools.
pub fn snapshot_to_string(mesh: &MeshPair, state: &ModelState) -> String {
    let geo = &mesh.geometry;
    let topo = &mesh.topology;
    let mut s = String::new();
    let _ = writeln!(s, "# swede snapshot t = {}", fmt_g17(state.time));
    let _ = writeln!(s, "H {}", topo.n_vertices);
    s.push_str("# tcell x y h2\n");
    for v in 0..topo.n_vertices {
        let p = geo.vertex_pos[v];
        let _ = writeln!(s, "{v} {} {} {}", fmt_g17(p[0]), fmt_g17(p[1]), fmt_g17(state.h.values[v]));
    }
    let _ = writeln!(s, "U {}", topo.n_edges);
    s.push_str("# edge x y u1\n");
    for e in 0..topo.n_edges {
        let mid = geom::add(
            geo.vertex_pos[topo.edge_vertices[e][0]],
            geom::scale(geo.edge_vec[e], 0.5),
        );
        let _ = writeln!(
            s,
            "{e} {} {} {}",
            fmt_g17(mid[0]),
            fmt_g17(mid[1]),
            fmt_g17(state.u.values[e])
        );
    }
    s
}

pub fn write_snapshot(mesh: &MeshPair, state: &ModelState, path: &Path) -> Result<(), String> {
    write_file(path, &snapshot_to_string(mesh, state))
}

/// Read back the height column of a snapshot (exact round trip).
pub fn read_snapshot_h(path: &Path) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
    let header = lines.next().ok_or("empty snapshot")?;
    let n: usize = header
        .strip_prefix("H ")
        .ok_or("missing H section")?
        .trim()
        .parse()
        .map_err(|_| "bad H count")?;
    let mut h = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next().ok_or("truncated H section")?;
        let tok = line.split_whitespace().nth(3).ok_or("short H row")?;
        h.push(tok.parse::<f64>().map_err(|_| "bad H value")?);
    }
    Ok(h)
}

/// Legacy-VTK polygon file of the twisted cells with pointwise height as
/// cell data (polygons are unwrapped locally, so each cell carries its own
/// points).
pub fn vtk_to_string(mesh: &MeshPair, state: &ModelState) -> String {
    let geo = &mesh.geometry;
    let topo = &mesh.topology;
    let mut points = Vec::new();
    let mut polys: Vec<Vec<usize>> = Vec::new();
    for v in 0..topo.n_vertices {
        let anchor = geo.vertex_pos[v];
        let mut ids = Vec::new();
        for p in &geo.tcell_poly[v] {
            ids.push(points.len());
            points.push(geom::add(anchor, *p));
        }
        polys.push(ids);
    }
    let mut s = String::from("# vtk DataFile Version 3.0\nswede snapshot\nASCII\nDATASET POLYDATA\n");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(s, "{} {} 0.0", fmt_g17(p[0]), fmt_g17(p[1]));
    }
    let total: usize = polys.iter().map(|p| p.len() + 1).sum();
    let _ = writeln!(s, "POLYGONS {} {total}", polys.len());
    for poly in &polys {
        let _ = write!(s, "{}", poly.len());
        for id in poly {
            let _ = write!(s, " {id}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_DATA {}", polys.len());
    s.push_str("SCALARS height double 1\nLOOKUP_TABLE default\n");
    for v in 0..topo.n_vertices {
        let _ = writeln!(s, "{}", fmt_g17(state.h.values[v] / geo.tcell_area[v]));
    }
    s
}

pub fn write_vtk(mesh: &MeshPair, state: &ModelState, path: &Path) -> Result<(), String> {
    write_file(path, &vtk_to_string(mesh, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use swede_core::mesh::build_periodic_quad;
    use swede_core::swe_core::ModelState;

    #[test]
    fn snapshot_height_round_trips_exactly() {
        let mesh = build_periodic_quad(4, 1.0).unwrap();
        let mut state = ModelState::rest(&mesh, 1.0);
        for (i, h) in state.h.values.iter_mut().enumerate() {
            *h += (i as f64) * 0.123456789012345678;
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.txt");
        write_snapshot(&mesh, &state, &path).unwrap();
        let back = read_snapshot_h(&path).unwrap();
        assert_eq!(back, state.h.values);
    }

    #[test]
    fn csv_has_expected_shape() {
        let rows = vec![
            DiagnosticsRow {
                step: 0,
                time: 0.0,
                mass: 1.0,
                circulation: 0.0,
                energy: 2.0,
                potential_enstrophy: 3.0,
                dh_dt: 0.0,
                dpe_dt: 0.0,
                min_h: 1.0,
                max_u: 0.0,
            };
            3
        ];
        let text = diagnostics_to_string(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), DIAGNOSTICS_HEADER);
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn vtk_mentions_all_cells() {
        let mesh = build_periodic_quad(3, 1.0).unwrap();
        let state = ModelState::rest(&mesh, 1.0);
        let text = vtk_to_string(&mesh, &state);
        assert!(text.contains("POLYGONS 9"));
        assert!(text.contains("CELL_DATA 9"));
    }
}
