//! Sectioned plain-text mesh format.
//!
//! ```text
//! swede-mesh 1
//! LATTICE
//! <a1x> <a1y>
//! <a2x> <a2y>
//! VERTICES <n>
//! <id> <x> <y>
//! EDGES <n>
//! <id> <tail> <head> <vx> <vy>      # vx,vy = tail→head displacement
//! CELLS <n>
//! <id> <±edge> <±edge> ...          # CCW signed boundary loop
//! DUALITY
//! TVERT_OF_CELL <n ids>
//! TEDGE_OF_EDGE <n ids>
//! TCELL_OF_VERTEX <n ids>
//! END
//! ```
//!
//! Coordinates are written with 17 significant digits so a save/load round
//! trip reproduces the mesh bit-for-bit. Geometry (areas, overlaps, twisted
//! coordinates) is always recomputed from the primal data on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use swede_core::geom::Lattice;
use swede_core::mesh::{validate_mesh, MeshError, MeshPair, PrimalMesh};

#[derive(Debug)]
pub enum MeshFileError {
    Io { path: String, source: std::io::Error },
    Parse { line: usize, message: String },
    Mesh(MeshError),
    Validation(Vec<String>),
}

impl std::fmt::Display for MeshFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshFileError::Io { path, source } => write!(f, "{path}: {source}"),
            MeshFileError::Parse { line, message } => write!(f, "line {line}: {message}"),
            MeshFileError::Mesh(e) => write!(f, "{e}"),
            MeshFileError::Validation(items) => {
                write!(f, "loaded mesh fails validation: {}", items.join("; "))
            }
        }
    }
}

impl std::error::Error for MeshFileError {}

impl From<MeshError> for MeshFileError {
    fn from(e: MeshError) -> Self {
        MeshFileError::Mesh(e)
    }
}

/// 17-significant-digit decimal text (round-trips every f64 exactly).
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn mesh_to_string(mesh: &MeshPair) -> String {
    let topo = &mesh.topology;
    let geo = &mesh.geometry;
    let mut s = String::new();
    s.push_str("swede-mesh 1\n");
    s.push_str("LATTICE\n");
    let _ = writeln!(s, "{} {}", fmt_g17(geo.lattice.a1[0]), fmt_g17(geo.lattice.a1[1]));
    let _ = writeln!(s, "{} {}", fmt_g17(geo.lattice.a2[0]), fmt_g17(geo.lattice.a2[1]));
    let _ = writeln!(s, "VERTICES {}", topo.n_vertices);
    for (i, p) in geo.vertex_pos.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {}", fmt_g17(p[0]), fmt_g17(p[1]));
    }
    let _ = writeln!(s, "EDGES {}", topo.n_edges);
    for e in 0..topo.n_edges {
        let [tail, head] = topo.edge_vertices[e];
        let v = geo.edge_vec[e];
        let _ = writeln!(s, "{e} {tail} {head} {} {}", fmt_g17(v[0]), fmt_g17(v[1]));
    }
    let _ = writeln!(s, "CELLS {}", topo.n_cells);
    for c in 0..topo.n_cells {
        let _ = write!(s, "{c}");
        for &(e, sign) in &topo.cell_edges[c] {
            let _ = write!(s, " {}{e}", if sign > 0 { '+' } else { '-' });
        }
        s.push('\n');
    }
    s.push_str("DUALITY\n");
    let ids = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(s, "TVERT_OF_CELL {}", ids(&topo.tvert_of_cell));
    let _ = writeln!(s, "TEDGE_OF_EDGE {}", ids(&topo.tedge_of_edge));
    let _ = writeln!(s, "TCELL_OF_VERTEX {}", ids(&topo.tcell_of_vertex));
    s.push_str("END\n");
    s
}

pub fn save_mesh(mesh: &MeshPair, path: &Path) -> Result<(), MeshFileError> {
    fs::write(path, mesh_to_string(mesh)).map_err(|source| MeshFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    /// 1-based number of the line most recently returned.
    current: usize,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.iter.by_ref() {
            self.current = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((idx + 1, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), MeshFileError> {
        self.next_content().ok_or_else(|| MeshFileError::Parse {
            line: self.current + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshFileError {
    MeshFileError::Parse { line, message: message.into() }
}

fn parse_f64(line: usize, tok: &str) -> Result<f64, MeshFileError> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("expected a number, got `{tok}`")))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize, MeshFileError> {
    tok.parse::<usize>().map_err(|_| parse_err(line, format!("expected an index, got `{tok}`")))
}

fn section_header(
    lines: &mut Lines,
    name: &str,
) -> Result<(usize, Vec<String>), MeshFileError> {
    let (ln, text) = lines.expect(&format!("section {name}"))?;
    let mut toks = text.split_whitespace();
    let got = toks.next().unwrap_or("");
    if got != name {
        return Err(parse_err(ln, format!("expected section {name}, got `{got}`")));
    }
    Ok((ln, toks.map(str::to_owned).collect()))
}

fn parse_id_list(line: usize, toks: &[String], n: usize) -> Result<Vec<usize>, MeshFileError> {
    if toks.len() != n {
        return Err(parse_err(line, format!("expected {n} ids, got {}", toks.len())));
    }
    toks.iter().map(|t| parse_usize(line, t)).collect()
}

pub fn parse_mesh(text: &str) -> Result<MeshPair, MeshFileError> {
    let mut lines = Lines { iter: text.lines().enumerate(), current: 0 };

    let (ln, header) = lines.expect("header `swede-mesh 1`")?;
    if header != "swede-mesh 1" {
        return Err(parse_err(ln, format!("expected `swede-mesh 1`, got `{header}`")));
    }

    let (_, extra) = section_header(&mut lines, "LATTICE")?;
    if !extra.is_empty() {
        return Err(parse_err(lines.current, "LATTICE takes no arguments"));
    }
    let mut axis = [[0.0f64; 2]; 2];
    for a in &mut axis {
        let (ln, text) = lines.expect("a lattice vector")?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "lattice vector needs exactly two components"));
        }
        *a = [parse_f64(ln, toks[0])?, parse_f64(ln, toks[1])?];
    }
    let lattice = Lattice::new(axis[0], axis[1]);

    let (hln, args) = section_header(&mut lines, "VERTICES")?;
    let n_vertices = parse_usize(hln, args.first().map(String::as_str).unwrap_or(""))?;
    let mut vertex_pos = vec![None; n_vertices];
    for _ in 0..n_vertices {
        let (ln, text) = lines.expect("a vertex line")?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(ln, "vertex line needs `id x y`"));
        }
        let id = parse_usize(ln, toks[0])?;
        if id >= n_vertices {
            return Err(parse_err(ln, format!("vertex id {id} out of range 0..{n_vertices}")));
        }
        if vertex_pos[id].is_some() {
            return Err(parse_err(ln, format!("duplicate vertex id {id}")));
        }
        vertex_pos[id] = Some([parse_f64(ln, toks[1])?, parse_f64(ln, toks[2])?]);
    }
    let vertex_pos: Vec<[f64; 2]> = vertex_pos.into_iter().map(Option::unwrap).collect();

    let (hln, args) = section_header(&mut lines, "EDGES")?;
    let n_edges = parse_usize(hln, args.first().map(String::as_str).unwrap_or(""))?;
    let mut edge_data = vec![None; n_edges];
    for _ in 0..n_edges {
        let (ln, text) = lines.expect("an edge line")?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(parse_err(ln, "edge line needs `id tail head vx vy`"));
        }
        let id = parse_usize(ln, toks[0])?;
        if id >= n_edges {
            return Err(parse_err(ln, format!("edge id {id} out of range 0..{n_edges}")));
        }
        if edge_data[id].is_some() {
            return Err(parse_err(ln, format!("duplicate edge id {id}")));
        }
        let tail = parse_usize(ln, toks[1])?;
        let head = parse_usize(ln, toks[2])?;
        if tail >= n_vertices || head >= n_vertices {
            return Err(parse_err(ln, "edge endpoint out of range"));
        }
        edge_data[id] =
            Some(([tail, head], [parse_f64(ln, toks[3])?, parse_f64(ln, toks[4])?]));
    }
    let (edge_vertices, edge_vec): (Vec<[usize; 2]>, Vec<[f64; 2]>) =
        edge_data.into_iter().map(Option::unwrap).unzip();

    let (hln, args) = section_header(&mut lines, "CELLS")?;
    let n_cells = parse_usize(hln, args.first().map(String::as_str).unwrap_or(""))?;
    let mut cell_loops = vec![None; n_cells];
    for _ in 0..n_cells {
        let (ln, text) = lines.expect("a cell line")?;
        let mut toks = text.split_whitespace();
        let id = parse_usize(ln, toks.next().unwrap_or(""))?;
        if id >= n_cells {
            return Err(parse_err(ln, format!("cell id {id} out of range 0..{n_cells}")));
        }
        if cell_loops[id].is_some() {
            return Err(parse_err(ln, format!("duplicate cell id {id}")));
        }
        let mut looped = Vec::new();
        for tok in toks {
            let (sign, rest) = match tok.as_bytes().first() {
                Some(b'+') => (1, &tok[1..]),
                Some(b'-') => (-1, &tok[1..]),
                _ => return Err(parse_err(ln, format!("signed edge `{tok}` must start with + or -"))),
            };
            let e = parse_usize(ln, rest)?;
            if e >= n_edges {
                return Err(parse_err(ln, format!("cell loop edge {e} out of range")));
            }
            looped.push((e, sign));
        }
        if looped.len() < 3 {
            return Err(parse_err(ln, "cell loop needs at least three edges"));
        }
        cell_loops[id] = Some(looped);
    }
    let cell_loops: Vec<Vec<(usize, i32)>> = cell_loops.into_iter().map(Option::unwrap).collect();

    let (_, extra) = section_header(&mut lines, "DUALITY")?;
    if !extra.is_empty() {
        return Err(parse_err(lines.current, "DUALITY takes no arguments"));
    }
    let (ln, toks) = section_header(&mut lines, "TVERT_OF_CELL")?;
    let tvert_of_cell = parse_id_list(ln, &toks, n_cells)?;
    let (ln, toks) = section_header(&mut lines, "TEDGE_OF_EDGE")?;
    let tedge_of_edge = parse_id_list(ln, &toks, n_edges)?;
    let (ln, toks) = section_header(&mut lines, "TCELL_OF_VERTEX")?;
    let tcell_of_vertex = parse_id_list(ln, &toks, n_vertices)?;

    let (ln, end) = lines.expect("END")?;
    if end != "END" {
        return Err(parse_err(ln, format!("expected END, got `{end}`")));
    }

    let primal = PrimalMesh { lattice, vertex_pos, edge_vertices, edge_vec, cell_loops };
    let mesh = MeshPair::from_primal(primal)?;
    if mesh.topology.tvert_of_cell != tvert_of_cell
        || mesh.topology.tedge_of_edge != tedge_of_edge
        || mesh.topology.tcell_of_vertex != tcell_of_vertex
    {
        return Err(MeshFileError::Validation(vec![String::from(
            "DUALITY section does not match the bijections induced by the primal data",
        )]));
    }
    let failures = validate_mesh(&mesh);
    if !failures.is_empty() {
        return Err(MeshFileError::Validation(
            failures.iter().map(|f| f.to_string()).collect(),
        ));
    }
    Ok(mesh)
}

pub fn load_mesh(path: &Path) -> Result<MeshPair, MeshFileError> {
    let text = fs::read_to_string(path).map_err(|source| MeshFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_mesh(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use swede_core::mesh::{build_periodic_quad, build_periodic_trihex};

    #[test]
    fn round_trip_is_exact() {
        for mesh in [
            build_periodic_quad(3, 1.0).unwrap(),
            build_periodic_quad(4, 0.5).unwrap(),
            build_periodic_trihex(2, 1.0).unwrap(),
        ] {
            let text = mesh_to_string(&mesh);
            let back = parse_mesh(&text).unwrap();
            assert_eq!(back, mesh);
        }
    }

    #[test]
    fn truncated_file_names_missing_section() {
        let mesh = build_periodic_quad(3, 1.0).unwrap();
        let text = mesh_to_string(&mesh);
        let cut = text.find("CELLS").unwrap();
        let err = parse_mesh(&text[..cut]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("CELLS"), "unexpected error: {msg}");
    }

    #[test]
    fn duplicate_edge_id_rejected() {
        let mesh = build_periodic_quad(3, 1.0).unwrap();
        let text = mesh_to_string(&mesh);
        // Duplicate the first edge line in place of the second.
        let mut out = String::new();
        let mut first_edge: Option<String> = None;
        for line in text.lines() {
            let replaced = if line.starts_with("1 ") && first_edge.is_some() && !line.contains('+')
            {
                first_edge.clone().unwrap()
            } else {
                if line.starts_with("0 ") && line.split_whitespace().count() == 5 {
                    first_edge = Some(line.to_string());
                }
                line.to_string()
            };
            out.push_str(&replaced);
            out.push('\n');
        }
        let err = parse_mesh(&out).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "unexpected: {err}");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let mesh = build_periodic_quad(3, 1.0).unwrap();
        let text = mesh_to_string(&mesh).replace("swede-mesh 1", "bogus 9");
        match parse_mesh(&text) {
            Err(MeshFileError::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error on line 1, got {other:?}"),
        }
    }
}
