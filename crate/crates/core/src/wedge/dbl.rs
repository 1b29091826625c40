//! The doubly conservative PV flux tensor `Q^DBL`.
//!
//! `Q^DBL` is a 3-tensor `Q_{ẽ,e,ṽ}` making the PV flux conserve *both*
//! total energy and potential enstrophy. Rather than hard-coding literature
//! coefficients, we solve the defining linear constraint system directly on
//! a translation-invariant unit cell:
//!
//! 1. pairing antisymmetry: `Q_{ẽ,e,ṽ} = −Q_{ẽ(e),e(ẽ),ṽ}`,
//! 2. the enstrophy rule enforced as polynomial-coefficient matching in q̃,
//!    which by polarization is the full Leibniz rule
//!    `Q(x̃, D̄1ỹ) + Q(ỹ, D̄1x̃) = D1(Rᵀ(x̃∘ỹ))` matched per bilinear
//!    coefficient of (x̃_a, ỹ_b),
//! 3. collapse `Σ_ṽ Q_{ẽ,e,ṽ} = W_{ẽ,e}` (PV compatibility at q̃ ≡ 1).
//!
//! Stencil: for output edge e, the fluxes x̃_ẽ range over the edges sharing
//! a vertex with e, and the PV points ṽ over the cells around those shared
//! vertices. This set is closed under the antisymmetry swap (e, ẽ) ↔
//! (e(ẽ), ẽ(e)) and wide enough to represent the classical doubly
//! conservative quad-grid scheme (the narrower two-cells-per-flux stencil
//! admits no solution: a cell touching exactly one endpoint of e has a
//! nonzero Leibniz right-hand side that its empty coefficient row cannot
//! match).
//!
//! The construction is restricted to uniform doubly periodic quad grids
//! (n ≥ 5 so stencils never wrap onto themselves) with uniform R
//! coefficients (combinatorial R, or metric R which coincides with it
//! there); anything else is an unsupported-variant error. The solved tensor
//! is re-verified against every constraint row before being returned.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom;
use crate::mesh::MeshPair;
use crate::sparse::CsrMatrix;

use super::WedgeError;

/// Materialized 3-tensor: per straight output edge e, a list of
/// `(ẽ, c, coefficient)` entries so that
/// `(Q(q̃,x̃))_e = Σ coeff · q̃_{ṽ(c)} · x̃_ẽ`.
#[derive(Clone, Debug)]
pub struct DblTensor {
    pub entries: Vec<Vec<(usize, usize, f64)>>,
}

impl DblTensor {
    pub fn apply(&self, q: &[f64], x: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|&(te, c, w)| w * q[c] * x[te]).sum())
            .collect()
    }
}

/// Relabeling of a uniform quad mesh by lattice coordinates.
struct QuadLabels {
    n: i64,
    /// Edge index → (class 0 = x-edge / 1 = y-edge, i, j) with the tail
    /// vertex at lattice site (i, j).
    edge_label: Vec<(u8, i64, i64)>,
    /// Cell index → (i, j) of its lower-left corner.
    cell_label: Vec<(i64, i64)>,
    /// (class, i, j) → edge index.
    edge_at: Vec<Vec<Vec<usize>>>,
    /// (i, j) → cell index.
    cell_at: Vec<Vec<usize>>,
}

impl QuadLabels {
    fn edge(&self, class: u8, i: i64, j: i64) -> usize {
        let n = self.n;
        self.edge_at[class as usize][(i.rem_euclid(n)) as usize][(j.rem_euclid(n)) as usize]
    }

    fn cell(&self, i: i64, j: i64) -> usize {
        let n = self.n;
        self.cell_at[(i.rem_euclid(n)) as usize][(j.rem_euclid(n)) as usize]
    }

    /// Wrap a lattice offset into (−n/2, n/2].
    fn center(&self, d: i64) -> i64 {
        let n = self.n;
        let mut d = d.rem_euclid(n);
        if d > n / 2 {
            d -= n;
        }
        d
    }
}

fn detect_quad_lattice(mesh: &MeshPair) -> Result<QuadLabels, WedgeError> {
    let topo = &mesh.topology;
    let geo = &mesh.geometry;
    let nv = topo.n_vertices;
    let n = {
        let mut k = 1usize;
        while k * k < nv {
            k += 1;
        }
        k
    };
    let unsupported = |m: String| WedgeError::UnsupportedVariant(m);
    if n * n != nv || topo.n_edges != 2 * nv || topo.n_cells != nv {
        return Err(unsupported(format!(
            "DBL needs an n x n quad grid, got V={nv} E={} C={}",
            topo.n_edges, topo.n_cells
        )));
    }
    if n < 5 {
        return Err(unsupported(format!("DBL needs n >= 5, got n = {n}")));
    }
    let a1 = mesh.geometry.lattice.a1;
    let a2 = mesh.geometry.lattice.a2;
    if geom::dot(a1, a2).abs() > 1e-12 * geom::norm(a1) * geom::norm(a2)
        || (geom::norm(a1) - geom::norm(a2)).abs() > 1e-12 * geom::norm(a1)
    {
        return Err(unsupported(String::from("DBL needs a square periodic domain")));
    }
    let nf = n as f64;
    let frac_of = |p: geom::Point| {
        let f = geo.lattice.to_fractional(p);
        [f[0] * nf, f[1] * nf]
    };
    let snap = |x: f64| -> Result<i64, WedgeError> {
        let r = libm::round(x);
        if (x - r).abs() > 1e-9 {
            Err(unsupported(format!("DBL needs a uniform quad lattice; offset {x}")))
        } else {
            Ok((r as i64).rem_euclid(n as i64))
        }
    };

    let mut vert_at = vec![vec![usize::MAX; n]; n];
    for v in 0..nv {
        let f = frac_of(geo.vertex_pos[v]);
        let (i, j) = (snap(f[0])?, snap(f[1])?);
        if vert_at[i as usize][j as usize] != usize::MAX {
            return Err(unsupported(String::from("duplicate lattice site")));
        }
        vert_at[i as usize][j as usize] = v;
    }

    let mut edge_label = vec![(0u8, 0i64, 0i64); topo.n_edges];
    let mut edge_at = vec![vec![vec![usize::MAX; n]; n]; 2];
    for e in 0..topo.n_edges {
        let dv = frac_of(geo.edge_vec[e]);
        let class = if (dv[0] - 1.0).abs() < 1e-9 && dv[1].abs() < 1e-9 {
            0u8
        } else if dv[0].abs() < 1e-9 && (dv[1] - 1.0).abs() < 1e-9 {
            1u8
        } else {
            return Err(unsupported(String::from(
                "DBL needs axis-aligned unit edges oriented +x/+y",
            )));
        };
        let tail = topo.edge_vertices[e][0];
        let f = frac_of(geo.vertex_pos[tail]);
        let (i, j) = (snap(f[0])?, snap(f[1])?);
        edge_label[e] = (class, i, j);
        edge_at[class as usize][i as usize][j as usize] = e;
    }

    let mut cell_label = vec![(0i64, 0i64); topo.n_cells];
    let mut cell_at = vec![vec![usize::MAX; n]; n];
    for c in 0..topo.n_cells {
        // The circumcenter of cell (i, j) sits at lattice point (i+½, j+½).
        let f = frac_of(geo.tvert_pos[c]);
        let (i, j) = (snap(f[0] - 0.5)?, snap(f[1] - 0.5)?);
        cell_label[c] = (i, j);
        cell_at[i as usize][j as usize] = c;
    }
    if edge_at.iter().flatten().flatten().any(|&e| e == usize::MAX)
        || cell_at.iter().flatten().any(|&c| c == usize::MAX)
    {
        return Err(unsupported(String::from("incomplete lattice labeling")));
    }

    Ok(QuadLabels { n: n as i64, edge_label, cell_label, edge_at, cell_at })
}

fn require_uniform_r(r: &CsrMatrix) -> Result<(), WedgeError> {
    for (_, _, v) in r.triplets() {
        if (v - 0.25).abs() > 1e-12 {
            return Err(WedgeError::UnsupportedVariant(format!(
                "DBL needs uniform R coefficients of 1/4, found {v}"
            )));
        }
    }
    Ok(())
}

/// One translation-invariant unknown: output-edge class, stencil twisted
/// edge offset (class, di, dj), stencil cell offset (ci, cj) — offsets
/// relative to the output edge's label.
type UnknownKey = (u8, (u8, i64, i64), (i64, i64));

/// Gauss–Jordan elimination with partial pivoting; free variables are set
/// to zero and the residual of every original row is re-checked.
fn solve_constraints(
    rows: &[(Vec<(usize, f64)>, f64)],
    n_unknowns: usize,
) -> Result<Vec<f64>, WedgeError> {
    let m = rows.len();
    let mut a = vec![vec![0.0f64; n_unknowns + 1]; m];
    for (ri, (coeffs, rhs)) in rows.iter().enumerate() {
        for &(c, v) in coeffs {
            a[ri][c] += v;
        }
        a[ri][n_unknowns] = *rhs;
    }
    let mut pivot_row_of_col = vec![usize::MAX; n_unknowns];
    let mut rank = 0usize;
    for col in 0..n_unknowns {
        let (best, mag) = (rank..m)
            .map(|r| (r, a[r][col].abs()))
            .fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 1e-12 {
            continue;
        }
        a.swap(rank, best);
        let pv = a[rank][col];
        for x in a[rank].iter_mut() {
            *x /= pv;
        }
        for r in 0..m {
            if r != rank && a[r][col] != 0.0 {
                let f = a[r][col];
                let prow = a[rank].clone();
                for (x, p) in a[r].iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
            }
        }
        pivot_row_of_col[col] = rank;
        rank += 1;
        if rank == m {
            break;
        }
    }
    for r in rank..m {
        if a[r][n_unknowns].abs() > 1e-10 {
            return Err(WedgeError::ConstraintSolveFailed(format!(
                "inconsistent constraint system (residual {})",
                a[r][n_unknowns]
            )));
        }
    }
    let mut x = vec![0.0; n_unknowns];
    for col in 0..n_unknowns {
        if pivot_row_of_col[col] != usize::MAX {
            x[col] = a[pivot_row_of_col[col]][n_unknowns];
        }
    }
    for (coeffs, rhs) in rows {
        let lhs: f64 = coeffs.iter().map(|&(c, v)| v * x[c]).sum();
        if (lhs - rhs).abs() > 1e-10 {
            return Err(WedgeError::ConstraintSolveFailed(format!(
                "solution residual {} on a constraint row",
                (lhs - rhs).abs()
            )));
        }
    }
    Ok(x)
}

/// Edges sharing a vertex with e (e itself included).
fn edges_around(topo: &crate::mesh::MeshTopology, e: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for &v in &topo.edge_vertices[e] {
        for &f in &topo.vertex_edges[v] {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

/// Cells around the vertices shared by edges e and f.
fn cells_at_shared_vertices(
    topo: &crate::mesh::MeshTopology,
    e: usize,
    f: usize,
) -> Vec<usize> {
    let mut out = Vec::new();
    for &v in &topo.edge_vertices[e] {
        if topo.edge_vertices[f].contains(&v) {
            for &c in &topo.vertex_cells[v] {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Solve for the DBL tensor on a uniform quad mesh and materialize it for
/// every edge by translation.
pub fn build_dbl_tensor(
    mesh: &MeshPair,
    r: &CsrMatrix,
    w: &CsrMatrix,
) -> Result<DblTensor, WedgeError> {
    let labels = detect_quad_lattice(mesh)?;
    require_uniform_r(r)?;
    let topo = &mesh.topology;

    // Representative output edges of each class at the lattice origin.
    let reps = [labels.edge(0, 0, 0), labels.edge(1, 0, 0)];

    let key_for = |e: usize, te: usize, c: usize| -> UnknownKey {
        let (cls_e, ei, ej) = labels.edge_label[e];
        let (cls_t, ti, tj) = labels.edge_label[te];
        let (ci, cj) = labels.cell_label[c];
        (
            cls_e,
            (cls_t, labels.center(ti - ei), labels.center(tj - ej)),
            (labels.center(ci - ei), labels.center(cj - ej)),
        )
    };

    // Enumerate unknowns from the actual mesh stencils.
    let mut keys: Vec<UnknownKey> = Vec::new();
    for &e in &reps {
        for te in edges_around(topo, e) {
            for c in cells_at_shared_vertices(topo, e, te) {
                let key = key_for(e, te, c);
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
    }
    let n_unknowns = keys.len();
    let find = |key: UnknownKey| -> Option<usize> { keys.iter().position(|k| *k == key) };

    let w_entry = |e: usize, te: usize| -> f64 {
        w.row(e).find(|&(c, _)| c == te).map(|(_, v)| v).unwrap_or(0.0)
    };
    let r_entry = |c: usize, v: usize| -> f64 {
        r.row(c).find(|&(col, _)| col == v).map(|(_, x)| x).unwrap_or(0.0)
    };
    // t̃_{c,ẽ}: +1 if c is the left (head) cell of ẽ, −1 if right (tail).
    let t_tilde = |te: usize, c: usize| -> f64 {
        let [right, left] = topo.edge_cells[te];
        if c == left {
            1.0
        } else if c == right {
            -1.0
        } else {
            0.0
        }
    };

    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for &e in &reps {
        let around = edges_around(topo, e);
        // (1) Antisymmetry: the swapped pair lives on the same shared-vertex
        // stencil, so its unknown always exists.
        for &te in &around {
            for c in cells_at_shared_vertices(topo, e, te) {
                let k1 = find(key_for(e, te, c)).unwrap();
                let k2 = find(key_for(te, e, c)).ok_or_else(|| {
                    WedgeError::ConstraintSolveFailed(String::from(
                        "antisymmetric partner missing from stencil",
                    ))
                })?;
                if k1 == k2 {
                    rows.push((vec![(k1, 1.0)], 0.0));
                } else {
                    rows.push((vec![(k1, 1.0), (k2, 1.0)], 0.0));
                }
            }
        }
        // (2) Collapse to W at q̃ ≡ 1.
        for &te in &around {
            let coeffs: Vec<(usize, f64)> = cells_at_shared_vertices(topo, e, te)
                .into_iter()
                .map(|c| (find(key_for(e, te, c)).unwrap(), 1.0))
                .collect();
            rows.push((coeffs, w_entry(e, te)));
        }
        // (3) Full Leibniz, matched per symmetric bilinear coefficient
        // (x̃_a, ỹ_b). Only cells in the stencil union can appear.
        let mut cells: Vec<usize> = Vec::new();
        for &te in &around {
            for c in cells_at_shared_vertices(topo, e, te) {
                if !cells.contains(&c) {
                    cells.push(c);
                }
            }
        }
        let [tail_v, head_v] = topo.edge_vertices[e];
        for (ai, &a) in cells.iter().enumerate() {
            for &b in &cells[ai..] {
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for &te in &around {
                    let stencil_cells = cells_at_shared_vertices(topo, e, te);
                    // Q(x̃, D̄1ỹ) contributes Q_{ẽ,e,a} t̃_{b,ẽ}; the
                    // symmetric term swaps a and b. Duplicate keys are
                    // summed when the row is assembled.
                    let tb = t_tilde(te, b);
                    if tb != 0.0 && stencil_cells.contains(&a) {
                        coeffs.push((find(key_for(e, te, a)).unwrap(), tb));
                    }
                    let ta = t_tilde(te, a);
                    if ta != 0.0 && stencil_cells.contains(&b) {
                        coeffs.push((find(key_for(e, te, b)).unwrap(), ta));
                    }
                }
                let rhs =
                    if a == b { r_entry(a, head_v) - r_entry(a, tail_v) } else { 0.0 };
                rows.push((coeffs, rhs));
            }
        }
    }

    let solution = solve_constraints(&rows, n_unknowns)?;

    // Materialize by translation.
    let mut entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); topo.n_edges];
    for e in 0..topo.n_edges {
        let (cls, i, j) = labels.edge_label[e];
        for (k, &(kcls, (tcls, di, dj), (ci, cj))) in keys.iter().enumerate() {
            if kcls != cls {
                continue;
            }
            let val = solution[k];
            if val == 0.0 {
                continue;
            }
            let te = labels.edge(tcls, i + di, j + dj);
            let c = labels.cell(i + ci, j + cj);
            entries[e].push((te, c, val));
        }
    }
    Ok(DblTensor { entries })
}
