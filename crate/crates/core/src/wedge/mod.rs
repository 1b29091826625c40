//! Discrete wedge products for the PV flux (R, W, Q) and kinetic energy (T).
//!
//! Layout conventions (twisted entities are indexed by their straight duals):
//! - `R` is an `n_cells × n_vertices` matrix: `(R x̃²)_c = Σ_v R_{c̃(v),c} x̃_v`
//!   with column sums 1 (each twisted cell distributes its value to the
//!   cells it overlaps).
//! - `W` is an `n_edges × n_edges` matrix mapping twisted fluxes to straight
//!   circulations; entry `(e, ẽ)` is the paper-order coefficient W_{ẽ,e}.
//! - `Q(q̃⁰, x̃)` maps a twisted flux to a straight circulation with PV
//!   weights; four variants trade energy/enstrophy conservation against
//!   advective accuracy.
//! - `T` is the KE wedge: per edge endpoint a coefficient 𝔗_{c̃,e,ẽ}
//!   combining a straight circulation and a twisted flux into a twisted
//!   2-form.
//!
//! `build_w` constructs W from R by the vertex-traversal rule and then
//! *verifies* the three defining identities (antisymmetry, `R D̄2 = D2 W`,
//! `W D̄1 = D1 Rᵀ`) to 1e−13, returning an error instead of a silently
//! wrong operator.

pub mod dbl;

use alloc::string::String;
use alloc::vec::Vec;

use crate::cochain::{Cochain, CochainType, Flavor, Grid};
use crate::dec_ops::DecOps;
use crate::mesh::MeshPair;
use crate::sparse::CsrMatrix;

pub use dbl::DblTensor;

/// Metric coefficients use overlap areas; combinatorial use counting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeKind {
    Metric,
    Combinatorial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QVariant {
    /// Total-energy conserving: ½(qᵉ W + W qᵉ).
    Te,
    /// Potential-enstrophy conserving: qᵉ W (PV weight on the output edge).
    Pe,
    /// Doubly conservative 3-tensor (uniform quad grids only).
    Dbl,
    /// Accurate advection, no conservation: W qᵉ (PV weight on the input
    /// dual edge).
    Accur,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WedgeError {
    /// A constructed operator failed one of its defining identities.
    IdentityViolation { name: &'static str, residual: f64 },
    /// Requested variant is not available on this mesh/R combination.
    UnsupportedVariant(String),
    /// The DBL constraint system could not be solved consistently.
    ConstraintSolveFailed(String),
    /// Cochain of the wrong type passed to an apply function.
    TypeMismatch(String),
}

impl core::fmt::Display for WedgeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WedgeError::IdentityViolation { name, residual } => {
                write!(f, "wedge identity {name} violated: residual {residual:e}")
            }
            WedgeError::UnsupportedVariant(m) => write!(f, "unsupported wedge variant: {m}"),
            WedgeError::ConstraintSolveFailed(m) => write!(f, "DBL constraint solve failed: {m}"),
            WedgeError::TypeMismatch(m) => write!(f, "wedge type mismatch: {m}"),
        }
    }
}

impl core::error::Error for WedgeError {}

/// Residual tolerance for the identities checked at construction time.
pub const WEDGE_IDENTITY_TOL: f64 = 1e-13;

/// Build the R averaging matrix (`n_cells × n_vertices`).
pub fn build_r(mesh: &MeshPair, kind: WedgeKind) -> CsrMatrix {
    let topo = &mesh.topology;
    let geo = &mesh.geometry;
    let mut trips = Vec::new();
    for v in 0..topo.n_vertices {
        let cells = &topo.vertex_cells[v];
        for (k, &c) in cells.iter().enumerate() {
            let val = match kind {
                WedgeKind::Metric => geo.overlap_cell_tcell[v][k] / geo.tcell_area[v],
                WedgeKind::Combinatorial => 1.0 / cells.len() as f64,
            };
            trips.push((c, v, val));
        }
    }
    CsrMatrix::from_triplets(topo.n_cells, topo.n_vertices, trips)
}

/// Look up `R_{c̃(v),c}` values around each vertex, aligned with
/// `vertex_cells[v]`.
fn r_around_vertices(mesh: &MeshPair, r: &CsrMatrix) -> Vec<Vec<f64>> {
    let topo = &mesh.topology;
    (0..topo.n_vertices)
        .map(|v| {
            topo.vertex_cells[v]
                .iter()
                .map(|&c| {
                    r.row(c)
                        .find(|&(col, _)| col == v)
                        .map(|(_, val)| val)
                        .unwrap_or(0.0)
                })
                .collect()
        })
        .collect()
}

/// Construct W from R by the vertex traversal rule and verify its
/// identities against the exterior derivatives.
///
/// At each vertex v with CCW-ordered edges e_1..e_m and interleaved cells
/// c_1..c_m (c_i between e_i and e_{i+1}), every ordered pair i ≠ j
/// contributes `−t_{v,e_i} t_{v,e_j} (P_{i→j} − ½)` to entry
/// `(e_j, ẽ_i)`, where `P_{i→j} = R_i + … + R_{j−1}` walks CCW from c_i.
/// Because Σ_i R_i = 1, `P_{ij} + P_{ji} = 1` and the per-vertex block is
/// antisymmetric by construction.
pub fn build_w(mesh: &MeshPair, r: &CsrMatrix, ops: &DecOps) -> Result<CsrMatrix, WedgeError> {
    let topo = &mesh.topology;
    let r_vert = r_around_vertices(mesh, r);
    let mut trips = Vec::new();
    for v in 0..topo.n_vertices {
        let edges = &topo.vertex_edges[v];
        let m = edges.len();
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let mut p = 0.0;
                let mut k = i;
                while k != j {
                    p += r_vert[v][k];
                    k = (k + 1) % m;
                }
                let ti = topo.t_ve(v, edges[i]) as f64;
                let tj = topo.t_ve(v, edges[j]) as f64;
                trips.push((edges[j], edges[i], -ti * tj * (p - 0.5)));
            }
        }
    }
    let w = CsrMatrix::from_triplets(topo.n_edges, topo.n_edges, trips);

    let anti = w.max_abs_diff(&w.transpose().scaled(-1.0));
    if anti > WEDGE_IDENTITY_TOL {
        return Err(WedgeError::IdentityViolation { name: "W = -W^T", residual: anti });
    }
    let pvcompat = r.matmul(&ops.d2_bar.matrix).max_abs_diff(&ops.d2.matrix.matmul(&w));
    if pvcompat > WEDGE_IDENTITY_TOL {
        return Err(WedgeError::IdentityViolation { name: "R D2bar = D2 W", residual: pvcompat });
    }
    let leibniz = w
        .matmul(&ops.d1_bar.matrix)
        .max_abs_diff(&ops.d1.matrix.matmul(&r.transpose()));
    if leibniz > WEDGE_IDENTITY_TOL {
        return Err(WedgeError::IdentityViolation { name: "W D1bar = D1 R^T", residual: leibniz });
    }
    Ok(w)
}

fn expect_type(c: &Cochain, t: CochainType, what: &str) -> Result<(), WedgeError> {
    if c.ctype != t {
        return Err(WedgeError::TypeMismatch(alloc::format!(
            "{what}: expected {t:?}, got {:?}",
            c.ctype
        )));
    }
    Ok(())
}

/// `Wedge(q̃⁰, h̃²)_c = q̃_{ṽ(c)} (R h̃²)_c` — the solvable-for-q̃ wedge of
/// a twisted 0-form with a twisted 2-form, yielding a straight 2-form.
pub fn apply_r_weighted(
    r: &CsrMatrix,
    q: &Cochain,
    h: &Cochain,
) -> Result<Cochain, WedgeError> {
    expect_type(q, CochainType::scalar(0, Grid::Twisted), "apply_r_weighted q")?;
    expect_type(h, CochainType::scalar(2, Grid::Twisted), "apply_r_weighted h")?;
    let rh = r.apply(&h.values);
    Ok(Cochain {
        ctype: CochainType::scalar(2, Grid::Straight),
        values: q.values.iter().zip(&rh).map(|(a, b)| a * b).collect(),
    })
}

/// The adjoint quadratic wedge `Wedge*(x̃⁰, ỹ⁰)_v = Σ_c R_{c̃(v),c} x̃_c ỹ_c`
/// (a straight 0-form), the adjoint of [`apply_r_weighted`] in its 2-form
/// slot.
pub fn r_adjoint_product(
    r: &CsrMatrix,
    x: &Cochain,
    y: &Cochain,
) -> Result<Cochain, WedgeError> {
    expect_type(x, CochainType::scalar(0, Grid::Twisted), "r_adjoint_product x")?;
    expect_type(y, CochainType::scalar(0, Grid::Twisted), "r_adjoint_product y")?;
    let prod: Vec<f64> = x.values.iter().zip(&y.values).map(|(a, b)| a * b).collect();
    Ok(Cochain {
        ctype: CochainType::scalar(0, Grid::Straight),
        values: r.transpose().apply(&prod),
    })
}

/// The PV flux operator `Q(q̃⁰, ·)`: twisted flux → straight circulation.
#[derive(Clone, Debug)]
pub struct QOperator {
    pub variant: QVariant,
    w: CsrMatrix,
    edge_cells: Vec<[usize; 2]>,
    dbl: Option<DblTensor>,
}

impl QOperator {
    /// Build a Q operator from R and W. The DBL variant solves its local
    /// constraint system and is only supported on uniform quad grids with
    /// uniform (¼) R coefficients.
    pub fn build(
        mesh: &MeshPair,
        variant: QVariant,
        r: &CsrMatrix,
        w: &CsrMatrix,
    ) -> Result<Self, WedgeError> {
        let dbl = match variant {
            QVariant::Dbl => Some(dbl::build_dbl_tensor(mesh, r, w)?),
            _ => None,
        };
        Ok(Self {
            variant,
            w: w.clone(),
            edge_cells: mesh.topology.edge_cells.clone(),
            dbl,
        })
    }

    /// Centered dual-edge PV reconstruction qᵉ_e = ½(q̃_{ṽ(c_r)} + q̃_{ṽ(c_l)}).
    fn q_edge(&self, q: &[f64]) -> Vec<f64> {
        self.edge_cells
            .iter()
            .map(|&[cr, cl]| 0.5 * (q[cr] + q[cl]))
            .collect()
    }

    /// PV weight at the straight output edge: `qᵉ ∘ (W x̃)`.
    fn out_weighted(&self, qe: &[f64], x: &[f64]) -> Vec<f64> {
        let wx = self.w.apply(x);
        wx.iter().zip(qe).map(|(v, qq)| v * qq).collect()
    }

    /// PV weight at the input dual edge: `W (qᵉ ∘ x̃)`.
    fn in_weighted(&self, qe: &[f64], x: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = x.iter().zip(qe).map(|(v, qq)| v * qq).collect();
        self.w.apply(&scaled)
    }

    /// Apply `Q(q̃⁰, x̃)` to a twisted flux, producing a straight circulation.
    pub fn apply(&self, q: &Cochain, x: &Cochain) -> Result<Cochain, WedgeError> {
        expect_type(q, CochainType::scalar(0, Grid::Twisted), "Q first argument")?;
        expect_type(x, CochainType::edge(Grid::Twisted, Flavor::Flux), "Q second argument")?;
        let qe = self.q_edge(&q.values);
        let values = match self.variant {
            QVariant::Pe => self.out_weighted(&qe, &x.values),
            QVariant::Accur => self.in_weighted(&qe, &x.values),
            QVariant::Te => {
                let a = self.out_weighted(&qe, &x.values);
                let b = self.in_weighted(&qe, &x.values);
                a.iter().zip(&b).map(|(p, s)| 0.5 * (p + s)).collect()
            }
            QVariant::Dbl => self.dbl.as_ref().unwrap().apply(&q.values, &x.values),
        };
        Ok(Cochain {
            ctype: CochainType::edge(Grid::Straight, Flavor::Circulation),
            values,
        })
    }

    /// Apply the negated transpose `Q*(q̃⁰, ·) = −Q(q̃⁰, ·)ᵀ`, with the same
    /// signature as [`QOperator::apply`].
    ///
    /// `Q*` equals `Q` for the antisymmetric variants (TE, DBL); for the
    /// single-sided variants it moves the PV weight to the other edge slot.
    /// It is the operator that appears in the enstrophy-conserving form of
    /// the Leibniz-II identity `Q*(q̃, D̄1q̃) = D1 Rᵀ(q̃²/2)`, which is what
    /// the chain rule for the potential-enstrophy rate actually contracts
    /// against.
    pub fn apply_adjoint(&self, q: &Cochain, x: &Cochain) -> Result<Cochain, WedgeError> {
        expect_type(q, CochainType::scalar(0, Grid::Twisted), "Q* first argument")?;
        expect_type(x, CochainType::edge(Grid::Twisted, Flavor::Flux), "Q* second argument")?;
        let qe = self.q_edge(&q.values);
        // W is antisymmetric, so −(qᵉW)ᵀ = W qᵉ and −(W qᵉ)ᵀ = qᵉ W.
        let values = match self.variant {
            QVariant::Pe => self.in_weighted(&qe, &x.values),
            QVariant::Accur => self.out_weighted(&qe, &x.values),
            QVariant::Te => {
                let a = self.out_weighted(&qe, &x.values);
                let b = self.in_weighted(&qe, &x.values);
                a.iter().zip(&b).map(|(p, s)| 0.5 * (p + s)).collect()
            }
            QVariant::Dbl => self.dbl.as_ref().unwrap().apply(&q.values, &x.values),
        };
        Ok(Cochain {
            ctype: CochainType::edge(Grid::Straight, Flavor::Circulation),
            values,
        })
    }
}

/// The KE wedge coefficients 𝔗_{c̃,e,ẽ}, stored per edge per endpoint
/// (`[tail, head]`, matching `edge_vertices`).
#[derive(Clone, Debug)]
pub struct KeWedge {
    pub coeff: Vec<[f64; 2]>,
}

/// Build the KE wedge: metric uses `A_{c̃,ẽ}/Ã_ẽ`, combinatorial uses ½.
pub fn build_t(mesh: &MeshPair, kind: WedgeKind) -> KeWedge {
    let geo = &mesh.geometry;
    let coeff = (0..mesh.topology.n_edges)
        .map(|e| match kind {
            WedgeKind::Metric => [
                geo.overlap_tcell_tedge[e][0] / geo.ext_edge_area[e],
                geo.overlap_tcell_tedge[e][1] / geo.ext_edge_area[e],
            ],
            WedgeKind::Combinatorial => [0.5, 0.5],
        })
        .collect();
    KeWedge { coeff }
}

impl KeWedge {
    /// `(u¹ ∧ ũ)_c̃ = Σ_{ẽ∈EC(c̃)} 𝔗_{c̃,e,ẽ} u¹_e ũ_ẽ` — a twisted 2-form
    /// (twice the kinetic energy density integrated over c̃ when ũ = H1 u¹).
    pub fn ke(&self, mesh: &MeshPair, u: &Cochain, ut: &Cochain) -> Result<Cochain, WedgeError> {
        expect_type(u, CochainType::edge(Grid::Straight, Flavor::Circulation), "ke u")?;
        expect_type(ut, CochainType::edge(Grid::Twisted, Flavor::Flux), "ke ut")?;
        let topo = &mesh.topology;
        let mut values = alloc::vec![0.0; topo.n_vertices];
        for e in 0..topo.n_edges {
            let [tail, head] = topo.edge_vertices[e];
            let prod = u.values[e] * ut.values[e];
            values[tail] += self.coeff[e][0] * prod;
            values[head] += self.coeff[e][1] * prod;
        }
        Ok(Cochain { ctype: CochainType::scalar(2, Grid::Twisted), values })
    }

    /// Thickness averaged to edge e: `Σ_{c̃∈CE(ẽ)} 𝔗_{c̃,e,ẽ} h⁰_{v(c̃)}`.
    fn h_avg(&self, mesh: &MeshPair, h0: &[f64]) -> Vec<f64> {
        (0..mesh.topology.n_edges)
            .map(|e| {
                let [tail, head] = mesh.topology.edge_vertices[e];
                self.coeff[e][0] * h0[tail] + self.coeff[e][1] * h0[head]
            })
            .collect()
    }

    /// Adjoint mass-flux wedge on the straight grid:
    /// `(h⁰ ∧* u¹)_e = h_avg(e) u¹_e` (a straight circulation).
    pub fn massflux_straight(
        &self,
        mesh: &MeshPair,
        h0: &Cochain,
        u: &Cochain,
    ) -> Result<Cochain, WedgeError> {
        expect_type(h0, CochainType::scalar(0, Grid::Straight), "massflux h0")?;
        expect_type(u, CochainType::edge(Grid::Straight, Flavor::Circulation), "massflux u")?;
        let havg = self.h_avg(mesh, &h0.values);
        Ok(Cochain {
            ctype: CochainType::edge(Grid::Straight, Flavor::Circulation),
            values: u.values.iter().zip(&havg).map(|(a, b)| a * b).collect(),
        })
    }

    /// Adjoint mass-flux wedge on the twisted grid:
    /// `(h⁰ ∧* ũ)_ẽ = h_avg(e) ũ_ẽ` (a twisted flux).
    pub fn massflux_twisted(
        &self,
        mesh: &MeshPair,
        h0: &Cochain,
        ut: &Cochain,
    ) -> Result<Cochain, WedgeError> {
        expect_type(h0, CochainType::scalar(0, Grid::Straight), "massflux h0")?;
        expect_type(ut, CochainType::edge(Grid::Twisted, Flavor::Flux), "massflux ut")?;
        let havg = self.h_avg(mesh, &h0.values);
        Ok(Cochain {
            ctype: CochainType::edge(Grid::Twisted, Flavor::Flux),
            values: ut.values.iter().zip(&havg).map(|(a, b)| a * b).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::topological_pairing;
    use crate::mesh::{build_periodic_quad, build_periodic_trihex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setups() -> Vec<(MeshPair, WedgeKind)> {
        alloc::vec![
            (build_periodic_quad(4, 1.0).unwrap(), WedgeKind::Metric),
            (build_periodic_quad(5, 0.5).unwrap(), WedgeKind::Combinatorial),
            (build_periodic_trihex(4, 1.0).unwrap(), WedgeKind::Metric),
            (build_periodic_trihex(2, 1.0).unwrap(), WedgeKind::Combinatorial),
        ]
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn r_columns_sum_to_one() {
        for (mesh, kind) in setups() {
            let r = build_r(&mesh, kind);
            let mut colsum = alloc::vec![0.0; mesh.topology.n_vertices];
            for (_, c, v) in r.triplets() {
                colsum[c] += v;
            }
            for s in colsum {
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn w_identities_hold_on_all_meshes() {
        for (mesh, kind) in setups() {
            let ops = DecOps::new(&mesh).unwrap();
            let r = build_r(&mesh, kind);
            build_w(&mesh, &r, &ops).expect("W identities must hold");
        }
    }

    #[test]
    fn w_quarter_entries_on_uniform_quad() {
        let mesh = build_periodic_quad(4, 1.0).unwrap();
        let ops = DecOps::new(&mesh).unwrap();
        let r = build_r(&mesh, WedgeKind::Metric);
        let w = build_w(&mesh, &r, &ops).unwrap();
        for (_, _, v) in w.triplets() {
            assert!((v.abs() - 0.25).abs() < 1e-14 || v.abs() < 1e-14, "entry {v}");
        }
        // Each straight edge sees the four perpendicular neighbours.
        for e in 0..mesh.topology.n_edges {
            let nnz = w.row(e).filter(|&(_, v)| v.abs() > 1e-14).count();
            assert_eq!(nnz, 4);
        }
    }

    #[test]
    fn q_collapses_to_w_at_uniform_pv() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (mesh, kind) in setups() {
            let ops = DecOps::new(&mesh).unwrap();
            let r = build_r(&mesh, kind);
            let w = build_w(&mesh, &r, &ops).unwrap();
            let ones = Cochain::constant(&mesh, CochainType::scalar(0, Grid::Twisted), 1.0);
            let x = Cochain::new(
                &mesh,
                CochainType::edge(Grid::Twisted, Flavor::Flux),
                rand_vec(&mut rng, mesh.topology.n_edges),
            )
            .unwrap();
            for variant in [QVariant::Te, QVariant::Pe, QVariant::Accur] {
                let q = QOperator::build(&mesh, variant, &r, &w).unwrap();
                let out = q.apply(&ones, &x).unwrap();
                let wx = w.apply(&x.values);
                for (a, b) in out.values.iter().zip(&wx) {
                    assert!((a - b).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn q_te_pairing_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (mesh, kind) in setups() {
            let ops = DecOps::new(&mesh).unwrap();
            let r = build_r(&mesh, kind);
            let w = build_w(&mesh, &r, &ops).unwrap();
            let qop = QOperator::build(&mesh, QVariant::Te, &r, &w).unwrap();
            for _ in 0..20 {
                let q = Cochain::new(
                    &mesh,
                    CochainType::scalar(0, Grid::Twisted),
                    rand_vec(&mut rng, mesh.topology.n_cells),
                )
                .unwrap();
                let x = Cochain::new(
                    &mesh,
                    CochainType::edge(Grid::Twisted, Flavor::Flux),
                    rand_vec(&mut rng, mesh.topology.n_edges),
                )
                .unwrap();
                let z = Cochain::new(
                    &mesh,
                    CochainType::edge(Grid::Twisted, Flavor::Flux),
                    rand_vec(&mut rng, mesh.topology.n_edges),
                )
                .unwrap();
                // <<z, Q(q,x)>> = -<<x, Q(q,z)>>
                let a = topological_pairing(&z, &qop.apply(&q, &x).unwrap()).unwrap();
                let b = topological_pairing(&x, &qop.apply(&q, &z).unwrap()).unwrap();
                assert!((a + b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn q_pe_satisfies_pens_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (mesh, kind) in setups() {
            let ops = DecOps::new(&mesh).unwrap();
            let r = build_r(&mesh, kind);
            let w = build_w(&mesh, &r, &ops).unwrap();
            let qop = QOperator::build(&mesh, QVariant::Pe, &r, &w).unwrap();
            for _ in 0..20 {
                let q = Cochain::new(
                    &mesh,
                    CochainType::scalar(0, Grid::Twisted),
                    rand_vec(&mut rng, mesh.topology.n_cells),
                )
                .unwrap();
                // Q*(q, D1bar q) - D1 R^T (q^2/2) = 0 (enstrophy form of
                // Leibniz II; Q* = Q for the antisymmetric variants).
                let dq = ops.d1_bar.apply(&q).unwrap();
                let dq_flux = crate::cochain::reinterpret_flavor(&dq).unwrap();
                let lhs = qop.apply_adjoint(&q, &dq_flux).unwrap();
                let half_q2 = r_adjoint_product(&r, &q, &q).unwrap().scaled(0.5);
                let rhs = ops.d1.apply(&half_q2).unwrap();
                let resid = lhs.axpy(-1.0, &rhs).max_abs();
                assert!(resid < 1e-13, "pens residual {resid}");
            }
        }
    }

    #[test]
    fn ke_wedge_partition_of_unity() {
        // For constant fields u.t = a, ut = H1 u, the KE wedge integrates
        // |X|^2-like products; the coefficient rows sum to 1 per edge.
        for (mesh, kind) in setups() {
            let t = build_t(&mesh, kind);
            for c in &t.coeff {
                assert!((c[0] + c[1] - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn massflux_adjoint_of_ke_wedge() {
        // <<ke_wedge(u, ut) as h-pairing>> adjoint identity:
        // Sum_v h0_v' pairing ... realized as: h2~ paired with ke(u,ut)
        // equals u paired with massflux(h0, ut)-style contraction.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (mesh, kind) in setups() {
            let t = build_t(&mesh, kind);
            let h0 = Cochain::new(
                &mesh,
                CochainType::scalar(0, Grid::Straight),
                rand_vec(&mut rng, mesh.topology.n_vertices),
            )
            .unwrap();
            let u = Cochain::new(
                &mesh,
                CochainType::edge(Grid::Straight, Flavor::Circulation),
                rand_vec(&mut rng, mesh.topology.n_edges),
            )
            .unwrap();
            let ut = Cochain::new(
                &mesh,
                CochainType::edge(Grid::Twisted, Flavor::Flux),
                rand_vec(&mut rng, mesh.topology.n_edges),
            )
            .unwrap();
            let ke = t.ke(&mesh, &u, &ut).unwrap();
            // Σ_v h0_v ke_v = Σ_e havg_e u_e ut_e, both ways of contracting T.
            let lhs: f64 = h0.values.iter().zip(&ke.values).map(|(a, b)| a * b).sum();
            let mf = t.massflux_twisted(&mesh, &h0, &ut).unwrap();
            let rhs: f64 = u.values.iter().zip(&mf.values).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
            let mf2 = t.massflux_straight(&mesh, &h0, &u).unwrap();
            let rhs2: f64 = ut.values.iter().zip(&mf2.values).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs2).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
