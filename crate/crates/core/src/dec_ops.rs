//! Exterior derivatives and diagonal (Voronoi) Hodge stars as typed sparse
//! operators.
//!
//! Conventions (2D, doubly periodic torus):
//! - `D1`: straight 0 → straight 1 (circulation), `(D1 x)_e = x_head − x_tail`.
//! - `D2`: straight 1 (circulation) → straight 2, row c sums `n_ec` over the
//!   CCW boundary loop.
//! - `D̄1`: twisted 0 → twisted 1 (circulation); with the induced orientation
//!   t̃_ṽẽ = n_ec this is `(D̄1 x̃)_ẽ = x̃_left − x̃_right`.
//! - `D̄2`: twisted 1 (flux) → twisted 2; the discrete divergence, row c̃(v)
//!   sums ñ_ẽc̃ = −t_ve.
//!
//! These satisfy the transpose dualities `D̄2 = −D1ᵀ` and `D2 = D̄1ᵀ` and the
//! annihilation identities `D2·D1 = 0`, `D̄2·D̄1 = 0` exactly (integer
//! arithmetic in f64).
//!
//! The Voronoi Hodge stars are diagonal and require an orthogonal mesh pair:
//! `H1 = diag(A_ẽ/A_e)`, `H2 = diag(1/A_c)`, `H̄2 = diag(1/A_c̃)`, with the
//! derived inverses `H̄1 = −H1⁻¹`, `H0 = H̄2⁻¹`, `H̄0 = H2⁻¹`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cochain::{Cochain, CochainType, Flavor, Grid};
use crate::mesh::MeshPair;
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub enum DecError {
    /// Operator applied to a cochain of the wrong type.
    TypeMismatch { expected: CochainType, got: CochainType },
    /// Diagonal Hodge requested on a non-orthogonal mesh, or an inner
    /// product on an unsupported cochain type.
    UnsupportedHodge(String),
}

impl core::fmt::Display for DecError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DecError::TypeMismatch { expected, got } => {
                write!(f, "operator expects {expected:?}, got {got:?}")
            }
            DecError::UnsupportedHodge(m) => write!(f, "unsupported Hodge: {m}"),
        }
    }
}

impl core::error::Error for DecError {}

/// A sparse matrix together with the cochain types it maps between.
#[derive(Clone, Debug)]
pub struct LinOp {
    pub matrix: CsrMatrix,
    pub domain: CochainType,
    pub codomain: CochainType,
}

impl LinOp {
    pub fn apply(&self, x: &Cochain) -> Result<Cochain, DecError> {
        if x.ctype != self.domain {
            return Err(DecError::TypeMismatch { expected: self.domain, got: x.ctype });
        }
        Ok(Cochain { ctype: self.codomain, values: self.matrix.apply(&x.values) })
    }
}

/// Build `D1` (straight gradient-to-circulation).
pub fn build_d1(mesh: &MeshPair) -> LinOp {
    let topo = &mesh.topology;
    let mut trips = Vec::with_capacity(2 * topo.n_edges);
    for e in 0..topo.n_edges {
        let [tail, head] = topo.edge_vertices[e];
        trips.push((e, tail, -1.0));
        trips.push((e, head, 1.0));
    }
    LinOp {
        matrix: CsrMatrix::from_triplets(topo.n_edges, topo.n_vertices, trips),
        domain: CochainType::scalar(0, Grid::Straight),
        codomain: CochainType::edge(Grid::Straight, Flavor::Circulation),
    }
}

/// Build `D2` (straight circulation-to-curl).
pub fn build_d2(mesh: &MeshPair) -> LinOp {
    let topo = &mesh.topology;
    let mut trips = Vec::new();
    for (c, loop_edges) in topo.cell_edges.iter().enumerate() {
        for &(e, s) in loop_edges {
            trips.push((c, e, s as f64));
        }
    }
    LinOp {
        matrix: CsrMatrix::from_triplets(topo.n_cells, topo.n_edges, trips),
        domain: CochainType::edge(Grid::Straight, Flavor::Circulation),
        codomain: CochainType::scalar(2, Grid::Straight),
    }
}

/// Build `D̄1` (twisted gradient-to-circulation; twisted vertices are
/// indexed by their dual cells).
pub fn build_d1_bar(mesh: &MeshPair) -> LinOp {
    let topo = &mesh.topology;
    let mut trips = Vec::with_capacity(2 * topo.n_edges);
    for e in 0..topo.n_edges {
        let [right, left] = topo.edge_cells[e];
        trips.push((e, right, -1.0));
        trips.push((e, left, 1.0));
    }
    LinOp {
        matrix: CsrMatrix::from_triplets(topo.n_edges, topo.n_cells, trips),
        domain: CochainType::scalar(0, Grid::Twisted),
        codomain: CochainType::edge(Grid::Twisted, Flavor::Circulation),
    }
}

/// Build `D̄2` (twisted flux-to-divergence; twisted cells are indexed by
/// their dual vertices).
pub fn build_d2_bar(mesh: &MeshPair) -> LinOp {
    let topo = &mesh.topology;
    let mut trips = Vec::new();
    for v in 0..topo.n_vertices {
        for &e in &topo.vertex_edges[v] {
            trips.push((v, e, -(topo.t_ve(v, e) as f64)));
        }
    }
    LinOp {
        matrix: CsrMatrix::from_triplets(topo.n_vertices, topo.n_edges, trips),
        domain: CochainType::edge(Grid::Twisted, Flavor::Flux),
        codomain: CochainType::scalar(2, Grid::Twisted),
    }
}

fn require_orthogonal(mesh: &MeshPair) -> Result<(), DecError> {
    if mesh.orthogonal {
        Ok(())
    } else {
        Err(DecError::UnsupportedHodge(String::from(
            "diagonal Voronoi Hodge needs an orthogonal mesh pair",
        )))
    }
}

/// The three primitive Voronoi Hodge stars (orthogonal meshes only).
pub fn build_hodge_voronoi(mesh: &MeshPair) -> Result<(LinOp, LinOp, LinOp), DecError> {
    require_orthogonal(mesh)?;
    let geo = &mesh.geometry;
    let h1_diag: Vec<f64> =
        (0..mesh.topology.n_edges).map(|e| geo.tedge_len[e] / geo.edge_len[e]).collect();
    let h1 = LinOp {
        matrix: CsrMatrix::from_diagonal(&h1_diag),
        domain: CochainType::edge(Grid::Straight, Flavor::Circulation),
        codomain: CochainType::edge(Grid::Twisted, Flavor::Flux),
    };
    let h2 = LinOp {
        matrix: CsrMatrix::from_diagonal(
            &geo.cell_area.iter().map(|&a| 1.0 / a).collect::<Vec<_>>(),
        ),
        domain: CochainType::scalar(2, Grid::Straight),
        codomain: CochainType::scalar(0, Grid::Twisted),
    };
    let h2_bar = LinOp {
        matrix: CsrMatrix::from_diagonal(
            &geo.tcell_area.iter().map(|&a| 1.0 / a).collect::<Vec<_>>(),
        ),
        domain: CochainType::scalar(2, Grid::Twisted),
        codomain: CochainType::scalar(0, Grid::Straight),
    };
    Ok((h1, h2, h2_bar))
}

/// The complete operator bundle for one mesh.
#[derive(Clone, Debug)]
pub struct DecOps {
    pub d1: LinOp,
    pub d2: LinOp,
    pub d1_bar: LinOp,
    pub d2_bar: LinOp,
    /// `H1 = diag(A_ẽ/A_e)`: straight circulation → twisted flux.
    pub h1: LinOp,
    /// `H2 = diag(1/A_c)`: straight 2-form → twisted 0-form.
    pub h2: LinOp,
    /// `H̄2 = diag(1/A_c̃)`: twisted 2-form → straight 0-form.
    pub h2_bar: LinOp,
    /// `H̄1 = −H1⁻¹`: twisted flux → straight circulation.
    pub h1_bar: LinOp,
    /// `H0 = H̄2⁻¹ = diag(A_c̃)`: straight 0-form → twisted 2-form.
    pub h0: LinOp,
    /// `H̄0 = H2⁻¹ = diag(A_c)`: twisted 0-form → straight 2-form.
    pub h0_bar: LinOp,
}

fn invert_diagonal(op: &LinOp, sign: f64, domain: CochainType, codomain: CochainType) -> LinOp {
    let n = op.matrix.nrows();
    let mut diag = alloc::vec![0.0; n];
    for (r, c, v) in op.matrix.triplets() {
        debug_assert_eq!(r, c, "Hodge must be diagonal to invert");
        diag[r] = sign / v;
    }
    LinOp { matrix: CsrMatrix::from_diagonal(&diag), domain, codomain }
}

impl DecOps {
    pub fn new(mesh: &MeshPair) -> Result<Self, DecError> {
        let (h1, h2, h2_bar) = build_hodge_voronoi(mesh)?;
        let h1_bar = invert_diagonal(
            &h1,
            -1.0,
            CochainType::edge(Grid::Twisted, Flavor::Flux),
            CochainType::edge(Grid::Straight, Flavor::Circulation),
        );
        let h0 = invert_diagonal(
            &h2_bar,
            1.0,
            CochainType::scalar(0, Grid::Straight),
            CochainType::scalar(2, Grid::Twisted),
        );
        let h0_bar = invert_diagonal(
            &h2,
            1.0,
            CochainType::scalar(0, Grid::Twisted),
            CochainType::scalar(2, Grid::Straight),
        );
        Ok(Self {
            d1: build_d1(mesh),
            d2: build_d2(mesh),
            d1_bar: build_d1_bar(mesh),
            d2_bar: build_d2_bar(mesh),
            h1,
            h2,
            h2_bar,
            h1_bar,
            h0,
            h0_bar,
        })
    }

    /// Hodge diagonal for a straight cochain type (`H_k`).
    fn straight_hodge(&self, t: CochainType) -> Option<&LinOp> {
        match (t.degree, t.flavor) {
            (0, None) => Some(&self.h0),
            (1, Some(Flavor::Circulation)) => Some(&self.h1),
            (2, None) => Some(&self.h2),
            _ => None,
        }
    }

    /// Hodge diagonal for a twisted cochain type (`H̄_k`).
    fn twisted_hodge(&self, t: CochainType) -> Option<&LinOp> {
        match (t.degree, t.flavor) {
            (0, None) => Some(&self.h0_bar),
            (1, Some(Flavor::Flux)) => Some(&self.h1_bar),
            (2, None) => Some(&self.h2_bar),
            _ => None,
        }
    }

    /// Metric inner product ⟨a, b⟩ of two cochains of the same type:
    /// `aᵀ H_k b` on the straight grid, `(−1)^{k(n−k)} aᵀ H̄_k b` on the
    /// twisted grid (positive definite in both cases).
    pub fn inner_product(&self, a: &Cochain, b: &Cochain) -> Result<f64, DecError> {
        if a.ctype != b.ctype {
            return Err(DecError::TypeMismatch { expected: a.ctype, got: b.ctype });
        }
        let (hodge, sign) = match a.ctype.grid {
            Grid::Straight => (self.straight_hodge(a.ctype), 1.0),
            Grid::Twisted => (
                self.twisted_hodge(a.ctype),
                if a.ctype.degree == 1 { -1.0 } else { 1.0 },
            ),
        };
        let hodge = hodge.ok_or_else(|| {
            DecError::UnsupportedHodge(alloc::format!("no inner product for {:?}", a.ctype))
        })?;
        let hb = hodge.matrix.apply(&b.values);
        Ok(sign * a.values.iter().zip(&hb).map(|(x, y)| x * y).sum::<f64>())
    }

    /// Max-norm residuals of the two transpose dualities:
    /// `(|D̄2 + D1ᵀ|_max, |D2 − D̄1ᵀ|_max)`.
    pub fn transpose_duality_errors(&self) -> (f64, f64) {
        let e1 = self.d2_bar.matrix.max_abs_diff(&self.d1.matrix.transpose().scaled(-1.0));
        let e2 = self.d2.matrix.max_abs_diff(&self.d1_bar.matrix.transpose());
        (e1, e2)
    }

    /// Max-norm residuals of `D2·D1` and `D̄2·D̄1` (both exactly zero for a
    /// consistent mesh).
    pub fn annihilation_errors(&self) -> (f64, f64) {
        (
            self.d2.matrix.matmul(&self.d1.matrix).max_abs(),
            self.d2_bar.matrix.matmul(&self.d1_bar.matrix).max_abs(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{reduce_scalar, reduce_vector, reinterpret_flavor, topological_pairing};
    use crate::mesh::{build_periodic_quad, build_periodic_trihex};

    fn meshes() -> Vec<MeshPair> {
        alloc::vec![
            build_periodic_quad(3, 1.0).unwrap(),
            build_periodic_quad(4, 0.5).unwrap(),
            build_periodic_trihex(2, 1.0).unwrap(),
            build_periodic_trihex(4, 0.7).unwrap(),
        ]
    }

    #[test]
    fn exact_operator_identities() {
        for mesh in meshes() {
            let ops = DecOps::new(&mesh).unwrap();
            let (a, b) = ops.annihilation_errors();
            assert_eq!((a, b), (0.0, 0.0));
            let (t1, t2) = ops.transpose_duality_errors();
            assert_eq!((t1, t2), (0.0, 0.0));
        }
    }

    #[test]
    fn discrete_stokes() {
        // ⟨⟨D x, ỹ⟩⟩ computed two ways must agree with the transpose pairing:
        // Σ_c (D2 u)_c ỹ_c = Σ_e u_e (D̄1 ỹ)_e with the k = 1 sign.
        for mesh in meshes() {
            let ops = DecOps::new(&mesh).unwrap();
            let u = reduce_vector(&mesh, |x, y| [libm::sin(y) + 0.3, x * 0.0 + libm::cos(x)],
                crate::cochain::Flavor::Circulation, Grid::Straight);
            let ytw = reduce_scalar(&mesh, |x, y| 1.0 + 0.5 * x - 0.25 * y, 0, Grid::Twisted).unwrap();
            let lhs = topological_pairing(&ops.d2.apply(&u).unwrap(), &ytw).unwrap();
            let du = ops.d1_bar.apply(&ytw).unwrap();
            let du_flux = reinterpret_flavor(&du).unwrap();
            let rhs = -topological_pairing(&du_flux, &u).unwrap();
            // (−1) from pairing a twisted 1-cochain first; integration by
            // parts on the torus has no boundary term.
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn gradient_of_linear_field_is_exact() {
        let mesh = build_periodic_quad(4, 1.0).unwrap();
        let ops = DecOps::new(&mesh).unwrap();
        // Periodic sawtooth is not smooth; use a lattice-periodic trig field.
        let l = 2.0 * core::f64::consts::PI / 4.0;
        let f0 = reduce_scalar(&mesh, |x, _| libm::sin(l * x), 0, Grid::Straight).unwrap();
        let grad = ops.d1.apply(&f0).unwrap();
        for e in 0..mesh.topology.n_edges {
            let [t, h] = mesh.topology.edge_vertices[e];
            let expect = libm::sin(l * mesh.geometry.vertex_pos[h][0])
                - libm::sin(l * mesh.geometry.vertex_pos[t][0]);
            let diff = (grad.values[e] - expect).abs();
            // Wrap-around heads evaluate identically because sin is periodic.
            assert!(diff < 1e-14, "edge {e}: {diff}");
        }
    }

    #[test]
    fn hodge_requires_orthogonal_mesh() {
        let mut mesh = build_periodic_quad(3, 1.0).unwrap();
        mesh.orthogonal = false;
        assert!(matches!(DecOps::new(&mesh), Err(DecError::UnsupportedHodge(_))));
    }

    #[test]
    fn inner_products_positive_and_consistent() {
        for mesh in meshes() {
            let ops = DecOps::new(&mesh).unwrap();
            let u = reduce_vector(&mesh, |x, y| [y - 0.2, -x], crate::cochain::Flavor::Circulation, Grid::Straight);
            let norm = ops.inner_product(&u, &u).unwrap();
            assert!(norm > 0.0);
            // Twisted norm of H1 u equals straight norm of u (isometry of a
            // diagonal Hodge with H̄1 = −H1⁻¹ and the k = 1 sign).
            let ut = ops.h1.apply(&u).unwrap();
            let tnorm = ops.inner_product(&ut, &ut).unwrap();
            assert!((norm - tnorm).abs() < 1e-12 * norm.abs());
        }
    }

    #[test]
    fn apply_rejects_wrong_type() {
        let mesh = build_periodic_quad(2, 1.0).unwrap();
        let ops = DecOps::new(&mesh).unwrap();
        let wrong = Cochain::zeros(&mesh, CochainType::edge(Grid::Straight, Flavor::Flux));
        assert!(matches!(ops.d2.apply(&wrong), Err(DecError::TypeMismatch { .. })));
    }
}
