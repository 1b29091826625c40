//! The rotating shallow-water model on a dual mesh pair: Hamiltonian,
//! functional derivatives, PV diagnosis, Poisson-bracket tendencies,
//! linearized dynamics, and invariant diagnostics.
//!
//! Prognostic variables are the relative circulation `u¹` (straight 1-form)
//! and the fluid height `h̃²` (twisted 2-form). The Coriolis field is
//! prescribed directly as a straight 2-form `f²`: on the doubly periodic
//! plane a constant-f field is not the coboundary of any periodic 1-form
//! (Σf² ≠ 0 while every coboundary sums to zero), so the absolute-velocity
//! bookkeeping is carried by `f²` instead of a static rotational 1-form.
//! The equations of motion are unchanged because that rotational part is
//! static in time.
//!
//! Conservation structure (realized as exact rate identities in
//! [`SweModel::invariant_rates`]):
//! - mass and circulation rates vanish for every scheme (Stokes/annihilation);
//! - the energy rate vanishes when the PV flux operator is antisymmetric
//!   (TE, DBL variants);
//! - the potential-enstrophy rate vanishes when the adjoint Leibniz-II
//!   identity holds (PE, DBL variants).

use alloc::string::String;
use alloc::vec::Vec;

use crate::cochain::{reinterpret_flavor, Cochain, CochainError, CochainType, Flavor, Grid};
use crate::dec_ops::{DecError, DecOps};
use crate::mesh::MeshPair;
use crate::sparse::CsrMatrix;
use crate::wedge::{
    apply_r_weighted, build_r, build_t, build_w, KeWedge, QOperator, QVariant, WedgeError,
    WedgeKind,
};

/// Errors from model construction or evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum SweError {
    /// Diagnosed thickness `(R h̃²)_c ≤ 0`; PV is undefined there. No
    /// clipping is applied — conservation claims are void once the layer
    /// thickness collapses.
    PvSingularity { cells: Vec<usize> },
    /// Linearization requested around a non-positive reference depth.
    NonPositiveDepth(f64),
    /// Parameter cochain of the wrong type or an invalid constant.
    InvalidParams(String),
    Wedge(WedgeError),
    Dec(DecError),
    Cochain(CochainError),
}

impl core::fmt::Display for SweError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SweError::PvSingularity { cells } => {
                write!(f, "pv-singularity: non-positive diagnosed thickness in cells {cells:?}")
            }
            SweError::NonPositiveDepth(h) => {
                write!(f, "linearization requires a positive reference depth, got {h}")
            }
            SweError::InvalidParams(m) => write!(f, "invalid physics parameters: {m}"),
            SweError::Wedge(e) => write!(f, "{e}"),
            SweError::Dec(e) => write!(f, "{e}"),
            SweError::Cochain(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SweError {}

impl From<WedgeError> for SweError {
    fn from(e: WedgeError) -> Self {
        SweError::Wedge(e)
    }
}
impl From<DecError> for SweError {
    fn from(e: DecError) -> Self {
        SweError::Dec(e)
    }
}
impl From<CochainError> for SweError {
    fn from(e: CochainError) -> Self {
        SweError::Cochain(e)
    }
}

/// Physical parameters: gravity, Coriolis 2-form, topography, and their
/// pointwise (0-form) proxies derived through the Hodge stars.
#[derive(Clone, Debug)]
pub struct PhysicsParams {
    pub g: f64,
    /// Coriolis straight 2-form (integrated over cells).
    pub f2: Cochain,
    /// Topography twisted 2-form (integrated over twisted cells).
    pub hs2: Cochain,
    /// `f̃⁰ = H2 f²` — pointwise Coriolis at twisted vertices (cells).
    pub f0_tilde: Cochain,
    /// `h_s⁰ = H̄2 h̃_s²` — pointwise topography at straight vertices.
    pub hs0: Cochain,
}

impl PhysicsParams {
    pub fn new(ops: &DecOps, g: f64, f2: Cochain, hs2: Cochain) -> Result<Self, SweError> {
        if !(g > 0.0) {
            return Err(SweError::InvalidParams(alloc::format!("g must be positive, got {g}")));
        }
        if f2.ctype != CochainType::scalar(2, Grid::Straight) {
            return Err(SweError::InvalidParams(String::from("f² must be a straight 2-form")));
        }
        if hs2.ctype != CochainType::scalar(2, Grid::Twisted) {
            return Err(SweError::InvalidParams(String::from("h̃_s² must be a twisted 2-form")));
        }
        let f0_tilde = ops.h2.apply(&f2)?;
        let hs0 = ops.h2_bar.apply(&hs2)?;
        Ok(Self { g, f2, hs2, f0_tilde, hs0 })
    }

    /// Convenience constructor: constant Coriolis parameter and flat bottom.
    pub fn uniform(mesh: &MeshPair, ops: &DecOps, g: f64, f0: f64) -> Result<Self, SweError> {
        let f2 = Cochain::new(
            mesh,
            CochainType::scalar(2, Grid::Straight),
            mesh.geometry.cell_area.iter().map(|a| f0 * a).collect(),
        )?;
        let hs2 = Cochain::zeros(mesh, CochainType::scalar(2, Grid::Twisted));
        Self::new(ops, g, f2, hs2)
    }
}

/// Prognostic state: relative circulation, height, and model time.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    /// Relative velocity as a straight circulation 1-form.
    pub u: Cochain,
    /// Fluid height as a twisted 2-form.
    pub h: Cochain,
    pub time: f64,
}

impl ModelState {
    pub fn new(u: Cochain, h: Cochain, time: f64) -> Result<Self, SweError> {
        if u.ctype != CochainType::edge(Grid::Straight, Flavor::Circulation) {
            return Err(SweError::InvalidParams(String::from(
                "state u must be a straight circulation 1-form",
            )));
        }
        if h.ctype != CochainType::scalar(2, Grid::Twisted) {
            return Err(SweError::InvalidParams(String::from("state h must be a twisted 2-form")));
        }
        Ok(Self { u, h, time })
    }

    /// Rest state with uniform pointwise height `h_pt`.
    pub fn rest(mesh: &MeshPair, h_pt: f64) -> Self {
        let h = Cochain::new(
            mesh,
            CochainType::scalar(2, Grid::Twisted),
            mesh.geometry.tcell_area.iter().map(|a| h_pt * a).collect(),
        )
        .expect("sized by construction");
        let u = Cochain::zeros(mesh, CochainType::edge(Grid::Straight, Flavor::Circulation));
        Self { u, h, time: 0.0 }
    }
}

/// Only diagonal Voronoi Hodge stars are implemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HodgeKind {
    Voronoi,
}

/// The discrete operator choices defining one TRiSK-family scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeConfig {
    pub r_kind: WedgeKind,
    pub q_variant: QVariant,
    pub t_kind: WedgeKind,
    pub hodge: HodgeKind,
}

/// Named schemes from the literature comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemePreset {
    /// Arakawa–Lamb: combinatorial weights, doubly conservative PV flux.
    Al81,
    /// TRiSK with the energy-conserving PV flux.
    Trsk2010Te,
    /// TRiSK with the enstrophy-conserving PV flux.
    Trsk2010Pe,
    /// Doubly conservative PV flux with metric weights.
    EldredDbl,
    /// Accuracy-first PV flux, no quadratic conservation.
    Accur,
}

impl SchemePreset {
    pub const ALL: [SchemePreset; 5] = [
        SchemePreset::Al81,
        SchemePreset::Trsk2010Te,
        SchemePreset::Trsk2010Pe,
        SchemePreset::EldredDbl,
        SchemePreset::Accur,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemePreset::Al81 => "al81",
            SchemePreset::Trsk2010Te => "trsk2010-te",
            SchemePreset::Trsk2010Pe => "trsk2010-pe",
            SchemePreset::EldredDbl => "eldred-dbl",
            SchemePreset::Accur => "accur",
        }
    }

    pub fn parse(name: &str) -> Option<SchemePreset> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn config(self) -> SchemeConfig {
        let (r_kind, q_variant, t_kind) = match self {
            SchemePreset::Al81 => {
                (WedgeKind::Combinatorial, QVariant::Dbl, WedgeKind::Combinatorial)
            }
            SchemePreset::Trsk2010Te => (WedgeKind::Metric, QVariant::Te, WedgeKind::Metric),
            SchemePreset::Trsk2010Pe => (WedgeKind::Metric, QVariant::Pe, WedgeKind::Metric),
            SchemePreset::EldredDbl => (WedgeKind::Metric, QVariant::Dbl, WedgeKind::Metric),
            SchemePreset::Accur => (WedgeKind::Metric, QVariant::Accur, WedgeKind::Metric),
        };
        SchemeConfig { r_kind, q_variant, t_kind, hodge: HodgeKind::Voronoi }
    }
}

/// Height and momentum tendencies.
#[derive(Clone, Debug)]
pub struct Tendencies {
    /// `∂h̃²/∂t = −D̄2 F̃` (twisted 2-form).
    pub dh: Cochain,
    /// `∂u¹/∂t = −Q(q̃⁰, F̃) − D1 B⁰` (straight circulation).
    pub du: Cochain,
}

/// Instantaneous rates of the conserved functionals under given tendencies.
#[derive(Clone, Copy, Debug)]
pub struct InvariantRates {
    pub d_mass: f64,
    pub d_energy: f64,
    pub d_potential_enstrophy: f64,
    pub d_circulation: f64,
}

/// Scalar diagnostics of a state.
#[derive(Clone, Copy, Debug)]
pub struct Diagnostics {
    pub mass: f64,
    pub circulation: f64,
    pub energy: f64,
    pub potential_enstrophy: f64,
    /// Pointwise height extrema (of `h⁰ = H̄2 h̃²`).
    pub min_h: f64,
    pub max_h: f64,
    /// Largest tangential velocity `|u¹_e| / ℓ_e`.
    pub max_u: f64,
}

/// One fully assembled scheme on one mesh: DEC operators plus the
/// R/W/Q/T wedge operators of the chosen variant.
#[derive(Clone, Debug)]
pub struct SweModel {
    pub mesh: MeshPair,
    pub ops: DecOps,
    pub scheme: SchemeConfig,
    pub r: CsrMatrix,
    pub w: CsrMatrix,
    pub q_op: QOperator,
    pub t: KeWedge,
}

impl SweModel {
    pub fn new(mesh: MeshPair, scheme: SchemeConfig) -> Result<Self, SweError> {
        let ops = DecOps::new(&mesh)?;
        let r = build_r(&mesh, scheme.r_kind);
        let w = build_w(&mesh, &r, &ops)?;
        let q_op = QOperator::build(&mesh, scheme.q_variant, &r, &w)?;
        let t = build_t(&mesh, scheme.t_kind);
        Ok(Self { mesh, ops, scheme, r, w, q_op, t })
    }

    /// Pointwise height `h⁰ = H̄2 h̃²`.
    fn h0(&self, state: &ModelState) -> Result<Cochain, SweError> {
        Ok(self.ops.h2_bar.apply(&state.h)?)
    }

    /// Twisted flux velocity `ũ = H1 u¹`.
    fn u_tilde(&self, state: &ModelState) -> Result<Cochain, SweError> {
        Ok(self.ops.h1.apply(&state.u)?)
    }

    /// The KE wedge `K̃² = u¹ ∧ ũ` (twice the kinetic-energy density 2-form).
    fn ke2(&self, state: &ModelState) -> Result<Cochain, SweError> {
        let ut = self.u_tilde(state)?;
        Ok(self.t.ke(&self.mesh, &state.u, &ut)?)
    }

    /// Total energy
    /// `H = (g/2)⟨h̃,h̃⟩ + g⟨h̃,h̃_s⟩ + ⟨h̃, K̃/2⟩` (twisted-2 inner products).
    pub fn hamiltonian(&self, state: &ModelState, params: &PhysicsParams) -> Result<f64, SweError> {
        let hh = self.ops.inner_product(&state.h, &state.h)?;
        let hhs = self.ops.inner_product(&state.h, &params.hs2)?;
        let ke = self.ops.inner_product(&state.h, &self.ke2(state)?.scaled(0.5))?;
        Ok(0.5 * params.g * hh + params.g * hhs + ke)
    }

    /// Mass flux `F̃` and Bernoulli function `B⁰`:
    /// `F̃ = ½ (h⁰ ∧* ũ) + ½ H1(h⁰ ∧* u¹)`,
    /// `B⁰ = ½ H̄2 K̃² + g (h⁰ + h_s⁰)`.
    pub fn functional_derivatives(
        &self,
        state: &ModelState,
        params: &PhysicsParams,
    ) -> Result<(Cochain, Cochain), SweError> {
        let h0 = self.h0(state)?;
        let ut = self.u_tilde(state)?;
        let mf_twisted = self.t.massflux_twisted(&self.mesh, &h0, &ut)?;
        let mf_straight = self.t.massflux_straight(&self.mesh, &h0, &state.u)?;
        let f_tilde = mf_twisted.scaled(0.5).axpy(0.5, &self.ops.h1.apply(&mf_straight)?);
        let ke_half = self.ops.h2_bar.apply(&self.t.ke(&self.mesh, &state.u, &ut)?.scaled(0.5))?;
        let b0 = Cochain {
            ctype: CochainType::scalar(0, Grid::Straight),
            values: ke_half
                .values
                .iter()
                .zip(&h0.values)
                .zip(&params.hs0.values)
                .map(|((k, h), hs)| k + params.g * (h + hs))
                .collect(),
        };
        Ok((f_tilde, b0))
    }

    /// Absolute vorticity `η² = D2 u¹ + f²` (straight 2-form).
    pub fn vorticity(&self, state: &ModelState, params: &PhysicsParams) -> Result<Cochain, SweError> {
        Ok(self.ops.d2.apply(&state.u)?.axpy(1.0, &params.f2))
    }

    /// Potential vorticity `q̃⁰_{ṽ(c)} = η²_c / (R h̃²)_c`.
    ///
    /// Fails with a pv-singularity (listing the offending cells) if the
    /// diagnosed thickness is not strictly positive anywhere.
    pub fn diagnose_pv(
        &self,
        state: &ModelState,
        params: &PhysicsParams,
    ) -> Result<Cochain, SweError> {
        let eta = self.vorticity(state, params)?;
        let rh = self.r.apply(&state.h.values);
        let bad: Vec<usize> =
            (0..rh.len()).filter(|&c| !(rh[c] > 0.0)).collect();
        if !bad.is_empty() {
            return Err(SweError::PvSingularity { cells: bad });
        }
        Ok(Cochain {
            ctype: CochainType::scalar(0, Grid::Twisted),
            values: eta.values.iter().zip(&rh).map(|(e, r)| e / r).collect(),
        })
    }

    /// Semi-discrete tendencies:
    /// `∂h̃²/∂t = −D̄2 F̃`, `∂u¹/∂t = −Q(q̃⁰, F̃) − D1 B⁰`.
    pub fn tendencies(
        &self,
        state: &ModelState,
        params: &PhysicsParams,
    ) -> Result<Tendencies, SweError> {
        let (f_tilde, b0) = self.functional_derivatives(state, params)?;
        let q = self.diagnose_pv(state, params)?;
        let dh = self.ops.d2_bar.apply(&f_tilde)?.scaled(-1.0);
        let pv_flux = self.q_op.apply(&q, &f_tilde)?;
        let du = pv_flux.axpy(1.0, &self.ops.d1.apply(&b0)?).scaled(-1.0);
        Ok(Tendencies { dh, du })
    }

    /// Chain-rule rates of the conserved functionals for given tendencies.
    ///
    /// With the gradients `∂H/∂u = F̃`, `∂H/∂h = B⁰`, `∂PE/∂u = D̄1 q̃⁰` and
    /// `∂PE/∂h = −½ Rᵀ(q̃∘q̃)` these are plain dot products; the mass and
    /// circulation rates are the plain sums `Σ ∂h̃²/∂t` and `Σ D2 ∂u¹/∂t`.
    pub fn invariant_rates(
        &self,
        state: &ModelState,
        params: &PhysicsParams,
        tend: &Tendencies,
    ) -> Result<InvariantRates, SweError> {
        let (f_tilde, b0) = self.functional_derivatives(state, params)?;
        let q = self.diagnose_pv(state, params)?;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let d_energy =
            dot(&f_tilde.values, &tend.du.values) + dot(&b0.values, &tend.dh.values);
        let d1bq = self.ops.d1_bar.apply(&q)?;
        let q2: Vec<f64> = q.values.iter().map(|x| x * x).collect();
        let rt_q2 = self.r.transpose().apply(&q2);
        let d_potential_enstrophy =
            dot(&d1bq.values, &tend.du.values) - 0.5 * dot(&rt_q2, &tend.dh.values);
        let d_mass = tend.dh.values.iter().sum::<f64>();
        let d_circulation = self.ops.d2.matrix.apply(&tend.du.values).iter().sum::<f64>();
        Ok(InvariantRates { d_mass, d_energy, d_potential_enstrophy, d_circulation })
    }

    /// Tendencies of the system linearized around rest with uniform depth
    /// `h_ref`: `F̃_lin = h_ref · H1 u¹`, `B⁰_lin = g (h⁰ + h_s⁰)`, and the
    /// PV flux frozen at `q̃⁰ = f̃⁰ / h_ref` through the same Q operator.
    pub fn linearized_tendencies(
        &self,
        state: &ModelState,
        params: &PhysicsParams,
        h_ref: f64,
    ) -> Result<Tendencies, SweError> {
        if !(h_ref > 0.0) {
            return Err(SweError::NonPositiveDepth(h_ref));
        }
        let f_lin = self.ops.h1.apply(&state.u)?.scaled(h_ref);
        let h0 = self.h0(state)?;
        let b_lin = Cochain {
            ctype: CochainType::scalar(0, Grid::Straight),
            values: h0
                .values
                .iter()
                .zip(&params.hs0.values)
                .map(|(h, hs)| params.g * (h + hs))
                .collect(),
        };
        let q_frozen = params.f0_tilde.scaled(1.0 / h_ref);
        let dh = self.ops.d2_bar.apply(&f_lin)?.scaled(-1.0);
        let pv_flux = self.q_op.apply(&q_frozen, &f_lin)?;
        let du = pv_flux.axpy(1.0, &self.ops.d1.apply(&b_lin)?).scaled(-1.0);
        Ok(Tendencies { dh, du })
    }

    /// Scalar diagnostics. The potential enstrophy is
    /// `PE = ½⟨⟨q̃⁰, q̃⁰ ∧ h̃²⟩⟩ = ½ Σ_c q̃_c η²_c`.
    pub fn diagnostics(
        &self,
        state: &ModelState,
        params: &PhysicsParams,
    ) -> Result<Diagnostics, SweError> {
        let mass = state.h.values.iter().sum::<f64>();
        let eta = self.vorticity(state, params)?;
        let circulation = eta.values.iter().sum::<f64>();
        let energy = self.hamiltonian(state, params)?;
        let q = self.diagnose_pv(state, params)?;
        let wedge_qh = apply_r_weighted(&self.r, &q, &state.h)?;
        let potential_enstrophy =
            0.5 * q.values.iter().zip(&wedge_qh.values).map(|(a, b)| a * b).sum::<f64>();
        let h0 = self.h0(state)?;
        let min_h = h0.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_h = h0.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let max_u = state
            .u
            .values
            .iter()
            .zip(&self.mesh.geometry.edge_len)
            .map(|(u, l)| (u / l).abs())
            .fold(0.0f64, f64::max);
        Ok(Diagnostics { mass, circulation, energy, potential_enstrophy, min_h, max_h, max_u })
    }
}

/// Build a discretely geostrophically balanced state for the linearized
/// system from a random twisted streamfunction `ψ̃⁰`:
/// `ũ = D̄1 ψ̃` (reinterpreted as a flux), `u¹ = H1⁻¹ ũ`,
/// `h⁰ = −(f0/g) Rᵀ ψ̃`. Constructed so that both linearized tendencies
/// vanish identically via `W D̄1 = D1 Rᵀ`.
pub fn geostrophic_state(
    model: &SweModel,
    psi: &Cochain,
    f0: f64,
    g: f64,
) -> Result<ModelState, SweError> {
    let dpsi = model.ops.d1_bar.apply(psi)?;
    let ut = reinterpret_flavor(&dpsi)?;
    // H1⁻¹ = −H̄1 for the diagonal Voronoi Hodge pair.
    let u = model.ops.h1_bar.apply(&ut)?.scaled(-1.0);
    let h0_vals = model.r.transpose().apply(&psi.values);
    let h = Cochain {
        ctype: CochainType::scalar(2, Grid::Twisted),
        values: h0_vals
            .iter()
            .zip(&model.mesh.geometry.tcell_area)
            .map(|(p, a)| -(f0 / g) * p * a)
            .collect(),
    };
    ModelState::new(u, h, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::reduce_vector;
    use crate::mesh::{build_periodic_quad, build_periodic_trihex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad_model(n: usize, dx: f64, preset: SchemePreset) -> SweModel {
        let mesh = build_periodic_quad(n, dx).unwrap();
        SweModel::new(mesh, preset.config()).unwrap()
    }

    fn random_state(model: &SweModel, rng: &mut ChaCha8Rng) -> ModelState {
        let mesh = &model.mesh;
        let u = Cochain::new(
            mesh,
            CochainType::edge(Grid::Straight, Flavor::Circulation),
            (0..mesh.topology.n_edges).map(|_| rng.gen_range(-0.3..0.3)).collect(),
        )
        .unwrap();
        let h = Cochain::new(
            mesh,
            CochainType::scalar(2, Grid::Twisted),
            mesh.geometry
                .tcell_area
                .iter()
                .map(|a| a * rng.gen_range(0.8..1.2))
                .collect(),
        )
        .unwrap();
        ModelState::new(u, h, 0.0).unwrap()
    }

    fn uniform_velocity_state(model: &SweModel, h_pt: f64) -> ModelState {
        let u =
            reduce_vector(&model.mesh, |_x, _y| [1.0, 0.0], Flavor::Circulation, Grid::Straight);
        let mut s = ModelState::rest(&model.mesh, h_pt);
        s.u = u;
        s
    }

    #[test]
    fn hamiltonian_oracles_on_quad2() {
        let model = quad_model(2, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 10.0, 0.0).unwrap();
        let rest = ModelState::rest(&model.mesh, 2.0);
        let h_rest = model.hamiltonian(&rest, &params).unwrap();
        assert!((h_rest - 80.0).abs() < 1e-12, "H = {h_rest}");

        let zero = ModelState::rest(&model.mesh, 0.0);
        assert_eq!(model.hamiltonian(&zero, &params).unwrap(), 0.0);

        let moving = uniform_velocity_state(&model, 2.0);
        let h_moving = model.hamiltonian(&moving, &params).unwrap();
        assert!((h_moving - 84.0).abs() < 1e-12, "H = {h_moving}");
    }

    #[test]
    fn functional_derivatives_oracles() {
        let model = quad_model(3, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.0).unwrap();
        // At rest: F = 0, B = g(h0 + hs0).
        let rest = ModelState::rest(&model.mesh, 1.5);
        let (f, b) = model.functional_derivatives(&rest, &params).unwrap();
        assert!(f.max_abs() == 0.0);
        for v in &b.values {
            assert!((v - 9.81 * 1.5).abs() < 1e-12);
        }
        // Uniform h = H0 and uniform velocity: F = H0 * u_tilde.
        let h0_ref = 2.5;
        let moving = uniform_velocity_state(&model, h0_ref);
        let (f, _) = model.functional_derivatives(&moving, &params).unwrap();
        let ut = model.ops.h1.apply(&moving.u).unwrap();
        let resid = f.axpy(-h0_ref, &ut).max_abs();
        assert!(resid < 1e-13, "residual {resid}");
    }

    #[test]
    fn massflux_branches_coincide_for_diagonal_hodge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in [
            quad_model(4, 0.7, SchemePreset::Trsk2010Te),
            SweModel::new(
                build_periodic_trihex(4, 1.0).unwrap(),
                SchemePreset::Trsk2010Te.config(),
            )
            .unwrap(),
        ] {
            let state = random_state(&model, &mut rng);
            let h0 = model.ops.h2_bar.apply(&state.h).unwrap();
            let ut = model.ops.h1.apply(&state.u).unwrap();
            let a = model.t.massflux_twisted(&model.mesh, &h0, &ut).unwrap();
            let b = model
                .ops
                .h1
                .apply(&model.t.massflux_straight(&model.mesh, &h0, &state.u).unwrap())
                .unwrap();
            assert!(a.axpy(-1.0, &b).max_abs() < 1e-13);
        }
    }

    #[test]
    fn pv_oracles() {
        let model = quad_model(3, 1.0, SchemePreset::Trsk2010Te);
        let f0 = 0.8;
        let h_pt = 2.0;
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 10.0, f0).unwrap();
        let rest = ModelState::rest(&model.mesh, h_pt);
        let q = model.diagnose_pv(&rest, &params).unwrap();
        for v in &q.values {
            assert!((v - f0 / h_pt).abs() < 1e-14);
        }
        // Doubling h halves q at fixed vorticity.
        let mut deep = rest.clone();
        deep.h = deep.h.scaled(2.0);
        let q2 = model.diagnose_pv(&deep, &params).unwrap();
        for (a, b) in q.values.iter().zip(&q2.values) {
            assert!((a - 2.0 * b).abs() < 1e-14);
        }
        // Irrotational velocity with f = 0 has q = 0 (annihilation).
        let params0 = PhysicsParams::uniform(&model.mesh, &model.ops, 10.0, 0.0).unwrap();
        let phi = Cochain::new(
            &model.mesh,
            CochainType::scalar(0, Grid::Straight),
            (0..model.mesh.topology.n_vertices).map(|v| (v as f64).sin()).collect(),
        )
        .unwrap();
        let mut irrot = rest.clone();
        irrot.u = model.ops.d1.apply(&phi).unwrap();
        let q0 = model.diagnose_pv(&irrot, &params0).unwrap();
        assert!(q0.max_abs() < 1e-13);
    }

    #[test]
    fn pv_singularity_reports_offending_cells() {
        let model = quad_model(3, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 10.0, 1.0).unwrap();
        let mut state = ModelState::rest(&model.mesh, 1.0);
        for v in state.h.values.iter_mut() {
            *v = -1.0;
        }
        match model.diagnose_pv(&state, &params) {
            Err(SweError::PvSingularity { cells }) => {
                assert_eq!(cells.len(), model.mesh.topology.n_cells);
            }
            other => panic!("expected pv-singularity, got {other:?}"),
        }
    }

    #[test]
    fn rest_state_tendencies_vanish() {
        let model = quad_model(4, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 1.0).unwrap();
        let rest = ModelState::rest(&model.mesh, 3.0);
        let t = model.tendencies(&rest, &params).unwrap();
        assert!(t.dh.max_abs() < 1e-13);
        assert!(t.du.max_abs() < 1e-13);
    }

    #[test]
    fn mass_and_circulation_rates_vanish_for_all_schemes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for preset in SchemePreset::ALL {
            let model = quad_model(5, 1.0, preset);
            let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
            for _ in 0..10 {
                let state = random_state(&model, &mut rng);
                let t = model.tendencies(&state, &params).unwrap();
                let rates = model.invariant_rates(&state, &params, &t).unwrap();
                assert!(rates.d_mass.abs() < 1e-12, "{preset:?} dM = {}", rates.d_mass);
                assert!(
                    rates.d_circulation.abs() < 1e-12,
                    "{preset:?} dC = {}",
                    rates.d_circulation
                );
            }
        }
    }

    #[test]
    fn energy_rate_vanishes_for_te_and_dbl() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for preset in [SchemePreset::Trsk2010Te, SchemePreset::EldredDbl, SchemePreset::Al81] {
            let model = quad_model(5, 1.0, preset);
            let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
            for _ in 0..10 {
                let state = random_state(&model, &mut rng);
                let t = model.tendencies(&state, &params).unwrap();
                let rates = model.invariant_rates(&state, &params, &t).unwrap();
                let h = model.hamiltonian(&state, &params).unwrap();
                assert!(
                    rates.d_energy.abs() <= 1e-12 * h.abs(),
                    "{preset:?} dH = {} vs H = {h}",
                    rates.d_energy
                );
            }
        }
        // TE also on a twisted trihex mesh.
        let mesh = build_periodic_trihex(4, 1.0).unwrap();
        let model = SweModel::new(mesh, SchemePreset::Trsk2010Te.config()).unwrap();
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
        let state = random_state(&model, &mut rng);
        let t = model.tendencies(&state, &params).unwrap();
        let rates = model.invariant_rates(&state, &params, &t).unwrap();
        let h = model.hamiltonian(&state, &params).unwrap();
        assert!(rates.d_energy.abs() <= 1e-12 * h.abs());
    }

    #[test]
    fn enstrophy_rate_vanishes_for_pe_and_dbl() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for preset in [SchemePreset::Trsk2010Pe, SchemePreset::EldredDbl, SchemePreset::Al81] {
            let model = quad_model(5, 1.0, preset);
            let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
            for _ in 0..10 {
                let state = random_state(&model, &mut rng);
                let t = model.tendencies(&state, &params).unwrap();
                let rates = model.invariant_rates(&state, &params, &t).unwrap();
                let pe = model.diagnostics(&state, &params).unwrap().potential_enstrophy;
                assert!(
                    rates.d_potential_enstrophy.abs() <= 1e-12 * pe.abs(),
                    "{preset:?} dPE = {} vs PE = {pe}",
                    rates.d_potential_enstrophy
                );
            }
        }
        // PE also on a twisted trihex mesh.
        let mesh = build_periodic_trihex(4, 1.0).unwrap();
        let model = SweModel::new(mesh, SchemePreset::Trsk2010Pe.config()).unwrap();
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
        let state = random_state(&model, &mut rng);
        let t = model.tendencies(&state, &params).unwrap();
        let rates = model.invariant_rates(&state, &params, &t).unwrap();
        let pe = model.diagnostics(&state, &params).unwrap().potential_enstrophy;
        assert!(rates.d_potential_enstrophy.abs() <= 1e-12 * pe.abs());
    }

    #[test]
    fn rates_match_finite_differences_when_nonzero() {
        // Validates the signs of dH/dt and dPE/dt against actual secant
        // slopes of H and PE along the tendency direction, using schemes
        // that do NOT conserve the respective quantity (so the rate is
        // well away from zero and a sign error cannot hide).
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let eps = 1e-6;

        // dH on the ACCUR scheme.
        let model = quad_model(5, 1.0, SchemePreset::Accur);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
        let state = random_state(&model, &mut rng);
        let t = model.tendencies(&state, &params).unwrap();
        let rates = model.invariant_rates(&state, &params, &t).unwrap();
        let shift = |s: f64| ModelState {
            u: state.u.axpy(s, &t.du),
            h: state.h.axpy(s, &t.dh),
            time: 0.0,
        };
        let hp = model.hamiltonian(&shift(eps), &params).unwrap();
        let hm = model.hamiltonian(&shift(-eps), &params).unwrap();
        let fd = (hp - hm) / (2.0 * eps);
        assert!(rates.d_energy.abs() > 1e-8, "ACCUR should not conserve H here");
        assert!(
            (rates.d_energy - fd).abs() <= 1e-5 * rates.d_energy.abs(),
            "dH = {} vs FD = {fd}",
            rates.d_energy
        );

        // dPE on the TE scheme.
        let model = quad_model(5, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
        let state = random_state(&model, &mut rng);
        let t = model.tendencies(&state, &params).unwrap();
        let rates = model.invariant_rates(&state, &params, &t).unwrap();
        let shift = |s: f64| ModelState {
            u: state.u.axpy(s, &t.du),
            h: state.h.axpy(s, &t.dh),
            time: 0.0,
        };
        let pe_of = |s: &ModelState| model.diagnostics(s, &params).unwrap().potential_enstrophy;
        let fd = (pe_of(&shift(eps)) - pe_of(&shift(-eps))) / (2.0 * eps);
        assert!(rates.d_potential_enstrophy.abs() > 1e-8, "TE should not conserve PE here");
        assert!(
            (rates.d_potential_enstrophy - fd).abs() <= 1e-5 * rates.d_potential_enstrophy.abs(),
            "dPE = {} vs FD = {fd}",
            rates.d_potential_enstrophy
        );
    }

    #[test]
    fn no_spurious_vorticity_production() {
        // d(eta)/dt + D2 Q(q, F) = 0: the Bernoulli gradient contributes
        // nothing to the vorticity budget because D2 D1 = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let model = quad_model(5, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.5).unwrap();
        let state = random_state(&model, &mut rng);
        let t = model.tendencies(&state, &params).unwrap();
        let (f_tilde, _) = model.functional_derivatives(&state, &params).unwrap();
        let q = model.diagnose_pv(&state, &params).unwrap();
        let deta = model.ops.d2.apply(&t.du).unwrap();
        let d2q = model.ops.d2.apply(&model.q_op.apply(&q, &f_tilde).unwrap()).unwrap();
        let resid = deta.axpy(1.0, &d2q).max_abs();
        assert!(resid < 1e-13, "residual {resid}");
    }

    #[test]
    fn uniform_pv_stays_uniform() {
        // With f2 constructed so q = q0 exactly, the momentum-route
        // vorticity tendency equals q0 times the mass-route tendency.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let q0 = 0.7;
        for preset in [SchemePreset::Trsk2010Te, SchemePreset::Accur] {
            let model = quad_model(5, 1.0, preset);
            let mut state = random_state(&model, &mut rng);
            state.u = state.u.scaled(0.1);
            let rh = model.r.apply(&state.h.values);
            let d2u = model.ops.d2.apply(&state.u).unwrap();
            let f2 = Cochain::new(
                &model.mesh,
                CochainType::scalar(2, Grid::Straight),
                rh.iter().zip(&d2u.values).map(|(r, z)| q0 * r - z).collect(),
            )
            .unwrap();
            let hs2 = Cochain::zeros(&model.mesh, CochainType::scalar(2, Grid::Twisted));
            let params = PhysicsParams::new(&model.ops, 9.81, f2, hs2).unwrap();
            let q = model.diagnose_pv(&state, &params).unwrap();
            for v in &q.values {
                assert!((v - q0).abs() < 1e-13);
            }
            let t = model.tendencies(&state, &params).unwrap();
            let deta = model.ops.d2.apply(&t.du).unwrap();
            let r_dh = model.r.apply(&t.dh.values);
            for (a, b) in deta.values.iter().zip(&r_dh) {
                assert!((a - q0 * b).abs() < 1e-13, "{a} vs {}", q0 * b);
            }
        }
    }

    #[test]
    fn geostrophic_mode_is_steady_for_linearized_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = 9.81;
        let f0 = 1.3;
        let h_ref = 2.0;
        for model in [
            quad_model(5, 1.0, SchemePreset::Trsk2010Te),
            SweModel::new(
                build_periodic_trihex(4, 1.0).unwrap(),
                SchemePreset::Trsk2010Pe.config(),
            )
            .unwrap(),
        ] {
            let params = PhysicsParams::uniform(&model.mesh, &model.ops, g, f0).unwrap();
            let psi = Cochain::new(
                &model.mesh,
                CochainType::scalar(0, Grid::Twisted),
                (0..model.mesh.topology.n_cells).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let state = geostrophic_state(&model, &psi, f0, g).unwrap();
            let t = model.linearized_tendencies(&state, &params, h_ref).unwrap();
            assert!(t.du.max_abs() < 1e-12, "du residual {}", t.du.max_abs());
            assert!(t.dh.max_abs() < 1e-12, "dh residual {}", t.dh.max_abs());
        }
    }

    #[test]
    fn linearized_rejects_bad_depth_and_conserves_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = quad_model(4, 1.0, SchemePreset::Trsk2010Te);
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 1.0).unwrap();
        let state = random_state(&model, &mut rng);
        assert!(matches!(
            model.linearized_tendencies(&state, &params, 0.0),
            Err(SweError::NonPositiveDepth(_))
        ));
        let t = model.linearized_tendencies(&state, &params, 2.0).unwrap();
        assert!(t.dh.values.iter().sum::<f64>().abs() < 1e-12);
        // f = 0, uniform h, u = 0 is steady.
        let params0 = PhysicsParams::uniform(&model.mesh, &model.ops, 9.81, 0.0).unwrap();
        let rest = ModelState::rest(&model.mesh, 2.0);
        let t0 = model.linearized_tendencies(&rest, &params0, 2.0).unwrap();
        assert!(t0.du.max_abs() == 0.0 && t0.dh.max_abs() == 0.0);
    }

    #[test]
    fn diagnostics_oracles() {
        let model = quad_model(2, 1.0, SchemePreset::Trsk2010Te);
        let f0 = 0.9;
        let params = PhysicsParams::uniform(&model.mesh, &model.ops, 10.0, f0).unwrap();
        let rest = ModelState::rest(&model.mesh, 2.0);
        let d = model.diagnostics(&rest, &params).unwrap();
        assert!((d.mass - 8.0).abs() < 1e-13);
        assert!((d.circulation - f0 * model.mesh.domain_area()).abs() < 1e-13);
        assert!((d.min_h - 2.0).abs() < 1e-13 && (d.max_h - 2.0).abs() < 1e-13);
        assert_eq!(d.max_u, 0.0);
        // Uniform q = q0: PE = 1/2 q0^2 sum (R h).
        let q0 = f0 / 2.0;
        let rh_sum: f64 = model.r.apply(&rest.h.values).iter().sum();
        assert!((d.potential_enstrophy - 0.5 * q0 * q0 * rh_sum).abs() < 1e-13);
        // Circulation is independent of u (the D2 part telescopes).
        let moving = uniform_velocity_state(&model, 2.0);
        let d2 = model.diagnostics(&moving, &params).unwrap();
        assert!((d2.circulation - d.circulation).abs() < 1e-12);
        assert!((d2.max_u - 1.0).abs() < 1e-13);
    }

    #[test]
    fn scheme_presets_roundtrip_and_al81_is_combinatorial_dbl() {
        for p in SchemePreset::ALL {
            assert_eq!(SchemePreset::parse(p.name()), Some(p));
        }
        assert_eq!(SchemePreset::parse("nope"), None);
        let c = SchemePreset::Al81.config();
        assert_eq!(c.r_kind, WedgeKind::Combinatorial);
        assert_eq!(c.q_variant, QVariant::Dbl);
        assert_eq!(c.t_kind, WedgeKind::Combinatorial);
        // DBL presets are rejected on meshes that cannot support them.
        let mesh = build_periodic_trihex(2, 1.0).unwrap();
        assert!(matches!(
            SweModel::new(mesh, SchemePreset::EldredDbl.config()),
            Err(SweError::Wedge(WedgeError::UnsupportedVariant(_)))
        ));
    }
}
