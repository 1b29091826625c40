//! Initial-condition presets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swede_core::cochain::{reduce_scalar, reduce_vector, Cochain, CochainType, Flavor, Grid};
use swede_core::geom;
use swede_core::swe_core::{geostrophic_state, ModelState, SweModel};

use crate::config::InitialSpec;
use crate::fields::{TrigScalar, Wave};

/// A constructed initial state; `constructed_f2` is set only by the
/// `uniform-pv` preset, which back-solves the Coriolis 2-form so the initial
/// PV is exactly uniform.
pub struct InitialCondition {
    pub state: ModelState,
    pub constructed_f2: Option<Cochain>,
}

/// Build the initial state for `spec.preset`.
///
/// `f0` is the constant Coriolis parameter (used by geostrophic-balance).
pub fn initial_condition(
    model: &SweModel,
    spec: &InitialSpec,
    g: f64,
    f0: f64,
) -> Result<InitialCondition, String> {
    let mesh = &model.mesh;
    match spec.preset.as_str() {
        "rest" => Ok(InitialCondition {
            state: ModelState::rest(mesh, spec.h0),
            constructed_f2: None,
        }),
        "gaussian-hill" => {
            let width = spec.width.ok_or("gaussian-hill needs `width`")?;
            if !(width > 0.0) {
                return Err(String::from("gaussian-hill width must be positive"));
            }
            let lat = mesh.geometry.lattice;
            let center = lat.from_fractional([0.5, 0.5]);
            let amp = spec.amplitude;
            let h = reduce_scalar(
                mesh,
                |x, y| {
                    let d = lat.min_image(center, [x, y]);
                    spec.h0 + amp * (-geom::dot(d, d) / (width * width)).exp()
                },
                2,
                Grid::Twisted,
            )
            .map_err(|e| e.to_string())?;
            let u = Cochain::zeros(mesh, CochainType::edge(Grid::Straight, Flavor::Circulation));
            Ok(InitialCondition {
                state: ModelState::new(u, h, 0.0).map_err(|e| e.to_string())?,
                constructed_f2: None,
            })
        }
        "vortex-pair" => {
            // ψ = amp sin(2πξ1) sin(2πξ2): a periodic array of paired
            // counter-rotating vortices; u = reduction of ∇⊥ψ.
            let half = 0.5 * spec.amplitude;
            let pi2 = core::f64::consts::FRAC_PI_2;
            let psi = TrigScalar::new(
                mesh.geometry.lattice,
                vec![
                    Wave { kx: 1, ky: -1, amp: half, phase: pi2 },
                    Wave { kx: 1, ky: 1, amp: -half, phase: pi2 },
                ],
            );
            let u = reduce_vector(
                mesh,
                |x, y| geom::rot_ccw(psi.grad(x, y)),
                Flavor::Circulation,
                Grid::Straight,
            );
            let h = ModelState::rest(mesh, spec.h0).h;
            Ok(InitialCondition {
                state: ModelState::new(u, h, 0.0).map_err(|e| e.to_string())?,
                constructed_f2: None,
            })
        }
        "geostrophic-balance" => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let amp = if spec.amplitude != 0.0 { spec.amplitude } else { 0.1 };
            let psi = Cochain::new(
                mesh,
                CochainType::scalar(0, Grid::Twisted),
                (0..mesh.topology.n_cells).map(|_| rng.gen_range(-amp..amp)).collect(),
            )
            .map_err(|e| e.to_string())?;
            let mut state = geostrophic_state(model, &psi, f0, g).map_err(|e| e.to_string())?;
            // A uniform background depth shifts B⁰ by a constant, which D1
            // annihilates, so the state stays balanced and strictly positive.
            let background = ModelState::rest(mesh, spec.h0).h;
            state.h = state.h.axpy(1.0, &background);
            Ok(InitialCondition { state, constructed_f2: None })
        }
        "uniform-pv" => {
            let q0 = spec.q0.ok_or("uniform-pv needs `q0`")?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let amp = if spec.amplitude != 0.0 { spec.amplitude } else { 0.1 };
            let u = Cochain::new(
                mesh,
                CochainType::edge(Grid::Straight, Flavor::Circulation),
                (0..mesh.topology.n_edges).map(|_| rng.gen_range(-amp..amp)).collect(),
            )
            .map_err(|e| e.to_string())?;
            let h = Cochain::new(
                mesh,
                CochainType::scalar(2, Grid::Twisted),
                mesh.geometry
                    .tcell_area
                    .iter()
                    .map(|a| a * spec.h0 * rng.gen_range(0.9..1.1))
                    .collect(),
            )
            .map_err(|e| e.to_string())?;
            // f² = q0 (R h̃²) − D2 u¹ makes η/(Rh̃) ≡ q0 exactly.
            let rh = model.r.apply(&h.values);
            let zeta = model.ops.d2.apply(&u).map_err(|e| e.to_string())?;
            let f2 = Cochain {
                ctype: CochainType::scalar(2, Grid::Straight),
                values: rh.iter().zip(&zeta.values).map(|(r, z)| q0 * r - z).collect(),
            };
            Ok(InitialCondition {
                state: ModelState::new(u, h, 0.0).map_err(|e| e.to_string())?,
                constructed_f2: Some(f2),
            })
        }
        other => Err(format!("unknown initial-condition preset `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use swede_core::mesh::build_periodic_quad;
    use swede_core::swe_core::{PhysicsParams, SchemePreset};

    fn spec(preset: &str) -> InitialSpec {
        InitialSpec {
            preset: preset.to_string(),
            h0: 2.0,
            amplitude: 0.1,
            width: Some(1.0),
            q0: Some(1.5),
            seed: 11,
        }
    }

    fn model() -> SweModel {
        let mesh = build_periodic_quad(8, 1.0).unwrap();
        SweModel::new(mesh, SchemePreset::Trsk2010Te.config()).unwrap()
    }

    #[test]
    fn rest_is_flat() {
        let m = model();
        let ic = initial_condition(&m, &spec("rest"), 10.0, 1.0).unwrap();
        assert!(ic.state.u.max_abs() == 0.0);
        let h_pt: Vec<f64> = ic
            .state
            .h
            .values
            .iter()
            .zip(&m.mesh.geometry.tcell_area)
            .map(|(h, a)| h / a)
            .collect();
        assert!(h_pt.iter().all(|&h| (h - 2.0).abs() < 1e-14));
    }

    #[test]
    fn zero_amplitude_hill_is_rest() {
        let m = model();
        let mut s = spec("gaussian-hill");
        s.amplitude = 0.0;
        let ic = initial_condition(&m, &s, 10.0, 1.0).unwrap();
        let rest = ModelState::rest(&m.mesh, 2.0);
        assert!(ic.state.h.axpy(-1.0, &rest.h).max_abs() < 1e-13);
        assert!(ic.state.u.max_abs() == 0.0);
    }

    #[test]
    fn geostrophic_balance_has_tiny_linear_tendencies() {
        let m = model();
        let ops = &m.ops;
        let params = PhysicsParams::uniform(&m.mesh, ops, 10.0, 1.0).unwrap();
        let ic = initial_condition(&m, &spec("geostrophic-balance"), 10.0, 1.0).unwrap();
        let tend = m.linearized_tendencies(&ic.state, &params, 2.0).unwrap();
        let scale = ic.state.u.max_abs().max(ic.state.h.max_abs());
        assert!(tend.du.max_abs() <= 1e-12 * scale.max(1.0));
        assert!(tend.dh.max_abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn uniform_pv_is_exactly_uniform() {
        let m = model();
        let ic = initial_condition(&m, &spec("uniform-pv"), 10.0, 1.0).unwrap();
        let f2 = ic.constructed_f2.unwrap();
        let params = PhysicsParams::new(
            &m.ops,
            10.0,
            f2,
            Cochain::zeros(&m.mesh, CochainType::scalar(2, Grid::Twisted)),
        )
        .unwrap();
        let q = m.diagnose_pv(&ic.state, &params).unwrap();
        assert!(q.values.iter().all(|&v| (v - 1.5).abs() < 1e-13));
    }

    #[test]
    fn unknown_preset_errors() {
        let m = model();
        assert!(initial_condition(&m, &spec("spiral"), 10.0, 1.0).is_err());
    }
}
