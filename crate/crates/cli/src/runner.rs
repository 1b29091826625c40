//! Orchestrate a simulation from a [`RunConfig`]: build the mesh, model,
//! physics, and initial state, advance in time, and collect/write output.

use std::path::Path;

use swede_core::cochain::{reduce_scalar, Cochain, CochainType, Grid};
use swede_core::mesh::{build_periodic_quad, build_periodic_trihex, MeshPair};
use swede_core::swe_core::{ModelState, PhysicsParams, SweModel, Tendencies};
use swede_core::timestep::{run, IntegratorConfig};

use crate::config::{
    scheme_config, CoriolisSpec, RunConfig, TopographySpec, WaveSpec,
};
use crate::fields::{TrigScalar, Wave};
use crate::ic::initial_condition;
use crate::meshfile::load_mesh;
use crate::output::{
    write_diagnostics, write_snapshot, write_vtk, DiagnosticsRow,
};

pub struct PreparedRun {
    pub model: SweModel,
    pub params: PhysicsParams,
    pub state: ModelState,
    pub integrator: IntegratorConfig,
    pub linearized: bool,
    pub h_ref: f64,
}

pub struct RunOutput {
    pub rows: Vec<DiagnosticsRow>,
    pub final_state: ModelState,
}

pub fn build_mesh(cfg: &RunConfig) -> Result<MeshPair, String> {
    let spec = &cfg.mesh;
    if let Some(path) = &spec.file {
        return load_mesh(Path::new(path)).map_err(|e| e.to_string());
    }
    let n = spec.n.ok_or("mesh: generator needs n")?;
    let spacing = spec.spacing.unwrap_or(1.0);
    match spec.generator.as_deref() {
        Some("quad") => build_periodic_quad(n, spacing).map_err(|e| e.to_string()),
        Some("trihex") => build_periodic_trihex(n, spacing).map_err(|e| e.to_string()),
        other => Err(format!("mesh: unknown generator {other:?}")),
    }
}

fn analytic_cochain(
    mesh: &MeshPair,
    mean: f64,
    waves: &[WaveSpec],
    grid: Grid,
) -> Result<Cochain, String> {
    let f = TrigScalar::new(
        mesh.geometry.lattice,
        waves
            .iter()
            .map(|w| Wave { kx: w.kx, ky: w.ky, amp: w.amp, phase: w.phase })
            .collect(),
    );
    reduce_scalar(mesh, |x, y| mean + f.value(x, y), 2, grid).map_err(|e| e.to_string())
}

pub fn prepare(cfg: &RunConfig) -> Result<PreparedRun, String> {
    let mesh = build_mesh(cfg)?;
    let scheme = scheme_config(&cfg.scheme).map_err(|e| e.to_string())?;
    let model = SweModel::new(mesh, scheme).map_err(|e| e.to_string())?;

    let g = cfg.physics.g;
    let f0 = match cfg.physics.coriolis {
        CoriolisSpec::Constant { f0 } => f0,
        CoriolisSpec::Analytic { .. } => 0.0,
    };
    let f2 = match &cfg.physics.coriolis {
        CoriolisSpec::Constant { f0 } => Cochain::new(
            &model.mesh,
            CochainType::scalar(2, Grid::Straight),
            model.mesh.geometry.cell_area.iter().map(|a| f0 * a).collect(),
        )
        .map_err(|e| e.to_string())?,
        CoriolisSpec::Analytic { mean, waves } => {
            analytic_cochain(&model.mesh, *mean, waves, Grid::Straight)?
        }
    };
    let hs2 = match &cfg.physics.topography {
        TopographySpec::None => {
            Cochain::zeros(&model.mesh, CochainType::scalar(2, Grid::Twisted))
        }
        TopographySpec::Analytic { mean, waves } => {
            analytic_cochain(&model.mesh, *mean, waves, Grid::Twisted)?
        }
    };

    let ic = initial_condition(&model, &cfg.initial, g, f0)?;
    let f2 = ic.constructed_f2.unwrap_or(f2);
    let params = PhysicsParams::new(&model.ops, g, f2, hs2).map_err(|e| e.to_string())?;

    let integrator = match cfg.integrator.kind.as_str() {
        "rk4" => IntegratorConfig::rk4(cfg.integrator.dt),
        "implicit-midpoint" => IntegratorConfig::implicit_midpoint(
            cfg.integrator.dt,
            cfg.integrator.tolerance,
            cfg.integrator.max_iterations,
        ),
        other => return Err(format!("integrator: unknown kind `{other}`")),
    };

    Ok(PreparedRun {
        model,
        params,
        state: ic.state,
        integrator,
        linearized: cfg.physics.linearized,
        h_ref: cfg.physics.h_ref.unwrap_or(cfg.initial.h0),
    })
}

fn tendencies_for(prep: &PreparedRun, state: &ModelState) -> Result<Tendencies, swede_core::swe_core::SweError> {
    if prep.linearized {
        prep.model.linearized_tendencies(state, &prep.params, prep.h_ref)
    } else {
        prep.model.tendencies(state, &prep.params)
    }
}

fn diagnostics_row(prep: &PreparedRun, step: usize, state: &ModelState) -> Result<DiagnosticsRow, String> {
    let model = &prep.model;
    let diag = model.diagnostics(state, &prep.params).map_err(|e| e.to_string())?;
    let tend = tendencies_for(prep, state).map_err(|e| e.to_string())?;
    let rates = model.invariant_rates(state, &prep.params, &tend).map_err(|e| e.to_string())?;
    Ok(DiagnosticsRow {
        step,
        time: state.time,
        mass: diag.mass,
        circulation: diag.circulation,
        energy: diag.energy,
        potential_enstrophy: diag.potential_enstrophy,
        dh_dt: rates.d_energy,
        dpe_dt: rates.d_potential_enstrophy,
        min_h: diag.min_h,
        max_u: diag.max_u,
    })
}

/// Advance the prepared run, collecting diagnostics at the configured
/// cadence and optionally writing snapshot/VTK files.
pub fn execute(prep: &PreparedRun, cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunOutput, String> {
    let n_steps = cfg.run.n_steps;
    let cadence = cfg.run.cadence;
    let snapshot_cadence = cfg.run.snapshot_cadence;
    let mut rows = Vec::new();
    let mut deferred: Option<String> = None;
    let final_state = run(
        prep.state.clone(),
        &prep.integrator,
        n_steps,
        |s| tendencies_for(prep, s),
        |step, s| {
            if deferred.is_some() {
                return;
            }
            if step % cadence == 0 {
                match diagnostics_row(prep, step, s) {
                    Ok(row) => rows.push(row),
                    Err(e) => deferred = Some(e),
                }
            }
            if let Some(dir) = out_dir {
                let want = snapshot_cadence != 0 && step % snapshot_cadence == 0;
                if want {
                    let path = dir.join(format!("snapshot_{step:06}.txt"));
                    if let Err(e) = write_snapshot(&prep.model.mesh, s, &path) {
                        deferred = Some(e);
                    }
                    if cfg.run.vtk {
                        let path = dir.join(format!("snapshot_{step:06}.vtk"));
                        if let Err(e) = write_vtk(&prep.model.mesh, s, &path) {
                            deferred = Some(e);
                        }
                    }
                }
            }
        },
    )
    .map_err(|e| e.to_string())?;
    if let Some(e) = deferred {
        return Err(e);
    }
    if let Some(dir) = out_dir {
        write_diagnostics(&rows, &dir.join("diagnostics.csv"))?;
        write_snapshot(&prep.model.mesh, &final_state, &dir.join("final.txt"))?;
        if cfg.run.vtk {
            write_vtk(&prep.model.mesh, &final_state, &dir.join("final.vtk"))?;
        }
    }
    Ok(RunOutput { rows, final_state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn base_config(extra: &str) -> RunConfig {
        let text = format!(
            r#"
            [mesh]
            generator = "quad"
            n = 6
            spacing = 1.0

            [scheme]
            preset = "trsk2010-te"

            [physics]
            g = 10.0
            coriolis = {{ kind = "constant", f0 = 1.0 }}
            {extra}

            [initial]
            preset = "vortex-pair"
            h0 = 1.0
            amplitude = 0.05

            [integrator]
            kind = "rk4"
            dt = 0.02

            [run]
            n_steps = 6
            cadence = 2
            "#
        );
        parse_config(&text).unwrap()
    }

    #[test]
    fn run_produces_expected_csv_shape_and_conserves_mass() {
        let cfg = base_config("");
        let prep = prepare(&cfg).unwrap();
        let out = execute(&prep, &cfg, None).unwrap();
        assert_eq!(out.rows.len(), 1 + 6 / 2);
        let m0 = out.rows[0].mass;
        for r in &out.rows {
            assert!((r.mass - m0).abs() <= 1e-13 * m0.abs());
        }
    }

    #[test]
    fn identical_configs_give_identical_output() {
        let cfg = base_config("");
        let a = execute(&prepare(&cfg).unwrap(), &cfg, None).unwrap();
        let b = execute(&prepare(&cfg).unwrap(), &cfg, None).unwrap();
        assert_eq!(a.final_state.u.values, b.final_state.u.values);
        assert_eq!(a.final_state.h.values, b.final_state.h.values);
    }

    #[test]
    fn geostrophic_preset_run_is_steady() {
        let text = r#"
            [mesh]
            generator = "quad"
            n = 8

            [physics]
            g = 10.0
            linearized = true
            h_ref = 1.0
            coriolis = { kind = "constant", f0 = 1.0 }

            [initial]
            preset = "geostrophic-balance"
            h0 = 1.0
            amplitude = 0.1
            seed = 3

            [integrator]
            kind = "rk4"
            dt = 0.05

            [run]
            n_steps = 10
        "#;
        let cfg = parse_config(text).unwrap();
        let prep = prepare(&cfg).unwrap();
        let tend = tendencies_for(&prep, &prep.state).unwrap();
        let scale = prep.state.u.max_abs().max(prep.state.h.max_abs());
        assert!(tend.du.max_abs() <= 1e-12 * scale);
        assert!(tend.dh.max_abs() <= 1e-12 * scale);
        let out = execute(&prep, &cfg, None).unwrap();
        let drift = out.final_state.u.axpy(-1.0, &prep.state.u).max_abs();
        assert!(drift <= 1e-10 * scale);
    }
}
