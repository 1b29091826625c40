//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Tolerances are pinned in the constants below.

use std::time::Instant;

use swede_cli::checks::{
    dec_checks, geostrophic_checks, leibniz_checks, massflux_checks, standard_meshes,
    swe_rate_checks, uniform_pv_time_check, wedge_checks, CheckItem,
};
use swede_cli::converge::operator_study;
use swede_core::mesh::{build_periodic_quad, build_periodic_trihex};
use swede_core::swe_core::{PhysicsParams, SchemePreset, SweModel};
use swede_core::timestep::{run, IntegratorConfig};

const SEED: u64 = 42;

fn report(criterion: u32, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion}: {verdict} — {detail}");
    assert!(passed, "acceptance criterion {criterion} failed: {detail}");
}

fn all_pass(items: &[CheckItem]) -> (bool, String) {
    let failures: Vec<String> = items
        .iter()
        .filter(|i| !i.passed())
        .map(|i| format!("{} (residual {:.3e})", i.name, i.value))
        .collect();
    if failures.is_empty() {
        let worst = items
            .iter()
            .filter(|i| i.tol.is_finite())
            .map(|i| i.value)
            .fold(0.0f64, f64::max);
        (true, format!("{} items, worst residual {worst:.3e}", items.len()))
    } else {
        (false, failures.join("; "))
    }
}

#[test]
fn criterion_1_operator_identities() {
    let start = Instant::now();
    let mut items = Vec::new();
    for (name, mesh) in standard_meshes() {
        for mut item in dec_checks(&mesh) {
            item.name = format!("{name}: {}", item.name);
            items.push(item);
        }
    }
    let elapsed = start.elapsed();
    let (ok, detail) = all_pass(&items);
    let in_time = elapsed.as_secs_f64() < 1.0;
    report(
        1,
        ok && in_time,
        &format!("{detail}; runtime {:.2}s (< 1s)", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_2_wedge_identities() {
    let start = Instant::now();
    let mut items = Vec::new();
    for (name, mesh) in standard_meshes() {
        for mut item in wedge_checks(&mesh, SEED, 100) {
            item.name = format!("{name}: {}", item.name);
            items.push(item);
        }
    }
    let elapsed = start.elapsed();
    let (ok, detail) = all_pass(&items);
    let in_time = elapsed.as_secs_f64() < 5.0;
    report(
        2,
        ok && in_time,
        &format!("{detail}; runtime {:.2}s (< 5s)", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_3_casimir_rates() {
    let start = Instant::now();
    let mut items = Vec::new();
    for (name, mesh) in standard_meshes() {
        for mut item in swe_rate_checks(&mesh, SEED, 100) {
            item.name = format!("{name}: {}", item.name);
            items.push(item);
        }
    }
    let elapsed = start.elapsed();
    let (ok, detail) = all_pass(&items);
    let in_time = elapsed.as_secs_f64() < 10.0;
    report(
        3,
        ok && in_time,
        &format!("{detail}; runtime {:.2}s (< 10s)", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_4_pv_compatibility_in_time() {
    let start = Instant::now();
    let mesh = build_periodic_quad(8, 1.0).unwrap();
    let item = uniform_pv_time_check(&mesh, SEED, 100);
    let elapsed = start.elapsed();
    let ok = item.passed() && elapsed.as_secs_f64() < 5.0;
    report(
        4,
        ok,
        &format!(
            "max|q - q0| = {:.3e} (tol 1e-11) over 100 rk4 steps; runtime {:.2}s (< 5s)",
            item.value,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_steady_geostrophic_mode() {
    let start = Instant::now();
    let mut items = Vec::new();
    for (name, mesh) in [
        ("quad(8)", build_periodic_quad(8, 1.0).unwrap()),
        ("trihex(4)", build_periodic_trihex(4, 1.0).unwrap()),
    ] {
        for mut item in geostrophic_checks(&mesh, SEED) {
            item.name = format!("{name}: {}", item.name);
            items.push(item);
        }
    }
    let elapsed = start.elapsed();
    let (ok, detail) = all_pass(&items);
    let in_time = elapsed.as_secs_f64() < 5.0;
    report(
        5,
        ok && in_time,
        &format!("{detail}; runtime {:.2}s (< 5s)", elapsed.as_secs_f64()),
    );
}

/// Relative energy drift of a vortex-pair run over a fixed horizon.
fn energy_drift(cfg: &IntegratorConfig, n_steps: usize) -> f64 {
    let mesh = build_periodic_quad(8, 1.0).unwrap();
    let model = SweModel::new(mesh, SchemePreset::Trsk2010Te.config()).unwrap();
    let params = PhysicsParams::uniform(&model.mesh, &model.ops, 0.1, 1.0).unwrap();
    let init = swede_cli::ic::initial_condition(
        &model,
        &swede_cli::config::InitialSpec {
            preset: "vortex-pair".into(),
            h0: 1.0,
            amplitude: 1.0,
            width: None,
            q0: None,
            seed: SEED,
        },
        0.1,
        1.0,
    )
    .unwrap()
    .state;
    let h0 = model.hamiltonian(&init, &params).unwrap();
    let end = run(init, cfg, n_steps, |s| model.tendencies(s, &params), |_, _| {}).unwrap();
    let h1 = model.hamiltonian(&end, &params).unwrap();
    ((h1 - h0) / h0).abs()
}

#[test]
fn criterion_6_energy_behavior_in_time() {
    let start = Instant::now();
    // Weak gravity keeps the dynamics advection-dominated: for fast
    // gravity waves the leading rk4 truncation error is a phase shift,
    // which is energy-neutral and would push the observed drift order
    // toward 5 instead of the generic 4.
    let dt0 = 0.3;
    let horizon_steps = 6;
    let drifts: Vec<f64> = (0..3)
        .map(|k| {
            let dt = dt0 / (1 << k) as f64;
            energy_drift(&IntegratorConfig::rk4(dt), horizon_steps * (1 << k))
        })
        .collect();
    let orders: Vec<f64> =
        drifts.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let orders_ok = orders.iter().all(|o| (o - 4.0).abs() <= 0.5);

    let mid_drift = energy_drift(
        &IntegratorConfig::implicit_midpoint(dt0 / 8192.0, 1e-13, 400),
        horizon_steps * 8192,
    );
    let mid_ok = mid_drift < 1e-10;
    let elapsed = start.elapsed();
    report(
        6,
        orders_ok && mid_ok && elapsed.as_secs_f64() < 60.0,
        &format!(
            "rk4 drifts [{}] observed orders {orders:.2?} (4.0 ± 0.5); implicit-midpoint drift {mid_drift:.3e} (< 1e-10); runtime {:.2}s (< 60s)",
            drifts.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", "),
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_operator_convergence() {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for op in ["divergence", "curl", "gradient"] {
        let rep = operator_study(op, "quad", &[8, 16, 32]).unwrap();
        let good = rep.orders_l2.iter().all(|o| (o - 2.0).abs() <= 0.2);
        ok &= good;
        details.push(format!("{op} quad orders {:.2?}", rep.orders_l2));

        let rep = operator_study(op, "trihex", &[4, 8, 16]).unwrap();
        let good = rep.orders_l2.iter().all(|o| *o >= 1.0);
        ok &= good;
        details.push(format!("{op} trihex orders {:.2?}", rep.orders_l2));
    }
    let rep = operator_study("reduction", "quad", &[4, 8, 16]).unwrap();
    let reduction_ok = rep.orders_l2.iter().all(|o| *o >= 4.0);
    ok &= reduction_ok;
    details.push(format!("reduction quad orders {:.2?} (>= 4)", rep.orders_l2));
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 30.0;
    report(7, ok, &format!("{}; runtime {:.2}s (< 30s)", details.join("; "), elapsed.as_secs_f64()));
}

#[test]
fn criterion_8_massflux_branches_coincide() {
    let start = Instant::now();
    let mut items = Vec::new();
    for (name, mesh) in standard_meshes() {
        for mut item in massflux_checks(&mesh, SEED, 20) {
            item.name = format!("{name}: {}", item.name);
            items.push(item);
        }
    }
    let elapsed = start.elapsed();
    let (ok, detail) = all_pass(&items);
    let in_time = elapsed.as_secs_f64() < 1.0;
    report(
        8,
        ok && in_time,
        &format!("{detail}; runtime {:.2}s (< 1s)", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_9_leibniz_chain() {
    let mut items = Vec::new();
    // DBL full Leibniz + partial rules on a uniform quad.
    for mut item in leibniz_checks(&build_periodic_quad(8, 1.0).unwrap(), SEED, 100) {
        item.name = format!("quad(8): {}", item.name);
        items.push(item);
    }
    // Where the full rule fails (trihex), the partial rules must still hold;
    // the full-rule residual is a reported diagnostic.
    let trihex = build_periodic_trihex(4, 1.0).unwrap();
    let tri_items = leibniz_checks(&trihex, SEED, 100);
    let diag = tri_items
        .iter()
        .find(|i| i.tol.is_infinite())
        .expect("trihex reports a full-Leibniz diagnostic");
    let full_rule_fails_there = diag.value > 1e-6;
    for mut item in tri_items.clone() {
        item.name = format!("trihex(4): {}", item.name);
        items.push(item);
    }
    let (ok, detail) = all_pass(&items);
    report(
        9,
        ok && full_rule_fails_there,
        &format!(
            "{detail}; trihex full-Leibniz diagnostic residual {:.3e} (expected nonzero)",
            diag.value
        ),
    );
}
