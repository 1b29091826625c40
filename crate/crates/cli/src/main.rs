//! `swede` — mesh generation, simulation, verification, and convergence
//! studies for the structure-preserving shallow-water engine.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swede_cli::checks::{standard_meshes, verify_mesh, CheckItem};
use swede_cli::config::{self, load_config, parse_mesh_arg, MeshSpec, RunConfig};
use swede_cli::converge::{convergence_study, OPERATORS};
use swede_cli::meshfile::{load_mesh, save_mesh};
use swede_cli::runner;
use swede_core::mesh::{build_periodic_quad, build_periodic_trihex, validate_mesh, MeshPair};
use swede_core::swe_core::SchemePreset;
use swede_core::wedge::{QVariant, WedgeKind};

#[derive(Parser)]
#[command(name = "swede", version, about = "structure-preserving shallow-water engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, validate, and save meshes.
    Mesh(MeshCmd),
    /// Simulate from a run configuration.
    Run(RunCmd),
    /// Run the full operator/property verification suite.
    Verify(VerifyCmd),
    /// Operator convergence study.
    Converge(ConvergeCmd),
    /// List the scheme presets and their operator tuples.
    Schemes,
}

#[derive(Args)]
struct MeshCmd {
    /// Mesh spec: quad:N[:spacing], trihex:N[:spacing], or file:PATH.
    #[arg(long)]
    mesh: String,
    /// Write the mesh to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the invariant validation report.
    #[arg(long)]
    validate: bool,
}

#[derive(Args)]
struct RunCmd {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides run.out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override run.n_steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Override integrator.dt.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the scheme preset.
    #[arg(long)]
    scheme: Option<String>,
    /// Override the mesh spec (quad:N[:spacing] | trihex:N[:spacing] | file:PATH).
    #[arg(long)]
    mesh: Option<String>,
    /// Override initial.seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyCmd {
    /// Restrict to one mesh (quad:N[:spacing] | trihex:N[:spacing] | file:PATH);
    /// default: the standard trio.
    #[arg(long)]
    mesh: Option<String>,
    /// Seed for the random-state property checks.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct ConvergeCmd {
    /// Operator to study; default: all of them.
    #[arg(long)]
    operator: Option<String>,
    /// Mesh family: quad | trihex.
    #[arg(long, default_value = "quad")]
    family: String,
    /// Comma-separated resolutions.
    #[arg(long, default_value = "8,16,32")]
    resolutions: String,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn mesh_from_spec(spec: &MeshSpec) -> Result<MeshPair, String> {
    if let Some(path) = &spec.file {
        return load_mesh(Path::new(path)).map_err(|e| e.to_string());
    }
    let n = spec.n.ok_or("mesh spec needs a size")?;
    let spacing = spec.spacing.unwrap_or(1.0);
    match spec.generator.as_deref() {
        Some("quad") => build_periodic_quad(n, spacing).map_err(|e| e.to_string()),
        Some("trihex") => build_periodic_trihex(n, spacing).map_err(|e| e.to_string()),
        other => Err(format!("unknown generator {other:?}")),
    }
}

fn cmd_mesh(cmd: &MeshCmd) -> ExitCode {
    let spec = match parse_mesh_arg(&cmd.mesh) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let mesh = match mesh_from_spec(&spec) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    println!(
        "mesh: {} vertices, {} edges, {} cells, domain area {}",
        mesh.topology.n_vertices,
        mesh.topology.n_edges,
        mesh.topology.n_cells,
        mesh.domain_area()
    );
    if cmd.validate {
        let failures = validate_mesh(&mesh);
        if failures.is_empty() {
            println!("validation: ok (all invariants hold)");
        } else {
            for f in &failures {
                println!("validation FAIL: {f}");
            }
            return ExitCode::from(1);
        }
    }
    if let Some(out) = &cmd.out {
        if let Err(e) = save_mesh(&mesh, out) {
            return fail(e);
        }
        println!("saved to {}", out.display());
    }
    ExitCode::SUCCESS
}

fn apply_overrides(cfg: &mut RunConfig, cmd: &RunCmd) -> Result<(), String> {
    if let Some(steps) = cmd.steps {
        cfg.run.n_steps = steps;
    }
    if let Some(dt) = cmd.dt {
        cfg.integrator.dt = dt;
    }
    if let Some(scheme) = &cmd.scheme {
        cfg.scheme = config::SchemeSpec {
            preset: Some(scheme.clone()),
            ..Default::default()
        };
    }
    if let Some(mesh) = &cmd.mesh {
        cfg.mesh = parse_mesh_arg(mesh).map_err(|e| e.to_string())?;
    }
    if let Some(seed) = cmd.seed {
        cfg.initial.seed = seed;
    }
    if let Some(out) = &cmd.out {
        cfg.run.out_dir = Some(out.display().to_string());
    }
    config::validate(cfg).map_err(|e| e.to_string())
}

fn cmd_run(cmd: &RunCmd) -> ExitCode {
    let mut cfg = match load_config(&cmd.config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Err(e) = apply_overrides(&mut cfg, cmd) {
        return fail(e);
    }
    let prep = match runner::prepare(&cfg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let out_dir = cfg.run.out_dir.clone().map(PathBuf::from);
    if let Some(dir) = &out_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return fail(format!("{}: {e}", dir.display()));
        }
    }
    let initial = prep.state.clone();
    let out = match runner::execute(&prep, &cfg, out_dir.as_deref()) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    if let (Some(first), Some(last)) = (out.rows.first(), out.rows.last()) {
        println!(
            "run: {} steps, mass {} -> {}, energy {} -> {}",
            cfg.run.n_steps, first.mass, last.mass, first.energy, last.energy
        );
    }
    // For balanced presets, report how steady the run actually was.
    if cfg.initial.preset == "geostrophic-balance" {
        let tend = if let Ok(t) = prep
            .model
            .linearized_tendencies(&out.final_state, &prep.params, prep.h_ref)
        {
            t
        } else {
            return fail("tendency evaluation failed");
        };
        let scale = initial.u.max_abs().max(initial.h.max_abs()).max(1e-300);
        println!(
            "geostrophic tendency norms: du {:.3e}, dh {:.3e} (relative)",
            tend.du.max_abs() / scale,
            tend.dh.max_abs() / scale
        );
    }
    if let Some(dir) = &out_dir {
        println!("wrote {}", dir.join("diagnostics.csv").display());
    }
    ExitCode::SUCCESS
}

fn print_items(mesh_name: &str, items: &[CheckItem]) -> usize {
    let mut failures = 0;
    for item in items {
        if item.tol.is_infinite() {
            println!("  [diag] {:<46} residual {:.3e}", item.name, item.value);
        } else if item.passed() {
            println!("  [ ok ] {:<46} residual {:.3e} <= {:.1e}", item.name, item.value, item.tol);
        } else {
            println!("  [FAIL] {:<46} residual {:.3e} >  {:.1e}", item.name, item.value, item.tol);
            eprintln!("verification failure: {mesh_name}: {}", item.name);
            failures += 1;
        }
    }
    failures
}

fn cmd_verify(cmd: &VerifyCmd) -> ExitCode {
    let meshes: Vec<(String, MeshPair)> = match &cmd.mesh {
        Some(arg) => {
            let spec = match parse_mesh_arg(arg) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match mesh_from_spec(&spec) {
                Ok(m) => vec![(arg.clone(), m)],
                Err(e) => return fail(e),
            }
        }
        None => standard_meshes(),
    };
    let mut failures = 0;
    for (name, mesh) in &meshes {
        println!("== {name} ==");
        failures += print_items(name, &verify_mesh(mesh, cmd.seed));
    }
    if failures > 0 {
        eprintln!("{failures} verification item(s) failed");
        ExitCode::from(1)
    } else {
        println!("all verification items passed");
        ExitCode::SUCCESS
    }
}

fn cmd_converge(cmd: &ConvergeCmd) -> ExitCode {
    let resolutions: Result<Vec<usize>, _> =
        cmd.resolutions.split(',').map(|t| t.trim().parse::<usize>()).collect();
    let resolutions = match resolutions {
        Ok(r) => r,
        Err(_) => return fail("--resolutions must be comma-separated integers"),
    };
    let ops: Vec<&str> = match &cmd.operator {
        Some(op) => vec![op.as_str()],
        None => OPERATORS
            .iter()
            .copied()
            .filter(|op| cmd.family == "quad" || *op != "reduction")
            .collect(),
    };
    let report = match convergence_study(&ops, &cmd.family, &resolutions) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    for rep in &report.reports {
        println!("operator {} on {} family:", rep.operator, rep.family);
        println!("  {:>6} {:>14} {:>14} {:>8}", "N", "L2", "Linf", "order");
        for (i, row) in rep.rows.iter().enumerate() {
            let order = if i == 0 {
                String::from("-")
            } else {
                format!("{:.2}", rep.orders_l2[i - 1])
            };
            println!("  {:>6} {:>14.6e} {:>14.6e} {:>8}", row.n, row.l2, row.linf, order);
        }
    }
    ExitCode::SUCCESS
}

fn cmd_schemes() -> ExitCode {
    println!(
        "{:<14} {:<9} {:<15} {:<6} {:<15}",
        "preset", "hodge", "R", "Q", "T"
    );
    for preset in SchemePreset::ALL {
        let c = preset.config();
        let kind = |k: WedgeKind| match k {
            WedgeKind::Metric => "metric",
            WedgeKind::Combinatorial => "combinatorial",
        };
        let q = match c.q_variant {
            QVariant::Te => "TE",
            QVariant::Pe => "PE",
            QVariant::Accur => "ACCUR",
            QVariant::Dbl => "DBL",
        };
        println!(
            "{:<14} {:<9} {:<15} {:<6} {:<15}",
            preset.name(),
            "voronoi",
            kind(c.r_kind),
            q,
            kind(c.t_kind)
        );
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Mesh(cmd) => cmd_mesh(cmd),
        Command::Run(cmd) => cmd_run(cmd),
        Command::Verify(cmd) => cmd_verify(cmd),
        Command::Converge(cmd) => cmd_converge(cmd),
        Command::Schemes => cmd_schemes(),
    }
}
