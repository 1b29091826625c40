//! TOML run configuration. Unknown keys are rejected everywhere
//! (`deny_unknown_fields`) so typos fail fast.

use std::path::Path;

use serde::Deserialize;
use swede_core::swe_core::{HodgeKind, SchemeConfig, SchemePreset};
use swede_core::wedge::{QVariant, WedgeKind};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    #[serde(default)]
    pub scheme: SchemeSpec,
    pub physics: PhysicsSpec,
    pub initial: InitialSpec,
    pub integrator: IntegratorSpec,
    pub run: RunSection,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    /// "quad" or "trihex"; mutually exclusive with `file`.
    pub generator: Option<String>,
    pub n: Option<usize>,
    pub spacing: Option<f64>,
    pub file: Option<String>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    /// Preset name; mutually exclusive with the explicit fields.
    pub preset: Option<String>,
    pub r: Option<String>,
    pub q: Option<String>,
    pub t: Option<String>,
    pub hodge: Option<String>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSpec {
    pub g: f64,
    #[serde(default)]
    pub coriolis: CoriolisSpec,
    #[serde(default)]
    pub topography: TopographySpec,
    /// Run the system linearized about rest with depth `h_ref`.
    #[serde(default)]
    pub linearized: bool,
    pub h_ref: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum CoriolisSpec {
    Constant { f0: f64 },
    Analytic {
        #[serde(default)]
        mean: f64,
        waves: Vec<WaveSpec>,
    },
}

impl Default for CoriolisSpec {
    fn default() -> Self {
        CoriolisSpec::Constant { f0: 0.0 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum TopographySpec {
    None,
    Analytic {
        #[serde(default)]
        mean: f64,
        waves: Vec<WaveSpec>,
    },
}

impl Default for TopographySpec {
    fn default() -> Self {
        TopographySpec::None
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub kx: i32,
    pub ky: i32,
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// rest | gaussian-hill | vortex-pair | geostrophic-balance | uniform-pv
    pub preset: String,
    /// Mean pointwise depth.
    #[serde(default = "default_h0")]
    pub h0: f64,
    #[serde(default)]
    pub amplitude: f64,
    /// Length scale for gaussian-hill.
    pub width: Option<f64>,
    /// Target uniform PV for uniform-pv.
    pub q0: Option<f64>,
    /// Seed for the random presets (geostrophic-balance, uniform-pv).
    #[serde(default)]
    pub seed: u64,
}

fn default_h0() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    /// rk4 | implicit-midpoint
    pub kind: String,
    pub dt: f64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_max_iter")]
    pub max_iterations: usize,
}

fn default_tol() -> f64 {
    1e-13
}

fn default_max_iter() -> usize {
    100
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub n_steps: usize,
    /// Diagnostics every `cadence` steps (plus step 0).
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    /// Snapshots every `snapshot_cadence` steps; 0 = final state only.
    #[serde(default)]
    pub snapshot_cadence: usize,
    pub out_dir: Option<String>,
    /// Also write a legacy-VTK polygon file per snapshot.
    #[serde(default)]
    pub vtk: bool,
}

fn default_cadence() -> usize {
    1
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: String, source: std::io::Error },
    Toml(toml::de::Error),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "{path}: {source}"),
            ConfigError::Toml(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(ConfigError::Toml)?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn invalid(m: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(m.into())
}

pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    match (&cfg.mesh.generator, &cfg.mesh.file) {
        (Some(_), Some(_)) => {
            return Err(invalid("mesh: give either a generator or a file, not both"))
        }
        (None, None) => return Err(invalid("mesh: needs a generator or a file")),
        (Some(g), None) => {
            if g != "quad" && g != "trihex" {
                return Err(invalid(format!("mesh: unknown generator `{g}`")));
            }
            if cfg.mesh.n.is_none() {
                return Err(invalid("mesh: generator needs `n`"));
            }
        }
        (None, Some(_)) => {
            if cfg.mesh.n.is_some() || cfg.mesh.spacing.is_some() {
                return Err(invalid("mesh: `n`/`spacing` only apply to generators"));
            }
        }
    }
    scheme_config(&cfg.scheme)?;
    let presets = ["rest", "gaussian-hill", "vortex-pair", "geostrophic-balance", "uniform-pv"];
    if !presets.contains(&cfg.initial.preset.as_str()) {
        return Err(invalid(format!("initial: unknown preset `{}`", cfg.initial.preset)));
    }
    if cfg.initial.preset == "gaussian-hill" && cfg.initial.width.is_none() {
        return Err(invalid("initial: gaussian-hill needs `width`"));
    }
    match cfg.integrator.kind.as_str() {
        "rk4" | "implicit-midpoint" => {}
        k => return Err(invalid(format!("integrator: unknown kind `{k}`"))),
    }
    if !(cfg.integrator.dt > 0.0) {
        return Err(invalid("integrator: dt must be positive"));
    }
    if !(cfg.physics.g > 0.0) {
        return Err(invalid("physics: g must be positive"));
    }
    if cfg.physics.linearized && cfg.physics.h_ref.is_none() {
        return Err(invalid("physics: linearized runs need `h_ref`"));
    }
    if cfg.initial.preset == "geostrophic-balance" {
        if !cfg.physics.linearized {
            return Err(invalid("initial: geostrophic-balance needs physics.linearized = true"));
        }
        if !matches!(cfg.physics.coriolis, CoriolisSpec::Constant { .. }) {
            return Err(invalid("initial: geostrophic-balance needs constant coriolis"));
        }
    }
    if cfg.run.cadence == 0 {
        return Err(invalid("run: cadence must be at least 1"));
    }
    Ok(())
}

fn parse_wedge_kind(what: &str, s: &str) -> Result<WedgeKind, ConfigError> {
    match s {
        "metric" => Ok(WedgeKind::Metric),
        "combinatorial" => Ok(WedgeKind::Combinatorial),
        other => Err(invalid(format!("scheme: unknown {what} kind `{other}`"))),
    }
}

/// Resolve a scheme section (preset or explicit operator tuple).
pub fn scheme_config(spec: &SchemeSpec) -> Result<SchemeConfig, ConfigError> {
    let explicit =
        spec.r.is_some() || spec.q.is_some() || spec.t.is_some() || spec.hodge.is_some();
    match (&spec.preset, explicit) {
        (Some(_), true) => {
            Err(invalid("scheme: give either a preset or explicit operators, not both"))
        }
        (Some(name), false) => SchemePreset::parse(name)
            .map(SchemePreset::config)
            .ok_or_else(|| invalid(format!("scheme: unknown preset `{name}`"))),
        (None, false) => Ok(SchemePreset::Trsk2010Te.config()),
        (None, true) => {
            let r = parse_wedge_kind("R", spec.r.as_deref().unwrap_or("metric"))?;
            let t = parse_wedge_kind("T", spec.t.as_deref().unwrap_or("metric"))?;
            let q = match spec.q.as_deref().unwrap_or("te") {
                "te" => QVariant::Te,
                "pe" => QVariant::Pe,
                "accur" => QVariant::Accur,
                "dbl" => QVariant::Dbl,
                other => return Err(invalid(format!("scheme: unknown Q variant `{other}`"))),
            };
            match spec.hodge.as_deref().unwrap_or("voronoi") {
                "voronoi" => {}
                other => return Err(invalid(format!("scheme: unknown hodge `{other}`"))),
            }
            Ok(SchemeConfig { r_kind: r, q_variant: q, t_kind: t, hodge: HodgeKind::Voronoi })
        }
    }
}

/// Parse a `--mesh` CLI argument: `quad:8`, `quad:9:0.5`, `trihex:4`, or
/// `file:path.mesh`.
pub fn parse_mesh_arg(arg: &str) -> Result<MeshSpec, ConfigError> {
    let mut parts = arg.split(':');
    let kind = parts.next().unwrap_or("");
    match kind {
        "quad" | "trihex" => {
            let n = parts
                .next()
                .ok_or_else(|| invalid(format!("--mesh {kind} needs a size, e.g. {kind}:8")))?
                .parse::<usize>()
                .map_err(|_| invalid("--mesh: size must be an integer"))?;
            let spacing = match parts.next() {
                Some(s) => Some(
                    s.parse::<f64>().map_err(|_| invalid("--mesh: spacing must be a number"))?,
                ),
                None => None,
            };
            if parts.next().is_some() {
                return Err(invalid("--mesh: too many `:` components"));
            }
            Ok(MeshSpec {
                generator: Some(kind.to_string()),
                n: Some(n),
                spacing,
                file: None,
            })
        }
        "file" => {
            let path = parts.collect::<Vec<_>>().join(":");
            if path.is_empty() {
                return Err(invalid("--mesh file: needs a path"));
            }
            Ok(MeshSpec { generator: None, n: None, spacing: None, file: Some(path) })
        }
        other => Err(invalid(format!("--mesh: unknown kind `{other}` (quad|trihex|file)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
        [mesh]
        generator = "quad"
        n = 8

        [scheme]
        preset = "trsk2010-te"

        [physics]
        g = 9.81
        coriolis = { kind = "constant", f0 = 1.0 }

        [initial]
        preset = "rest"
        h0 = 2.0

        [integrator]
        kind = "rk4"
        dt = 0.05

        [run]
        n_steps = 10
    "#;

    #[test]
    fn parses_valid_config() {
        let cfg = parse_config(GOOD).unwrap();
        assert_eq!(cfg.mesh.n, Some(8));
        assert_eq!(cfg.run.cadence, 1);
        let scheme = scheme_config(&cfg.scheme).unwrap();
        assert_eq!(scheme, SchemePreset::Trsk2010Te.config());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = GOOD.replace("n_steps = 10", "n_steps = 10\nbogus = 3");
        assert!(matches!(parse_config(&bad), Err(ConfigError::Toml(_))));
    }

    #[test]
    fn cross_validation() {
        let bad = GOOD.replace("preset = \"trsk2010-te\"", "preset = \"nope\"");
        assert!(matches!(parse_config(&bad), Err(ConfigError::Invalid(_))));
        let bad = GOOD.replace("generator = \"quad\"\n        n = 8", "file = \"m.mesh\"\n        n = 8");
        assert!(matches!(parse_config(&bad), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn mesh_arg_forms() {
        let m = parse_mesh_arg("quad:9:0.5").unwrap();
        assert_eq!(m.n, Some(9));
        assert_eq!(m.spacing, Some(0.5));
        assert!(parse_mesh_arg("hex:3").is_err());
        let f = parse_mesh_arg("file:some/mesh.txt").unwrap();
        assert_eq!(f.file.as_deref(), Some("some/mesh.txt"));
    }
}
