//! TOML run configuration. Every table rejects unknown keys.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qtst_core::pathcore::{PotentialModel, SinusoidalPathSpec};
use qtst_core::rates::{DeltaWindow, Eta0Mode, GridSpec, DEFAULT_LOG_WEIGHT_GUARD};
use qtst_core::scaling::{
    default_deterministic_sweep, default_stochastic_sweep, ModeSchedule, QuadModeRule, SweepPath,
};
use qtst_core::surfaces::{SurfaceSpec, DEFAULT_PHI_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SurfaceCheck,
    Scaling,
    Figure1,
    Rate,
    RatioSweep,
    MomentaCheck,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::SurfaceCheck,
        Command::Scaling,
        Command::Figure1,
        Command::Rate,
        Command::RatioSweep,
        Command::MomentaCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::SurfaceCheck => "surface-check",
            Command::Scaling => "scaling",
            Command::Figure1 => "figure1",
            Command::Rate => "rate",
            Command::RatioSweep => "ratio-sweep",
            Command::MomentaCheck => "momenta-check",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Output directory; excluded from the config hash.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub thermo: ThermoConfig,
    #[serde(default = "default_potential")]
    pub potential: PotentialModel,
    #[serde(default = "default_surface")]
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub path: PathConfig,
    #[serde(default)]
    pub diagnostics: Option<DiagnosticsConfig>,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub figure1: Figure1Config,
    #[serde(default)]
    pub rate: RateConfig,
    #[serde(default)]
    pub ratio_sweep: RatioSweepConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_potential() -> PotentialModel {
    PotentialModel::Free
}

fn default_surface() -> SurfaceSpec {
    SurfaceSpec::centroid(0.0)
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            seed: default_seed(),
            out: None,
            thermo: ThermoConfig::default(),
            potential: default_potential(),
            surface: default_surface(),
            path: PathConfig::default(),
            diagnostics: None,
            scaling: ScalingConfig::default(),
            figure1: Figure1Config::default(),
            rate: RateConfig::default(),
            ratio_sweep: RatioSweepConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses and rejects any key the typed config does not carry, including
    /// keys beside a unit variant's `kind` tag, which serde lets through.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let raw: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        let input = serde_json::to_value(raw).map_err(|e| e.to_string())?;
        let mut canonical = serde_json::to_value(&cfg).map_err(|e| e.to_string())?;
        if let (Some(out), serde_json::Value::Object(m)) = (&cfg.out, &mut canonical) {
            m.insert("out".into(), serde_json::json!(out));
        }
        let mut unknown = Vec::new();
        unknown_keys(&input, &canonical, "", &mut unknown);
        match unknown.first() {
            None => Ok(cfg),
            Some(k) => Err(format!("unknown key `{k}`")),
        }
    }

    /// Fills every sweep list and path left to its command-specific default,
    /// so that the hash covers the values actually used.
    pub fn resolve(&mut self) {
        let s = &mut self.scaling;
        if s.p_list.is_none() {
            s.p_list = Some(match s.quantity {
                Quantity::Quaddiff => default_stochastic_sweep(),
                _ => default_deterministic_sweep(),
            });
        }
        if s.path.is_none() {
            s.path = Some(match s.quantity {
                Quantity::TDiff => SweepPath::tdiff_default(),
                _ => SweepPath::gp_default(),
            });
        }
    }
}

fn unknown_keys(
    input: &serde_json::Value,
    known: &serde_json::Value,
    at: &str,
    out: &mut Vec<String>,
) {
    use serde_json::Value;
    match (input, known) {
        (Value::Object(a), Value::Object(b)) => {
            for (k, v) in a {
                let path = if at.is_empty() {
                    k.clone()
                } else {
                    format!("{at}.{k}")
                };
                match b.get(k) {
                    Some(w) => unknown_keys(v, w, &path, out),
                    None => out.push(path),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            for (i, (v, w)) in a.iter().zip(b).enumerate() {
                unknown_keys(v, w, &format!("{at}[{i}]"), out);
            }
        }
        _ => {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermoConfig {
    pub beta: f64,
    pub mass: f64,
    pub hbar: f64,
    pub beads: usize,
}

impl Default for ThermoConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            mass: 1.0,
            hbar: 1.0,
            beads: 16,
        }
    }
}

/// Path used by `surface-check` and `momenta-check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathConfig {
    /// `q_j = q0 + sqrt(2) A sin(2 pi n j / P + alpha)` with `P` from `thermo.beads`.
    Sinusoidal {
        #[serde(default)]
        q0: f64,
        amplitude: f64,
        mode: usize,
        #[serde(default)]
        alpha: f64,
    },
    Beads {
        values: Vec<f64>,
    },
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig::Sinusoidal {
            q0: 0.0,
            amplitude: 1.0,
            mode: 1,
            alpha: FRAC_PI_4,
        }
    }
}

impl PathConfig {
    pub fn sinusoidal_spec(&self) -> Option<SinusoidalPathSpec> {
        match *self {
            PathConfig::Sinusoidal {
                q0,
                amplitude,
                mode,
                alpha,
            } => Some(SinusoidalPathSpec::new(q0, amplitude, mode, alpha)),
            PathConfig::Beads { .. } => None,
        }
    }
}

/// Equivalence-condition sweep for `surface-check`: the configured surface
/// with its mode set by `schedule`, on the sinusoidal path of that mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub p_list: Vec<usize>,
    pub schedule: ModeSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    #[default]
    TDiff,
    Gp,
    SumDifference,
    Quaddiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default)]
    pub quantity: Quantity,
    #[serde(default)]
    pub p_list: Option<Vec<usize>>,
    #[serde(default = "default_schedules")]
    pub schedules: Vec<ModeSchedule>,
    #[serde(default = "default_k")]
    pub k: i64,
    #[serde(default)]
    pub path: Option<SweepPath>,
    /// Thermal-path sampling for `quantity = "quaddiff"`.
    #[serde(default)]
    pub thermal: ThermalConfig,
}

fn default_schedules() -> Vec<ModeSchedule> {
    vec![
        ModeSchedule::Constant { n0: 1 },
        ModeSchedule::SqrtP,
        ModeSchedule::FracP { c: 0.25 },
    ]
}

fn default_k() -> i64 {
    2
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            quantity: Quantity::default(),
            p_list: None,
            schedules: default_schedules(),
            k: default_k(),
            path: None,
            thermal: ThermalConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub samples: usize,
    pub phi: f64,
    pub residual_threshold: f64,
    pub rules: Vec<QuadModeRule>,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            phi: FRAC_PI_4,
            residual_threshold: 0.1,
            rules: vec![QuadModeRule::One, QuadModeRule::HalfP],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure1Config {
    pub p_list: Vec<usize>,
    pub k: i64,
    pub alpha: f64,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self {
            p_list: default_deterministic_sweep(),
            k: default_k(),
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    MonteCarlo,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    #[serde(default)]
    pub backend: BackendKind,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub eta0_mode: Eta0Mode,
    #[serde(default)]
    pub window: DeltaWindow,
    #[serde(default = "default_guard")]
    pub log_weight_guard: f64,
    #[serde(default = "default_phi_floor")]
    pub phi_floor: f64,
}

fn default_samples() -> usize {
    20_000
}

fn default_chains() -> usize {
    8
}

fn default_guard() -> f64 {
    DEFAULT_LOG_WEIGHT_GUARD
}

fn default_phi_floor() -> f64 {
    DEFAULT_PHI_FLOOR
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::default(),
            samples: default_samples(),
            chains: default_chains(),
            grid: GridSpec::default(),
            eta0_mode: Eta0Mode::default(),
            window: DeltaWindow::default(),
            log_weight_guard: default_guard(),
            phi_floor: default_phi_floor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSweepConfig {
    pub p_list: Vec<usize>,
    pub schedule: ModeSchedule,
}

impl Default for RatioSweepConfig {
    fn default() -> Self {
        Self {
            p_list: vec![8, 16, 32, 64, 128],
            schedule: ModeSchedule::Constant { n0: 1 },
        }
    }
}
