use serde::{Deserialize, Serialize};

use super::eta::Eta0Mode;
use super::grid::{grid_oracle, GridSpec};
use super::mc::{monte_carlo, McBudget};
use super::problem::RateProblem;
use super::window::Extrapolation;
use crate::error::Result;
use crate::pathcore::PotentialModel;
use crate::surfaces::SurfaceSpec;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `|value - other| <= k * sqrt(se^2 + se_other^2)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.std_error.hypot(other.std_error)
    }

    pub fn relative_error_to(&self, exact: f64) -> f64 {
        (self.value - exact).abs() / exact.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    MonteCarlo(McBudget),
    Grid(GridSpec),
}

impl Default for Backend {
    fn default() -> Self {
        Backend::MonteCarlo(McBudget::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorMetadata {
    pub backend: Backend,
    pub eta0_mode: Eta0Mode,
    /// Relative window widths (multiples of `sigma_f`).
    pub window_widths: Vec<f64>,
    pub sigma_f: f64,
    pub extrapolation: Extrapolation,
    /// Estimates at each window width, before extrapolation.
    pub rpmd_by_window: Vec<f64>,
    pub ha_by_window: Option<Vec<f64>>,
    /// Configurations (MC samples or grid nodes) that entered the estimate.
    pub evaluations: usize,
    pub seed: Option<u64>,
    pub beads: usize,
    pub beta: f64,
    pub mass: f64,
    pub hbar: f64,
    pub potential: PotentialModel,
    pub surface: SurfaceSpec,
    /// Largest `beta g_P^2 / 2 m P` seen.
    pub max_log_weight: f64,
    pub log_weight_guard: f64,
}

/// Both `k Z_a` estimates for one problem. `kZa_ha` and the ratio are
/// absent when the divergence flag is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub schema_version: u32,
    #[serde(rename = "kZa_rpmd")]
    pub kza_rpmd: Estimate,
    #[serde(rename = "kZa_ha")]
    pub kza_ha: Option<Estimate>,
    pub ratio_ha_over_rpmd: Option<Estimate>,
    pub divergence_flag: bool,
    pub metadata: EstimatorMetadata,
}

/// HA-QTST result: a value, or only the divergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaEstimate {
    pub estimate: Option<Estimate>,
    pub divergence_flag: bool,
    pub max_log_weight: f64,
}

/// Estimates both theories from the same configurations.
pub fn estimate_rates(
    problem: &RateProblem,
    backend: &Backend,
    mode: Eta0Mode,
) -> Result<RateReport> {
    problem.validate()?;
    match backend {
        Backend::MonteCarlo(b) => monte_carlo(problem, b, mode, true),
        Backend::Grid(g) => grid_oracle(problem, g, mode),
    }
}

pub fn rpmd_tst_rate(problem: &RateProblem, backend: &Backend) -> Result<Estimate> {
    problem.validate()?;
    let r = match backend {
        Backend::MonteCarlo(b) => monte_carlo(problem, b, Eta0Mode::GaussianClosedForm, false)?,
        Backend::Grid(g) => grid_oracle(problem, g, Eta0Mode::GaussianClosedForm)?,
    };
    Ok(r.kza_rpmd)
}

pub fn ha_qtst_rate(
    problem: &RateProblem,
    backend: &Backend,
    mode: Eta0Mode,
) -> Result<HaEstimate> {
    let r = estimate_rates(problem, backend, mode)?;
    Ok(HaEstimate {
        estimate: r.kza_ha,
        divergence_flag: r.divergence_flag,
        max_log_weight: r.metadata.max_log_weight,
    })
}
