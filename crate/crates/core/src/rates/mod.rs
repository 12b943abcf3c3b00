//! `k Z_a` under HA-QTST and RPMD-TST: per-configuration integrands, the
//! Monte Carlo and grid back ends, and sweeps over `P`.

mod eta;
mod grid;
mod integrand;
mod mc;
mod problem;
mod report;
mod sweep;
mod window;

pub use eta::{eta0_log_integral, ha_log_factor, Eta0Mode};
pub use grid::{grid_oracle_rate, GridSpec, Theory, GRID_MAX_BEADS};
pub use integrand::{config_terms, ha_integrand, rpmd_integrand, ConfigTerms};
pub use mc::McBudget;
pub use problem::{RateProblem, DEFAULT_LOG_WEIGHT_GUARD};
pub use report::{
    estimate_rates, ha_qtst_rate, rpmd_tst_rate, Backend, Estimate, EstimatorMetadata, HaEstimate,
    RateReport, REPORT_SCHEMA_VERSION,
};
pub use sweep::{
    detect_plateau, divergence_scan, ratio_sweep, DivergenceRow, DivergenceScan, Plateau, RatioRow,
    RatioSweep,
};
pub use window::{gaussian_window, DeltaWindow, Extrapolation};
