//! Bead-count sweeps, power-law fits and the plot-ready datasets built from
//! them.

mod fit;
mod quaddiff;
mod schedule;
mod series;

pub use fit::{fit_power_law, PowerLawFit};
pub use quaddiff::{quaddiff_orders, QuadDiffOrders, QuadModeRule, ThermalFamily};
pub use schedule::ModeSchedule;
pub use series::{
    default_deterministic_sweep, default_stochastic_sweep, figure1_emit, gp_series,
    sum_difference_closed_form, sum_difference_series, tdiff_series, Figure1, ScalingSeries,
    SeriesPoint, SweepPath,
};
