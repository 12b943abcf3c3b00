//! Discretized imaginary-time ring-polymer paths, cyclically invariant
//! dividing surfaces, and the HA-QTST / RPMD-TST rate expressions built on
//! them.
//!
//! The crate is organised bottom-up:
//!
//! * [`pathcore`]: ring-polymer paths, thermodynamic parameters, model
//!   potentials, the discretized Boltzmann weight, imaginary-time momenta and
//!   path samplers.
//! * [`surfaces`]: dividing-surface families and every derived geometric
//!   quantity (gradient, `B_P`, `T_k`, `g_P`, T-differences) plus the
//!   equivalence-condition diagnostics.
//! * [`scaling`]: P sweeps, power-law exponent fits and the plot-ready
//!   datasets for the T-difference and `g_P` scaling laws.
//! * [`rates`]: Monte Carlo and grid-quadrature estimators of `k Z_a` under
//!   both theories, and ratio sweeps over P.
//!
//! Natural units (`m = hbar = 1`) are the default throughout; every
//! parameter stays configurable.

pub mod error;
pub mod numeric;
pub mod output;
pub mod pathcore;
pub mod rates;
pub mod scaling;
pub mod surfaces;

pub use error::{Error, Result};
pub use pathcore::{
    cyclic_shift, log_rho_ring, momentum_avg_exact_free, momentum_avg_leading, rho_ring,
    sample_paths, sinusoidal_path, MomentumSide, MoveConfig, PotentialModel, RingPath,
    SinusoidalPathSpec, ThermoParams,
};
pub use rates::{DeltaWindow, RateProblem, RateReport};
pub use scaling::{ModeSchedule, ScalingSeries};
pub use surfaces::{SurfaceEval, SurfaceSpec, SurfaceVariant};

/// Library version embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
