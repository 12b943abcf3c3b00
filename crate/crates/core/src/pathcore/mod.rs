//! Ring-polymer paths and the quantities defined directly on them.

mod density;
mod free_ring;
mod momenta;
mod params;
mod path;
mod potential;
mod sampler;

pub use density::{log_rho_ring, rho_ring};
pub use free_ring::FreeRingSampler;
pub use momenta::{momentum_avg_exact_free, momentum_avg_leading, MomentumSide};
pub use params::ThermoParams;
pub use path::{cyclic_shift, sinusoidal_path, RingPath, SinusoidalPathSpec};
pub use potential::PotentialModel;
pub use sampler::{
    sample_chains, sample_paths, AcceptanceStats, MetropolisSampler, MoveConfig, PathChain,
};
