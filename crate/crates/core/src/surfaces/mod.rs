//! Cyclically invariant dividing surfaces `f(q)` and the quantities derived
//! from their gradient.

pub mod closed;
mod diagnostics;
mod eval;
mod spec;

pub use diagnostics::{
    equivalence_diagnostics, verdict_from_series, EquivalenceRow, EquivalenceTable, Verdict,
    VERDICT_EXPONENT_TOL,
};
pub use eval::{
    b_p, f_eval, flux_sum, g_p, grad_f, sum_difference, t_diff, t_vec, FValue, GpForm, SurfaceEval,
};
pub use spec::{QuadNorm, SurfaceSpec, SurfaceVariant, DEFAULT_PHI_FLOOR};
