use serde::{Deserialize, Serialize};

use super::eta::{eta0_log_integral, ha_log_factor, Eta0Mode};
use super::problem::RateProblem;
use super::window::gaussian_window;
use crate::error::Result;
use crate::pathcore::{log_rho_ring, RingPath};
use crate::surfaces::SurfaceEval;

/// Per-configuration ingredients shared by both rate integrands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigTerms {
    pub f_value: f64,
    pub log_rho: f64,
    pub sqrt_b: f64,
    /// `sum_k (df/dq_k) (T_{k-1} + 2 T_k + T_{k+1}) / 4`.
    pub flux_sum: f64,
    pub g_p: f64,
    /// `beta g_P^2 / (2 m P)`.
    pub ha_log_factor: f64,
}

pub fn config_terms(problem: &RateProblem, path: &RingPath) -> Result<ConfigTerms> {
    let e = SurfaceEval::new(&problem.surface, path, &problem.params)?;
    Ok(ConfigTerms {
        f_value: e.f_value,
        log_rho: log_rho_ring(path, &problem.params, &problem.potential)?,
        sqrt_b: e.b_p.sqrt(),
        flux_sum: e.flux_sum(),
        g_p: e.g_p,
        ha_log_factor: ha_log_factor(e.g_p, &problem.params),
    })
}

/// `sqrt(P / 2 pi m beta) sqrt(B_P) rho(q, 0) delta_w(f(q) - d)`.
pub fn rpmd_integrand(problem: &RateProblem, path: &RingPath, w: f64) -> Result<f64> {
    let t = config_terms(problem, path)?;
    Ok(problem.prefactor()
        * t.sqrt_b
        * t.log_rho.exp()
        * gaussian_window(t.f_value - problem.surface.d, w))
}

/// `(P / 2 pi hbar beta) rho(q, 0) delta_w(f(q) - d) S(q) I(g_P)`, or `None`
/// when the `eta_0` weight exceeds the overflow guard.
pub fn ha_integrand(
    problem: &RateProblem,
    path: &RingPath,
    w: f64,
    mode: Eta0Mode,
) -> Result<Option<f64>> {
    let t = config_terms(problem, path)?;
    if t.ha_log_factor > problem.log_weight_guard {
        return Ok(None);
    }
    let log_i = eta0_log_integral(t.g_p, &problem.params, mode)?;
    Ok(Some(
        problem.ha_prefactor()
            * t.flux_sum
            * (t.log_rho + log_i).exp()
            * gaussian_window(t.f_value - problem.surface.d, w),
    ))
}
