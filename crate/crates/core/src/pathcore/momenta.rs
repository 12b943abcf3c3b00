use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{RingPath, ThermoParams};

/// Which neighbouring link a leading-order imaginary-time momentum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumSide {
    /// Link between beads `k - 1` and `k`.
    Plus,
    /// Link between beads `k` and `k + 1`.
    Minus,
}

/// Leading order in `beta / P` of the average imaginary-time momenta at bead
/// label `k` (1-based, cyclic):
///
/// * plus:  `(i m P / hbar beta) (q_{k-1} - q_k - eta_{k-1}/2 - eta_k/2)`
/// * minus: `(i m P / hbar beta) (q_k - q_{k+1} - eta_k/2 - eta_{k+1}/2)`
pub fn momentum_avg_leading(
    side: MomentumSide,
    k: i64,
    path: &RingPath,
    eta: &[f64],
    params: &ThermoParams,
) -> Result<Complex64> {
    let p = params.beads();
    path.check_len(p)?;
    if eta.len() != p {
        return Err(Error::BeadCountMismatch {
            expected: p,
            got: eta.len(),
        });
    }
    let scale = params.mass() / (params.hbar() * params.epsilon());
    let (a, b) = match side {
        MomentumSide::Plus => (k - 1, k),
        MomentumSide::Minus => (k, k + 1),
    };
    let (ia, ib) = (path.index(a), path.index(b));
    let disp = path.beads()[ia] - path.beads()[ib] - 0.5 * eta[ia] - 0.5 * eta[ib];
    Ok(Complex64::new(0.0, scale * disp))
}

/// Exact ratio `<x| e^{-eps H} p |y> / <x| e^{-eps H} |y>` for the free
/// particle, `i m (x - y) / (hbar eps)`.
///
/// The ratio is `i hbar d/dy ln K(x, y)` for the Gaussian free kernel
/// `K(x, y) ~ exp(-m (x - y)^2 / (2 eps hbar^2))`. The arithmetic is ordered
/// like [`momentum_avg_leading`] so both agree bit for bit at `eta = 0`.
pub fn momentum_avg_exact_free(
    x: f64,
    y: f64,
    epsilon: f64,
    params: &ThermoParams,
) -> Result<Complex64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid(
            "epsilon",
            format!("must be > 0, got {epsilon}"),
        ));
    }
    let scale = params.mass() / (params.hbar() * epsilon);
    Ok(Complex64::new(0.0, scale * (x - y)))
}
