//! The Gaussian `eta_0` integral `I(g) = int d eta exp(-a eta^2 - b eta)`,
//! `a = m P / (2 beta hbar^2)`, `b = g_P / hbar`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathcore::ThermoParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Eta0Mode {
    /// `sqrt(pi / a) exp(b^2 / 4a)`.
    #[default]
    GaussianClosedForm,
    /// Peak search plus adaptive Simpson on the shifted integrand.
    Quadrature,
}

fn coefficients(g: f64, params: &ThermoParams) -> (f64, f64) {
    let a = params.mass() * params.beads() as f64 / (2.0 * params.beta() * params.hbar().powi(2));
    (a, g / params.hbar())
}

/// `beta g^2 / (2 m P)`, the exponent of the completed square.
pub fn ha_log_factor(g: f64, params: &ThermoParams) -> f64 {
    params.beta() * g * g / (2.0 * params.mass() * params.beads() as f64)
}

/// `ln I(g)`.
pub fn eta0_log_integral(g: f64, params: &ThermoParams, mode: Eta0Mode) -> Result<f64> {
    if !g.is_finite() {
        return Err(Error::invalid("g_p", "must be finite"));
    }
    let (a, b) = coefficients(g, params);
    match mode {
        Eta0Mode::GaussianClosedForm => {
            Ok(0.5 * (std::f64::consts::PI / a).ln() + b * b / (4.0 * a))
        }
        Eta0Mode::Quadrature => quadrature(a, b),
    }
}

fn quadrature(a: f64, b: f64) -> Result<f64> {
    let exponent = |x: f64| -a * x * x - b * x;
    let scale = (2.0 * a).sqrt().recip();
    let peak = golden_max(exponent, scale)?;
    let top = exponent(peak);
    // y = x - peak
    let tilt = 2.0 * a * peak + b;
    let f = |y: f64| (-a * y * y - tilt * y).exp();
    let half = 12.0 * scale;
    let whole = simpson(&f, -half, half);
    let integral = adaptive_simpson(&f, -half, half, whole, 1e-12 * whole.abs(), 30);
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::NonConvergence(
            "eta_0 quadrature produced a non-positive value".into(),
        ));
    }
    Ok(top + integral.ln())
}

/// Location of the maximum of a unimodal function; `step` sets the initial
/// bracketing stride.
fn golden_max<F: Fn(f64) -> f64>(f: F, step: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-step, step);
    let f0 = f(0.0);
    let mut grow = 0;
    while f(lo) >= f0 || f(hi) >= f0 {
        if f(lo) >= f0 {
            lo *= 2.0;
        }
        if f(hi) >= f0 {
            hi *= 2.0;
        }
        grow += 1;
        if grow > 200 {
            return Err(Error::NonConvergence("eta_0 peak not bracketed".into()));
        }
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if hi - lo <= 1e-12 * step {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    Ok(0.5 * (lo + hi))
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive_simpson(f, a, m, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_peak() {
        for g in [-200.0, 200.0, 1e4] {
            let t = ThermoParams::new(10.0, 0.3, 1.0, 2).unwrap();
            let c = eta0_log_integral(g, &t, Eta0Mode::GaussianClosedForm).unwrap();
            let q = eta0_log_integral(g, &t, Eta0Mode::Quadrature).unwrap();
            assert!((c - q).abs() < 1e-9 * c.abs(), "g = {g}: {c} vs {q}");
        }
    }

    #[test]
    fn modes_agree() {
        for &(p, beta, g) in &[
            (4usize, 1.0, 0.0),
            (16, 2.0, -3.0),
            (64, 0.5, 40.0),
            (8, 1.0, 1e-3),
        ] {
            let t = ThermoParams::new(beta, 1.3, 0.8, p).unwrap();
            let c = eta0_log_integral(g, &t, Eta0Mode::GaussianClosedForm).unwrap();
            let q = eta0_log_integral(g, &t, Eta0Mode::Quadrature).unwrap();
            assert!((c - q).abs() < 1e-9, "{c} {q}");
        }
    }

    #[test]
    fn completed_square_exponent() {
        let t = ThermoParams::natural(2.0, 8).unwrap();
        let g = 1.7;
        let (a, b) = coefficients(g, &t);
        assert!((b * b / (4.0 * a) - ha_log_factor(g, &t)).abs() < 1e-14);
    }
}
