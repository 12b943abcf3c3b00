use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Use the narrowest window as is.
    None,
    /// Line in `w^2` through the two narrowest windows, evaluated at
    /// `w = 0` (Richardson); wider windows only enter the monotonicity check.
    #[default]
    LinearToZero,
}

/// Gaussian surrogates `delta_w(x) = exp(-x^2 / 2 w^2) / (w sqrt(2 pi))` for
/// the surface delta function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaWindow {
    /// Strictly decreasing multiples of the surface scale `sigma_f`.
    pub widths: Vec<f64>,
    #[serde(default)]
    pub extrapolation: Extrapolation,
    /// Explicit `sigma_f`; by default `|a| hbar sqrt(beta / m)` with `a`
    /// the centroid coefficient of the surface.
    #[serde(default)]
    pub sigma_f: Option<f64>,
}

impl Default for DeltaWindow {
    fn default() -> Self {
        Self {
            widths: vec![0.2, 0.1, 0.05],
            extrapolation: Extrapolation::LinearToZero,
            sigma_f: None,
        }
    }
}

pub fn gaussian_window(x: f64, w: f64) -> f64 {
    (-0.5 * (x / w).powi(2)).exp() / (w * (std::f64::consts::TAU).sqrt())
}

impl DeltaWindow {
    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() {
            return Err(Error::invalid(
                "window.widths",
                "at least one width is required",
            ));
        }
        if self.widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid(
                "window.widths",
                "all widths must be finite and > 0",
            ));
        }
        if self.widths.windows(2).any(|p| p[1] >= p[0]) {
            return Err(Error::invalid(
                "window.widths",
                "widths must be strictly decreasing",
            ));
        }
        if self.extrapolation == Extrapolation::LinearToZero && self.widths.len() < 2 {
            return Err(Error::invalid(
                "window.widths",
                "extrapolation needs at least two widths",
            ));
        }
        if let Some(s) = self.sigma_f {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::invalid("window.sigma_f", "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Absolute widths for the given default surface scale.
    pub fn absolute(&self, default_sigma: f64) -> Vec<f64> {
        let s = self.sigma_f.unwrap_or(default_sigma);
        self.widths.iter().map(|w| w * s).collect()
    }

    /// Weights `lambda_i` such that `sum_i lambda_i E(w_i)` is the
    /// extrapolated estimate; they sum to one.
    pub fn intercept_weights(&self) -> Vec<f64> {
        let n = self.widths.len();
        match self.extrapolation {
            Extrapolation::None => {
                let mut l = vec![0.0; n];
                l[n - 1] = 1.0;
                l
            }
            Extrapolation::LinearToZero => {
                let mut l = vec![0.0; n];
                let (wa, wb) = (self.widths[n - 2].powi(2), self.widths[n - 1].powi(2));
                l[n - 2] = -wb / (wa - wb);
                l[n - 1] = wa / (wa - wb);
                l
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_of_exact_line() {
        let w = DeltaWindow::default();
        let l = w.intercept_weights();
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let est: f64 = w
            .widths
            .iter()
            .zip(&l)
            .map(|(wi, li)| li * (2.0 - 3.0 * wi * wi))
            .sum();
        assert!((est - 2.0).abs() < 1e-13);
    }

    #[test]
    fn validation() {
        assert!(DeltaWindow::default().validate().is_ok());
        let mut w = DeltaWindow {
            widths: vec![0.1, 0.2],
            ..DeltaWindow::default()
        };
        assert!(w.validate().is_err());
        w.widths = vec![0.1];
        assert!(w.validate().is_err());
        w.extrapolation = Extrapolation::None;
        assert!(w.validate().is_ok());
        w.widths = vec![-0.1];
        assert!(w.validate().is_err());
    }

    #[test]
    fn window_normalised() {
        let h = 1e-3;
        let s: f64 = (-8000..=8000)
            .map(|i| gaussian_window(i as f64 * h, 0.7) * h)
            .sum();
        assert!((s - 1.0).abs() < 1e-10);
    }
}
