use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `ln|y| = ln c + a ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual in `ln|y|`.
    pub residual: f64,
    pub points_used: usize,
}

/// Exact zeros are excluded; at least two distinct nonzero points remain
/// or the fit is rejected.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("ys", "length differs from xs"));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y != 0.0)
        .map(|(&x, &y)| {
            if !(x > 0.0 && x.is_finite() && y.is_finite()) {
                Err(Error::invalid(
                    "series",
                    format!("cannot fit point ({x}, {y})"),
                ))
            } else {
                Ok((x.ln(), y.abs().ln()))
            }
        })
        .collect::<Result<_>>()?;
    let n = pts.len();
    if n < 2 {
        return Err(Error::invalid("series", "fewer than two nonzero points"));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("series", "all abscissae coincide"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - b - a * p.0).powi(2)).sum();
    Ok(PowerLawFit {
        exponent: a,
        prefactor: b.exp(),
        residual: (ss / nf).sqrt(),
        points_used: n,
    })
}
