use serde::{Deserialize, Serialize};

use super::eval::SurfaceEval;
use super::spec::SurfaceSpec;
use crate::error::{Error, Result};
use crate::pathcore::{RingPath, ThermoParams};
use crate::scaling::fit_power_law;

/// Fitted exponents within this distance of zero count as "finite".
pub const VERDICT_EXPONENT_TOL: f64 = 0.25;

/// Columns whose entries are all below this are treated as identically zero.
const ZERO_COLUMN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Vanishing,
    Finite,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub p: usize,
    /// `max_k |T_{k+1} - T_k| * sqrt(P)`
    pub t_step_scaled: f64,
    /// `g_P / sqrt(P)`
    pub g_scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceTable {
    pub rows: Vec<EquivalenceRow>,
    pub t_step_exponent: Option<f64>,
    pub g_exponent: Option<f64>,
    pub t_step_verdict: Verdict,
    pub g_verdict: Verdict,
}

impl EquivalenceTable {
    /// The less favourable of the two column verdicts.
    pub fn verdict(&self) -> Verdict {
        self.t_step_verdict.max(self.g_verdict)
    }

    /// Both conditions vanish as `P` grows.
    pub fn equivalent(&self) -> bool {
        self.verdict() == Verdict::Vanishing
    }
}

/// Trend of `|values|` against `P`: identically zero columns vanish,
/// otherwise the fitted power-law exponent decides.
pub fn verdict_from_series(ps: &[usize], values: &[f64]) -> Result<(Option<f64>, Verdict)> {
    if ps.len() != values.len() {
        return Err(Error::invalid("values", "length differs from the P list"));
    }
    if values.iter().all(|v| v.abs() <= ZERO_COLUMN) {
        return Ok((None, Verdict::Vanishing));
    }
    let xs: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let fit = fit_power_law(&xs, values)?;
    let e = fit.exponent;
    let v = if e < -VERDICT_EXPONENT_TOL {
        Verdict::Vanishing
    } else if e > VERDICT_EXPONENT_TOL {
        Verdict::Diverging
    } else {
        Verdict::Finite
    };
    Ok((Some(e), v))
}

/// Evaluates both equivalence-condition quantities over a family of
/// surface/path pairs indexed by `P`.
pub fn equivalence_diagnostics<F>(
    family: F,
    p_list: &[usize],
    params: &ThermoParams,
) -> Result<EquivalenceTable>
where
    F: Fn(usize) -> Result<(SurfaceSpec, RingPath)>,
{
    if p_list.len() < 2 {
        return Err(Error::invalid("p_list", "need at least two bead counts"));
    }
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let (spec, path) = family(p)?;
        let pp = params.with_beads(p)?;
        let e = SurfaceEval::new(&spec, &path, &pp)?;
        let root = (p as f64).sqrt();
        rows.push(EquivalenceRow {
            p,
            t_step_scaled: e.max_t_step() * root,
            g_scaled: e.g_p / root,
        });
    }
    let t: Vec<f64> = rows.iter().map(|r| r.t_step_scaled).collect();
    let g: Vec<f64> = rows.iter().map(|r| r.g_scaled).collect();
    let (t_step_exponent, t_step_verdict) = verdict_from_series(p_list, &t)?;
    let (g_exponent, g_verdict) = verdict_from_series(p_list, &g)?;
    Ok(EquivalenceTable {
        rows,
        t_step_exponent,
        g_exponent,
        t_step_verdict,
        g_verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathcore::{sinusoidal_path, SinusoidalPathSpec};

    const PS: [usize; 6] = [16, 32, 64, 128, 256, 512];

    fn fourier_family(
        mode: fn(usize) -> usize,
    ) -> impl Fn(usize) -> Result<(SurfaceSpec, RingPath)> {
        move |p| {
            let n = mode(p);
            let path = sinusoidal_path(&SinusoidalPathSpec::new(0.0, 1.0, n, 0.3), p)?;
            Ok((SurfaceSpec::fourier_norm(n, 0.6, 0.0), path))
        }
    }

    #[test]
    fn centroid_vanishes() {
        let params = ThermoParams::natural(1.0, 2).unwrap();
        let table = equivalence_diagnostics(
            |p| {
                let path = sinusoidal_path(&SinusoidalPathSpec::new(0.1, 1.0, 1, 0.0), p)?;
                Ok((SurfaceSpec::centroid(0.0), path))
            },
            &PS,
            &params,
        )
        .unwrap();
        assert!(table
            .rows
            .iter()
            .all(|r| r.t_step_scaled == 0.0 && r.g_scaled.abs() < 1e-12));
        assert_eq!(table.verdict(), Verdict::Vanishing);
        assert!(table.equivalent());
    }

    #[test]
    fn fourier_low_mode_vanishes() {
        let params = ThermoParams::natural(1.0, 2).unwrap();
        let table = equivalence_diagnostics(fourier_family(|_| 1), &PS, &params).unwrap();
        assert!((table.t_step_exponent.unwrap() + 1.0).abs() < 0.05);
        assert!((table.g_exponent.unwrap() + 1.0).abs() < 0.05);
        assert!(table.equivalent());
    }

    #[test]
    fn fourier_half_mode_diverges() {
        let params = ThermoParams::natural(1.0, 2).unwrap();
        let table = equivalence_diagnostics(
            |p| {
                let path = sinusoidal_path(
                    &SinusoidalPathSpec::new(0.0, 1.0, p / 2, std::f64::consts::FRAC_PI_4),
                    p,
                )?;
                Ok((SurfaceSpec::fourier_norm(p / 2, 0.6, 0.0), path))
            },
            &PS,
            &params,
        )
        .unwrap();
        assert!((table.g_exponent.unwrap() - 1.0).abs() < 0.05);
        assert_eq!(table.g_verdict, Verdict::Diverging);
        assert_eq!(table.t_step_verdict, Verdict::Finite);
    }
}
