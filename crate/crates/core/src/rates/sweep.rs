use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::eta::{ha_log_factor, Eta0Mode};
use super::mc::{monte_carlo, McBudget};
use super::problem::RateProblem;
use super::report::{Estimate, RateReport};
use crate::error::{Error, Result};
use crate::numeric::mix_seed;
use crate::output::{fmt_sig, CsvTable};
use crate::pathcore::{log_rho_ring, sinusoidal_path, SinusoidalPathSpec};
use crate::scaling::ModeSchedule;
use crate::surfaces::SurfaceEval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub p: usize,
    pub n: usize,
    pub ratio: Option<Estimate>,
    pub divergence_flag: bool,
    pub report: RateReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    /// First bead count of the plateau.
    pub from_p: usize,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSweep {
    pub schedule: ModeSchedule,
    pub rows: Vec<RatioRow>,
    pub plateau: Option<Plateau>,
}

/// Earliest index from which every successive change is below `k` combined
/// standard errors; needs at least two trailing points.
pub fn detect_plateau(points: &[(usize, Estimate)], k: f64) -> Option<Plateau> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let mut start = n - 1;
    while start > 0 {
        let (a, b) = (&points[start - 1].1, &points[start].1);
        if a.agrees_with(b, k) {
            start -= 1;
        } else {
            break;
        }
    }
    if start == n - 1 {
        return None;
    }
    let tail = &points[start..];
    let (mut wsum, mut vsum) = (0.0, 0.0);
    for (_, e) in tail {
        let w = if e.std_error > 0.0 {
            e.std_error.powi(-2)
        } else {
            1.0
        };
        wsum += w;
        vsum += w * e.value;
    }
    let se = if tail.iter().all(|(_, e)| e.std_error > 0.0) {
        wsum.sqrt().recip()
    } else {
        0.0
    };
    Some(Plateau {
        from_p: tail[0].0,
        value: vsum / wsum,
        std_error: se,
    })
}

/// HA/RPMD ratio for the template surface with its mode set by `schedule`
/// at every `P`. Each `P` uses its own seed stream of `budget.seed`.
pub fn ratio_sweep(
    template: &RateProblem,
    schedule: ModeSchedule,
    p_list: &[usize],
    budget: &McBudget,
    mode: Eta0Mode,
) -> Result<RatioSweep> {
    if p_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "p_list",
            "bead counts must be strictly increasing",
        ));
    }
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let n = schedule.mode(p)?;
        let mut prob = template.with_beads(p)?;
        prob.surface = prob.surface.with_mode(n);
        prob.validate()?;
        let b = McBudget {
            seed: mix_seed(budget.seed, p as u64),
            ..*budget
        };
        let report = monte_carlo(&prob, &b, mode, true)?;
        rows.push(RatioRow {
            p,
            n,
            ratio: report.ratio_ha_over_rpmd,
            divergence_flag: report.divergence_flag,
            report,
        });
    }
    let finite: Vec<(usize, Estimate)> = rows
        .iter()
        .filter_map(|r| r.ratio.map(|e| (r.p, e)))
        .collect();
    let plateau = if rows.iter().any(|r| r.divergence_flag) {
        None
    } else {
        detect_plateau(&finite, 2.0)
    };
    Ok(RatioSweep {
        schedule,
        rows,
        plateau,
    })
}

impl RatioSweep {
    pub fn csv_table(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "P",
            "n",
            "ratio",
            "ratio_error",
            "kZa_ha",
            "kZa_ha_error",
            "kZa_rpmd",
            "kZa_rpmd_error",
            "divergence_flag",
        ]);
        let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_else(|| "nan".into());
        for r in &self.rows {
            let ha = r.report.kza_ha;
            t.push_row(vec![
                r.p.to_string(),
                r.n.to_string(),
                opt(r.ratio.map(|e| e.value)),
                opt(r.ratio.map(|e| e.std_error)),
                opt(ha.map(|e| e.value)),
                opt(ha.map(|e| e.std_error)),
                fmt_sig(r.report.kza_rpmd.value),
                fmt_sig(r.report.kza_rpmd.std_error),
                r.divergence_flag.to_string(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub p: usize,
    /// `beta g_P^2 / 2 m P` on the excited path.
    pub log_weight: f64,
    pub flagged: bool,
    /// `ln[sqrt(P / 2 pi m beta) sqrt(B_P) rho(q, 0)]` on the same path.
    pub rpmd_log_integrand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceScan {
    pub amplitude: f64,
    pub rows: Vec<DivergenceRow>,
}

impl DivergenceScan {
    pub fn first_flagged(&self) -> Option<usize> {
        self.rows.iter().find(|r| r.flagged).map(|r| r.p)
    }

    pub fn rpmd_finite(&self) -> bool {
        self.rows.iter().all(|r| r.rpmd_log_integrand.is_finite())
    }
}

/// Evaluates the HA weight exponent on the half-mode-excited path
/// `q_j = q0 + A (-1)^j` with the template surface set to mode `P/2`.
pub fn divergence_scan(
    template: &RateProblem,
    amplitude: f64,
    p_list: &[usize],
) -> Result<DivergenceScan> {
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        if p % 2 != 0 {
            return Err(Error::invalid(
                "p_list",
                format!("half mode needs even P, got {p}"),
            ));
        }
        let mut prob = template.with_beads(p)?;
        prob.surface = prob.surface.with_mode(p / 2);
        prob.surface.check_structure(p)?;
        let path = sinusoidal_path(
            &SinusoidalPathSpec::new(prob.surface.d, amplitude, p / 2, FRAC_PI_4),
            p,
        )?;
        let e = SurfaceEval::new(&prob.surface, &path, &prob.params)?;
        let log_weight = ha_log_factor(e.g_p, &prob.params);
        let rpmd_log_integrand = prob.prefactor().ln()
            + 0.5 * e.b_p.ln()
            + log_rho_ring(&path, &prob.params, &prob.potential)?;
        rows.push(DivergenceRow {
            p,
            log_weight,
            flagged: log_weight > prob.log_weight_guard,
            rpmd_log_integrand,
        });
    }
    Ok(DivergenceScan { amplitude, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_detection() {
        let e = |v: f64| Estimate {
            value: v,
            std_error: 0.01,
        };
        let pts = vec![
            (16, e(1.5)),
            (32, e(1.3)),
            (64, e(1.21)),
            (128, e(1.2)),
            (256, e(1.205)),
        ];
        let pl = detect_plateau(&pts, 2.0).unwrap();
        assert_eq!(pl.from_p, 64);
        assert!((pl.value - 1.205).abs() < 0.01);
        assert!(detect_plateau(&[(16, e(1.0)), (32, e(2.0))], 2.0).is_none());
    }
}
