//! Monte Carlo back end.
//!
//! For a surface `f = a c + h(xi)` (centroid `c`, internal coordinates `xi`)
//! the free ring polymer factorizes: `xi` is drawn exactly from the free
//! internal-mode distribution and `c` from the Gaussian delta window
//! centred on the surface, leaving `exp(-eps sum_k V(q_k))` as the
//! importance weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eta::{eta0_log_integral, ha_log_factor, Eta0Mode};
use super::problem::RateProblem;
use super::report::{Backend, Estimate, EstimatorMetadata, RateReport, REPORT_SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::numeric::mix_seed;
use crate::pathcore::{FreeRingSampler, RingPath};
use crate::surfaces::SurfaceEval;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McBudget {
    pub samples: usize,
    pub chains: usize,
    pub seed: u64,
}

impl Default for McBudget {
    fn default() -> Self {
        Self {
            samples: 20_000,
            chains: 8,
            seed: 1,
        }
    }
}

impl McBudget {
    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 {
            return Err(Error::invalid("budget.chains", "must be >= 1"));
        }
        if self.samples < 2 * self.chains {
            return Err(Error::invalid(
                "budget.samples",
                format!("need at least two samples per chain, got {}", self.samples),
            ));
        }
        Ok(())
    }
}

struct ChainOut {
    /// Row-major `samples x widths`.
    rpmd: Vec<f64>,
    ha: Vec<f64>,
    max_log_weight: f64,
    diverged: bool,
}

/// Constants of one run.
struct Setup<'a> {
    problem: &'a RateProblem,
    widths: Vec<f64>,
    a: f64,
    rpmd_scale: f64,
    ha_scale: f64,
    mode: Eta0Mode,
    with_ha: bool,
}

fn run_chain(s: &Setup<'_>, samples: usize, seed: u64) -> Result<ChainOut> {
    let t = &s.problem.params;
    let p = t.beads();
    let eps = t.epsilon();
    let pot = &s.problem.potential;
    let d = s.problem.surface.d;
    let nw = s.widths.len();
    let sampler = FreeRingSampler::new(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ChainOut {
        rpmd: Vec::with_capacity(samples * nw),
        ha: Vec::with_capacity(if s.with_ha { samples * nw } else { 0 }),
        max_log_weight: 0.0,
        diverged: false,
    };
    let mut xi = vec![0.0; p];
    let mut singular = 0usize;
    let mut done = 0usize;
    while done < samples {
        sampler.fill_centered(&mut rng, &mut xi);
        let path = RingPath::new(xi.clone())?;
        let e = match SurfaceEval::new(&s.problem.surface, &path, t) {
            Ok(e) => e,
            Err(Error::SingularSurface(_)) => {
                singular += 1;
                if singular > samples / 10 + 10 {
                    return Err(Error::NonConvergence(
                        "surface is singular on a finite fraction of the sampled paths".into(),
                    ));
                }
                continue;
            }
            Err(err) => return Err(err),
        };
        done += 1;
        let c_star = (d - e.f_value) / s.a;
        let z: f64 = rng.sample(StandardNormal);
        let sqrt_b = e.b_p.sqrt();
        let ha_factor = if s.with_ha {
            let lw = ha_log_factor(e.g_p, t);
            out.max_log_weight = out.max_log_weight.max(lw);
            if lw > s.problem.log_weight_guard {
                out.diverged = true;
                None
            } else {
                Some(e.flux_sum() * eta0_log_integral(e.g_p, t, s.mode)?.exp())
            }
        } else {
            None
        };
        for &w in &s.widths {
            let sc = w / s.a.abs();
            let mut weight = 0.0;
            for c in [c_star + sc * z, c_star - sc * z] {
                let action: f64 = xi.iter().map(|x| pot.value(x + c)).sum::<f64>() * eps;
                weight += 0.5 * (-action).exp();
            }
            out.rpmd.push(s.rpmd_scale * sqrt_b * weight);
            if s.with_ha {
                out.ha.push(match ha_factor {
                    Some(h) => s.ha_scale * h * weight,
                    None => f64::NAN,
                });
            }
        }
    }
    Ok(out)
}

/// Mean and covariance of per-sample vectors.
struct Stats {
    n: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl Stats {
    #[allow(clippy::needless_range_loop)]
    fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let k = rows[0].len();
        let mut mean = vec![0.0; k];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut cov = vec![vec![0.0; k]; k];
        for r in rows {
            for i in 0..k {
                let di = r[i] - mean[i];
                for j in i..k {
                    cov[i][j] += di * (r[j] - mean[j]);
                }
            }
        }
        let dof = (n - 1) as f64;
        for i in 0..k {
            for j in i..k {
                let c = cov[i][j] / dof;
                cov[i][j] = c;
                cov[j][i] = c;
            }
        }
        Self { n, mean, cov }
    }

    fn se(&self, i: usize) -> f64 {
        (self.cov[i][i].max(0.0) / self.n as f64).sqrt()
    }

    fn estimate(&self, i: usize) -> Estimate {
        Estimate {
            value: self.mean[i],
            std_error: self.se(i),
        }
    }

    /// `mean_i / mean_j` with the delta-method error.
    fn ratio(&self, i: usize, j: usize) -> Estimate {
        let (x, y) = (self.mean[i], self.mean[j]);
        let r = x / y;
        let var = (self.cov[i][i] - 2.0 * r * self.cov[i][j] + r * r * self.cov[j][j]) / (y * y);
        Estimate {
            value: r,
            std_error: (var.max(0.0) / self.n as f64).sqrt(),
        }
    }
}

/// Rejects window sequences whose successive differences change sign with
/// both differences significant at three standard errors.
fn check_monotone(label: &str, per_width: &[Vec<f64>]) -> Result<()> {
    let nw = per_width[0].len();
    if nw < 3 {
        return Ok(());
    }
    let diffs: Vec<Vec<f64>> = per_width
        .iter()
        .map(|r| (0..nw - 1).map(|i| r[i] - r[i + 1]).collect())
        .collect();
    let st = Stats::from_rows(&diffs);
    for i in 0..nw - 2 {
        let (a, b) = (st.mean[i], st.mean[i + 1]);
        let (sa, sb) = (st.se(i), st.se(i + 1));
        if a * b < 0.0 && a.abs() > 3.0 * sa && b.abs() > 3.0 * sb {
            return Err(Error::DivergentWindow(format!(
                "{label}: successive window differences {a:.3e} and {b:.3e} have opposite signs"
            )));
        }
    }
    Ok(())
}

pub(crate) fn monte_carlo(
    problem: &RateProblem,
    budget: &McBudget,
    mode: Eta0Mode,
    with_ha: bool,
) -> Result<RateReport> {
    budget.validate()?;
    let t = &problem.params;
    let a = problem.centroid_coefficient()?;
    let widths = problem.absolute_widths()?;
    let centroid_density =
        (t.mass() / (std::f64::consts::TAU * t.beta() * t.hbar().powi(2))).sqrt();
    let setup = Setup {
        problem,
        widths: widths.clone(),
        a,
        rpmd_scale: problem.prefactor() * centroid_density / a.abs(),
        ha_scale: problem.ha_prefactor() * centroid_density / a.abs(),
        mode,
        with_ha,
    };
    let per = budget.samples / budget.chains;
    let extra = budget.samples % budget.chains;
    let chains: Vec<ChainOut> = (0..budget.chains)
        .into_par_iter()
        .map(|i| {
            run_chain(
                &setup,
                per + usize::from(i < extra),
                mix_seed(budget.seed, i as u64),
            )
        })
        .collect::<Result<_>>()?;

    let nw = widths.len();
    let lambda = problem.window.intercept_weights();
    let diverged = chains.iter().any(|c| c.diverged);
    let max_log_weight = chains.iter().map(|c| c.max_log_weight).fold(0.0, f64::max);
    let rows_of = |pick: fn(&ChainOut) -> &Vec<f64>| -> Vec<Vec<f64>> {
        chains
            .iter()
            .flat_map(|c| pick(c).chunks(nw).map(<[f64]>::to_vec).collect::<Vec<_>>())
            .collect()
    };
    let rpmd_rows = rows_of(|c| &c.rpmd);
    check_monotone("rpmd", &rpmd_rows)?;
    let ha_rows = if with_ha && !diverged {
        let r = rows_of(|c| &c.ha);
        check_monotone("ha", &r)?;
        Some(r)
    } else {
        None
    };
    let intercept = |r: &Vec<f64>| r.iter().zip(&lambda).map(|(v, l)| v * l).sum::<f64>();
    let combined: Vec<Vec<f64>> = match &ha_rows {
        Some(h) => rpmd_rows
            .iter()
            .zip(h)
            .map(|(r, h)| vec![intercept(r), intercept(h)])
            .collect(),
        None => rpmd_rows.iter().map(|r| vec![intercept(r)]).collect(),
    };
    let st = Stats::from_rows(&combined);
    let by_window = |rows: &[Vec<f64>]| Stats::from_rows(rows).mean;
    let kza_rpmd = st.estimate(0);
    let (kza_ha, ratio) = if ha_rows.is_some() {
        (Some(st.estimate(1)), Some(st.ratio(1, 0)))
    } else {
        (None, None)
    };
    Ok(RateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        kza_rpmd,
        kza_ha,
        ratio_ha_over_rpmd: ratio,
        divergence_flag: diverged,
        metadata: EstimatorMetadata {
            backend: Backend::MonteCarlo(*budget),
            eta0_mode: mode,
            window_widths: problem.window.widths.clone(),
            sigma_f: problem.window.sigma_f.unwrap_or(problem.default_sigma_f()?),
            extrapolation: problem.window.extrapolation,
            rpmd_by_window: by_window(&rpmd_rows),
            ha_by_window: ha_rows.as_deref().map(by_window),
            evaluations: st.n,
            seed: Some(budget.seed),
            beads: t.beads(),
            beta: t.beta(),
            mass: t.mass(),
            hbar: t.hbar(),
            potential: problem.potential,
            surface: problem.surface,
            max_log_weight,
            log_weight_guard: problem.log_weight_guard,
        },
    })
}
