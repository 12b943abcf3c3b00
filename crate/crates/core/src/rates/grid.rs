//! Tensor-product quadrature oracle for small `P`.
//!
//! Paths are parametrized as `q = c 1 + sum_m u_m e_m` with `e_m` the
//! orthonormal real Fourier modes orthogonal to the centroid direction; the
//! Jacobian is `sqrt(P)`. Each internal mode spans `+-u_extent` of its free
//! thermal width and the centroid grid is centred on the surface.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eta::{eta0_log_integral, ha_log_factor, Eta0Mode};
use super::problem::RateProblem;
use super::report::{Backend, Estimate, EstimatorMetadata, RateReport, REPORT_SCHEMA_VERSION};
use super::window::gaussian_window;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::pathcore::{log_rho_ring, RingPath};
use crate::surfaces::SurfaceEval;

pub const GRID_MAX_BEADS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Nodes per internal mode; odd counts are rounded up so that no node
    /// lands on the centroid axis.
    pub u_points: usize,
    /// Nodes along the centroid for each window.
    pub c_points: usize,
    /// Half-range of each internal mode in free thermal widths.
    pub u_extent: f64,
    /// Half-range of the centroid grid in window widths.
    pub c_extent: f64,
    /// Repeat on a grid with half the step and compare.
    pub refine: bool,
    /// Largest accepted relative change under refinement.
    pub tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            u_points: 42,
            c_points: 33,
            u_extent: 6.0,
            c_extent: 8.0,
            refine: true,
            tolerance: 0.01,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.u_points < 41 {
            return Err(Error::invalid(
                "grid.u_points",
                "at least 41 points per dimension",
            ));
        }
        if self.c_points < 3 {
            return Err(Error::invalid("grid.c_points", "at least 3 points"));
        }
        if self.u_extent.is_nan() || self.u_extent < 6.0 {
            return Err(Error::invalid(
                "grid.u_extent",
                "must cover at least 6 thermal widths",
            ));
        }
        if self.c_extent.is_nan() || self.c_extent <= 0.0 {
            return Err(Error::invalid("grid.c_extent", "must be > 0"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid("grid.tolerance", "must be > 0"));
        }
        Ok(())
    }

    fn u_nodes(&self) -> usize {
        self.u_points + self.u_points % 2
    }

    fn refined(&self) -> Self {
        Self {
            u_points: 2 * self.u_nodes(),
            c_points: 2 * self.c_points - 1,
            ..*self
        }
    }
}

/// Orthonormal internal modes and their cyclic-Laplacian eigenvalues.
fn internal_modes(p: usize) -> Vec<(Vec<f64>, f64)> {
    let pf = p as f64;
    let mut modes = Vec::with_capacity(p - 1);
    for m in 1..=p / 2 {
        let lambda = 4.0 * (std::f64::consts::PI * m as f64 / pf).sin().powi(2);
        let angle = |j: usize| std::f64::consts::TAU * (m * j % p) as f64 / pf;
        if 2 * m == p {
            modes.push(((0..p).map(|j| angle(j).cos() / pf.sqrt()).collect(), lambda));
        } else {
            let s = (2.0 / pf).sqrt();
            modes.push(((0..p).map(|j| s * angle(j).cos()).collect(), lambda));
            modes.push(((0..p).map(|j| s * angle(j).sin()).collect(), lambda));
        }
    }
    modes
}

/// Midpoint nodes; no node sits on the origin, where the norm-based
/// surfaces have their cone tip.
fn midpoint(n: usize, half: f64) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * half / n as f64;
    (
        (0..n).map(|i| -half + (i as f64 + 0.5) * h).collect(),
        vec![h; n],
    )
}

fn trapezoid(n: usize, half: f64) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * half / (n - 1) as f64;
    let x = (0..n).map(|i| -half + i as f64 * h).collect();
    let w = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    (x, w)
}

struct Pass {
    rpmd: Vec<f64>,
    ha: Vec<f64>,
    diverged: bool,
    max_log_weight: f64,
    nodes: usize,
}

#[derive(Default)]
struct Tile {
    rpmd: Vec<CompensatedSum>,
    ha: Vec<CompensatedSum>,
    diverged: bool,
    max_log_weight: f64,
    nodes: usize,
}

fn grid_pass(
    problem: &RateProblem,
    grid: &GridSpec,
    widths: &[f64],
    mode: Eta0Mode,
) -> Result<Pass> {
    let t = &problem.params;
    let p = t.beads();
    let a = problem.centroid_coefficient()?;
    let d = problem.surface.d;
    let modes = internal_modes(p);
    let axes: Vec<(Vec<f64>, Vec<f64>)> = modes
        .iter()
        .map(|(_, lambda)| {
            let sigma = (t.epsilon() * t.hbar().powi(2) / (t.mass() * lambda)).sqrt();
            midpoint(grid.u_nodes(), grid.u_extent * sigma)
        })
        .collect();
    let (c_nodes, c_weights) = trapezoid(grid.c_points, grid.c_extent);
    let jac = (p as f64).sqrt();
    let k_rpmd = problem.prefactor();
    let k_ha = problem.ha_prefactor();
    let nw = widths.len();
    let dims = modes.len();
    let nu = grid.u_nodes();
    let inner: usize = nu.pow((dims - 1) as u32);

    let tiles: Vec<Result<Tile>> = (0..nu)
        .into_par_iter()
        .map(|i0| {
            let mut tile = Tile {
                rpmd: vec![CompensatedSum::new(); nw],
                ha: vec![CompensatedSum::new(); nw],
                ..Tile::default()
            };
            let mut idx = vec![0usize; dims];
            idx[0] = i0;
            for flat in 0..inner {
                let mut rem = flat;
                let mut wu = axes[0].1[i0];
                for dim in 1..dims {
                    idx[dim] = rem % nu;
                    rem /= nu;
                    wu *= axes[dim].1[idx[dim]];
                }
                let mut xi = vec![0.0; p];
                for (dim, (e, _)) in modes.iter().enumerate() {
                    let u = axes[dim].0[idx[dim]];
                    for (x, ej) in xi.iter_mut().zip(e) {
                        *x += u * ej;
                    }
                }
                let base = RingPath::new(xi.clone())?;
                let e = match SurfaceEval::new(&problem.surface, &base, t) {
                    Ok(e) => e,
                    // measure-zero set
                    Err(Error::SingularSurface(_)) => continue,
                    Err(err) => return Err(err),
                };
                let sqrt_b = e.b_p.sqrt();
                let lw = ha_log_factor(e.g_p, t);
                tile.max_log_weight = tile.max_log_weight.max(lw);
                let ha_amp = if lw > problem.log_weight_guard {
                    tile.diverged = true;
                    None
                } else {
                    Some(e.flux_sum() * eta0_log_integral(e.g_p, t, mode)?.exp())
                };
                let c_star = (d - e.f_value) / a;
                for (iw, &w) in widths.iter().enumerate() {
                    let sc = w / a.abs();
                    for (s, ws) in c_nodes.iter().zip(&c_weights) {
                        let c = c_star + sc * s;
                        let q = RingPath::new(xi.iter().map(|x| x + c).collect())?;
                        let rho = log_rho_ring(&q, t, &problem.potential)?.exp();
                        let delta = gaussian_window(a * c + e.f_value - d, w);
                        let weight = jac * wu * ws * sc * rho * delta;
                        tile.rpmd[iw].add(weight * k_rpmd * sqrt_b);
                        if let Some(h) = ha_amp {
                            tile.ha[iw].add(weight * k_ha * h);
                        }
                        tile.nodes += 1;
                    }
                }
            }
            Ok(tile)
        })
        .collect();
    let mut rpmd = vec![CompensatedSum::new(); nw];
    let mut ha = vec![CompensatedSum::new(); nw];
    let mut pass = Pass {
        rpmd: Vec::new(),
        ha: Vec::new(),
        diverged: false,
        max_log_weight: 0.0,
        nodes: 0,
    };
    for tile in tiles {
        let tile = tile?;
        for i in 0..nw {
            rpmd[i].add(tile.rpmd[i].value());
            ha[i].add(tile.ha[i].value());
        }
        pass.diverged |= tile.diverged;
        pass.max_log_weight = pass.max_log_weight.max(tile.max_log_weight);
        pass.nodes += tile.nodes;
    }
    pass.rpmd = rpmd.iter().map(CompensatedSum::value).collect();
    pass.ha = ha.iter().map(CompensatedSum::value).collect();
    Ok(pass)
}

fn extrapolate(lambda: &[f64], values: &[f64]) -> f64 {
    lambda.iter().zip(values).map(|(l, v)| l * v).sum()
}

fn rel_change(new: f64, old: f64) -> f64 {
    if new == old {
        0.0
    } else {
        (new - old).abs() / new.abs().max(old.abs())
    }
}

pub(crate) fn grid_oracle(
    problem: &RateProblem,
    grid: &GridSpec,
    mode: Eta0Mode,
) -> Result<RateReport> {
    grid.validate()?;
    let p = problem.params.beads();
    if p > GRID_MAX_BEADS {
        return Err(Error::invalid(
            "beads",
            format!("grid quadrature supports P <= {GRID_MAX_BEADS}, got {p}"),
        ));
    }
    let widths = problem.absolute_widths()?;
    let lambda = problem.window.intercept_weights();
    let coarse = grid_pass(problem, grid, &widths, mode)?;
    let mut fine_nodes = 0;
    let (pass, rpmd_change, ha_change) = if grid.refine {
        let fine = grid_pass(problem, &grid.refined(), &widths, mode)?;
        let rc = rel_change(
            extrapolate(&lambda, &fine.rpmd),
            extrapolate(&lambda, &coarse.rpmd),
        );
        let hc = rel_change(
            extrapolate(&lambda, &fine.ha),
            extrapolate(&lambda, &coarse.ha),
        );
        fine_nodes = fine.nodes;
        (fine, rc, hc)
    } else {
        (coarse, 0.0, 0.0)
    };
    let worst = if pass.diverged {
        rpmd_change
    } else {
        rpmd_change.max(ha_change)
    };
    if worst > grid.tolerance {
        return Err(Error::GridNotConverged {
            change: worst,
            limit: grid.tolerance,
        });
    }
    let rpmd = extrapolate(&lambda, &pass.rpmd);
    let kza_rpmd = Estimate {
        value: rpmd,
        std_error: rpmd_change * rpmd.abs(),
    };
    let (kza_ha, ratio) = if pass.diverged {
        (None, None)
    } else {
        let ha = extrapolate(&lambda, &pass.ha);
        let r = ha / rpmd;
        (
            Some(Estimate {
                value: ha,
                std_error: ha_change * ha.abs(),
            }),
            Some(Estimate {
                value: r,
                std_error: r.abs() * rpmd_change.hypot(ha_change),
            }),
        )
    };
    let t = &problem.params;
    Ok(RateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        kza_rpmd,
        kza_ha,
        ratio_ha_over_rpmd: ratio,
        divergence_flag: pass.diverged,
        metadata: EstimatorMetadata {
            backend: Backend::Grid(*grid),
            eta0_mode: mode,
            window_widths: problem.window.widths.clone(),
            sigma_f: problem.window.sigma_f.unwrap_or(problem.default_sigma_f()?),
            extrapolation: problem.window.extrapolation,
            rpmd_by_window: pass.rpmd.clone(),
            ha_by_window: (!pass.diverged).then(|| pass.ha.clone()),
            evaluations: if grid.refine { fine_nodes } else { pass.nodes },
            seed: None,
            beads: p,
            beta: t.beta(),
            mass: t.mass(),
            hbar: t.hbar(),
            potential: problem.potential,
            surface: problem.surface,
            max_log_weight: pass.max_log_weight,
            log_weight_guard: problem.log_weight_guard,
        },
    })
}

/// Which theory a single oracle value is requested for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theory {
    Ha,
    Rpmd,
}

/// Grid estimate of one theory; the standard error is the refinement change.
pub fn grid_oracle_rate(
    which: Theory,
    problem: &RateProblem,
    grid: &GridSpec,
    mode: Eta0Mode,
) -> Result<Estimate> {
    problem.validate()?;
    let r = grid_oracle(problem, grid, mode)?;
    match which {
        Theory::Rpmd => Ok(r.kza_rpmd),
        Theory::Ha => r.kza_ha.ok_or_else(|| {
            Error::NonConvergence("HA weight exceeds the overflow guard on the grid".into())
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_orthonormal() {
        for p in 2..=4 {
            let m = internal_modes(p);
            assert_eq!(m.len(), p - 1);
            for (i, (a, _)) in m.iter().enumerate() {
                assert!(a.iter().sum::<f64>().abs() < 1e-14);
                for (j, (b, _)) in m.iter().enumerate() {
                    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-14);
                }
            }
        }
    }
}
