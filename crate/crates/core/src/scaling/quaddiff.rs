use std::f64::consts::FRAC_PI_4;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{ScalingSeries, SeriesPoint};
use crate::error::{Error, Result};
use crate::numeric::Welford;
use crate::pathcore::{FreeRingSampler, RingPath, ThermoParams};
use crate::surfaces::{SurfaceEval, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadModeRule {
    One,
    /// `n = floor(P / 2)`
    HalfP,
}

impl QuadModeRule {
    pub fn mode(&self, p: usize) -> usize {
        match self {
            QuadModeRule::One => 1,
            QuadModeRule::HalfP => p / 2,
        }
    }
}

/// Thermal free-particle paths (exact internal-mode sampling, zero
/// centroid) at each bead count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalFamily {
    pub samples: usize,
    pub seed: u64,
    pub phi: f64,
    /// Fit residual in `ln` above which the sweep is flagged.
    pub residual_threshold: f64,
}

impl Default for ThermalFamily {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 1,
            phi: FRAC_PI_4,
            residual_threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffOrders {
    pub rule: QuadModeRule,
    pub b_p: ScalingSeries,
    pub t_diff: ScalingSeries,
    pub g_p: ScalingSeries,
    /// Standard errors of the three sample means, per `P`.
    pub std_errors: Vec<[f64; 3]>,
    pub insufficient_sampling: bool,
}

fn seed_for(seed: u64, p: usize) -> u64 {
    seed ^ (p as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn sample_point(
    rule: QuadModeRule,
    family: &ThermalFamily,
    params: &ThermoParams,
) -> Result<(usize, [Welford; 3])> {
    let p = params.beads();
    let n = rule.mode(p);
    let spec = SurfaceSpec::quad_diff(n, family.phi, 0.0);
    spec.check_structure(p)?;
    let sampler = FreeRingSampler::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(family.seed, p));
    let mut acc = [Welford::new(); 3];
    let mut buf = vec![0.0; p];
    let mut kept = 0usize;
    let mut tries = 0usize;
    while kept < family.samples {
        tries += 1;
        if tries > 2 * family.samples + 100 {
            return Err(Error::NonConvergence(format!(
                "too many singular thermal paths at P = {p}"
            )));
        }
        sampler.fill_centered(&mut rng, &mut buf);
        let path = RingPath::new(buf.clone())?;
        let e = match SurfaceEval::new(&spec, &path, params) {
            Ok(e) => e,
            Err(Error::SingularSurface(_)) => continue,
            Err(e) => return Err(e),
        };
        acc[0].push(e.b_p);
        acc[1].push(e.t_diff(1).abs());
        acc[2].push(e.g_p.abs());
        kept += 1;
    }
    Ok((n, acc))
}

/// Averages `B_P`, `|T_0 - T_1|` and `|g_P|` of the quadratic-difference
/// surface over thermal free paths at each `P` and fits their orders.
pub fn quaddiff_orders(
    rule: QuadModeRule,
    family: &ThermalFamily,
    p_list: &[usize],
    params: &ThermoParams,
) -> Result<QuadDiffOrders> {
    if family.samples < 2 {
        return Err(Error::invalid("samples", "need at least two samples per P"));
    }
    let per_p: Vec<(usize, usize, [Welford; 3])> = p_list
        .par_iter()
        .map(|&p| {
            let pp = params.with_beads(p)?;
            let (n, acc) = sample_point(rule, family, &pp)?;
            Ok((p, n, acc))
        })
        .collect::<Result<_>>()?;
    let column = |i: usize| {
        per_p
            .iter()
            .map(|(p, n, acc)| SeriesPoint {
                p: *p,
                n: *n,
                value: acc[i].mean(),
                closed_form: None,
            })
            .collect::<Vec<_>>()
    };
    let b_p = ScalingSeries::from_points("b_p", None, column(0))?;
    let t_diff = ScalingSeries::from_points("t_diff", None, column(1))?;
    let g_p = ScalingSeries::from_points("g_p", None, column(2))?;
    let std_errors = per_p
        .iter()
        .map(|(_, _, a)| [a[0].std_error(), a[1].std_error(), a[2].std_error()])
        .collect();
    let insufficient_sampling = [&b_p, &t_diff, &g_p]
        .iter()
        .any(|s| s.fit_residual > family.residual_threshold);
    Ok(QuadDiffOrders {
        rule,
        b_p,
        t_diff,
        g_p,
        std_errors,
        insufficient_sampling,
    })
}
