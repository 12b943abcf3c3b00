use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use super::fit::fit_power_law;
use super::schedule::ModeSchedule;
use crate::error::{Error, Result};
use crate::output::{fmt_sig, CsvTable};
use crate::pathcore::{sinusoidal_path, RingPath, SinusoidalPathSpec, ThermoParams};
use crate::surfaces::closed::{fourier_sum_difference, FourierSinusoidal, HalfMode};
use crate::surfaces::{sum_difference, t_diff, SurfaceEval, SurfaceSpec};

/// Powers of two from 16 to 4096.
pub fn default_deterministic_sweep() -> Vec<usize> {
    (4..=12).map(|k| 1usize << k).collect()
}

/// Powers of two from 16 to 512.
pub fn default_stochastic_sweep() -> Vec<usize> {
    (4..=9).map(|k| 1usize << k).collect()
}

/// Sinusoidal path family `q_j = q0 + sqrt(2) A sin(2 pi n j / P + alpha)`
/// paired with the Fourier-norm surface of the same mode at angle `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPath {
    pub q0: f64,
    pub amplitude: f64,
    pub alpha: f64,
    pub phi: f64,
}

impl SweepPath {
    /// `q0 = 0, A = 1, alpha = 0, phi = pi/2`.
    pub fn tdiff_default() -> Self {
        Self {
            q0: 0.0,
            amplitude: 1.0,
            alpha: 0.0,
            phi: FRAC_PI_2,
        }
    }

    /// As [`SweepPath::tdiff_default`] but with `alpha = pi/4`, which keeps
    /// the `n = P/2` path away from the all-zero configuration.
    pub fn gp_default() -> Self {
        Self {
            alpha: FRAC_PI_4,
            ..Self::tdiff_default()
        }
    }

    fn build(&self, n: usize, p: usize) -> Result<(SinusoidalPathSpec, SurfaceSpec, RingPath)> {
        let sp = SinusoidalPathSpec::new(self.q0, self.amplitude, n, self.alpha);
        let path = sinusoidal_path(&sp, p)?;
        Ok((sp, SurfaceSpec::fourier_norm(n, self.phi, 0.0), path))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub p: usize,
    pub n: usize,
    /// Generic (gradient-based) value.
    pub value: f64,
    /// Independent closed-form value, when one exists.
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub quantity: String,
    pub schedule: Option<ModeSchedule>,
    pub points: Vec<SeriesPoint>,
    pub fitted_exponent: f64,
    pub fit_residual: f64,
    pub prefactor: f64,
}

impl ScalingSeries {
    pub fn from_points(
        quantity: impl Into<String>,
        schedule: Option<ModeSchedule>,
        points: Vec<SeriesPoint>,
    ) -> Result<Self> {
        if points.windows(2).any(|w| w[1].p <= w[0].p) {
            return Err(Error::invalid(
                "p_list",
                "bead counts must be strictly increasing",
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.p as f64).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
        let fit = fit_power_law(&xs, &ys)?;
        Ok(Self {
            quantity: quantity.into(),
            schedule,
            points,
            fitted_exponent: fit.exponent,
            fit_residual: fit.residual,
            prefactor: fit.prefactor,
        })
    }

    pub fn value_at(&self, p: usize) -> Option<f64> {
        self.points.iter().find(|x| x.p == p).map(|x| x.value)
    }

    /// Largest relative gap between generic and closed-form values.
    pub fn max_closed_form_gap(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|pt| {
                pt.closed_form.map(|c| {
                    if c == 0.0 {
                        pt.value.abs()
                    } else {
                        (pt.value - c).abs() / c.abs()
                    }
                })
            })
            .reduce(f64::max)
    }

    /// `|value|` strictly monotone (either direction) across the sweep.
    pub fn is_monotone(&self) -> bool {
        let v: Vec<f64> = self.points.iter().map(|p| p.value.abs()).collect();
        v.windows(2).all(|w| w[1] < w[0]) || v.windows(2).all(|w| w[1] > w[0])
    }
}

fn sweep<F>(schedule: &ModeSchedule, p_list: &[usize], mut point: F) -> Result<Vec<SeriesPoint>>
where
    F: FnMut(usize, usize) -> Result<SeriesPoint>,
{
    p_list
        .iter()
        .map(|&p| {
            let n = schedule.mode(p)?;
            point(n, p)
        })
        .collect()
}

/// `|T_{k-1} - T_k|` on the matching sinusoidal path at each `P`.
pub fn tdiff_series(
    schedule: ModeSchedule,
    k: i64,
    path: SweepPath,
    p_list: &[usize],
) -> Result<ScalingSeries> {
    let points = sweep(&schedule, p_list, |n, p| {
        let (sp, spec, q) = path.build(n, p)?;
        let value = t_diff(&spec, &q, k)?.abs();
        let closed_form = if 2 * n == p {
            Some(HalfMode::new(path.phi, &q)?.t_step())
        } else if n < p {
            Some(FourierSinusoidal::new(sp, path.phi, p)?.t_diff(k).abs())
        } else {
            None
        };
        Ok(SeriesPoint {
            p,
            n,
            value,
            closed_form,
        })
    })?;
    ScalingSeries::from_points("t_diff", Some(schedule), points)
}

/// `|g_P|` on the matching sinusoidal path at each `P`; `params` supplies
/// `beta`, `m` and `hbar`.
pub fn gp_series(
    schedule: ModeSchedule,
    path: SweepPath,
    p_list: &[usize],
    params: &ThermoParams,
) -> Result<ScalingSeries> {
    let points = sweep(&schedule, p_list, |n, p| {
        let (sp, spec, q) = path.build(n, p)?;
        let pp = params.with_beads(p)?;
        let value = SurfaceEval::new(&spec, &q, &pp)?.g_p.abs();
        let closed_form = if 2 * n == p {
            Some(HalfMode::new(path.phi, &q)?.g_p(&pp).abs())
        } else if n < p {
            Some(FourierSinusoidal::new(sp, path.phi, p)?.g_p(&pp).abs())
        } else {
            None
        };
        Ok(SeriesPoint {
            p,
            n,
            value,
            closed_form,
        })
    })?;
    ScalingSeries::from_points("g_p", Some(schedule), points)
}

/// Closed form of the sum difference for the Fourier-norm surface.
pub fn sum_difference_closed_form(n: usize, p: usize, phi: f64) -> f64 {
    fourier_sum_difference(n, p, phi)
}

/// Signed sum difference on the matching sinusoidal path at each `P`.
pub fn sum_difference_series(
    schedule: ModeSchedule,
    path: SweepPath,
    p_list: &[usize],
) -> Result<ScalingSeries> {
    let points = sweep(&schedule, p_list, |n, p| {
        let (_, spec, q) = path.build(n, p)?;
        let value = sum_difference(&spec, &q)?;
        let closed_form = (2 * n != p && n < p).then(|| fourier_sum_difference(n, p, path.phi));
        Ok(SeriesPoint {
            p,
            n,
            value,
            closed_form,
        })
    })?;
    ScalingSeries::from_points("sum_difference", Some(schedule), points)
}

/// The three T-difference series `n = 1`, `n = sqrt(P)`, `n = P/4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1 {
    pub k: i64,
    pub alpha: f64,
    pub series: Vec<ScalingSeries>,
}

pub fn figure1_emit(p_list: &[usize], k: i64, alpha: f64) -> Result<Figure1> {
    let path = SweepPath {
        alpha,
        ..SweepPath::tdiff_default()
    };
    let series = [
        ModeSchedule::Constant { n0: 1 },
        ModeSchedule::SqrtP,
        ModeSchedule::FracP { c: 0.25 },
    ]
    .into_iter()
    .map(|s| tdiff_series(s, k, path, p_list))
    .collect::<Result<_>>()?;
    Ok(Figure1 { k, alpha, series })
}

impl Figure1 {
    pub fn csv_table(&self) -> CsvTable {
        let mut t = CsvTable::new(["P", "schedule", "value", "log10P", "log10value"]);
        for s in &self.series {
            let label = s.schedule.map(|x| x.label()).unwrap_or_default();
            for pt in &s.points {
                t.push_row(vec![
                    pt.p.to_string(),
                    label.clone(),
                    fmt_sig(pt.value),
                    fmt_sig((pt.p as f64).log10()),
                    fmt_sig(pt.value.log10()),
                ]);
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_agree_everywhere() {
        let ps = default_deterministic_sweep();
        let params = ThermoParams::natural(1.0, 2).unwrap();
        for s in [
            ModeSchedule::Constant { n0: 1 },
            ModeSchedule::SqrtP,
            ModeSchedule::FracP { c: 0.25 },
            ModeSchedule::FracP { c: 0.5 },
        ] {
            let t = tdiff_series(s, 2, SweepPath::gp_default(), &ps).unwrap();
            assert!(t.max_closed_form_gap().unwrap() < 1e-10, "{s:?}");
            let g = gp_series(s, SweepPath::gp_default(), &ps, &params).unwrap();
            assert!(g.max_closed_form_gap().unwrap() < 1e-10, "{s:?}");
        }
    }

    #[test]
    fn gp_exponents() {
        let ps = default_deterministic_sweep();
        let params = ThermoParams::natural(1.0, 2).unwrap();
        let e = |s| {
            gp_series(s, SweepPath::gp_default(), &ps, &params)
                .unwrap()
                .fitted_exponent
        };
        assert!((e(ModeSchedule::Constant { n0: 1 }) + 0.5).abs() < 0.05);
        assert!((e(ModeSchedule::SqrtP) - 0.5).abs() < 0.05);
        let half = gp_series(
            ModeSchedule::FracP { c: 0.5 },
            SweepPath::gp_default(),
            &ps,
            &params,
        )
        .unwrap();
        assert!((half.fitted_exponent - 1.5).abs() < 1e-9);
        assert!((half.value_at(16).unwrap() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn sum_difference_values() {
        let s = sum_difference_series(
            ModeSchedule::Constant { n0: 3 },
            SweepPath::tdiff_default(),
            &[12, 24],
        )
        .unwrap();
        assert!((s.value_at(12).unwrap() + 0.5 / 12f64.sqrt()).abs() < 1e-12);
        let one = sum_difference_series(
            ModeSchedule::Constant { n0: 1 },
            SweepPath::tdiff_default(),
            &default_deterministic_sweep(),
        )
        .unwrap();
        assert!((one.fitted_exponent + 2.5).abs() < 0.1);
        assert!(one.max_closed_form_gap().unwrap() < 1e-10);
    }

    #[test]
    fn figure1_layout() {
        let f = figure1_emit(&default_deterministic_sweep(), 2, 0.0).unwrap();
        assert_eq!(f.series.len(), 3);
        assert!(f.series.iter().all(ScalingSeries::is_monotone));
        let csv = f.csv_table().render();
        assert!(csv.starts_with("P,schedule,value,log10P,log10value\n16,constant(1),"));
        assert_eq!(csv.lines().count(), 1 + 27);
    }

    #[test]
    fn rejects_unsorted_sweep() {
        assert!(tdiff_series(
            ModeSchedule::SqrtP,
            2,
            SweepPath::tdiff_default(),
            &[32, 16]
        )
        .is_err());
    }
}
