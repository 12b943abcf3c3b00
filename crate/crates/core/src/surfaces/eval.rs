use serde::{Deserialize, Serialize};

use super::spec::{SurfaceSpec, SurfaceVariant};
use crate::error::{Error, Result};
use crate::numeric::{unit_phase, CompensatedSum};
use crate::pathcore::{RingPath, ThermoParams};

/// Relative size below which the norm term counts as zero.
const SINGULAR_REL: f64 = 1e-12;

/// Result of evaluating `f` on one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValue {
    pub value: f64,
    /// `L_n` or `D_n`; zero for the centroid.
    pub norm_term: f64,
    /// The norm term vanishes and the gradient is undefined.
    pub singular: bool,
}

/// Which summation `g_P` is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GpForm {
    /// `sum_k (q_{k+1} - q_k) T_k`
    #[default]
    Link,
    /// `sum_k q_k (T_{k-1} - T_k)`
    Cyclic,
}

/// Intermediate sums shared by `f` and its gradient.
enum Parts {
    Centroid,
    Fourier {
        phi: f64,
        cos_tab: Vec<f64>,
        sin_tab: Vec<f64>,
        c_n: f64,
        s_n: f64,
        l_n: f64,
    },
    Quad {
        phi: f64,
        n: usize,
        r: f64,
        d_n: f64,
    },
}

struct Evaluated {
    sum: f64,
    parts: Parts,
    singular: bool,
}

fn evaluate(spec: &SurfaceSpec, path: &RingPath) -> Result<Evaluated> {
    let p = path.len();
    spec.check_structure(p)?;
    let q = path.beads();
    let sum = q.iter().copied().collect::<CompensatedSum>().value();
    let abs_scale: f64 = q.iter().map(|x| x.abs()).sum();
    let (parts, singular) = match spec.variant {
        SurfaceVariant::Centroid => (Parts::Centroid, false),
        SurfaceVariant::FourierNorm { n, phi } => {
            let mut cos_tab = Vec::with_capacity(p);
            let mut sin_tab = Vec::with_capacity(p);
            let mut c = CompensatedSum::new();
            let mut s = CompensatedSum::new();
            for (i, &x) in q.iter().enumerate() {
                let (cj, sj) = unit_phase(n as i64 * (i as i64 + 1), p);
                cos_tab.push(cj);
                sin_tab.push(sj);
                c.add(cj * x);
                s.add(sj * x);
            }
            let (c_n, s_n) = (c.value(), s.value());
            let l_n = c_n.hypot(s_n);
            let singular = l_n == 0.0 || l_n <= SINGULAR_REL * abs_scale;
            (
                Parts::Fourier {
                    phi,
                    cos_tab,
                    sin_tab,
                    c_n,
                    s_n,
                    l_n,
                },
                singular,
            )
        }
        SurfaceVariant::QuadDiff { n, phi, norm } => {
            let sq: CompensatedSum = (0..p)
                .map(|i| {
                    let d = q[i] - q[(i + n) % p];
                    d * d
                })
                .collect();
            let d_n = sq.value().max(0.0).sqrt();
            let singular = d_n == 0.0 || d_n <= SINGULAR_REL * abs_scale;
            (
                Parts::Quad {
                    phi,
                    n,
                    r: norm.value(n, p),
                    d_n,
                },
                singular,
            )
        }
    };
    Ok(Evaluated {
        sum,
        parts,
        singular,
    })
}

impl Evaluated {
    fn f_value(&self, p: usize) -> FValue {
        let pf = p as f64;
        let (value, norm_term) = match &self.parts {
            Parts::Centroid => (self.sum / pf, 0.0),
            Parts::Fourier { phi, l_n, .. } => (
                phi.cos() / pf * self.sum + std::f64::consts::SQRT_2 * phi.sin() / pf * l_n,
                *l_n,
            ),
            Parts::Quad { phi, r, d_n, .. } => {
                (phi.cos() / pf * self.sum + phi.sin() / r * d_n, *d_n)
            }
        };
        FValue {
            value,
            norm_term,
            singular: self.singular,
        }
    }

    fn gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        let p = q.len();
        let pf = p as f64;
        match &self.parts {
            Parts::Centroid => Ok(vec![1.0 / pf; p]),
            _ if self.singular => Err(Error::SingularSurface(match self.parts {
                Parts::Fourier { .. } => "Fourier norm L_n vanishes",
                _ => "difference norm D_n vanishes",
            })),
            Parts::Fourier {
                phi,
                cos_tab,
                sin_tab,
                c_n,
                s_n,
                l_n,
            } => {
                let base = phi.cos() / pf;
                let amp = std::f64::consts::SQRT_2 * phi.sin() / (pf * l_n);
                Ok((0..p)
                    .map(|k| base + amp * (cos_tab[k] * c_n + sin_tab[k] * s_n))
                    .collect())
            }
            Parts::Quad { phi, n, r, d_n } => {
                let base = phi.cos() / pf;
                let amp = phi.sin() / (r * d_n);
                Ok((0..p)
                    .map(|k| base + amp * (2.0 * q[k] - q[(k + n) % p] - q[(k + p - n % p) % p]))
                    .collect())
            }
        }
    }
}

fn sum_of_squares(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).collect::<CompensatedSum>().value()
}

/// Evaluates `f(q)`. A vanishing norm term is reported through
/// [`FValue::singular`]; the value itself is still returned.
pub fn f_eval(spec: &SurfaceSpec, path: &RingPath) -> Result<FValue> {
    Ok(evaluate(spec, path)?.f_value(path.len()))
}

pub fn grad_f(spec: &SurfaceSpec, path: &RingPath) -> Result<Vec<f64>> {
    evaluate(spec, path)?.gradient(path.beads())
}

/// `B_P = sum_k (df/dq_k)^2`.
pub fn b_p(spec: &SurfaceSpec, path: &RingPath) -> Result<f64> {
    Ok(sum_of_squares(&grad_f(spec, path)?))
}

/// `T_k = (df/dq_k) / sqrt(B_P)`.
pub fn t_vec(spec: &SurfaceSpec, path: &RingPath) -> Result<Vec<f64>> {
    Ok(SurfaceEval::geometry(spec, path)?.t_vec)
}

pub fn g_p(
    spec: &SurfaceSpec,
    path: &RingPath,
    params: &ThermoParams,
    form: GpForm,
) -> Result<f64> {
    SurfaceEval::new(spec, path, params)?.g_p_with(path, params, form)
}

/// `T_{k-1} - T_k` for a cyclic 1-based bead label `k`.
pub fn t_diff(spec: &SurfaceSpec, path: &RingPath, k: i64) -> Result<f64> {
    Ok(SurfaceEval::geometry(spec, path)?.t_diff(k))
}

/// `S = sum_k (df/dq_k) (T_{k-1} + 2 T_k + T_{k+1}) / 4`.
pub fn flux_sum(spec: &SurfaceSpec, path: &RingPath) -> Result<f64> {
    Ok(SurfaceEval::geometry(spec, path)?.flux_sum())
}

/// `(1/4) sum_k (df/dq_k) [(T_{k-1} - T_k) + (T_{k+1} - T_k)]`, i.e.
/// `S - sqrt(B_P)`.
pub fn sum_difference(spec: &SurfaceSpec, path: &RingPath) -> Result<f64> {
    Ok(SurfaceEval::geometry(spec, path)?.sum_difference())
}

/// All gradient-derived quantities for one path/surface pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEval {
    pub f_value: f64,
    pub gradient: Vec<f64>,
    pub b_p: f64,
    pub t_vec: Vec<f64>,
    /// Link form of `g_P`.
    pub g_p: f64,
}

impl SurfaceEval {
    pub fn new(spec: &SurfaceSpec, path: &RingPath, params: &ThermoParams) -> Result<Self> {
        path.check_len(params.beads())?;
        let mut e = Self::geometry(spec, path)?;
        e.g_p = e.g_p_with(path, params, GpForm::Link)?;
        Ok(e)
    }

    /// Everything except `g_P`, which is left at zero.
    fn geometry(spec: &SurfaceSpec, path: &RingPath) -> Result<Self> {
        let ev = evaluate(spec, path)?;
        let f_value = ev.f_value(path.len()).value;
        let gradient = ev.gradient(path.beads())?;
        let b_p = sum_of_squares(&gradient);
        if b_p.is_nan() || b_p <= 0.0 {
            return Err(Error::SingularSurface("gradient vanishes"));
        }
        let root = b_p.sqrt();
        let t_vec = gradient.iter().map(|g| g / root).collect();
        Ok(Self {
            f_value,
            gradient,
            b_p,
            t_vec,
            g_p: 0.0,
        })
    }

    pub fn beads(&self) -> usize {
        self.t_vec.len()
    }

    fn t(&self, label: i64) -> f64 {
        let p = self.t_vec.len() as i64;
        self.t_vec[(label - 1).rem_euclid(p) as usize]
    }

    /// `T_{k-1} - T_k`, cyclic 1-based `k`.
    pub fn t_diff(&self, k: i64) -> f64 {
        self.t(k - 1) - self.t(k)
    }

    /// `max_k |T_{k+1} - T_k|`.
    pub fn max_t_step(&self) -> f64 {
        let p = self.t_vec.len();
        (0..p)
            .map(|i| (self.t_vec[(i + 1) % p] - self.t_vec[i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn g_p_with(&self, path: &RingPath, params: &ThermoParams, form: GpForm) -> Result<f64> {
        let p = self.t_vec.len();
        path.check_len(p)?;
        params.with_beads(p)?;
        let q = path.beads();
        let t = &self.t_vec;
        let pref = params.mass() * p as f64 / (2.0 * params.beta() * params.hbar());
        let sum: CompensatedSum = match form {
            GpForm::Link => (0..p).map(|k| (q[(k + 1) % p] - q[k]) * t[k]).collect(),
            GpForm::Cyclic => (0..p).map(|k| q[k] * (t[(k + p - 1) % p] - t[k])).collect(),
        };
        Ok(pref * sum.value())
    }

    pub fn flux_sum(&self) -> f64 {
        let p = self.t_vec.len();
        let t = &self.t_vec;
        (0..p)
            .map(|k| self.gradient[k] * (t[(k + p - 1) % p] + 2.0 * t[k] + t[(k + 1) % p]) / 4.0)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn sum_difference(&self) -> f64 {
        let p = self.t_vec.len();
        let t = &self.t_vec;
        (0..p)
            .map(|k| {
                self.gradient[k] * ((t[(k + p - 1) % p] - t[k]) + (t[(k + 1) % p] - t[k])) / 4.0
            })
            .collect::<CompensatedSum>()
            .value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathcore::{sinusoidal_path, SinusoidalPathSpec};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn f_on_sinusoidal_path() {
        let path = sinusoidal_path(&SinusoidalPathSpec::new(1.0, 0.5, 3, 0.4), 16).unwrap();
        let f = f_eval(&SurfaceSpec::fourier_norm(3, FRAC_PI_6, 0.0), &path).unwrap();
        assert!(!f.singular);
        assert!(close(f.value, 1.1160254037844386, 1e-12), "{}", f.value);
    }

    #[test]
    fn constant_path_is_singular_but_evaluates() {
        let path = RingPath::constant(0.7, 8).unwrap();
        let spec = SurfaceSpec::fourier_norm(2, 0.3, 0.0);
        let f = f_eval(&spec, &path).unwrap();
        assert!(f.singular);
        assert!(close(f.value, 0.7 * 0.3f64.cos(), 1e-12));
        assert!(matches!(
            grad_f(&spec, &path),
            Err(Error::SingularSurface(_))
        ));
        let quad = SurfaceSpec::quad_diff(1, 0.3, 0.0);
        assert!(f_eval(&quad, &path).unwrap().singular);
        assert!(grad_f(&quad, &path).is_err());
    }

    #[test]
    fn centroid_quantities() {
        let path = RingPath::new(vec![0.3, -1.0, 2.0, 0.1, 0.5]).unwrap();
        let params = ThermoParams::natural(1.0, 5).unwrap();
        let e = SurfaceEval::new(&SurfaceSpec::centroid(0.0), &path, &params).unwrap();
        assert!(e.gradient.iter().all(|&g| g == 0.2));
        assert!(close(e.b_p, 0.2, 1e-15));
        assert!(e.t_vec.iter().all(|&t| close(t, 1.0 / 5f64.sqrt(), 1e-15)));
        assert!(e.g_p.abs() < 1e-14);
        assert!((1..=5).all(|k| e.t_diff(k) == 0.0));
    }

    #[test]
    fn sinusoidal_gradient_and_t() {
        let (p, n, alpha, phi) = (16usize, 3usize, 0.3, 0.9f64);
        let path = sinusoidal_path(&SinusoidalPathSpec::new(0.2, 1.3, n, alpha), p).unwrap();
        let e = SurfaceEval::new(
            &SurfaceSpec::fourier_norm(n, phi, 0.0),
            &path,
            &ThermoParams::natural(1.0, p).unwrap(),
        )
        .unwrap();
        for k in 1..=p {
            let th = 2.0 * PI * (n * k) as f64 / p as f64 + alpha;
            let g = phi.cos() / p as f64 + 2f64.sqrt() * phi.sin() / p as f64 * th.sin();
            assert!(close(e.gradient[k - 1], g, 1e-12));
            let t = (phi.cos() + 2f64.sqrt() * phi.sin() * th.sin()) / (p as f64).sqrt();
            assert!(close(e.t_vec[k - 1], t, 1e-12));
        }
        assert!(close(e.b_p, 1.0 / 16.0, 1e-13));
    }

    #[test]
    fn g_p_half_mode_value() {
        let path = sinusoidal_path(&SinusoidalPathSpec::new(0.0, 1.0, 8, FRAC_PI_4), 16).unwrap();
        let spec = SurfaceSpec::fourier_norm(8, 0.999 * PI / 2.0, 0.0);
        let params = ThermoParams::natural(1.0, 16).unwrap();
        let g = g_p(&spec, &path, &params, GpForm::Link).unwrap();
        let gc = g_p(&spec, &path, &params, GpForm::Cyclic).unwrap();
        assert!(close(g, gc, 1e-12));
        assert!(g < 0.0);
    }

    #[test]
    fn flux_sum_splits() {
        let path = RingPath::new(vec![0.3, -1.0, 2.0, 0.1, 0.5, 1.1]).unwrap();
        let spec = SurfaceSpec::quad_diff(2, 0.7, 0.0);
        let s = flux_sum(&spec, &path).unwrap();
        let b = b_p(&spec, &path).unwrap();
        let d = sum_difference(&spec, &path).unwrap();
        assert!(close(s, b.sqrt() + d, 1e-13));
    }

    #[test]
    fn length_mismatch() {
        let path = RingPath::new(vec![0.1, 0.2, 0.4]).unwrap();
        let params = ThermoParams::natural(1.0, 4).unwrap();
        assert!(matches!(
            SurfaceEval::new(&SurfaceSpec::centroid(0.0), &path, &params),
            Err(Error::BeadCountMismatch { .. })
        ));
    }
}
