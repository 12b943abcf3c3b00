//! Closed-form expressions for special surface/path pairs, used as oracles
//! for the generic gradient-based evaluation.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::numeric::{unit_phase, CompensatedSum};
use crate::pathcore::{RingPath, SinusoidalPathSpec, ThermoParams};

use super::spec::QuadNorm;

fn generic_mode(n: usize, p: usize) -> Result<()> {
    if n == 0 || n >= p || 2 * n == p {
        return Err(Error::invalid(
            "n",
            format!("closed form needs 1 <= n < P with 2n != P, got n = {n}, P = {p}"),
        ));
    }
    Ok(())
}

/// `theta_k = 2 pi n k / P + alpha` with the product reduced modulo `P`.
fn theta(path: &SinusoidalPathSpec, p: usize, k: i64) -> f64 {
    let r = (path.mode as i64 * k).rem_euclid(p as i64);
    2.0 * PI * r as f64 / p as f64 + path.alpha
}

/// Fourier-norm surface of mode `n` evaluated on a sinusoidal path of the
/// same mode. Requires `1 <= n < P`, `2n != P`.
#[derive(Debug, Clone, Copy)]
pub struct FourierSinusoidal {
    pub path: SinusoidalPathSpec,
    pub phi: f64,
    pub beads: usize,
}

impl FourierSinusoidal {
    pub fn new(path: SinusoidalPathSpec, phi: f64, beads: usize) -> Result<Self> {
        generic_mode(path.mode, beads)?;
        Ok(Self { path, phi, beads })
    }

    fn sign(&self) -> f64 {
        if self.path.amplitude < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// `L_n = |A| P / sqrt(2)`.
    pub fn l_n(&self) -> f64 {
        self.path.amplitude.abs() * self.beads as f64 / SQRT_2
    }

    /// `q0 cos(phi) + |A| sin(phi)`.
    pub fn f(&self) -> f64 {
        self.path.q0 * self.phi.cos() + self.path.amplitude.abs() * self.phi.sin()
    }

    /// `cos(phi)/P + (sqrt(2) sin(phi)/P) sin(theta_k)`.
    pub fn gradient(&self, k: i64) -> f64 {
        let p = self.beads as f64;
        self.phi.cos() / p
            + SQRT_2 * self.phi.sin() / p * self.sign() * theta(&self.path, self.beads, k).sin()
    }

    pub fn b_p(&self) -> f64 {
        1.0 / self.beads as f64
    }

    /// `T_{k-1} - T_k = sqrt(2/P) sin(phi) [-sin(2 pi n/P) cos(theta_k) - 2 sin^2(pi n/P) sin(theta_k)]`.
    pub fn t_diff(&self, k: i64) -> f64 {
        let p = self.beads as f64;
        let n = self.path.mode as f64;
        let th = theta(&self.path, self.beads, k);
        let half = (PI * n / p).sin();
        (2.0 / p).sqrt()
            * self.phi.sin()
            * self.sign()
            * (-(2.0 * PI * n / p).sin() * th.cos() - 2.0 * half * half * th.sin())
    }

    /// `-(m sin(phi) / beta hbar) |A| sin^2(pi n / P) P^{3/2}`.
    pub fn g_p(&self, params: &ThermoParams) -> f64 {
        let p = self.beads as f64;
        let half = (PI * self.path.mode as f64 / p).sin();
        -(params.mass() * self.phi.sin() / (params.beta() * params.hbar()))
            * self.path.amplitude.abs()
            * half
            * half
            * p.powf(1.5)
    }

    pub fn sum_difference(&self) -> f64 {
        fourier_sum_difference(self.path.mode, self.beads, self.phi)
    }
}

/// Path-independent value of `(1/4) sum_k f_k [(T_{k-1}-T_k) + (T_{k+1}-T_k)]`
/// for the Fourier-norm surface: `-sin^2(phi) sin^2(pi n / P) / sqrt(P)`.
pub fn fourier_sum_difference(n: usize, p: usize, phi: f64) -> f64 {
    let s = (PI * n as f64 / p as f64).sin();
    -phi.sin().powi(2) * s * s / (p as f64).sqrt()
}

/// `sum_j cos(2 pi n (k-j)/P) q_j` and `sum_j sin(2 pi n (k-j)/P) q_j`.
fn mode_projections(n: usize, path: &RingPath, k: i64) -> (f64, f64) {
    let p = path.len();
    let mut c = CompensatedSum::new();
    let mut s = CompensatedSum::new();
    for (i, &q) in path.beads().iter().enumerate() {
        let (cj, sj) = unit_phase(n as i64 * (k - 1 - i as i64), p);
        c.add(cj * q);
        s.add(sj * q);
    }
    (c.value(), s.value())
}

fn fourier_l_n(n: usize, path: &RingPath) -> f64 {
    let (c, s) = mode_projections(n, path, 0);
    c.hypot(s)
}

/// Fourier-norm `T_{k-1} - T_k` on an arbitrary path:
/// `sqrt(2/P) sin(phi)/L_n [sin(2 pi n/P) sum_j sin(..) q_j - 2 sin^2(pi n/P) sum_j cos(..) q_j]`.
pub fn fourier_t_diff_general(n: usize, phi: f64, path: &RingPath, k: i64) -> Result<f64> {
    let p = path.len();
    generic_mode(n, p)?;
    let pf = p as f64;
    let l = fourier_l_n(n, path);
    if l == 0.0 {
        return Err(Error::SingularSurface("Fourier norm L_n vanishes"));
    }
    let (c, s) = mode_projections(n, path, k);
    let half = (PI * n as f64 / pf).sin();
    Ok((2.0 / pf).sqrt() * phi.sin() / l
        * ((2.0 * PI * n as f64 / pf).sin() * s - 2.0 * half * half * c))
}

/// Fourier-norm `g_P` on an arbitrary path:
/// `-(m sin(phi)/beta hbar) sqrt(2P) sin^2(pi n/P) L_n`.
pub fn fourier_g_p_general(
    n: usize,
    phi: f64,
    path: &RingPath,
    params: &ThermoParams,
) -> Result<f64> {
    let p = path.len();
    generic_mode(n, p)?;
    let half = (PI * n as f64 / p as f64).sin();
    Ok(
        -(params.mass() * phi.sin() / (params.beta() * params.hbar()))
            * (2.0 * p as f64).sqrt()
            * half
            * half
            * fourier_l_n(n, path),
    )
}

/// Fourier-norm surface with `n = P/2` on an arbitrary path of even length:
/// here `L_{P/2} = |Q2 - Q1|` with `Q1`, `Q2` the sums over odd and even
/// bead labels, and the gradient alternates in sign.
#[derive(Debug, Clone, Copy)]
pub struct HalfMode {
    pub phi: f64,
    pub beads: usize,
    /// `Q1`: sum over odd labels.
    pub q_odd: f64,
    /// `Q2`: sum over even labels.
    pub q_even: f64,
}

impl HalfMode {
    pub fn new(phi: f64, path: &RingPath) -> Result<Self> {
        let p = path.len();
        if p % 2 != 0 {
            return Err(Error::invalid(
                "P",
                format!("half mode needs even P, got {p}"),
            ));
        }
        let q = path.beads();
        // index i holds label i + 1
        let q_odd = q
            .iter()
            .step_by(2)
            .copied()
            .collect::<CompensatedSum>()
            .value();
        let q_even = q
            .iter()
            .skip(1)
            .step_by(2)
            .copied()
            .collect::<CompensatedSum>()
            .value();
        Ok(Self {
            phi,
            beads: p,
            q_odd,
            q_even,
        })
    }

    fn weight(&self) -> f64 {
        let (c, s) = (self.phi.cos(), self.phi.sin());
        (c * c + 2.0 * s * s).sqrt()
    }

    /// `(cos^2 phi + 2 sin^2 phi) / P`.
    pub fn b_p(&self) -> f64 {
        self.weight().powi(2) / self.beads as f64
    }

    /// `|T_{k+1} - T_k| = 2 sqrt(2) |sin phi| / (sqrt(P) (cos^2 phi + 2 sin^2 phi)^{1/2})`.
    pub fn t_step(&self) -> f64 {
        2.0 * SQRT_2 * self.phi.sin().abs() / ((self.beads as f64).sqrt() * self.weight())
    }

    /// `-(m / beta hbar) sqrt(2 P) sin(phi) |Q2 - Q1| / (cos^2 phi + 2 sin^2 phi)^{1/2}`.
    pub fn g_p(&self, params: &ThermoParams) -> f64 {
        -(params.mass() / (params.beta() * params.hbar()))
            * (2.0 * self.beads as f64).sqrt()
            * self.phi.sin()
            * (self.q_even - self.q_odd).abs()
            / self.weight()
    }
}

/// Quadratic-difference expressions written out in bead differences.
#[derive(Debug, Clone)]
pub struct QuadDiffForms {
    n: usize,
    phi: f64,
    r: f64,
    d_n: f64,
    q: Vec<f64>,
}

impl QuadDiffForms {
    pub fn new(n: usize, phi: f64, norm: QuadNorm, path: &RingPath) -> Result<Self> {
        let p = path.len();
        if n == 0 || n >= p {
            return Err(Error::invalid(
                "n",
                format!("offset needs 1 <= n < P, got {n}"),
            ));
        }
        let q = path.beads().to_vec();
        let d2: f64 = (0..p).map(|j| (q[j] - q[(j + n) % p]).powi(2)).sum();
        if d2 == 0.0 {
            return Err(Error::SingularSurface("difference norm D_n vanishes"));
        }
        Ok(Self {
            n,
            phi,
            r: norm.value(n, p),
            d_n: d2.sqrt(),
            q,
        })
    }

    fn at(&self, label: i64) -> f64 {
        let p = self.q.len() as i64;
        self.q[(label - 1).rem_euclid(p) as usize]
    }

    fn curvature(&self, k: i64) -> f64 {
        let n = self.n as i64;
        2.0 * self.at(k) - self.at(k + n) - self.at(k - n)
    }

    /// `2(q_{k-1}-q_k) - (q_{k-1+n}-q_{k+n}) - (q_{k-1-n}-q_{k-n})`.
    fn bracket(&self, k: i64) -> f64 {
        let n = self.n as i64;
        2.0 * (self.at(k - 1) - self.at(k))
            - (self.at(k - 1 + n) - self.at(k + n))
            - (self.at(k - 1 - n) - self.at(k - n))
    }

    /// `cos^2 phi / P + sin^2 phi / (R^2 D^2) sum_k (2 q_k - q_{k+n} - q_{k-n})^2`.
    pub fn b_p(&self) -> f64 {
        let p = self.q.len();
        let s: f64 = (1..=p as i64).map(|k| self.curvature(k).powi(2)).sum();
        self.phi.cos().powi(2) / p as f64 + self.phi.sin().powi(2) / (self.r * self.d_n).powi(2) * s
    }

    pub fn t_diff(&self, k: i64) -> f64 {
        self.phi.sin() / (self.r * self.b_p().sqrt() * self.d_n) * self.bracket(k)
    }

    pub fn g_p(&self, params: &ThermoParams) -> f64 {
        let p = self.q.len();
        let s: f64 = (1..=p as i64).map(|k| self.at(k) * self.bracket(k)).sum();
        params.mass() * p as f64 * self.phi.sin()
            / (2.0 * params.beta() * params.hbar() * self.r * self.b_p().sqrt() * self.d_n)
            * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathcore::sinusoidal_path;
    use crate::surfaces::{GpForm, SurfaceEval, SurfaceSpec};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + b.abs())
    }

    #[test]
    fn sinusoidal_forms_match_generic() {
        for &(p, n, alpha, amp, phi) in &[
            (16usize, 4usize, 0.0, 1.0, 0.7),
            (16, 1, 0.0, 1.0, 0.7),
            (31, 5, 0.4, -0.8, 1.2),
            (64, 20, 1.1, 2.0, -0.4),
        ] {
            let sp = SinusoidalPathSpec::new(0.3, amp, n, alpha);
            let path = sinusoidal_path(&sp, p).unwrap();
            let params = ThermoParams::natural(1.3, p).unwrap();
            let spec = SurfaceSpec::fourier_norm(n, phi, 0.0);
            let e = SurfaceEval::new(&spec, &path, &params).unwrap();
            let c = FourierSinusoidal::new(sp, phi, p).unwrap();
            assert!(rel(e.f_value, c.f()) < 1e-12);
            assert!(rel(e.b_p, c.b_p()) < 1e-12);
            assert!(
                rel(e.g_p, c.g_p(&params)) < 1e-10,
                "{} {}",
                e.g_p,
                c.g_p(&params)
            );
            assert!(rel(e.sum_difference(), c.sum_difference()) < 1e-12);
            for k in 1..=p as i64 {
                assert!(rel(e.gradient[(k - 1) as usize], c.gradient(k)) < 1e-12);
                assert!(rel(e.t_diff(k), c.t_diff(k)) < 1e-10);
                assert!(
                    rel(
                        e.t_diff(k),
                        fourier_t_diff_general(n, phi, &path, k).unwrap()
                    ) < 1e-10
                );
            }
            assert!(rel(e.g_p, fourier_g_p_general(n, phi, &path, &params).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn t_diff_spot_values() {
        let sp = SinusoidalPathSpec::new(0.0, 1.0, 4, 0.0);
        let c = FourierSinusoidal::new(sp, FRAC_PI_2, 16).unwrap();
        assert!((c.t_diff(2).abs() - 0.125f64.sqrt()).abs() < 1e-14);
        let c1 = FourierSinusoidal::new(SinusoidalPathSpec::new(0.0, 1.0, 1, 0.0), FRAC_PI_2, 16)
            .unwrap();
        assert!((c1.t_diff(2).abs() - 0.114701).abs() < 1e-6);
    }

    #[test]
    fn g_p_minus_64() {
        let path = sinusoidal_path(&SinusoidalPathSpec::new(0.0, 1.0, 8, FRAC_PI_4), 16).unwrap();
        let params = ThermoParams::natural(1.0, 16).unwrap();
        let spec = SurfaceSpec::fourier_norm(8, FRAC_PI_2, 0.0);
        let g = SurfaceEval::new(&spec, &path, &params).unwrap().g_p;
        assert!((g + 64.0).abs() < 1e-10, "{g}");
        let h = HalfMode::new(FRAC_PI_2, &path).unwrap();
        assert!((h.g_p(&params) + 64.0).abs() < 1e-10);
    }

    #[test]
    fn half_mode_matches_generic() {
        let path = RingPath::new(vec![0.3, -1.0, 2.0, 0.1, 0.5, 1.1, -0.2, 0.0]).unwrap();
        let params = ThermoParams::natural(0.7, 8).unwrap();
        for &phi in &[FRAC_PI_4, 0.3, -1.0] {
            let spec = SurfaceSpec::fourier_norm(4, phi, 0.0);
            let e = SurfaceEval::new(&spec, &path, &params).unwrap();
            let h = HalfMode::new(phi, &path).unwrap();
            assert!(rel(e.b_p, h.b_p()) < 1e-13);
            assert!(rel(e.max_t_step(), h.t_step()) < 1e-12);
            assert!(rel(e.g_p, h.g_p(&params)) < 1e-12);
            assert!(
                rel(
                    e.g_p_with(&path, &params, GpForm::Cyclic).unwrap(),
                    h.g_p(&params)
                ) < 1e-12
            );
        }
        assert!((HalfMode::new(FRAC_PI_4, &path).unwrap().b_p() - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn quad_forms_match_generic() {
        let path = RingPath::new(vec![0.3, -1.0, 2.0, 0.1, 0.5, 1.1, -0.2]).unwrap();
        let params = ThermoParams::natural(2.0, 7).unwrap();
        for n in 1..7 {
            let spec = SurfaceSpec::quad_diff(n, 0.6, 0.0);
            let e = SurfaceEval::new(&spec, &path, &params).unwrap();
            let c = QuadDiffForms::new(n, 0.6, QuadNorm::default(), &path).unwrap();
            assert!(rel(e.b_p, c.b_p()) < 1e-13);
            assert!(rel(e.g_p, c.g_p(&params)) < 1e-11);
            for k in 1..=7 {
                assert!(rel(e.t_diff(k), c.t_diff(k)) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_special_modes() {
        let sp = SinusoidalPathSpec::new(0.0, 1.0, 8, 0.0);
        assert!(FourierSinusoidal::new(sp, 0.3, 16).is_err());
        assert!(HalfMode::new(0.3, &RingPath::new(vec![0.0, 1.0, 2.0]).unwrap()).is_err());
    }
}
