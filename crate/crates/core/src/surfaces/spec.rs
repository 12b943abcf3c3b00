use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default admissibility floor for `|cos phi|`.
pub const DEFAULT_PHI_FLOOR: f64 = 1e-3;

/// Normalization `R(n)` of the quadratic-difference surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadNorm {
    /// `R(n) = max(1, sqrt(2P) sin(pi n / P)) r0`: order one for `n = 1`,
    /// order `sqrt(P)` for `n ~ P/2`.
    Scaled {
        r0: f64,
    },
    Fixed {
        value: f64,
    },
}

impl Default for QuadNorm {
    fn default() -> Self {
        QuadNorm::Scaled { r0: 1.0 }
    }
}

impl QuadNorm {
    pub fn value(&self, n: usize, p: usize) -> f64 {
        match *self {
            QuadNorm::Scaled { r0 } => {
                let s = (std::f64::consts::PI * n as f64 / p as f64).sin();
                ((2.0 * p as f64).sqrt() * s).max(1.0) * r0
            }
            QuadNorm::Fixed { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceVariant {
    /// `f = (1/P) sum_j q_j`.
    Centroid,
    /// `f = (cos phi / P) sum_j q_j + (sqrt(2) sin phi / P) L_n(q)`, with
    /// `L_n` the magnitude of the n-th discrete Fourier component.
    FourierNorm { n: usize, phi: f64 },
    /// `f = (cos phi / P) sum_j q_j + (sin phi / R(n)) D_n(q)`, with
    /// `D_n = (sum_j (q_j - q_{j+n})^2)^{1/2}`.
    QuadDiff {
        n: usize,
        phi: f64,
        #[serde(default)]
        norm: QuadNorm,
    },
}

/// A dividing surface `f(q) = d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub variant: SurfaceVariant,
    #[serde(default)]
    pub d: f64,
}

impl SurfaceSpec {
    pub fn centroid(d: f64) -> Self {
        Self {
            variant: SurfaceVariant::Centroid,
            d,
        }
    }

    pub fn fourier_norm(n: usize, phi: f64, d: f64) -> Self {
        Self {
            variant: SurfaceVariant::FourierNorm { n, phi },
            d,
        }
    }

    pub fn quad_diff(n: usize, phi: f64, d: f64) -> Self {
        Self {
            variant: SurfaceVariant::QuadDiff {
                n,
                phi,
                norm: QuadNorm::default(),
            },
            d,
        }
    }

    /// Structural validity for a path of `p` beads: mode ranges and positive
    /// normalization. Does not apply the `phi` admissibility floor.
    pub fn check_structure(&self, p: usize) -> Result<()> {
        if !self.d.is_finite() {
            return Err(Error::invalid("surface.d", "must be finite"));
        }
        match self.variant {
            SurfaceVariant::Centroid => Ok(()),
            SurfaceVariant::FourierNorm { n, phi } => {
                if !phi.is_finite() {
                    return Err(Error::invalid("surface.phi", "must be finite"));
                }
                if n > p {
                    return Err(Error::invalid(
                        "surface.n",
                        format!("Fourier mode needs 0 <= n <= P = {p}, got {n}"),
                    ));
                }
                Ok(())
            }
            SurfaceVariant::QuadDiff { n, phi, norm } => {
                if !phi.is_finite() {
                    return Err(Error::invalid("surface.phi", "must be finite"));
                }
                if n == 0 || n >= p {
                    return Err(Error::invalid(
                        "surface.n",
                        format!(
                            "difference offset needs 1 <= n <= P - 1 = {}, got {n}",
                            p - 1
                        ),
                    ));
                }
                let r = norm.value(n, p);
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::invalid(
                        "surface.norm",
                        format!("normalization R(n) must be > 0, got {r}"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Structural validity plus `|cos phi| >= phi_floor`: a surface that
    /// (almost) ignores the centroid loses the average ring-polymer position.
    pub fn validate(&self, p: usize, phi_floor: f64) -> Result<()> {
        self.check_structure(p)?;
        if let Some(phi) = self.phi() {
            if phi.cos().abs() < phi_floor {
                return Err(Error::invalid(
                    "surface.phi",
                    format!(
                        "|cos phi| = {:.3e} is below the admissibility floor {phi_floor:.1e}",
                        phi.cos().abs()
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn phi(&self) -> Option<f64> {
        match self.variant {
            SurfaceVariant::Centroid => None,
            SurfaceVariant::FourierNorm { phi, .. } | SurfaceVariant::QuadDiff { phi, .. } => {
                Some(phi)
            }
        }
    }

    pub fn mode(&self) -> Option<usize> {
        match self.variant {
            SurfaceVariant::Centroid => None,
            SurfaceVariant::FourierNorm { n, .. } | SurfaceVariant::QuadDiff { n, .. } => Some(n),
        }
    }

    /// Coefficient `a` when `f(q) = a * centroid(q) + h(q - centroid)`, i.e.
    /// when the surface is linear in the centroid and its remaining part only
    /// sees the internal coordinates. `None` for Fourier modes `0` and `P`,
    /// whose norm is `P |centroid|`.
    pub fn centroid_coefficient(&self, p: usize) -> Option<f64> {
        match self.variant {
            SurfaceVariant::Centroid => Some(1.0),
            SurfaceVariant::FourierNorm { n, phi } => (n % p != 0).then(|| phi.cos()),
            SurfaceVariant::QuadDiff { phi, .. } => Some(phi.cos()),
        }
    }

    /// Same surface with a new mode index (no-op for the centroid).
    pub fn with_mode(&self, mode: usize) -> Self {
        let variant = match self.variant {
            SurfaceVariant::Centroid => SurfaceVariant::Centroid,
            SurfaceVariant::FourierNorm { phi, .. } => SurfaceVariant::FourierNorm { n: mode, phi },
            SurfaceVariant::QuadDiff { phi, norm, .. } => {
                SurfaceVariant::QuadDiff { n: mode, phi, norm }
            }
        };
        Self { variant, d: self.d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn mode_ranges() {
        assert!(SurfaceSpec::fourier_norm(0, 0.3, 0.0)
            .check_structure(8)
            .is_ok());
        assert!(SurfaceSpec::fourier_norm(8, 0.3, 0.0)
            .check_structure(8)
            .is_ok());
        assert!(SurfaceSpec::fourier_norm(9, 0.3, 0.0)
            .check_structure(8)
            .is_err());
        assert!(SurfaceSpec::quad_diff(0, 0.3, 0.0)
            .check_structure(8)
            .is_err());
        assert!(SurfaceSpec::quad_diff(8, 0.3, 0.0)
            .check_structure(8)
            .is_err());
        assert!(SurfaceSpec::quad_diff(7, 0.3, 0.0)
            .check_structure(8)
            .is_ok());
    }

    #[test]
    fn phi_floor() {
        let s = SurfaceSpec::fourier_norm(1, FRAC_PI_2, 0.0);
        assert!(s.validate(8, DEFAULT_PHI_FLOOR).is_err());
        assert!(s.validate(8, 0.0).is_ok());
        assert!(SurfaceSpec::fourier_norm(1, FRAC_PI_2 - 0.01, 0.0)
            .validate(8, DEFAULT_PHI_FLOOR)
            .is_ok());
    }

    #[test]
    fn quad_norm_orders() {
        let n = QuadNorm::default();
        assert_eq!(n.value(1, 1024), 1.0);
        let half = n.value(512, 1024);
        assert!((half - (2048.0f64).sqrt()).abs() < 1e-12);
        let bad = SurfaceSpec {
            variant: SurfaceVariant::QuadDiff {
                n: 1,
                phi: 0.3,
                norm: QuadNorm::Fixed { value: 0.0 },
            },
            d: 0.0,
        };
        assert!(bad.check_structure(8).is_err());
    }

    #[test]
    fn centroid_coefficient() {
        assert_eq!(
            SurfaceSpec::centroid(0.0).centroid_coefficient(4),
            Some(1.0)
        );
        assert_eq!(
            SurfaceSpec::fourier_norm(0, 0.2, 0.0).centroid_coefficient(4),
            None
        );
        assert_eq!(
            SurfaceSpec::fourier_norm(4, 0.2, 0.0).centroid_coefficient(4),
            None
        );
        assert_eq!(
            SurfaceSpec::fourier_norm(2, 0.2, 0.0).centroid_coefficient(4),
            Some(0.2f64.cos())
        );
    }
}
