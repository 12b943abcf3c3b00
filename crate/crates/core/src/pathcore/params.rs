use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse temperature, mass, reduced Planck constant and bead count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    beta: f64,
    mass: f64,
    hbar: f64,
    beads: usize,
}

impl ThermoParams {
    pub fn new(beta: f64, mass: f64, hbar: f64, beads: usize) -> Result<Self> {
        positive("beta", beta)?;
        positive("mass", mass)?;
        positive("hbar", hbar)?;
        if beads < 2 {
            return Err(Error::invalid("beads", format!("need P >= 2, got {beads}")));
        }
        Ok(Self {
            beta,
            mass,
            hbar,
            beads,
        })
    }

    /// `m = hbar = 1`.
    pub fn natural(beta: f64, beads: usize) -> Result<Self> {
        Self::new(beta, 1.0, 1.0, beads)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn beads(&self) -> usize {
        self.beads
    }

    /// Imaginary-time step `beta / P`.
    pub fn epsilon(&self) -> f64 {
        self.beta / self.beads as f64
    }

    /// Same temperature and constants with a different bead count.
    pub fn with_beads(&self, beads: usize) -> Result<Self> {
        Self::new(self.beta, self.mass, self.hbar, beads)
    }

    /// Spring constant `m / (eps hbar^2)` of each ring-polymer link.
    pub fn spring(&self) -> f64 {
        self.mass / (self.epsilon() * self.hbar * self.hbar)
    }

    /// Free-particle thermal length `hbar sqrt(beta / m)`.
    pub fn thermal_length(&self) -> f64 {
        self.hbar * (self.beta / self.mass).sqrt()
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(ThermoParams::new(0.0, 1.0, 1.0, 4).is_err());
        assert!(ThermoParams::new(1.0, -1.0, 1.0, 4).is_err());
        assert!(ThermoParams::new(1.0, 1.0, f64::NAN, 4).is_err());
        assert!(ThermoParams::new(1.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn epsilon_times_p_is_beta() {
        for &beta in &[1.0, 0.5, 2.0, 8.0, 0.125, 3.0] {
            for p in [2usize, 4, 8, 16, 64, 1024] {
                let t = ThermoParams::natural(beta, p).unwrap();
                assert_eq!(t.epsilon() * p as f64, beta);
            }
        }
        for p in 2..300usize {
            let t = ThermoParams::natural(1.7, p).unwrap();
            let back = t.epsilon() * p as f64;
            assert!((back - 1.7).abs() <= 2.0 * f64::EPSILON * 1.7);
        }
    }
}
