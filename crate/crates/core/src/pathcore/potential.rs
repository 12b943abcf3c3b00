use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-dimensional model potentials `V(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialModel {
    Free,
    /// `m omega^2 x^2 / 2`.
    Harmonic {
        omega: f64,
        mass: f64,
    },
    /// Symmetric Eckart barrier `V0 / cosh^2(x / a)`.
    Eckart {
        height: f64,
        width: f64,
    },
    /// `V0 (x^2 / q0^2 - 1)^2`, barrier of height `V0` at `x = 0`.
    DoubleWell {
        height: f64,
        minimum: f64,
    },
}

impl PotentialModel {
    pub fn harmonic(omega: f64) -> Self {
        PotentialModel::Harmonic { omega, mass: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, v: f64| {
            Err(Error::invalid(
                name,
                format!("must be finite and > 0, got {v}"),
            ))
        };
        match *self {
            PotentialModel::Free => Ok(()),
            PotentialModel::Harmonic { omega, mass } => {
                if !(omega.is_finite() && omega > 0.0) {
                    bad("potential.omega", omega)
                } else if !(mass.is_finite() && mass > 0.0) {
                    bad("potential.mass", mass)
                } else {
                    Ok(())
                }
            }
            PotentialModel::Eckart { height, width } => {
                if !height.is_finite() {
                    Err(Error::invalid("potential.height", "must be finite"))
                } else if !(width.is_finite() && width > 0.0) {
                    bad("potential.width", width)
                } else {
                    Ok(())
                }
            }
            PotentialModel::DoubleWell { height, minimum } => {
                if !height.is_finite() {
                    Err(Error::invalid("potential.height", "must be finite"))
                } else if !(minimum.is_finite() && minimum > 0.0) {
                    bad("potential.minimum", minimum)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PotentialModel::Free => 0.0,
            PotentialModel::Harmonic { omega, mass } => 0.5 * mass * omega * omega * x * x,
            PotentialModel::Eckart { height, width } => {
                let c = (x / width).cosh();
                height / (c * c)
            }
            PotentialModel::DoubleWell { height, minimum } => {
                let u = x * x / (minimum * minimum) - 1.0;
                height * u * u
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            PotentialModel::Free => 0.0,
            PotentialModel::Harmonic { omega, mass } => mass * omega * omega * x,
            PotentialModel::Eckart { height, width } => {
                let y = x / width;
                let c = y.cosh();
                -2.0 * height * y.tanh() / (width * c * c)
            }
            PotentialModel::DoubleWell { height, minimum } => {
                let m2 = minimum * minimum;
                let u = x * x / m2 - 1.0;
                4.0 * height * u * x / m2
            }
        }
    }

    /// True for `V(-x) = V(x)`; all current variants are even.
    pub fn is_even(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<PotentialModel> {
        vec![
            PotentialModel::Free,
            PotentialModel::Harmonic {
                omega: 1.3,
                mass: 0.7,
            },
            PotentialModel::Eckart {
                height: 2.0,
                width: 0.6,
            },
            PotentialModel::DoubleWell {
                height: 1.5,
                minimum: 0.9,
            },
        ]
    }

    #[test]
    fn derivative_matches_centered_differences() {
        let h = 1e-5;
        for pot in models() {
            let mut x = -3.0;
            while x <= 3.0 {
                let fd = (pot.value(x + h) - pot.value(x - h)) / (2.0 * h);
                let an = pot.derivative(x);
                let scale = an.abs().max(1e-3);
                assert!(
                    (fd - an).abs() / scale < 1e-6,
                    "{pot:?} at {x}: fd {fd} analytic {an}"
                );
                x += 0.173;
            }
        }
    }

    #[test]
    fn finite_everywhere_and_even() {
        for pot in models() {
            for &x in &[-1e6, -800.0, -1.0, 0.0, 0.5, 800.0, 1e6] {
                assert!(pot.value(x).is_finite() && pot.derivative(x).is_finite());
                assert_eq!(pot.value(x), pot.value(-x));
            }
        }
        let e = PotentialModel::Eckart {
            height: 1.0,
            width: 1.0,
        };
        assert_eq!(e.value(1e4), 0.0);
        assert!(e.derivative(1e4).is_finite());
    }

    #[test]
    fn validation() {
        assert!(PotentialModel::harmonic(0.0).validate().is_err());
        assert!(PotentialModel::Eckart {
            height: 1.0,
            width: 0.0
        }
        .validate()
        .is_err());
        for pot in models() {
            pot.validate().unwrap();
        }
    }
}
