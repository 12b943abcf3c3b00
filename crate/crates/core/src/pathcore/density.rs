use crate::error::Result;
use crate::numeric::order_free_sum;

use super::{PotentialModel, RingPath, ThermoParams};

/// Logarithm of the discretized diagonal density
///
/// `rho(q, 0) = (m P / 2 pi beta hbar^2)^{P/2} prod_k exp(-eps V(q_k) - m (q_k - q_{k+1})^2 / (2 eps hbar^2))`.
///
/// The per-bead exponents are summed in sorted order, so relabeling the beads
/// cyclically (or any permutation of the per-bead terms) reproduces the value
/// bit for bit.
pub fn log_rho_ring(path: &RingPath, params: &ThermoParams, pot: &PotentialModel) -> Result<f64> {
    let p = params.beads();
    path.check_len(p)?;
    let eps = params.epsilon();
    let half_spring = 0.5 * params.spring();
    let q = path.beads();
    let terms = (0..p)
        .map(|i| {
            let link = q[i] - q[(i + 1) % p];
            eps * pot.value(q[i]) + half_spring * link * link
        })
        .collect();
    let prefactor = 0.5 * p as f64 * (params.spring() / std::f64::consts::TAU).ln();
    Ok(prefactor - order_free_sum(terms))
}

/// Linear-domain weight; overflows to `inf` for large `P` (use [`log_rho_ring`]).
pub fn rho_ring(path: &RingPath, params: &ThermoParams, pot: &PotentialModel) -> Result<f64> {
    log_rho_ring(path, params, pot).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathcore::cyclic_shift;

    #[test]
    #[allow(clippy::approx_constant)]
    fn free_two_bead_constant_path() {
        let t = ThermoParams::natural(1.0, 2).unwrap();
        let q = RingPath::new(vec![0.5, 0.5]).unwrap();
        let r = rho_ring(&q, &t, &PotentialModel::Free).unwrap();
        assert!((r - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!((r - 0.318_309_9).abs() < 1e-7);
    }

    #[test]
    fn harmonic_zero_path() {
        let t = ThermoParams::natural(1.0, 4).unwrap();
        let q = RingPath::constant(0.0, 4).unwrap();
        let r = rho_ring(&q, &t, &PotentialModel::harmonic(1.0)).unwrap();
        let expect = (4.0 / std::f64::consts::TAU).powi(2);
        assert!((r - expect).abs() < 1e-15);
        assert!((r - 0.405_284_7).abs() < 1e-7);
    }

    #[test]
    fn hand_evaluated_three_bead_harmonic() {
        let t = ThermoParams::new(2.0, 1.5, 0.8, 3).unwrap();
        let q = RingPath::new(vec![0.1, -0.4, 0.3]).unwrap();
        let pot = PotentialModel::Harmonic {
            omega: 0.9,
            mass: 1.5,
        };
        let eps = 2.0 / 3.0;
        let mut expo = 0.0f64;
        let b = [0.1, -0.4, 0.3];
        for k in 0..3 {
            let v = 0.5 * 1.5 * 0.81 * b[k] * b[k];
            let l = b[k] - b[(k + 1) % 3];
            expo += -eps * v - 1.5 / (2.0 * eps * 0.64) * l * l;
        }
        let pre = (1.5 * 3.0 / (std::f64::consts::TAU * 2.0 * 0.64)).powf(1.5);
        let r = rho_ring(&q, &t, &pot).unwrap();
        assert!((r - pre * expo.exp()).abs() < 1e-14 * r);
    }

    #[test]
    fn log_domain_survives_large_p() {
        let t = ThermoParams::natural(1.0, 1000).unwrap();
        let q = RingPath::constant(0.0, 1000).unwrap();
        let lr = log_rho_ring(&q, &t, &PotentialModel::Free).unwrap();
        assert!(lr.is_finite());
        assert!(rho_ring(&q, &t, &PotentialModel::Free)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn shift_and_reflection_are_exact() {
        let t = ThermoParams::natural(1.3, 7).unwrap();
        let q = RingPath::new(vec![0.31, -0.72, 1.05, 0.2, -0.11, 0.64, -1.3]).unwrap();
        for pot in [
            PotentialModel::harmonic(1.1),
            PotentialModel::Eckart {
                height: 1.0,
                width: 0.5,
            },
            PotentialModel::DoubleWell {
                height: 0.7,
                minimum: 1.0,
            },
        ] {
            let base = log_rho_ring(&q, &t, &pot).unwrap();
            for s in 0..7 {
                let shifted = log_rho_ring(&cyclic_shift(&q, s), &t, &pot).unwrap();
                assert_eq!(base.to_bits(), shifted.to_bits());
            }
            let refl = log_rho_ring(&q.reflected(), &t, &pot).unwrap();
            assert_eq!(base.to_bits(), refl.to_bits());
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let t = ThermoParams::natural(1.0, 4).unwrap();
        let q = RingPath::constant(0.0, 3).unwrap();
        assert!(log_rho_ring(&q, &t, &PotentialModel::Free).is_err());
    }
}
