use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A discretized cyclic imaginary-time path `q = (q_1, ..., q_P)`.
///
/// Bead label `j` (1-based, as in `q_j`) is stored at index `j - 1`. Labels
/// are cyclic: `q_0 = q_P` and `q_{P+1} = q_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingPath {
    beads: Vec<f64>,
}

impl RingPath {
    pub fn new(beads: Vec<f64>) -> Result<Self> {
        if beads.len() < 2 {
            return Err(Error::invalid(
                "beads",
                format!("a ring path needs P >= 2 beads, got {}", beads.len()),
            ));
        }
        Ok(Self { beads })
    }

    pub fn constant(value: f64, p: usize) -> Result<Self> {
        Self::new(vec![value; p])
    }

    pub fn len(&self) -> usize {
        self.beads.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn beads(&self) -> &[f64] {
        &self.beads
    }

    pub fn beads_mut(&mut self) -> &mut [f64] {
        &mut self.beads
    }

    pub fn into_beads(self) -> Vec<f64> {
        self.beads
    }

    /// Bead with 1-based cyclic label `label`.
    pub fn bead(&self, label: i64) -> f64 {
        self.beads[self.index(label)]
    }

    /// Storage index of the 1-based cyclic label.
    pub fn index(&self, label: i64) -> usize {
        (label - 1).rem_euclid(self.beads.len() as i64) as usize
    }

    pub fn centroid(&self) -> f64 {
        self.beads.iter().sum::<f64>() / self.beads.len() as f64
    }

    /// `q -> -q`.
    pub fn reflected(&self) -> Self {
        Self {
            beads: self.beads.iter().map(|x| -x).collect(),
        }
    }

    /// Every bead moved by `delta`.
    pub fn translated(&self, delta: f64) -> Self {
        Self {
            beads: self.beads.iter().map(|x| x + delta).collect(),
        }
    }

    /// Link differences `q_k - q_{k+1}` for labels `k = 1..P`.
    pub fn links(&self) -> impl Iterator<Item = f64> + '_ {
        let p = self.beads.len();
        (0..p).map(move |i| self.beads[i] - self.beads[(i + 1) % p])
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.beads.len() == expected {
            Ok(())
        } else {
            Err(Error::BeadCountMismatch {
                expected,
                got: self.beads.len(),
            })
        }
    }
}

/// Relabels the beads so that new bead `j` is old bead `j + s`.
pub fn cyclic_shift(path: &RingPath, s: i64) -> RingPath {
    let p = path.len();
    let beads = (0..p)
        .map(|i| path.beads[(i as i64 + s).rem_euclid(p as i64) as usize])
        .collect();
    RingPath { beads }
}

/// Parameters of the single-mode path `q_j = q0 + sqrt(2) A sin(2 pi n j / P + alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidalPathSpec {
    pub q0: f64,
    pub amplitude: f64,
    pub mode: usize,
    pub alpha: f64,
}

impl SinusoidalPathSpec {
    pub fn new(q0: f64, amplitude: f64, mode: usize, alpha: f64) -> Self {
        Self {
            q0,
            amplitude,
            mode,
            alpha,
        }
    }
}

pub fn sinusoidal_path(spec: &SinusoidalPathSpec, p: usize) -> Result<RingPath> {
    if spec.mode > p {
        return Err(Error::invalid(
            "mode",
            format!("mode n = {} exceeds bead count P = {p}", spec.mode),
        ));
    }
    let amp = std::f64::consts::SQRT_2 * spec.amplitude;
    let beads = (1..=p)
        .map(|j| {
            let r = ((spec.mode * j) % p) as f64;
            let angle = std::f64::consts::TAU * r / p as f64 + spec.alpha;
            spec.q0 + amp * angle.sin()
        })
        .collect();
    RingPath::new(beads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn shift_relabels_cyclically() {
        let q = RingPath::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(cyclic_shift(&q, 1).beads(), &[2.0, 3.0, 4.0, 1.0]);
        assert_eq!(cyclic_shift(&q, -1).beads(), &[4.0, 1.0, 2.0, 3.0]);
        assert_eq!(cyclic_shift(&q, 4), q);
        assert_eq!(q.bead(0), 4.0);
        assert_eq!(q.bead(5), 1.0);
    }

    #[test]
    fn shift_preserves_links_up_to_relabeling() {
        let q = RingPath::new(vec![0.3, -1.2, 2.5, 0.0, 0.7]).unwrap();
        let mut a: Vec<f64> = q.links().collect();
        let mut b: Vec<f64> = cyclic_shift(&q, 3).links().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn sinusoidal_degenerate_modes() {
        let q = sinusoidal_path(&SinusoidalPathSpec::new(0.0, 1.0, 0, 0.4), 6).unwrap();
        for &x in q.beads() {
            assert!((x - SQRT_2 * 0.4f64.sin()).abs() < 1e-15);
        }
        let q = sinusoidal_path(&SinusoidalPathSpec::new(1.0, 0.0, 3, 0.4), 6).unwrap();
        assert!(q.beads().iter().all(|&x| x == 1.0));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn sinusoidal_spot_values() {
        let q = sinusoidal_path(&SinusoidalPathSpec::new(0.0, 1.0, 2, 0.0), 8).unwrap();
        assert!(q.bead(2).abs() < 1e-15);
        assert!((q.bead(1) - 1.414_213_6).abs() < 1e-7);
    }

    #[test]
    fn sinusoidal_matches_formula_at_every_bead() {
        let spec = SinusoidalPathSpec::new(0.25, 0.8, 5, 0.3);
        let p = 12;
        let q = sinusoidal_path(&spec, p).unwrap();
        for j in 1..=p {
            let expect = 0.25
                + SQRT_2 * 0.8 * (std::f64::consts::TAU * 5.0 * j as f64 / p as f64 + 0.3).sin();
            assert!((q.bead(j as i64) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_paths() {
        assert!(RingPath::new(vec![1.0]).is_err());
        assert!(sinusoidal_path(&SinusoidalPathSpec::new(0.0, 1.0, 9, 0.0), 8).is_err());
    }
}
