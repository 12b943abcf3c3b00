use rand::Rng;
use rand_distr::StandardNormal;

use super::{RingPath, ThermoParams};

/// Exact sampler for the internal (non-centroid) coordinates of the free
/// ring polymer.
///
/// Under the free-particle weight the `P` links `q_k - q_{k+1}` are i.i.d.
/// Gaussians of variance `eps hbar^2 / m` conditioned on summing to zero. A
/// discrete Brownian bridge draws exactly that, in `O(P)`.
#[derive(Debug, Clone)]
pub struct FreeRingSampler {
    beads: usize,
    link_sigma: f64,
}

impl FreeRingSampler {
    pub fn new(params: &ThermoParams) -> Self {
        Self {
            beads: params.beads(),
            link_sigma: params.spring().recip().sqrt(),
        }
    }

    pub fn beads(&self) -> usize {
        self.beads
    }

    /// Fills `out` with a free ring-polymer configuration whose centroid is 0.
    pub fn fill_centered<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        assert_eq!(out.len(), self.beads, "buffer length must equal P");
        let p = self.beads;
        let mut walk = 0.0;
        for x in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            walk += self.link_sigma * z;
            *x = walk;
        }
        let end = walk;
        let mut mean = 0.0;
        for (i, x) in out.iter_mut().enumerate() {
            *x -= end * (i + 1) as f64 / p as f64;
            mean += *x;
        }
        mean /= p as f64;
        for x in out.iter_mut() {
            *x -= mean;
        }
    }

    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> RingPath {
        let mut buf = vec![0.0; self.beads];
        self.fill_centered(rng, &mut buf);
        RingPath::new(buf).expect("P >= 2 is guaranteed by ThermoParams")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Welford;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn centroid_is_zero_and_links_have_bridge_variance() {
        let t = ThermoParams::natural(1.0, 8).unwrap();
        let s = FreeRingSampler::new(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut link2 = Welford::new();
        let mut opposite = Welford::new();
        for _ in 0..40_000 {
            let q = s.sample_centered(&mut rng);
            assert!(q.centroid().abs() < 1e-12);
            let per_path: f64 = q.links().map(|l| l * l).sum::<f64>() / 8.0;
            link2.push(per_path);
            let d = q.bead(1) - q.bead(5);
            opposite.push(d * d);
        }
        // Cyclic constraint: <link^2> = (1 - 1/P) eps hbar^2 / m.
        let expect = (1.0 - 1.0 / 8.0) * t.epsilon();
        assert!((link2.mean() - expect).abs() < 4.0 * link2.std_error());
        // Bridge at half period: beta hbar^2 / (4 m).
        assert!((opposite.mean() - 0.25).abs() < 4.0 * opposite.std_error());
    }
}
