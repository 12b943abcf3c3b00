//! Small numerical helpers shared across modules.

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sum of a multiset of terms that does not depend on their order: the terms
/// are sorted before a compensated summation, so any permutation of the input
/// gives a bit-identical result.
pub fn order_free_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().collect::<CompensatedSum>().value()
}

/// `cos(2 pi m / p)` and `sin(2 pi m / p)` with `m` reduced modulo `p` first,
/// so that large products `n * j` keep full accuracy.
pub fn unit_phase(m: i64, p: usize) -> (f64, f64) {
    let p_i = p as i64;
    let r = m.rem_euclid(p_i);
    let angle = std::f64::consts::TAU * r as f64 / p as f64;
    (angle.cos(), angle.sin())
}

/// SplitMix64 finalizer; derives well-separated child seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Running mean / variance accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_free_sum_is_permutation_invariant() {
        let a = vec![1e16, 1.0, -1e16, 3.25, 1e-8, 7.5];
        let mut b = a.clone();
        b.rotate_left(2);
        b.swap(0, 3);
        assert_eq!(order_free_sum(a).to_bits(), order_free_sum(b).to_bits());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = Welford::new();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Welford::new();
        let mut b = Welford::new();
        xs[..40].iter().for_each(|&x| a.push(x));
        xs[40..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean() - all.mean()).abs() < 1e-14);
        assert!((a.variance() - all.variance()).abs() < 1e-14);
    }

    #[test]
    fn unit_phase_reduces_argument() {
        let (c, s) = unit_phase(4096 * 3 + 1, 4096);
        let (c1, s1) = unit_phase(1, 4096);
        assert_eq!(c, c1);
        assert_eq!(s, s1);
    }
}
