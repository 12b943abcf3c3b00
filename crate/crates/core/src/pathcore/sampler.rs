use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{PotentialModel, RingPath, ThermoParams};

/// Metropolis move settings. Step sizes are starting values; they are tuned
/// toward `target_acceptance` during burn-in and stay fixed afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveConfig {
    pub bead_step: f64,
    pub translate_step: f64,
    pub burn_in: usize,
    pub thin: usize,
    pub samples: usize,
    pub tune_interval: usize,
    pub target_acceptance: f64,
    /// Upper bound for either step size; a move still accepted > 95% of the
    /// time at this size explores a flat direction and is not an error.
    pub max_step: f64,
}

impl MoveConfig {
    pub fn for_params(params: &ThermoParams) -> Self {
        let link = params.spring().recip().sqrt();
        let thermal = params.thermal_length();
        Self {
            bead_step: link,
            translate_step: 0.5 * thermal,
            burn_in: 2_000,
            thin: 5,
            samples: 2_000,
            tune_interval: 50,
            target_acceptance: 0.4,
            max_step: 20.0 * thermal,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("move.bead_step", self.bead_step),
            ("move.translate_step", self.translate_step),
            ("move.max_step", self.max_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if !(self.target_acceptance > 0.05 && self.target_acceptance < 0.95) {
            return Err(Error::invalid(
                "move.target_acceptance",
                "must lie inside (0.05, 0.95)",
            ));
        }
        if self.thin == 0 || self.tune_interval == 0 {
            return Err(Error::invalid(
                "move.thin",
                "thin and tune_interval must be >= 1",
            ));
        }
        if self.burn_in < self.tune_interval {
            return Err(Error::invalid(
                "move.burn_in",
                "burn-in must cover at least one tuning interval",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MoveCounter {
    pub attempted: u64,
    pub accepted: u64,
}

impl MoveCounter {
    pub fn rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }

    fn record(&mut self, accepted: bool) {
        self.attempted += 1;
        self.accepted += accepted as u64;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceStats {
    pub bead: MoveCounter,
    pub translate: MoveCounter,
    pub bead_step: f64,
    pub translate_step: f64,
}

/// Metropolis chain targeting `rho(q, 0)` with single-bead displacements and
/// whole-path translations.
#[derive(Debug, Clone)]
pub struct MetropolisSampler {
    params: ThermoParams,
    pot: PotentialModel,
    config: MoveConfig,
    rng: ChaCha8Rng,
    beads: Vec<f64>,
    stats: AcceptanceStats,
}

impl MetropolisSampler {
    pub fn new(
        params: ThermoParams,
        pot: PotentialModel,
        config: MoveConfig,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        pot.validate()?;
        Ok(Self {
            params,
            pot,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            beads: vec![0.0; params.beads()],
            stats: AcceptanceStats {
                bead_step: config.bead_step,
                translate_step: config.translate_step,
                ..Default::default()
            },
        })
    }

    pub fn stats(&self) -> &AcceptanceStats {
        &self.stats
    }

    pub fn current(&self) -> RingPath {
        RingPath::new(self.beads.clone()).expect("P >= 2")
    }

    /// `P` single-bead attempts followed by one translation attempt.
    pub fn sweep(&mut self) {
        let p = self.beads.len();
        let eps = self.params.epsilon();
        let half_spring = 0.5 * self.params.spring();
        for _ in 0..p {
            let i = self.rng.random_range(0..p);
            let old = self.beads[i];
            let new = old + self.stats.bead_step * (2.0 * self.rng.random::<f64>() - 1.0);
            let prev = self.beads[(i + p - 1) % p];
            let next = self.beads[(i + 1) % p];
            let spring = |x: f64| (x - prev).powi(2) + (x - next).powi(2);
            let delta = -eps * (self.pot.value(new) - self.pot.value(old))
                - half_spring * (spring(new) - spring(old));
            let accept = delta >= 0.0 || self.rng.random::<f64>() < delta.exp();
            if accept {
                self.beads[i] = new;
            }
            self.stats.bead.record(accept);
        }
        let shift = self.stats.translate_step * (2.0 * self.rng.random::<f64>() - 1.0);
        let delta: f64 = -eps
            * self
                .beads
                .iter()
                .map(|&x| self.pot.value(x + shift) - self.pot.value(x))
                .sum::<f64>();
        let accept = delta >= 0.0 || self.rng.random::<f64>() < delta.exp();
        if accept {
            self.beads.iter_mut().for_each(|x| *x += shift);
        }
        self.stats.translate.record(accept);
    }

    /// Runs the burn-in with step-size tuning, then checks the acceptance of
    /// the final tuning interval against `[0.05, 0.95]`.
    pub fn burn_in(&mut self) -> Result<AcceptanceStats> {
        let cfg = self.config;
        let intervals = cfg.burn_in / cfg.tune_interval;
        let mut last = AcceptanceStats::default();
        for _ in 0..intervals {
            let before = self.stats;
            for _ in 0..cfg.tune_interval {
                self.sweep();
            }
            let bead = delta_counter(&before.bead, &self.stats.bead);
            let translate = delta_counter(&before.translate, &self.stats.translate);
            last = AcceptanceStats {
                bead,
                translate,
                bead_step: self.stats.bead_step,
                translate_step: self.stats.translate_step,
            };
            self.stats.bead_step = retune(self.stats.bead_step, bead.rate(), &cfg);
            self.stats.translate_step = retune(self.stats.translate_step, translate.rate(), &cfg);
        }
        check_acceptance("single-bead", last.bead.rate(), last.bead_step, &cfg)?;
        check_acceptance(
            "translation",
            last.translate.rate(),
            last.translate_step,
            &cfg,
        )?;
        self.stats.bead = MoveCounter::default();
        self.stats.translate = MoveCounter::default();
        Ok(last)
    }

    /// Advances `thin` sweeps and returns the resulting path.
    pub fn next_sample(&mut self) -> RingPath {
        for _ in 0..self.config.thin {
            self.sweep();
        }
        self.current()
    }
}

fn delta_counter(before: &MoveCounter, after: &MoveCounter) -> MoveCounter {
    MoveCounter {
        attempted: after.attempted - before.attempted,
        accepted: after.accepted - before.accepted,
    }
}

fn retune(step: f64, rate: f64, cfg: &MoveConfig) -> f64 {
    let factor = ((rate + 0.01) / cfg.target_acceptance).clamp(0.5, 2.0);
    (step * factor).min(cfg.max_step)
}

fn check_acceptance(name: &str, rate: f64, step: f64, cfg: &MoveConfig) -> Result<()> {
    let flat = rate > 0.95 && step >= cfg.max_step;
    if (0.05..=0.95).contains(&rate) || flat {
        Ok(())
    } else {
        Err(Error::NonConvergence(format!(
            "{name} acceptance {rate:.3} outside [0.05, 0.95] after tuning (step {step:.3e})"
        )))
    }
}

/// Samples of one Metropolis chain, yielded after burn-in.
#[derive(Debug, Clone)]
pub struct PathChain {
    sampler: MetropolisSampler,
    burn_in: AcceptanceStats,
    remaining: usize,
}

impl PathChain {
    pub fn burn_in_stats(&self) -> &AcceptanceStats {
        &self.burn_in
    }

    /// Acceptance counters of the production phase so far.
    pub fn stats(&self) -> &AcceptanceStats {
        self.sampler.stats()
    }
}

impl Iterator for PathChain {
    type Item = RingPath;

    fn next(&mut self) -> Option<RingPath> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.sampler.next_sample())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// A burned-in Metropolis chain of `config.samples` paths weighted by
/// `rho(q, 0)`, fully determined by `seed`.
pub fn sample_paths(
    params: &ThermoParams,
    pot: &PotentialModel,
    config: &MoveConfig,
    seed: u64,
) -> Result<PathChain> {
    let mut sampler = MetropolisSampler::new(*params, *pot, *config, seed)?;
    let burn_in = sampler.burn_in()?;
    Ok(PathChain {
        sampler,
        burn_in,
        remaining: config.samples,
    })
}

/// Independent chains, one per seed, run concurrently and returned in seed
/// order.
pub fn sample_chains(
    params: &ThermoParams,
    pot: &PotentialModel,
    config: &MoveConfig,
    seeds: &[u64],
) -> Result<Vec<Vec<RingPath>>> {
    let mut ordered: Vec<u64> = seeds.to_vec();
    ordered.sort_unstable();
    ordered
        .par_iter()
        .map(|&s| sample_paths(params, pot, config, s).map(|c| c.collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Welford;

    fn batch_mean(values: &[f64], batches: usize) -> Welford {
        let size = values.len() / batches;
        let mut w = Welford::new();
        for b in values.chunks_exact(size) {
            w.push(b.iter().sum::<f64>() / size as f64);
        }
        w
    }

    #[test]
    fn seeds_reproduce_chains() {
        let t = ThermoParams::natural(1.0, 6).unwrap();
        let mut cfg = MoveConfig::for_params(&t);
        cfg.burn_in = 200;
        cfg.samples = 50;
        let pot = PotentialModel::harmonic(1.0);
        let a: Vec<RingPath> = sample_paths(&t, &pot, &cfg, 11).unwrap().collect();
        let b: Vec<RingPath> = sample_paths(&t, &pot, &cfg, 11).unwrap().collect();
        let c: Vec<RingPath> = sample_paths(&t, &pot, &cfg, 12).unwrap().collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn chains_are_merged_in_seed_order() {
        let t = ThermoParams::natural(1.0, 4).unwrap();
        let mut cfg = MoveConfig::for_params(&t);
        cfg.burn_in = 100;
        cfg.samples = 10;
        let pot = PotentialModel::harmonic(1.0);
        let x = sample_chains(&t, &pot, &cfg, &[5, 2, 9]).unwrap();
        let y = sample_chains(&t, &pot, &cfg, &[9, 5, 2]).unwrap();
        assert_eq!(x, y);
        let two: Vec<RingPath> = sample_paths(&t, &pot, &cfg, 2).unwrap().collect();
        assert_eq!(x[0], two);
    }

    #[test]
    fn free_particle_link_statistics() {
        let p = 8;
        let t = ThermoParams::natural(1.0, p).unwrap();
        let mut cfg = MoveConfig::for_params(&t);
        cfg.samples = 20_000;
        cfg.thin = 2;
        let chain = sample_paths(&t, &PotentialModel::Free, &cfg, 7).unwrap();
        let per_path: Vec<f64> = chain
            .map(|q| q.links().map(|l| l * l).sum::<f64>() / p as f64)
            .collect();
        let w = batch_mean(&per_path, 40);
        // Exact for the cyclic chain: (1 - 1/P) eps hbar^2 / m.
        let expect = (1.0 - 1.0 / p as f64) * t.epsilon();
        assert!(
            (w.mean() - expect).abs() < 3.0 * w.std_error(),
            "mean {} expected {} se {}",
            w.mean(),
            expect,
            w.std_error()
        );
    }

    /// Centroid variance of the harmonic ring polymer at P = 3, against a
    /// tensor-grid quadrature of `rho(q, 0)`.
    #[test]
    fn harmonic_centroid_variance_matches_grid_quadrature() {
        let t = ThermoParams::natural(1.0, 3).unwrap();
        let pot = PotentialModel::harmonic(1.0);

        let n = 81;
        let lim = 6.0;
        let h = 2.0 * lim / (n - 1) as f64;
        let mut z = 0.0;
        let mut c2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let q = [
                        -lim + i as f64 * h,
                        -lim + j as f64 * h,
                        -lim + k as f64 * h,
                    ];
                    let path = RingPath::new(q.to_vec()).unwrap();
                    let w = crate::pathcore::rho_ring(&path, &t, &pot).unwrap();
                    let c = (q[0] + q[1] + q[2]) / 3.0;
                    z += w;
                    c2 += w * c * c;
                }
            }
        }
        let oracle = c2 / z;

        let mut cfg = MoveConfig::for_params(&t);
        cfg.samples = 40_000;
        cfg.thin = 2;
        let chain = sample_paths(&t, &pot, &cfg, 21).unwrap();
        let c2s: Vec<f64> = chain.map(|q| q.centroid().powi(2)).collect();
        let w = batch_mean(&c2s, 40);
        assert!(
            (w.mean() - oracle).abs() < 3.0 * w.std_error(),
            "mc {} grid {} se {}",
            w.mean(),
            oracle,
            w.std_error()
        );
    }

    #[test]
    fn acceptance_check_flags_frozen_chain() {
        let cfg = MoveConfig {
            bead_step: 1.0,
            translate_step: 1.0,
            burn_in: 10,
            thin: 1,
            samples: 1,
            tune_interval: 10,
            target_acceptance: 0.4,
            max_step: 1.0,
        };
        assert!(check_acceptance("x", 0.01, 1e-6, &cfg).is_err());
        assert!(check_acceptance("x", 0.99, 0.5, &cfg).is_err());
        assert!(check_acceptance("x", 0.99, 1.0, &cfg).is_ok());
        assert!(check_acceptance("x", 0.4, 0.5, &cfg).is_ok());
    }

    #[test]
    fn free_particle_translation_is_a_flat_direction() {
        let t = ThermoParams::natural(1.0, 4).unwrap();
        let mut cfg = MoveConfig::for_params(&t);
        cfg.burn_in = 2000;
        let mut s = MetropolisSampler::new(t, PotentialModel::Free, cfg, 1).unwrap();
        let stats = s.burn_in().unwrap();
        assert_eq!(stats.translate.rate(), 1.0);
        assert!(stats.bead.rate() > 0.2 && stats.bead.rate() < 0.6);
    }
}
