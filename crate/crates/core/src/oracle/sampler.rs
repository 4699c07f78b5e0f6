//! Forward sampler for the generative prior over allele proportions.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;

use crate::genetics::DipClass;
use crate::prior::PriorConfig;

/// One joint draw of the type counts, type positions, within-class
/// proportions and class mass. Positions are 0-based in `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerativeSample {
    pub k_l: usize,
    pub k_s: usize,
    /// Sorted positions of the L types present.
    pub t_l: Vec<usize>,
    pub t_s: Vec<usize>,
    /// Length `m`, zero off `t_l`.
    pub phi_l: Vec<f64>,
    pub phi_s: Vec<f64>,
    pub psi: f64,
}

impl GenerativeSample {
    pub fn m(&self) -> usize {
        self.phi_l.len()
    }

    pub fn class_mass(&self, class: DipClass) -> f64 {
        match class {
            DipClass::L => self.psi,
            DipClass::S => 1.0 - self.psi,
        }
    }

    pub fn phi(&self, class: DipClass) -> &[f64] {
        match class {
            DipClass::L => &self.phi_l,
            DipClass::S => &self.phi_s,
        }
    }

    pub fn theta_at(&self, class: DipClass, position: usize) -> f64 {
        self.phi(class)[position] * self.class_mass(class)
    }

    /// The `2m` population proportions, L block first.
    pub fn theta(&self) -> Vec<f64> {
        let (l, s) = (self.psi, 1.0 - self.psi);
        self.phi_l
            .iter()
            .map(|p| p * l)
            .chain(self.phi_s.iter().map(|p| p * s))
            .collect()
    }
}

/// Draws from the prior. Holds the precomputed `k` distribution so repeated
/// draws stay cheap.
#[derive(Debug, Clone)]
pub struct PriorSampler {
    m: usize,
    k_dist: WeightedIndex<f64>,
    gamma: Gamma<f64>,
}

impl PriorSampler {
    pub fn new(prior: &PriorConfig) -> Self {
        let weights: Vec<f64> = prior
            .k_prior
            .ln_pmf_table(prior.m)
            .into_iter()
            .map(f64::exp)
            .collect();
        Self {
            m: prior.m,
            k_dist: WeightedIndex::new(weights).expect("validated prior has positive mass"),
            gamma: Gamma::new(prior.alpha, 1.0).expect("validated alpha is positive"),
        }
    }

    fn side<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<usize>, Vec<f64>) {
        let k = self.k_dist.sample(rng) + 1;
        let mut t = rand::seq::index::sample(rng, self.m, k).into_vec();
        t.sort_unstable();
        let mut phi = vec![0.0; self.m];
        if k == 1 {
            phi[t[0]] = 1.0;
        } else {
            let draws: Vec<f64> = (0..k).map(|_| self.gamma.sample(rng)).collect();
            let total: f64 = draws.iter().sum();
            if total > 0.0 {
                for (&pos, g) in t.iter().zip(draws) {
                    phi[pos] = g / total;
                }
            } else {
                // every gamma draw underflowed; only reachable for tiny alpha
                phi[t[rng.random_range(0..k)]] = 1.0;
            }
        }
        (k, t, phi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GenerativeSample {
        let (k_l, t_l, phi_l) = self.side(rng);
        let (k_s, t_s, phi_s) = self.side(rng);
        // Beta(1, 1)
        let psi = rng.random::<f64>();
        GenerativeSample {
            k_l,
            k_s,
            t_l,
            t_s,
            phi_l,
            phi_s,
            psi,
        }
    }
}

/// Generator for `(seed, stream)`. Distinct streams are independent and each
/// is reproducible on its own.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The first draw of stream `stream` under `seed`.
pub fn sample_prior(prior: &PriorConfig, rng_seed: u64, stream: u64) -> GenerativeSample {
    PriorSampler::new(prior).sample(&mut stream_rng(rng_seed, stream))
}

/// Endless iterator over the draws of one stream.
pub fn prior_draws(
    prior: &PriorConfig,
    rng_seed: u64,
    stream: u64,
) -> impl Iterator<Item = GenerativeSample> {
    let sampler = PriorSampler::new(prior);
    let mut rng = stream_rng(rng_seed, stream);
    std::iter::repeat_with(move || sampler.sample(&mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::KPrior;

    fn cfg(m: usize, alpha: f64, k_prior: KPrior) -> PriorConfig {
        PriorConfig::new(m, alpha, k_prior).unwrap()
    }

    #[test]
    fn samples_are_well_formed() {
        for s in prior_draws(&cfg(6, 0.5, KPrior::Uniform), 3, 0).take(2000) {
            let theta = s.theta();
            assert_eq!(theta.len(), 12);
            assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (class, t, k) in [(DipClass::L, &s.t_l, s.k_l), (DipClass::S, &s.t_s, s.k_s)] {
                assert_eq!(t.len(), k);
                assert!(t.windows(2).all(|w| w[0] < w[1]));
                for pos in 0..6 {
                    if !t.contains(&pos) {
                        assert_eq!(s.theta_at(class, pos), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn full_support_under_degenerate_m() {
        for s in prior_draws(&cfg(4, 1.0, KPrior::Degenerate { k0: 4 }), 0, 1).take(200) {
            assert_eq!(s.t_l, vec![0, 1, 2, 3]);
            assert_eq!(s.t_s, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn large_alpha_concentrates_on_uniform_split() {
        let prior = cfg(5, 1e6, KPrior::Degenerate { k0: 2 });
        let n = 100_000;
        let mean: f64 = prior_draws(&prior, 11, 0)
            .take(n)
            .map(|s| s.phi_l[s.t_l[0]])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 1e-2, "{mean}");
    }

    #[test]
    fn k_and_psi_marginals() {
        let n = 100_000;
        let (mut hits, mut psi_sum) = (0usize, 0.0);
        for s in prior_draws(&cfg(3, 1.0, KPrior::Uniform), 5, 2).take(n) {
            hits += (s.k_l == 2) as usize;
            psi_sum += s.psi;
        }
        let p = hits as f64 / n as f64;
        let se = (1.0 / 3.0 * 2.0 / 3.0 / n as f64).sqrt();
        assert!((p - 1.0 / 3.0).abs() <= 3.0 * se, "P(k=2) = {p}");
        let mean_psi = psi_sum / n as f64;
        let se_psi = (1.0 / 12.0 / n as f64).sqrt();
        assert!(
            (mean_psi - 0.5).abs() <= 3.0 * se_psi,
            "E[psi] = {mean_psi}"
        );
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let prior = cfg(4, 1.0, KPrior::Uniform);
        assert_eq!(sample_prior(&prior, 9, 3), sample_prior(&prior, 9, 3));
        assert_ne!(sample_prior(&prior, 9, 3), sample_prior(&prior, 9, 4));
        assert_ne!(sample_prior(&prior, 9, 3), sample_prior(&prior, 10, 3));
    }
}
