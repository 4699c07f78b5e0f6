//! Exact posterior over the number of types by explicit enumeration of
//! every position subset, in linear-space arithmetic.
//!
//! The marginal likelihood of the database given a subset of size `k` is
//! built as a product of Pólya-urn predictive probabilities
//! `(α + c) / (kα + s)`, which involves no gamma functions at all.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::database::SideStats;
use crate::error::{Error, Result};
use crate::prior::{KPrior, PriorConfig};

pub const MAX_ENUMERABLE_M: usize = 12;

/// Prior mass of `k` on `{1, ..., m}`, evaluated directly.
fn direct_prior(prior: &KPrior, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = match *prior {
        KPrior::Uniform => vec![1.0; m],
        KPrior::TruncatedPoisson { lambda } => (1..=m)
            .scan(1.0, |term, k| {
                *term *= lambda / k as f64;
                Some(*term)
            })
            .collect(),
        KPrior::TruncatedNegBinomial { r, p } => (1..=m)
            .scan(p.powf(r), |term, k| {
                *term *= (k as f64 - 1.0 + r) / k as f64 * (1.0 - p);
                Some(*term)
            })
            .collect(),
        KPrior::Degenerate { k0 } => (1..=m).map(|k| f64::from(u8::from(k == k0))).collect(),
    };
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / z).collect()
}

fn polya_likelihood(counts: &[usize], k: usize, alpha: f64) -> f64 {
    let total = k as f64 * alpha;
    let mut drawn = 0usize;
    let mut p = 1.0;
    for &c in counts {
        for seen in 0..c {
            p *= (alpha + seen as f64) / (total + drawn as f64);
            drawn += 1;
        }
    }
    p
}

pub fn exact_k_posterior_bruteforce(
    stats: &SideStats,
    prior: &PriorConfig,
) -> Result<BTreeMap<usize, f64>> {
    let m = prior.m;
    if m > MAX_ENUMERABLE_M {
        return Err(Error::OracleTooLarge(format!(
            "subset enumeration is limited to m <= {MAX_ENUMERABLE_M}, got {m}"
        )));
    }
    // observed alleles occupy positions 0..k_b
    let counts: Vec<usize> = stats.counts.values().copied().collect();
    let k_b = counts.len();
    let p_k = direct_prior(&prior.k_prior, m);

    let mut joint = BTreeMap::new();
    for k in 1..=m {
        let subsets: Vec<Vec<usize>> = (0..m).combinations(k).collect();
        let p_t = 1.0 / subsets.len() as f64;
        let lik = polya_likelihood(&counts, k, prior.alpha);
        let mass: f64 = subsets
            .iter()
            .filter(|t| (0..k_b).all(|pos| t.contains(&pos)))
            .map(|_| p_k[k - 1] * p_t * lik)
            .sum();
        joint.insert(k, mass);
    }
    let evidence: f64 = joint.values().sum();
    if evidence == 0.0 {
        return Err(Error::TooManyTypes {
            side: stats
                .counts
                .keys()
                .next()
                .map(|a| a.dip())
                .unwrap_or(crate::genetics::DipClass::L),
            k_b,
            limit: m,
        });
    }
    Ok(joint
        .into_iter()
        .filter(|&(_, v)| v > 0.0)
        .map(|(k, v)| (k, v / evidence))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genetics::{DipClass, DipStrAllele};

    fn stats(counts: &[usize]) -> SideStats {
        SideStats::from_counts(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    (
                        DipStrAllele::new(DipClass::S, (i + 1).to_string()).unwrap(),
                        c,
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn hand_example() {
        let prior = PriorConfig::new(3, 1.0, KPrior::Uniform).unwrap();
        let post = exact_k_posterior_bruteforce(&stats(&[1, 1]), &prior).unwrap();
        assert_eq!(post.keys().copied().collect::<Vec<_>>(), vec![2, 3]);
        assert!((post[&2] - 0.4).abs() < 1e-15);
        assert!((post[&3] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn m_equal_k_b_is_a_point_mass() {
        let prior = PriorConfig::new(3, 0.5, KPrior::TruncatedPoisson { lambda: 2.0 }).unwrap();
        let post = exact_k_posterior_bruteforce(&stats(&[2, 1, 4]), &prior).unwrap();
        assert_eq!(post.len(), 1);
        assert!((post[&3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incompatible_subsets_contribute_nothing() {
        // k = 1 cannot hold two observed alleles
        let prior = PriorConfig::new(4, 1.0, KPrior::Uniform).unwrap();
        let post = exact_k_posterior_bruteforce(&stats(&[1, 3]), &prior).unwrap();
        assert!(!post.contains_key(&1));
    }

    #[test]
    fn refuses_large_m() {
        let prior = PriorConfig::new(13, 1.0, KPrior::Uniform).unwrap();
        assert!(matches!(
            exact_k_posterior_bruteforce(&stats(&[1]), &prior),
            Err(Error::OracleTooLarge(_))
        ));
    }

    #[test]
    fn polya_product_matches_gamma_form() {
        // k = 3, α = 1, counts (2, 1): Γ(3)/Γ(6) · Γ(3)Γ(2)/Γ(1)² = 2/120 · 2 = 1/30
        assert!((polya_likelihood(&[2, 1], 3, 1.0) - 1.0 / 30.0).abs() < 1e-16);
    }
}
