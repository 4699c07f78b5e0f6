//! Prior over the number of allele types present in the population.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, log_sum_exp};

/// Prior family for the number of types `k`, truncated and renormalized to
/// `{1, ..., m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KPrior {
    Uniform,
    TruncatedPoisson {
        lambda: f64,
    },
    /// `P(k) ∝ Γ(k + r) / (k! Γ(r)) · p^r (1 − p)^k`, with `p` the success
    /// probability and `k` counting failures.
    TruncatedNegBinomial {
        r: f64,
        p: f64,
    },
    Degenerate {
        k0: usize,
    },
}

impl KPrior {
    fn validate(&self, m: usize) -> Result<()> {
        match *self {
            KPrior::Uniform => Ok(()),
            KPrior::TruncatedPoisson { lambda } if !(lambda.is_finite() && lambda > 0.0) => Err(
                Error::InvalidPrior(format!("poisson rate must be positive, got {lambda}")),
            ),
            KPrior::TruncatedNegBinomial { r, .. } if !(r.is_finite() && r > 0.0) => Err(
                Error::InvalidPrior(format!("negative binomial r must be positive, got {r}")),
            ),
            KPrior::TruncatedNegBinomial { p, .. } if !(p > 0.0 && p < 1.0) => Err(
                Error::InvalidPrior(format!("negative binomial p must lie in (0, 1), got {p}")),
            ),
            KPrior::Degenerate { k0 } if k0 == 0 || k0 > m => Err(Error::InvalidPrior(format!(
                "fixed number of types {k0} outside 1..={m}"
            ))),
            _ => Ok(()),
        }
    }

    fn unnormalized_ln_pmf(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            KPrior::Uniform => 0.0,
            KPrior::TruncatedPoisson { lambda } => kf * lambda.ln() - ln_gamma(kf + 1.0),
            KPrior::TruncatedNegBinomial { r, p } => {
                ln_gamma(kf + r) - ln_gamma(kf + 1.0) - ln_gamma(r) + kf * (1.0 - p).ln()
            }
            KPrior::Degenerate { k0 } => {
                if k == k0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// `ln p(k)` for `k = 1..=m`; entry `k - 1` holds `ln p(k)`.
    pub fn ln_pmf_table(&self, m: usize) -> Vec<f64> {
        let raw: Vec<f64> = (1..=m).map(|k| self.unnormalized_ln_pmf(k)).collect();
        let norm = log_sum_exp(raw.iter().copied());
        raw.into_iter().map(|v| v - norm).collect()
    }
}

impl fmt::Display for KPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KPrior::Uniform => f.write_str("uniform"),
            KPrior::TruncatedPoisson { lambda } => write!(f, "poisson:{lambda}"),
            KPrior::TruncatedNegBinomial { r, p } => write!(f, "negbin:{r},{p}"),
            KPrior::Degenerate { k0 } => write!(f, "fixed:{k0}"),
        }
    }
}

impl FromStr for KPrior {
    type Err = Error;

    /// Accepts `uniform`, `poisson:<lambda>`, `negbin:<r>,<p>` and
    /// `fixed:<k0>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPrior(format!("unrecognized k prior '{s}'"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let prior = match (name, arg) {
            ("uniform", None) => KPrior::Uniform,
            ("poisson", Some(a)) => KPrior::TruncatedPoisson { lambda: num(a)? },
            ("negbin", Some(a)) => {
                let (r, p) = a.split_once(',').ok_or_else(bad)?;
                KPrior::TruncatedNegBinomial {
                    r: num(r)?,
                    p: num(p)?,
                }
            }
            ("fixed", Some(a)) => KPrior::Degenerate {
                k0: a.trim().parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        // range checks that do not depend on m
        prior.validate(usize::MAX)?;
        Ok(prior)
    }
}

/// Hyperparameters shared by both DIP classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    /// Maximum number of theoretically possible alleles per DIP class.
    pub m: usize,
    /// Symmetric Dirichlet concentration.
    pub alpha: f64,
    pub k_prior: KPrior,
}

impl PriorConfig {
    pub fn new(m: usize, alpha: f64, k_prior: KPrior) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPrior("m must be at least 1".into()));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidPrior(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        k_prior.validate(m)?;
        Ok(Self { m, alpha, k_prior })
    }

    pub fn with_k_prior(&self, k_prior: KPrior) -> Result<Self> {
        Self::new(self.m, self.alpha, k_prior)
    }
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            m: 100,
            alpha: 1.0,
            k_prior: KPrior::Uniform,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn total(prior: KPrior, m: usize) -> f64 {
        prior.ln_pmf_table(m).iter().map(|v| v.exp()).sum()
    }

    #[test]
    fn every_family_normalizes_on_its_support() {
        for m in [1, 3, 8, 100, 5000] {
            for prior in [
                KPrior::Uniform,
                KPrior::TruncatedPoisson { lambda: 2.0 },
                KPrior::TruncatedPoisson { lambda: 300.0 },
                KPrior::TruncatedNegBinomial { r: 2.0, p: 0.5 },
                KPrior::Degenerate { k0: 1 },
            ] {
                assert_relative_eq!(total(prior, m), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn truncated_poisson_matches_direct_pmf() {
        let table = KPrior::TruncatedPoisson { lambda: 2.0 }.ln_pmf_table(4);
        let raw = [2.0, 2.0, 4.0 / 3.0, 2.0 / 3.0];
        let z: f64 = raw.iter().sum();
        for (ln_p, r) in table.iter().zip(raw) {
            assert_relative_eq!(ln_p.exp(), r / z, max_relative = 1e-13);
        }
    }

    #[test]
    fn negbin_matches_direct_pmf() {
        // r = 2, p = 0.5: P(k) ∝ (k + 1) 0.5^k
        let table = KPrior::TruncatedNegBinomial { r: 2.0, p: 0.5 }.ln_pmf_table(3);
        let raw = [1.0, 0.75, 0.5];
        let z: f64 = raw.iter().sum();
        for (ln_p, r) in table.iter().zip(raw) {
            assert_relative_eq!(ln_p.exp(), r / z, max_relative = 1e-13);
        }
    }

    #[test]
    fn degenerate_is_a_point_mass() {
        let table = KPrior::Degenerate { k0: 3 }.ln_pmf_table(5);
        assert_eq!(table[2], 0.0);
        assert!(table
            .iter()
            .enumerate()
            .all(|(i, &v)| i == 2 || v == f64::NEG_INFINITY));
    }

    #[test]
    fn parses_and_prints_spec_strings() {
        for s in [
            "uniform",
            "poisson:2",
            "negbin:2,0.5",
            "fixed:7",
            "poisson:0.25",
        ] {
            assert_eq!(s.parse::<KPrior>().unwrap().to_string(), s);
        }
        for s in [
            "poisson",
            "poisson:-1",
            "negbin:2",
            "negbin:2,1.5",
            "fixed:0",
            "beta:1",
        ] {
            assert!(s.parse::<KPrior>().is_err(), "{s}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(PriorConfig::new(0, 1.0, KPrior::Uniform).is_err());
        assert!(PriorConfig::new(10, 0.0, KPrior::Uniform).is_err());
        assert!(PriorConfig::new(10, f64::NAN, KPrior::Uniform).is_err());
        assert!(PriorConfig::new(10, 1.0, KPrior::Degenerate { k0: 11 }).is_err());
        let d = PriorConfig::default();
        assert_eq!((d.m, d.alpha, d.k_prior), (100, 1.0, KPrior::Uniform));
    }
}
