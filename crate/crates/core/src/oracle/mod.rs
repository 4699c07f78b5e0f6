//! Independent checks of the closed-form posterior quantities: a forward
//! sampler of the full generative model, an importance-sampling estimate of
//! the defence denominator, and exhaustive subset enumeration for `p(k | b)`.
//!
//! Importance weights degenerate quickly as the database grows, so the
//! oracle is meant for small instances.

mod enumerate;
mod importance;
mod sampler;

pub use enumerate::{exact_k_posterior_bruteforce, MAX_ENUMERABLE_M};
pub use importance::{is_denominator, OracleEstimate, STREAMS};
pub use sampler::{prior_draws, sample_prior, stream_rng, GenerativeSample, PriorSampler};

use std::fmt;

use crate::database::{augment, AlleleDatabase};
use crate::error::{Error, Result};
use crate::genetics::{parse_allele, CaseInput, Genotype, Observation};
use crate::lr::denominator_full_bayes;
use crate::prior::{KPrior, PriorConfig};

/// Below this effective sample size the standard error is not trusted.
pub const MIN_EFFECTIVE_SAMPLES: f64 = 100.0;

/// Tolerance in standard errors for declaring agreement.
pub const AGREEMENT_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub name: String,
    pub case: CaseInput,
    pub db: AlleleDatabase,
    pub prior: PriorConfig,
}

impl OracleInstance {
    fn new(
        name: &str,
        victim: (&str, &str),
        suspect: (&str, &str),
        observed: &[&str],
        db: &[&str],
        prior: PriorConfig,
    ) -> Self {
        let parse = |labels: &[&str]| -> Vec<_> {
            labels
                .iter()
                .map(|l| parse_allele(l).expect("built-in label"))
                .collect()
        };
        let case = CaseInput::new(
            name,
            Genotype::parse(victim.0, victim.1).expect("built-in label"),
            Genotype::parse(suspect.0, suspect.1).expect("built-in label"),
            Observation::from_alleles(parse(observed)).expect("built-in observation"),
        )
        .expect("built-in case");
        Self {
            name: name.to_string(),
            case,
            db: AlleleDatabase::new(parse(db), "built-in"),
            prior,
        }
    }
}

/// Small instances with known closed forms, covering every trace shape and
/// both observed sides.
pub fn builtin_instances() -> Vec<OracleInstance> {
    let cfg = |m, alpha, k_prior| PriorConfig::new(m, alpha, k_prior).expect("built-in prior");
    vec![
        OracleInstance::new(
            "empty-db-two-alleles",
            ("L1", "L1"),
            ("S1", "S2"),
            &["S1", "S2"],
            &[],
            cfg(3, 1.0, KPrior::Uniform),
        ),
        // defence probability of an empty trace for the same augmented data
        OracleInstance::new(
            "empty-db-empty-trace",
            ("L1", "L1"),
            ("S1", "S2"),
            &[],
            &[],
            cfg(3, 1.0, KPrior::Uniform),
        ),
        OracleInstance::new(
            "empty-db-one-allele",
            ("L1", "L1"),
            ("L2", "S1"),
            &["S1"],
            &[],
            cfg(3, 1.0, KPrior::Uniform),
        ),
        OracleInstance::new(
            "fixed-k-two-alleles",
            ("S1", "S1"),
            ("L1", "L2"),
            &["L1", "L2"],
            &["L1", "L3", "S2"],
            cfg(4, 0.5, KPrior::Degenerate { k0: 3 }),
        ),
        OracleInstance::new(
            "poisson-str-homozygous",
            ("S1", "S1"),
            ("L1", "L1"),
            &["L1"],
            &["L2", "L1", "S2"],
            cfg(4, 2.0, KPrior::TruncatedPoisson { lambda: 2.0 }),
        ),
        OracleInstance::new(
            "negbin-dip-heterozygous-minor",
            ("L2", "L2"),
            ("L1", "S3"),
            &["S3"],
            &["S1", "S3", "L1", "S1", "L2", "S2"],
            cfg(4, 1.0, KPrior::TruncatedNegBinomial { r: 2.0, p: 0.5 }),
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Starved,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Starved => "STARVED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub quantity: String,
    pub closed_form: f64,
    pub estimate: Option<OracleEstimate>,
    pub verdict: Verdict,
}

/// Compares the closed-form full-Bayes denominator with the
/// importance-sampling estimate for one instance.
pub fn validate_instance(
    instance: &OracleInstance,
    n_samples: usize,
    seed: u64,
) -> Result<ValidationRow> {
    let adb = augment(&instance.db, &instance.case.suspect, &instance.case.victim);
    let closed_form = denominator_full_bayes(&instance.case, &adb, &instance.prior)?;
    let quantity = format!("{}:denominator", instance.name);
    match is_denominator(&instance.case, &adb, &instance.prior, n_samples, seed) {
        Ok(est) => {
            let verdict = if est.effective_sample_size < MIN_EFFECTIVE_SAMPLES {
                Verdict::Starved
            } else if (est.value - closed_form).abs() <= AGREEMENT_SIGMAS * est.std_error {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(ValidationRow {
                quantity,
                closed_form,
                estimate: Some(est),
                verdict,
            })
        }
        Err(Error::OracleStarved { .. }) => Ok(ValidationRow {
            quantity,
            closed_form,
            estimate: None,
            verdict: Verdict::Starved,
        }),
        Err(e) => Err(e),
    }
}
