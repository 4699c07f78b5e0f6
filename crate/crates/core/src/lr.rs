//! Likelihood ratios for one locus and their combination across loci.
//!
//! Under the prosecution hypothesis the trace is certain given the suspect,
//! so the ratio reduces to `1 / E[p(o1, o2 | b, Θ, h_d) | b]`. The integrand
//! depends on which alleles the trace revealed; with `side` the class the
//! trace can show and `mass` its total proportion:
//!
//! | trace        | integrand                        |
//! |--------------|----------------------------------|
//! | `i`, `j`     | `2 Θ_i Θ_j`                      |
//! | `i` only     | `Θ_i² + 2 Θ_i (1 − mass)`        |
//! | nothing      | `(1 − mass)²`                    |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::database::{augment, AlleleDatabase, AugmentedDatabase, SideStats};
use crate::error::{Error, Result};
use crate::genetics::{classify_case, CaseInput, CaseKind};
use crate::posterior::{compose_theta, k_posterior, phi_moments, psi_moments, KPosterior};
use crate::prior::{KPrior, PriorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Integrates over the full posterior, including the number of types.
    FullBayes,
    /// Evaluates the integrand at posterior means with `k` fixed at `k_b`.
    ClassicalPlugin,
    /// Full Bayes with `k` fixed at the Good-Turing empirical estimate.
    GoodTuringEmpirical,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::FullBayes,
        Method::ClassicalPlugin,
        Method::GoodTuringEmpirical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FullBayes => "full",
            Method::ClassicalPlugin => "plugin",
            Method::GoodTuringEmpirical => "gt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" | "full-bayes" => Ok(Method::FullBayes),
            "plugin" | "plug-in" => Ok(Method::ClassicalPlugin),
            "gt" | "good-turing" => Ok(Method::GoodTuringEmpirical),
            other => Err(Error::InvalidCase(format!(
                "unknown method '{other}' (expected full, plugin or gt)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    /// The suspect cannot have left this trace; LR = 0.
    Exclusion,
    /// DIP-heterozygous victim: the trace says nothing; LR = 1.
    Uninformative,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Exclusion => "exclusion",
            Status::Uninformative => "uninformative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrResult {
    /// Defence-hypothesis probability of the trace. Not evaluated for an
    /// exclusion.
    pub denominator: Option<f64>,
    pub lr: f64,
    pub log10_lr: f64,
    pub method: Method,
    pub status: Status,
    pub diagnostics: BTreeMap<String, f64>,
}

impl LrResult {
    fn ok(method: Method, denominator: f64, diagnostics: BTreeMap<String, f64>) -> Self {
        Self {
            denominator: Some(denominator),
            lr: 1.0 / denominator,
            log10_lr: -denominator.log10(),
            method,
            status: Status::Ok,
            diagnostics,
        }
    }

    fn exclusion(method: Method) -> Self {
        Self {
            denominator: None,
            lr: 0.0,
            log10_lr: f64::NEG_INFINITY,
            method,
            status: Status::Exclusion,
            diagnostics: BTreeMap::new(),
        }
    }

    fn uninformative(method: Method) -> Self {
        Self {
            denominator: Some(1.0),
            lr: 1.0,
            log10_lr: 0.0,
            method,
            status: Status::Uninformative,
            diagnostics: BTreeMap::new(),
        }
    }
}

fn check_type_limit(stats: &SideStats, side: crate::genetics::DipClass, m: usize) -> Result<()> {
    if stats.k_b > m {
        return Err(Error::TooManyTypes {
            side,
            k_b: stats.k_b,
            limit: m,
        });
    }
    Ok(())
}

/// Expected defence probability of the trace under the full posterior.
/// Only the victim and the observation matter here, not the suspect.
pub fn denominator_full_bayes(
    case: &CaseInput,
    adb: &AugmentedDatabase,
    prior: &PriorConfig,
) -> Result<f64> {
    full_bayes(&case.defence_kind(), adb, prior).map(|(d, _)| d)
}

fn full_bayes(
    kind: &CaseKind,
    adb: &AugmentedDatabase,
    prior: &PriorConfig,
) -> Result<(f64, Option<KPosterior>)> {
    let psi = psi_moments(adb.n_l(), adb.n_s());
    let (side, i, j) = match kind {
        CaseKind::TwoAlleles {
            first,
            second,
            side,
        } => (*side, first, Some(second)),
        CaseKind::OneAllele { allele, side } => (*side, allele, None),
        CaseKind::NoAllele { side } => return Ok((psi.mass_sq(side.opposite()), None)),
        CaseKind::VictimHeterozygous => {
            return Err(Error::NotEvaluable("the victim is DIP-heterozygous"))
        }
        CaseKind::Exclusion => return Err(Error::NotEvaluable("the suspect is excluded")),
    };
    let stats = adb.side(side);
    let kpost = k_posterior(stats, prior)?;
    let phi = phi_moments(stats, &kpost, prior.alpha, i, j)?;
    let theta = compose_theta(side, &phi, &psi);
    let denominator = match theta.e_theta_i_theta_j {
        Some(cross) => 2.0 * cross,
        None => theta.e_theta_i_sq + 2.0 * theta.e_theta_i_times_othermass,
    };
    Ok((denominator, Some(kpost)))
}

/// The same integrand evaluated at point estimates: `ψ̂ = E[Ψ | b]` and
/// `φ̂_i = (α + n_i) / (k_b α + n_side)`, the posterior mean when `k = k_b`.
pub fn denominator_plugin(
    case: &CaseInput,
    adb: &AugmentedDatabase,
    prior: &PriorConfig,
) -> Result<f64> {
    plugin(&case.defence_kind(), adb, prior)
}

fn plugin(kind: &CaseKind, adb: &AugmentedDatabase, prior: &PriorConfig) -> Result<f64> {
    let psi = psi_moments(adb.n_l(), adb.n_s());
    let (side, i, j) = match kind {
        CaseKind::TwoAlleles {
            first,
            second,
            side,
        } => (*side, first, Some(second)),
        CaseKind::OneAllele { allele, side } => (*side, allele, None),
        CaseKind::NoAllele { side } => return Ok(psi.mass_mean(side.opposite()).powi(2)),
        CaseKind::VictimHeterozygous => {
            return Err(Error::NotEvaluable("the victim is DIP-heterozygous"))
        }
        CaseKind::Exclusion => return Err(Error::NotEvaluable("the suspect is excluded")),
    };
    let stats = adb.side(side);
    check_type_limit(stats, side, prior.m)?;
    let total = stats.k_b as f64 * prior.alpha + stats.n_side as f64;
    let theta_hat = |a: &crate::genetics::DipStrAllele| -> Result<f64> {
        match stats.count(a) {
            0 => Err(Error::UnobservedAllele(a.clone())),
            c => Ok((prior.alpha + c as f64) / total * psi.mass_mean(side)),
        }
    };
    let ti = theta_hat(i)?;
    Ok(match j {
        Some(j) => 2.0 * ti * theta_hat(j)?,
        None => ti * ti + 2.0 * ti * psi.mass_mean(side.opposite()),
    })
}

/// Number of types that makes the expected unseen mass
/// `(k − k_b) α / (k α + n)` equal the Good-Turing singleton share `n_1 / n`,
/// rounded and clamped to `[k_b, m]`.
pub fn empirical_k_hat(stats: &SideStats, alpha: f64, m: usize) -> usize {
    let n = stats.n_side as f64;
    let n1 = stats.n1 as f64;
    let k_b = stats.k_b;
    let denom = alpha * n - alpha * n1;
    let raw = if denom > 0.0 {
        ((n1 * n + k_b as f64 * alpha * n) / denom).round()
    } else {
        // every allele a singleton: unbounded richness
        f64::INFINITY
    };
    let k = if raw >= m as f64 { m } else { raw as usize };
    k.max(k_b).min(m)
}

pub fn compute_lr(
    case: &CaseInput,
    db: &AlleleDatabase,
    prior: &PriorConfig,
    method: Method,
) -> Result<LrResult> {
    let adb = augment(db, &case.suspect, &case.victim);
    compute_lr_augmented(case, &adb, prior, method)
}

/// [`compute_lr`] for an already augmented database.
pub fn compute_lr_augmented(
    case: &CaseInput,
    adb: &AugmentedDatabase,
    prior: &PriorConfig,
    method: Method,
) -> Result<LrResult> {
    let kind = classify_case(case);
    let side = match &kind {
        CaseKind::VictimHeterozygous => return Ok(LrResult::uninformative(method)),
        CaseKind::Exclusion => return Ok(LrResult::exclusion(method)),
        CaseKind::TwoAlleles { side, .. }
        | CaseKind::OneAllele { side, .. }
        | CaseKind::NoAllele { side } => *side,
    };
    let stats = adb.side(side);
    let psi = psi_moments(adb.n_l(), adb.n_s());
    let mut diag = BTreeMap::new();
    diag.insert("e_psi".to_string(), psi.e_psi);
    diag.insert("e_psi_sq".to_string(), psi.e_psi_sq);
    diag.insert("e_one_minus_psi_sq".to_string(), psi.e_one_minus_psi_sq);
    diag.insert("k_b".to_string(), stats.k_b as f64);
    diag.insert("n1".to_string(), stats.n1 as f64);
    diag.insert("n_side".to_string(), stats.n_side as f64);

    let needs_phi = !matches!(kind, CaseKind::NoAllele { .. });
    let denominator = match method {
        Method::FullBayes => {
            let (d, kpost) = full_bayes(&kind, adb, prior)?;
            if let Some(kpost) = kpost {
                diag.insert("posterior_mean_k".to_string(), kpost.mean());
            }
            d
        }
        Method::ClassicalPlugin => plugin(&kind, adb, prior)?,
        Method::GoodTuringEmpirical if needs_phi => {
            let k_hat = empirical_k_hat(stats, prior.alpha, prior.m);
            diag.insert("k_hat".to_string(), k_hat as f64);
            check_type_limit(stats, side, prior.m)?;
            let fixed = prior.with_k_prior(KPrior::Degenerate { k0: k_hat })?;
            full_bayes(&kind, adb, &fixed)?.0
        }
        // no within-class proportion enters, so there is nothing to fix
        Method::GoodTuringEmpirical => full_bayes(&kind, adb, prior)?.0,
    };
    Ok(LrResult::ok(method, denominator, diag))
}

/// Multiplies independent per-locus ratios. An exclusion anywhere excludes;
/// uninformative loci contribute a factor of one.
pub fn combine_loci(results: &[LrResult]) -> Result<LrResult> {
    let first = results.first().ok_or(Error::EmptyCombination)?;
    let method = first.method;
    if results.iter().any(|r| r.method != method) {
        return Err(Error::MixedMethods);
    }
    if results.iter().any(|r| r.status == Status::Exclusion) {
        return Ok(LrResult::exclusion(method));
    }
    let informative: Vec<&LrResult> = results.iter().filter(|r| r.status == Status::Ok).collect();
    if informative.is_empty() {
        return Ok(LrResult::uninformative(method));
    }
    let log10_lr: f64 = informative.iter().map(|r| r.log10_lr).sum();
    let denominator = results
        .iter()
        .map(|r| r.denominator.unwrap_or(1.0))
        .product();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("loci".to_string(), results.len() as f64);
    diagnostics.insert("informative_loci".to_string(), informative.len() as f64);
    Ok(LrResult {
        denominator: Some(denominator),
        lr: 10f64.powf(log10_lr),
        log10_lr,
        method,
        status: Status::Ok,
        diagnostics,
    })
}
