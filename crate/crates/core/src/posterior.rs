//! Posterior moments of the allele proportions given the augmented
//! database.
//!
//! The proportion vector is split into the total L mass `Ψ` and the
//! within-class proportions `Φ^L`, `Φ^S`, which are independent a priori and
//! a posteriori:
//!
//! - `Ψ | b ~ Beta(1 + n^L, 1 + n^S)`
//! - `Φ_b* | b` is a mixture over `k` of `Dir(α + ñ_1, …, α + ñ_{k_b}, (k − k_b)α)`
//!   with weights `w(k) = C(k, k_b) p(k) Γ(kα) / Γ(n + kα)`.
//!
//! Every weighted sum goes through log-sum-exp; `Γ(kα)/Γ(n + kα)` underflows
//! for databases of realistic size.

use crate::database::{AugmentedDatabase, SideStats};
use crate::error::{Error, Result};
use crate::genetics::{DipClass, DipStrAllele};
use crate::numeric::{ln_choose, ln_gamma, log_sum_exp};
use crate::prior::PriorConfig;

/// Posterior over the number of types on one side, supported on
/// `k_b..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct KPosterior {
    pub k_min: usize,
    /// `ln w(k)` for `k = k_min + index`.
    pub log_weights: Vec<f64>,
    pub log_norm: f64,
}

impl KPosterior {
    pub fn k_max(&self) -> usize {
        self.k_min + self.log_weights.len() - 1
    }

    pub fn probability(&self, k: usize) -> f64 {
        if k < self.k_min || k > self.k_max() {
            return 0.0;
        }
        (self.log_weights[k - self.k_min] - self.log_norm).exp()
    }

    /// `(k, p(k | b))` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.log_weights
            .iter()
            .enumerate()
            .map(move |(i, lw)| (self.k_min + i, (lw - self.log_norm).exp()))
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    /// `ln E[f(k) | b]` for a positive `f` supplied in log form.
    fn ln_expectation(&self, ln_f: impl Fn(usize) -> f64) -> f64 {
        log_sum_exp(
            self.log_weights
                .iter()
                .enumerate()
                .map(|(i, lw)| lw + ln_f(self.k_min + i)),
        ) - self.log_norm
    }
}

pub fn k_posterior(stats: &SideStats, prior: &PriorConfig) -> Result<KPosterior> {
    let k_b = stats.k_b;
    if k_b == 0 {
        return Err(Error::InvalidCase(
            "the number-of-types posterior needs at least one observed allele".into(),
        ));
    }
    if prior.m < k_b {
        return Err(Error::TooManyTypes {
            side: side_of(stats),
            k_b,
            limit: prior.m,
        });
    }
    let ln_prior = prior.k_prior.ln_pmf_table(prior.m);
    let n = stats.n_side as f64;
    let alpha = prior.alpha;
    let log_weights: Vec<f64> = (k_b..=prior.m)
        .map(|k| {
            let ka = k as f64 * alpha;
            ln_choose(k, k_b) + ln_prior[k - 1] + ln_gamma(ka) - ln_gamma(n + ka)
        })
        .collect();
    let log_norm = log_sum_exp(log_weights.iter().copied());
    if log_norm == f64::NEG_INFINITY {
        // only a point-mass prior below k_b gets here
        let limit = match prior.k_prior {
            crate::prior::KPrior::Degenerate { k0 } => k0,
            _ => prior.m,
        };
        return Err(Error::TooManyTypes {
            side: side_of(stats),
            k_b,
            limit,
        });
    }
    Ok(KPosterior {
        k_min: k_b,
        log_weights,
        log_norm,
    })
}

fn side_of(stats: &SideStats) -> DipClass {
    stats
        .counts
        .keys()
        .next()
        .map(|a| a.dip())
        .unwrap_or(DipClass::L)
}

/// Posterior moments of `Ψ ~ Beta(1 + n^L, 1 + n^S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiMoments {
    pub e_psi: f64,
    pub e_psi_sq: f64,
    pub e_one_minus_psi_sq: f64,
    pub e_psi_one_minus_psi: f64,
}

impl PsiMoments {
    /// `E[mass²]` for the given class: `E[Ψ²]` for L, `E[(1 − Ψ)²]` for S.
    pub fn mass_sq(&self, class: DipClass) -> f64 {
        match class {
            DipClass::L => self.e_psi_sq,
            DipClass::S => self.e_one_minus_psi_sq,
        }
    }

    /// Posterior mean of the class mass.
    pub fn mass_mean(&self, class: DipClass) -> f64 {
        match class {
            DipClass::L => self.e_psi,
            DipClass::S => 1.0 - self.e_psi,
        }
    }
}

pub fn psi_moments(n_l: usize, n_s: usize) -> PsiMoments {
    let (a, b) = (n_l as f64 + 1.0, n_s as f64 + 1.0);
    // with n_L + n_S = n + 4: a + b = n + 6
    let t = a + b;
    let t2 = t * (t + 1.0);
    PsiMoments {
        e_psi: a / t,
        e_psi_sq: a * (a + 1.0) / t2,
        e_one_minus_psi_sq: b * (b + 1.0) / t2,
        e_psi_one_minus_psi: a * b / t2,
    }
}

/// Posterior moments of the within-class proportions of observed alleles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMoments {
    pub e_phi_i: f64,
    pub e_phi_i_sq: f64,
    /// Present when a second allele was requested.
    pub e_phi_i_phi_j: Option<f64>,
}

pub fn phi_moments(
    stats: &SideStats,
    kpost: &KPosterior,
    alpha: f64,
    i: &DipStrAllele,
    j: Option<&DipStrAllele>,
) -> Result<PhiMoments> {
    let n_i = observed_count(stats, i)?;
    let n_j = match j {
        Some(j) if j == i => return Err(Error::RepeatedAllele(i.clone())),
        Some(j) => Some(observed_count(stats, j)?),
        None => None,
    };
    let n = stats.n_side as f64;
    let ln_h = |k: usize| -(k as f64 * alpha + n).ln();
    let ln_g = |k: usize| {
        let d = k as f64 * alpha + n;
        -d.ln() - (d + 1.0).ln()
    };
    let mean_h = kpost.ln_expectation(ln_h).exp();
    let mean_g = kpost.ln_expectation(ln_g).exp();
    let a_i = alpha + n_i as f64;
    Ok(PhiMoments {
        e_phi_i: a_i * mean_h,
        e_phi_i_sq: a_i * (a_i + 1.0) * mean_g,
        e_phi_i_phi_j: n_j.map(|n_j| a_i * (alpha + n_j as f64) * mean_g),
    })
}

fn observed_count(stats: &SideStats, allele: &DipStrAllele) -> Result<usize> {
    match stats.count(allele) {
        0 => Err(Error::UnobservedAllele(allele.clone())),
        c => Ok(c),
    }
}

/// Posterior moments of the full proportions `Θ_i = Φ_i · mass(side)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaMoments {
    pub e_theta_i_theta_j: Option<f64>,
    pub e_theta_i_sq: f64,
    /// `E[Θ_i · (mass of the other class)]`.
    pub e_theta_i_times_othermass: f64,
}

pub fn theta_moments(
    side: DipClass,
    adb: &AugmentedDatabase,
    prior: &PriorConfig,
    i: &DipStrAllele,
    j: Option<&DipStrAllele>,
) -> Result<ThetaMoments> {
    for allele in std::iter::once(i).chain(j) {
        if allele.dip() != side {
            return Err(Error::UnobservedAllele(allele.clone()));
        }
    }
    let stats = adb.side(side);
    let kpost = k_posterior(stats, prior)?;
    let phi = phi_moments(stats, &kpost, prior.alpha, i, j)?;
    let psi = psi_moments(adb.n_l(), adb.n_s());
    Ok(compose_theta(side, &phi, &psi))
}

pub(crate) fn compose_theta(side: DipClass, phi: &PhiMoments, psi: &PsiMoments) -> ThetaMoments {
    let m2 = psi.mass_sq(side);
    ThetaMoments {
        e_theta_i_theta_j: phi.e_phi_i_phi_j.map(|v| v * m2),
        e_theta_i_sq: phi.e_phi_i_sq * m2,
        e_theta_i_times_othermass: phi.e_phi_i * psi.e_psi_one_minus_psi,
    }
}
