//! Forensic likelihood ratios for DIP-STR mixture evidence when matching
//! alleles may be missing from the reference database.
//!
//! The allele proportions at a locus get a prior in which the number of
//! allele types of each DIP class is itself random, so alleles never seen
//! before keep positive posterior mass. The ratio is `1 / E[p(trace | b, Θ,
//! h_d) | b]`, computed in closed form ([`lr`]) from posterior moments
//! ([`posterior`]), and checked against the generative model by [`oracle`].

pub mod database;
pub mod error;
pub mod genetics;
pub mod lr;
pub mod numeric;
pub mod oracle;
pub mod posterior;
pub mod prior;
pub mod sweep;

pub use database::{augment, AlleleDatabase, AugmentedDatabase, SideStats};
pub use error::{Error, Result};
pub use genetics::{
    classify_case, observe, parse_allele, CaseInput, CaseKind, DipClass, DipStrAllele, Genotype,
    Observation,
};
pub use lr::{
    combine_loci, compute_lr, compute_lr_augmented, denominator_full_bayes, denominator_plugin,
    empirical_k_hat, LrResult, Method, Status,
};
pub use posterior::{
    k_posterior, phi_moments, psi_moments, theta_moments, KPosterior, PhiMoments, PsiMoments,
    ThetaMoments,
};
pub use prior::{KPrior, PriorConfig};
pub use sweep::{sensitivity_sweep, RowStatus, SweepRow};
