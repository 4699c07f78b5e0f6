use thiserror::Error;

use crate::genetics::{DipClass, DipStrAllele};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed allele label '{0}': expected 'L' or 'S' followed by an STR identifier")]
    MalformedAllele(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("invalid case: {0}")]
    InvalidCase(String),

    #[error("invalid prior configuration: {0}")]
    InvalidPrior(String),

    #[error(
        "more distinct alleles observed than model allows: {k_b} distinct {side} alleles \
         but at most {limit} types permitted"
    )]
    TooManyTypes {
        side: DipClass,
        k_b: usize,
        limit: usize,
    },

    #[error("no {0} alleles in the augmented database")]
    EmptySide(DipClass),

    #[error("allele {0} does not occur in the augmented database")]
    UnobservedAllele(DipStrAllele),

    #[error("moment query needs two distinct alleles, got {0} twice")]
    RepeatedAllele(DipStrAllele),

    #[error("the defence denominator is undefined when {0}")]
    NotEvaluable(&'static str),

    #[error("cannot combine an empty list of locus results")]
    EmptyCombination,

    #[error("cannot combine results computed with different methods")]
    MixedMethods,

    #[error("sweep grid '{0}' is empty")]
    EmptyGrid(&'static str),

    #[error("oracle starved: none of the {n_samples} prior draws supports every allele in the database; use more samples or a smaller instance")]
    OracleStarved { n_samples: usize },

    #[error("instance too large for the oracle: {0}")]
    OracleTooLarge(String),
}

impl Error {
    /// True for failures that come from the model configuration meeting the
    /// data (as opposed to malformed input).
    pub fn is_model_error(&self) -> bool {
        matches!(
            self,
            Error::TooManyTypes { .. }
                | Error::EmptySide(_)
                | Error::UnobservedAllele(_)
                | Error::NotEvaluable(_)
                | Error::OracleStarved { .. }
                | Error::OracleTooLarge(_)
        )
    }
}
