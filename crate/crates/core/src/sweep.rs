//! Sensitivity of the likelihood ratio to the prior hyperparameters.

use std::fmt;

use rayon::prelude::*;

use crate::database::{augment, AlleleDatabase};
use crate::error::{Error, Result};
use crate::genetics::CaseInput;
use crate::lr::{compute_lr_augmented, Method, Status};
use crate::prior::{KPrior, PriorConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Done(Status),
    Error(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Done(s) => write!(f, "{s}"),
            RowStatus::Error(msg) => write!(f, "error:{msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
    pub alpha: f64,
    pub m: usize,
    pub k_prior: KPrior,
    /// NaN when the cell failed.
    pub log10_lr: f64,
    pub status: RowStatus,
}

/// Evaluates every `(method, alpha, m, k_prior)` combination. A failing cell
/// becomes an error row; the rest of the grid is unaffected. Rows come back
/// ordered by method, then alpha, then m, then the order of `priors`.
pub fn sensitivity_sweep(
    case: &CaseInput,
    db: &AlleleDatabase,
    alphas: &[f64],
    m_values: &[usize],
    priors: &[KPrior],
    methods: &[Method],
) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(Error::EmptyGrid("alpha"));
    }
    if m_values.is_empty() {
        return Err(Error::EmptyGrid("m"));
    }
    if priors.is_empty() {
        return Err(Error::EmptyGrid("k prior"));
    }
    if methods.is_empty() {
        return Err(Error::EmptyGrid("method"));
    }
    let adb = augment(db, &case.suspect, &case.victim);
    let mut cells = Vec::new();
    for &method in methods {
        for &alpha in alphas {
            for &m in m_values {
                for (p, &k_prior) in priors.iter().enumerate() {
                    cells.push((method, alpha, m, p, k_prior));
                }
            }
        }
    }
    let mut rows: Vec<(usize, SweepRow)> = cells
        .into_par_iter()
        .map(|(method, alpha, m, p, k_prior)| {
            let outcome = PriorConfig::new(m, alpha, k_prior)
                .and_then(|prior| compute_lr_augmented(case, &adb, &prior, method));
            let (log10_lr, status) = match outcome {
                Ok(r) => (r.log10_lr, RowStatus::Done(r.status)),
                Err(e) => (f64::NAN, RowStatus::Error(e.to_string())),
            };
            (
                p,
                SweepRow {
                    method,
                    alpha,
                    m,
                    k_prior,
                    log10_lr,
                    status,
                },
            )
        })
        .collect();
    rows.sort_by(|(pa, a), (pb, b)| {
        a.method
            .cmp(&b.method)
            .then_with(|| a.alpha.total_cmp(&b.alpha))
            .then_with(|| a.m.cmp(&b.m))
            .then_with(|| pa.cmp(pb))
    });
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genetics::{parse_allele, Genotype, Observation};
    use crate::lr::compute_lr;

    fn tiny_case() -> CaseInput {
        CaseInput::new(
            "t",
            Genotype::parse("L1", "L1").unwrap(),
            Genotype::parse("S1", "S2").unwrap(),
            Observation::from_alleles(vec![
                parse_allele("S1").unwrap(),
                parse_allele("S2").unwrap(),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn single_cell_matches_compute_lr() {
        let db = AlleleDatabase::default();
        let rows = sensitivity_sweep(
            &tiny_case(),
            &db,
            &[1.0],
            &[3],
            &[KPrior::Uniform],
            &[Method::FullBayes],
        )
        .unwrap();
        let direct = compute_lr(
            &tiny_case(),
            &db,
            &PriorConfig::new(3, 1.0, KPrior::Uniform).unwrap(),
            Method::FullBayes,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].log10_lr, direct.log10_lr);
        assert_eq!(rows[0].status, RowStatus::Done(Status::Ok));
    }

    #[test]
    fn failing_cells_are_isolated_and_rows_sorted() {
        let rows = sensitivity_sweep(
            &tiny_case(),
            &AlleleDatabase::default(),
            &[2.0, 0.5],
            &[5, 1],
            &[KPrior::Uniform, KPrior::Degenerate { k0: 4 }],
            &[Method::GoodTuringEmpirical, Method::FullBayes],
        )
        .unwrap();
        assert_eq!(rows.len(), 16);
        assert_eq!(rows[0].method, Method::FullBayes);
        assert_eq!((rows[0].alpha, rows[0].m), (0.5, 1));
        let errors: Vec<_> = rows
            .iter()
            .filter(|r| matches!(r.status, RowStatus::Error(_)))
            .collect();
        // m = 1 is below k_b = 2 for every cell, and fixed:4 is invalid at m = 1
        assert_eq!(errors.len(), 8);
        assert!(errors.iter().all(|r| r.m == 1 && r.log10_lr.is_nan()));
        assert!(rows
            .iter()
            .filter(|r| r.m == 5)
            .all(|r| r.status == RowStatus::Done(Status::Ok) && r.log10_lr.is_finite()));
        let key = |r: &SweepRow| (r.method, r.alpha, r.m);
        assert!(rows.windows(2).all(|w| key(&w[0]) <= key(&w[1])));
    }

    #[test]
    fn empty_grids_are_rejected() {
        let db = AlleleDatabase::default();
        let c = tiny_case();
        assert_eq!(
            sensitivity_sweep(&c, &db, &[], &[3], &[KPrior::Uniform], &Method::ALL),
            Err(Error::EmptyGrid("alpha"))
        );
        assert_eq!(
            sensitivity_sweep(&c, &db, &[1.0], &[], &[KPrior::Uniform], &Method::ALL),
            Err(Error::EmptyGrid("m"))
        );
    }
}
