//! Self-normalized importance sampling of the defence denominator, with the
//! prior as proposal and the augmented-database likelihood as weight.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::sampler::{stream_rng, GenerativeSample, PriorSampler};
use crate::database::{AugmentedDatabase, SideStats};
use crate::error::{Error, Result};
use crate::genetics::{CaseInput, CaseKind, DipClass, DipStrAllele};
use crate::prior::PriorConfig;

/// Number of RNG streams the draws are split across. Fixed so the estimate
/// does not depend on the thread count.
pub const STREAMS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    /// Delta-method standard error of the ratio estimator.
    pub std_error: f64,
    pub n_samples: usize,
    /// Kish effective sample size `(Σw)² / Σw²`.
    pub effective_sample_size: f64,
}

/// Running weighted sums, with weights stored relative to the largest log
/// weight seen so far.
#[derive(Debug, Clone, Copy)]
struct Accumulator {
    max_log_w: f64,
    sum_w: f64,
    sum_wf: f64,
    sum_w2: f64,
    sum_w2f: f64,
    sum_w2f2: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            max_log_w: f64::NEG_INFINITY,
            sum_w: 0.0,
            sum_wf: 0.0,
            sum_w2: 0.0,
            sum_w2f: 0.0,
            sum_w2f2: 0.0,
        }
    }

    fn rescale(&mut self, new_max: f64) {
        if self.max_log_w == f64::NEG_INFINITY {
            self.max_log_w = new_max;
            return;
        }
        let r = (self.max_log_w - new_max).exp();
        let r2 = r * r;
        self.sum_w *= r;
        self.sum_wf *= r;
        self.sum_w2 *= r2;
        self.sum_w2f *= r2;
        self.sum_w2f2 *= r2;
        self.max_log_w = new_max;
    }

    fn push(&mut self, log_w: f64, f: f64) {
        if log_w == f64::NEG_INFINITY {
            return;
        }
        if log_w > self.max_log_w {
            self.rescale(log_w);
        }
        let w = (log_w - self.max_log_w).exp();
        let w2 = w * w;
        self.sum_w += w;
        self.sum_wf += w * f;
        self.sum_w2 += w2;
        self.sum_w2f += w2 * f;
        self.sum_w2f2 += w2 * f * f;
    }

    fn merge(mut self, mut other: Accumulator) -> Accumulator {
        if other.max_log_w == f64::NEG_INFINITY {
            return self;
        }
        if self.max_log_w == f64::NEG_INFINITY {
            return other;
        }
        let top = self.max_log_w.max(other.max_log_w);
        self.rescale(top);
        other.rescale(top);
        Accumulator {
            max_log_w: top,
            sum_w: self.sum_w + other.sum_w,
            sum_wf: self.sum_wf + other.sum_wf,
            sum_w2: self.sum_w2 + other.sum_w2,
            sum_w2f: self.sum_w2f + other.sum_w2f,
            sum_w2f2: self.sum_w2f2 + other.sum_w2f2,
        }
    }
}

/// Positions `0..k_b` assigned to the distinct alleles of one class. Any
/// injective assignment gives the same law, by exchangeability of positions.
fn positions(stats: &SideStats) -> BTreeMap<DipStrAllele, usize> {
    stats
        .counts
        .keys()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect()
}

enum Integrand {
    Two { side: DipClass, i: usize, j: usize },
    One { side: DipClass, i: usize },
    None { victim: DipClass },
}

impl Integrand {
    fn eval(&self, s: &GenerativeSample) -> f64 {
        match *self {
            Integrand::Two { side, i, j } => 2.0 * s.theta_at(side, i) * s.theta_at(side, j),
            Integrand::One { side, i } => {
                let t = s.theta_at(side, i);
                t * t + 2.0 * t * s.class_mass(side.opposite())
            }
            Integrand::None { victim } => s.class_mass(victim).powi(2),
        }
    }
}

fn xlogy(count: usize, x: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * x.ln()
    }
}

/// `ln Π θ(entry)` over the augmented database.
struct Likelihood {
    n_l: usize,
    n_s: usize,
    l: Vec<(usize, usize)>,
    s: Vec<(usize, usize)>,
}

impl Likelihood {
    fn ln(&self, sample: &GenerativeSample) -> f64 {
        let mut total = xlogy(self.n_l, sample.psi) + xlogy(self.n_s, 1.0 - sample.psi);
        for &(pos, c) in &self.l {
            total += xlogy(c, sample.phi_l[pos]);
        }
        for &(pos, c) in &self.s {
            total += xlogy(c, sample.phi_s[pos]);
        }
        if total.is_nan() {
            f64::NEG_INFINITY
        } else {
            total
        }
    }
}

pub fn is_denominator(
    case: &CaseInput,
    adb: &AugmentedDatabase,
    prior: &PriorConfig,
    n_samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    for class in [DipClass::L, DipClass::S] {
        let k_b = adb.side(class).k_b;
        if k_b > prior.m {
            return Err(Error::OracleTooLarge(format!(
                "{k_b} distinct {class} alleles cannot be placed among m = {} positions",
                prior.m
            )));
        }
    }
    let pos_l = positions(&adb.l);
    let pos_s = positions(&adb.s);
    let locate = |a: &DipStrAllele| -> Result<usize> {
        let map = match a.dip() {
            DipClass::L => &pos_l,
            DipClass::S => &pos_s,
        };
        map.get(a)
            .copied()
            .ok_or_else(|| Error::UnobservedAllele(a.clone()))
    };
    let integrand = match case.defence_kind() {
        CaseKind::TwoAlleles {
            first,
            second,
            side,
        } => Integrand::Two {
            side,
            i: locate(&first)?,
            j: locate(&second)?,
        },
        CaseKind::OneAllele { allele, side } => Integrand::One {
            side,
            i: locate(&allele)?,
        },
        CaseKind::NoAllele { side } => Integrand::None {
            victim: side.opposite(),
        },
        CaseKind::VictimHeterozygous => {
            return Err(Error::NotEvaluable("the victim is DIP-heterozygous"))
        }
        CaseKind::Exclusion => return Err(Error::NotEvaluable("the suspect is excluded")),
    };
    let likelihood = Likelihood {
        n_l: adb.n_l(),
        n_s: adb.n_s(),
        l: adb.l.counts.iter().map(|(a, &c)| (pos_l[a], c)).collect(),
        s: adb.s.counts.iter().map(|(a, &c)| (pos_s[a], c)).collect(),
    };
    let sampler = PriorSampler::new(prior);

    let per_stream: Vec<Accumulator> = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let count = n_samples / STREAMS as usize
                + usize::from((stream as usize) < n_samples % STREAMS as usize);
            let mut rng = stream_rng(seed, stream);
            let mut acc = Accumulator::new();
            for _ in 0..count {
                let sample = sampler.sample(&mut rng);
                acc.push(likelihood.ln(&sample), integrand.eval(&sample));
            }
            acc
        })
        .collect();
    // sequential fold in stream order keeps the result bitwise reproducible
    let acc = per_stream
        .into_iter()
        .fold(Accumulator::new(), Accumulator::merge);

    if acc.sum_w == 0.0 {
        return Err(Error::OracleStarved { n_samples });
    }
    let value = acc.sum_wf / acc.sum_w;
    let spread = (acc.sum_w2f2 - 2.0 * value * acc.sum_w2f + value * value * acc.sum_w2).max(0.0);
    Ok(OracleEstimate {
        value,
        std_error: spread.sqrt() / acc.sum_w,
        n_samples,
        effective_sample_size: acc.sum_w * acc.sum_w / acc.sum_w2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_equals_sequential_push() {
        let data: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                (
                    (i as f64 * 0.37).sin() * 30.0 - 5.0,
                    (i as f64 * 0.11).cos(),
                )
            })
            .collect();
        let mut whole = Accumulator::new();
        data.iter().for_each(|&(lw, f)| whole.push(lw, f));
        let (left, right) = data.split_at(77);
        let mut a = Accumulator::new();
        left.iter().for_each(|&(lw, f)| a.push(lw, f));
        let mut b = Accumulator::new();
        right.iter().for_each(|&(lw, f)| b.push(lw, f));
        let merged = a.merge(b);
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        assert_eq!(merged.max_log_w, whole.max_log_w);
        assert!(rel(merged.sum_w, whole.sum_w) < 1e-12);
        assert!(rel(merged.sum_wf, whole.sum_wf) < 1e-12);
        assert!(rel(merged.sum_w2f2, whole.sum_w2f2) < 1e-12);
    }

    #[test]
    fn zero_weights_are_ignored() {
        let mut acc = Accumulator::new();
        acc.push(f64::NEG_INFINITY, 3.0);
        assert_eq!(acc.sum_w, 0.0);
        acc.push(-2.0, 1.0);
        assert_eq!((acc.sum_w, acc.sum_wf), (1.0, 1.0));
    }
}
