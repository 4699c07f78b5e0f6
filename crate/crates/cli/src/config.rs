//! Command-line arguments.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use dipstr_core::{KPrior, Method, PriorConfig};

use crate::io::DbSpec;
use crate::CliError;

/// Likelihood ratios for DIP-STR evidence when the matching allele may be
/// missing from the reference database.
#[derive(Debug, Parser)]
#[command(name = "dipstr", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Likelihood ratio for each locus and method, plus the product over loci.
    Lr(LrArgs),
    /// Likelihood ratio over a grid of prior settings, as CSV.
    Sweep(SweepArgs),
    /// Compare closed forms with importance-sampling estimates.
    Validate(ValidateArgs),
    /// Summary statistics of the augmented database.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Allele database, one label per line; `LOCUS=PATH` ties it to a locus.
    #[arg(long = "db", required = true, value_name = "[LOCUS=]PATH")]
    pub db: Vec<DbSpec>,
    /// Case file (JSON object, or array of objects for several loci).
    #[arg(long = "case", value_name = "PATH")]
    pub case: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Dirichlet concentration per allele type.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Maximum number of allele types per DIP class.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Prior on the number of types: uniform, poisson:<λ>, negbin:<r>,<p> or fixed:<k0>.
    #[arg(long = "k-prior", default_value = "uniform", value_name = "SPEC")]
    pub k_prior: KPrior,
}

impl ModelArgs {
    pub fn prior(&self) -> Result<PriorConfig, CliError> {
        Ok(PriorConfig::new(self.m, self.alpha, self.k_prior)?)
    }
}

#[derive(Debug, Args)]
pub struct LrArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated methods: full, plugin, gt.
    #[arg(long, value_delimiter = ',', default_value = "full")]
    pub method: Vec<Method>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Used when no alpha grid is given.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Used when no m grid is given.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Repeat to sweep over several priors.
    #[arg(long = "k-prior", value_name = "SPEC")]
    pub k_prior: Vec<KPrior>,
    #[arg(long, value_delimiter = ',', default_value = "full,plugin,gt")]
    pub method: Vec<Method>,
    #[arg(long = "alpha-grid", value_name = "START:STOP:STEP")]
    pub alpha_grid: Option<AlphaGrid>,
    #[arg(long = "m-grid", value_name = "M1,M2,...")]
    pub m_grid: Option<MGrid>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Also check the closed form on these cases (needs `--case`).
    #[arg(long = "db", value_name = "[LOCUS=]PATH", requires = "case")]
    pub db: Vec<DbSpec>,
    #[arg(long = "case", value_name = "PATH", requires = "db")]
    pub case: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Concentration used for the empirical number of types.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Upper clamp for the empirical number of types.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

const MAX_GRID_POINTS: usize = 100_000;

/// Evenly spaced alpha values from `start` to `stop` inclusive. Values are
/// rounded to 1e-9 so that `0.1` steps print as written.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid(pub Vec<f64>);

impl FromStr for AlphaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected START:STOP:STEP, got '{s}'"));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("'{v}' is not a finite number"))
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step <= 0.0 {
            return Err(format!("step must be positive, got {step}"));
        }
        if stop < start {
            return Ok(AlphaGrid(Vec::new()));
        }
        let points = ((stop - start) / step + 1e-9).floor() + 1.0;
        if points > MAX_GRID_POINTS as f64 {
            return Err(format!("grid has more than {MAX_GRID_POINTS} points"));
        }
        Ok(AlphaGrid(
            (0..points as usize)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MGrid(pub Vec<usize>);

impl FromStr for MGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("'{v}' is not a whole number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MGrid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_grid_points() {
        let g: AlphaGrid = "0.2:5:0.2".parse().unwrap();
        assert_eq!(g.0.len(), 25);
        assert_eq!(g.0[2], 0.6);
        assert_eq!(*g.0.last().unwrap(), 5.0);
        let single: AlphaGrid = "1:1:0.5".parse().unwrap();
        assert_eq!(single.0, vec![1.0]);
        let empty: AlphaGrid = "2:1:0.5".parse().unwrap();
        assert!(empty.0.is_empty());
    }

    #[test]
    fn alpha_grid_rejects() {
        for bad in ["1:2", "1:2:0", "a:2:1", "1:2:-1", "0:1e9:1e-9", "1:inf:1"] {
            assert!(bad.parse::<AlphaGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn m_grid() {
        assert_eq!(
            "50, 100,200".parse::<MGrid>().unwrap().0,
            vec![50, 100, 200]
        );
        assert!("".parse::<MGrid>().unwrap().0.is_empty());
        assert!("10,x".parse::<MGrid>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
