use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roytw::{Error, GreatestRootParams, SasParams, TableParams, TwOrder};

#[derive(Debug, Parser)]
#[command(
    name = "roytw",
    version,
    about = "Tracy-Widom approximation for Roy's largest root and the multivariate tests built on it"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Tracy-Widom distribution.
    Tw(TwArgs),
    /// Approximate quantiles of the greatest (or smallest) root.
    Quantile(QuantileArgs),
    /// p-values for an observed root.
    Pvalue(PvalueArgs),
    /// Run a largest-root test on CSV data.
    Test(TestArgs),
    /// Simulate the greatest-root distribution.
    Simulate(SimulateArgs),
    /// Compare approximate and simulated quantiles.
    Compare(CompareArgs),
    /// Regenerate the Tracy-Widom table and compare it with the built-in one.
    GridRegen(GridRegenArgs),
}

#[derive(Debug, Args)]
pub struct TwArgs {
    /// Tracy-Widom order (1 for real, 2 for complex).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,

    #[command(flatten)]
    pub query: TwQuery,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TwQuery {
    /// Distribution function at these points.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "S")]
    pub cdf: Option<Vec<f64>>,
    /// Upper tail probability at these points.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "S")]
    pub sf: Option<Vec<f64>>,
    /// Density at these points.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "S")]
    pub pdf: Option<Vec<f64>>,
    /// Quantiles at these probabilities.
    #[arg(long, num_args = 1.., value_name = "ALPHA")]
    pub quantile: Option<Vec<f64>>,
}

impl TwArgs {
    pub fn order(&self) -> TwOrder {
        if self.order == 2 {
            TwOrder::Two
        } else {
            TwOrder::One
        }
    }
}

/// Three distribution parameters under one naming convention.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ParamArgs {
    /// Dimension, error and hypothesis degrees of freedom (p, m, n).
    #[arg(long, num_args = 3, value_names = ["P", "M", "N"], allow_negative_numbers = true)]
    pub mkb: Option<Vec<f64>>,
    /// Table parameters (s, m, n).
    #[arg(long, num_args = 3, value_names = ["S", "M", "N"], allow_negative_numbers = true)]
    pub table: Option<Vec<f64>>,
    /// SAS parameters (p, q, v).
    #[arg(long, num_args = 3, value_names = ["P", "Q", "V"], allow_negative_numbers = true)]
    pub sas: Option<Vec<f64>>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<GreatestRootParams, Error> {
        match (&self.mkb, &self.table, &self.sas) {
            (Some(v), _, _) => GreatestRootParams::new(v[0], v[1], v[2]),
            (_, Some(v), _) => Ok(GreatestRootParams::from_table(TableParams::new(v[0], v[1], v[2])?)),
            (_, _, Some(v)) => Ok(GreatestRootParams::from_sas(SasParams::new(v[0], v[1], v[2])?)),
            _ => Err(Error::Domain("one of --mkb, --table or --sas is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Distribution-function levels.
    #[arg(long, num_args = 1.., default_values_t = [0.90, 0.95, 0.99])]
    pub alpha: Vec<f64>,
    /// Quantiles of the smallest root instead of the largest.
    #[arg(long)]
    pub smallest: bool,
}

#[derive(Debug, Args)]
pub struct PvalueArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Observed root.
    #[arg(long)]
    pub theta: f64,
    /// Levels at which to report critical values.
    #[arg(long, num_args = 1.., default_values_t = [0.90, 0.95, 0.99])]
    pub alpha: Vec<f64>,
    /// Lower-tail p-value of an observed smallest root.
    #[arg(long)]
    pub smallest: bool,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(subcommand)]
    pub kind: TestKind,
    /// Levels at which to report critical values.
    #[arg(long, global = true, num_args = 1.., default_values_t = [0.90, 0.95, 0.99])]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum TestKind {
    /// Independence of the first SPLIT columns from the rest.
    Independence {
        #[arg(long)]
        data: PathBuf,
        /// Number of leading columns in the first set.
        #[arg(long)]
        split: usize,
    },
    /// Canonical correlations of the first SPLIT columns (x) against the
    /// rest (y).
    Cca {
        #[arg(long)]
        data: PathBuf,
        /// Number of leading x columns.
        #[arg(long)]
        split: usize,
        /// Test that at most S correlations are nonzero.
        #[arg(long, default_value_t = 0)]
        s: usize,
    },
    /// One-way MANOVA.
    Manova {
        #[arg(long)]
        data: PathBuf,
        /// Name of the group column.
        #[arg(long)]
        group: String,
    },
    /// Equality of two covariance matrices.
    Cov {
        /// First sample.
        #[arg(long)]
        data: PathBuf,
        /// Second sample.
        #[arg(long)]
        data2: PathBuf,
    },
    /// Linear hypothesis C1 B M1 = 0 in a multivariate linear model.
    Mlm {
        /// Responses Y.
        #[arg(long)]
        data: PathBuf,
        /// Model matrix X.
        #[arg(long)]
        design: PathBuf,
        /// Hypothesis rows C1.
        #[arg(long)]
        contrast: PathBuf,
        /// Response transform M1.
        #[arg(long)]
        transform: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Number of replications.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default from ROYTW_WORKERS or the CPU count).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Levels at which to report empirical quantiles.
    #[arg(long, num_args = 1.., default_values_t = [0.5, 0.90, 0.95, 0.99])]
    pub alpha: Vec<f64>,
    /// Simulate the smallest root instead of the largest.
    #[arg(long)]
    pub smallest: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, num_args = 1.., default_values_t = [0.90, 0.95, 0.99])]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GridRegenArgs {
    /// Write the regenerated table to this path.
    #[arg(long)]
    pub write: Option<PathBuf>,
    /// Largest tolerated difference from the built-in table.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
}
