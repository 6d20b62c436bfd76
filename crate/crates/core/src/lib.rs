//! Tracy-Widom approximation to the distribution of Roy's largest root,
//! with the multivariate tests that reduce to it and a Monte Carlo
//! reference sampler.

pub mod error;
pub mod greatest_root;
mod linalg;
pub mod mc_oracle;
pub mod special;
pub mod tw;

pub use error::{Error, Result};
pub use greatest_root::{
    pvalue_f_bound, pvalue_tw, quantile_approx, smallest_root_pvalue, tw_constants, GreatestRootParams, PValue,
    Probability, SasParams, TableParams, TestOutcome, TwConstants,
};
pub use mc_oracle::{sample_greatest_root, sample_wishart, EmpiricalDist, SimConfig};
pub use mv_tests::{
    cca, cca_null_test, cca_sequential_test, cov_equality_test, greatest_root_of, independence_test, manova_one_way,
    mlm_test, DataMatrix, LinearHypothesis, Role, SumsOfProducts,
};
pub use tw::{tw_cdf, tw_pdf, tw_quantile, tw_sample, TracyWidom, TwOrder};
