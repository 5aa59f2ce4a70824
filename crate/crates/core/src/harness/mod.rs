//! Statistical tests, the Monte Carlo harness and the regression suite.

pub mod cli;
mod mc;
mod stats;
mod suite;

pub use mc::{
    discrete_sampler_verdict, ecf_verdict, monte_carlo, tv_verdict, McTarget, McTest, McVerdict, ECF_SCALE,
    P_VALUE_FLOOR, TV_THRESHOLD,
};
pub use stats::{
    correlation, ecf_distance, ks_two_sample, kolmogorov_sf, tv_distance_batches, tv_distance_pmf, KsResult, KS_MIN_N,
};
pub use suite::{run_suite, Group, SuiteEntry, SuiteReport, SUITE_SAMPLES};
