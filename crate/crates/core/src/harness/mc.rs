use serde::Serialize;

use crate::discrete::{extract_pmf, DiscretePgf, DEFAULT_N_MAX, DEFAULT_RADIUS};
use crate::error::Result;
use crate::sample::{
    sample_discrete, sample_random_sum, sample_transform, RandomSource, SampleBatch, Summand,
};
use crate::transform::{PgfFamily, Transform};

use super::stats::{ecf_distance, ks_two_sample, tv_distance_pmf};

/// KS passes when the p-value exceeds this floor.
pub const P_VALUE_FLOOR: f64 = 1e-3;
/// TV passes below this threshold.
pub const TV_THRESHOLD: f64 = 0.02;
/// ECF passes below `ECF_SCALE / √n`.
pub const ECF_SCALE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McTest {
    KsTwoSample,
    TvPmf,
    EcfGrid,
}

/// `pass ⇔ p_value > floor` for KS, `statistic < threshold` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McVerdict {
    pub test: McTest,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub n: usize,
    pub pass: bool,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_count: Option<usize>,
}

/// The law being summed in a Monte Carlo check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McTarget {
    Continuous(Transform),
    Discrete(DiscretePgf),
}

impl McTarget {
    /// A transform descriptor first, a discrete one otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        match text.parse::<Transform>() {
            Ok(t) => Ok(McTarget::Continuous(t)),
            Err(first) => text.parse::<DiscretePgf>().map(McTarget::Discrete).map_err(|_| first),
        }
    }
}

/// Compares `c·S_N` (or the thinned discrete sum) against the law of `X`.
///
/// Continuous: KS between the sum batch on stream 1 and a fresh `X` batch
/// on stream 2. Discrete: TV between the sum batch and the extracted pmf
/// of `Q`.
pub fn monte_carlo(count: &PgfFamily, target: &McTarget, c: f64, n: usize, seed: u64) -> Result<McVerdict> {
    let mut sum_src = RandomSource::new(seed, 1);
    match target {
        McTarget::Continuous(phi) => {
            let sums = sample_random_sum(count, &Summand::from_transform(phi)?, c, n, &mut sum_src)?;
            let fresh = sample_transform(phi, n, &mut RandomSource::new(seed, 2))?;
            let ks = ks_two_sample(&sums, &fresh)?;
            Ok(McVerdict {
                test: McTest::KsTwoSample,
                statistic: ks.statistic,
                p_value: Some(ks.p_value),
                threshold: P_VALUE_FLOOR,
                n,
                pass: ks.p_value > P_VALUE_FLOOR,
                seeds: vec![seed],
                zero_count: sums.zero_count,
            })
        }
        McTarget::Discrete(q) => {
            let sums = sample_random_sum(count, &Summand::from_discrete(q)?, c, n, &mut sum_src)?;
            let table = extract_pmf(q, DEFAULT_N_MAX, DEFAULT_RADIUS)?;
            let tv = tv_distance_pmf(&sums, &table)?;
            Ok(McVerdict {
                test: McTest::TvPmf,
                statistic: tv,
                p_value: None,
                threshold: TV_THRESHOLD,
                n,
                pass: tv < TV_THRESHOLD,
                seeds: vec![seed],
                zero_count: sums.zero_count,
            })
        }
    }
}

/// TV between a discrete batch and the extracted table of `q`.
pub fn tv_verdict(batch: &SampleBatch, q: &DiscretePgf) -> Result<McVerdict> {
    let table = extract_pmf(q, DEFAULT_N_MAX, DEFAULT_RADIUS)?;
    let tv = tv_distance_pmf(batch, &table)?;
    Ok(McVerdict {
        test: McTest::TvPmf,
        statistic: tv,
        p_value: None,
        threshold: TV_THRESHOLD,
        n: batch.len(),
        pass: tv < TV_THRESHOLD,
        seeds: vec![batch.seed],
        zero_count: None,
    })
}

/// ECF check of a continuous batch against a CF on `grid`.
pub fn ecf_verdict(batch: &SampleBatch, phi: &crate::transform::CfFamily, grid: &[f64]) -> Result<McVerdict> {
    let d = ecf_distance(batch, phi, grid)?;
    let threshold = ECF_SCALE / (batch.len() as f64).sqrt();
    Ok(McVerdict {
        test: McTest::EcfGrid,
        statistic: d,
        p_value: None,
        threshold,
        n: batch.len(),
        pass: d < threshold,
        seeds: vec![batch.seed],
        zero_count: None,
    })
}

/// Same-law check for a discrete target drawn directly.
pub fn discrete_sampler_verdict(q: &DiscretePgf, n: usize, seed: u64) -> Result<McVerdict> {
    let batch = sample_discrete(q, n, &mut RandomSource::new(seed, 0))?;
    tv_verdict(&batch, q)
}
