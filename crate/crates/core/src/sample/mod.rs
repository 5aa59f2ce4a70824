//! Seeded samplers built on the stochastic representations of each family.
//!
//! A batch is a pure function of `(family, n, seed, stream)`.

mod batch;
mod laws;
mod source;

pub use batch::{read_bin, BatchValues, SampleBatch, BINARY_HEADER_LEN, BINARY_MAGIC};
pub use laws::{kanter, ContinuousLaw, DiscreteLaw, SUM_CAP};
pub use source::{RandomSource, DEFAULT_SEED};

use crate::discrete::DiscretePgf;
use crate::error::{Error, Result};
use crate::transform::{LtFamily, PgfFamily, Transform};

fn continuous_batch(law: &ContinuousLaw, family: String, n: usize, src: &mut RandomSource) -> SampleBatch {
    let values = (0..n).map(|_| law.draw(src.rng())).collect();
    SampleBatch::continuous(family, src.master_seed(), src.stream_index(), values)
}

fn discrete_batch(law: &DiscreteLaw, family: String, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    let values = (0..n).map(|_| law.draw(src.rng())).collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch::discrete(family, src.master_seed(), src.stream_index(), values))
}

/// LT `exp(−s^α)`; `α = 1` is the unit point mass.
pub fn sample_positive_stable(alpha: f64, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    let phi = LtFamily::positive_stable(alpha, 1.0)?;
    Ok(continuous_batch(&ContinuousLaw::for_lt(&phi)?, phi.to_string(), n, src))
}

/// LT `(1 + λs^α)^{-β}`.
pub fn sample_gen_ml(alpha: f64, beta: f64, lambda: f64, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    let phi = LtFamily::positive_linnik(alpha, lambda, beta)?;
    Ok(continuous_batch(&ContinuousLaw::gen_ml(alpha, beta, lambda)?, phi.to_string(), n, src))
}

pub fn sample_transform(phi: &Transform, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    Ok(continuous_batch(&ContinuousLaw::for_transform(phi)?, phi.to_string(), n, src))
}

pub fn sample_compounder(p: &PgfFamily, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    discrete_batch(&DiscreteLaw::for_pgf(p)?, p.to_string(), n, src)
}

/// `N ~ Poisson(Y)` with `Y` drawn from the law of `φ`, so the PGF of `N`
/// is `φ(1−s)`.
pub fn sample_discrete_via_poisson_mixture(phi: &LtFamily, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    sample_discrete(&DiscretePgf::from_lt(*phi), n, src)
}

pub fn sample_discrete(q: &DiscretePgf, n: usize, src: &mut RandomSource) -> Result<SampleBatch> {
    discrete_batch(&DiscreteLaw::for_discrete(q)?, q.to_string(), n, src)
}

/// Replaces each count `x` by a Binomial(`x`, `c`) draw.
pub fn binomial_thin(batch: &SampleBatch, c: f64, src: &mut RandomSource) -> Result<SampleBatch> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("thinning c must lie in (0, 1), got {c}")));
    }
    let values = batch
        .counts()?
        .iter()
        .map(|&x| laws::binomial(x, c, src.rng()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch::discrete(
        format!("{}@{c}", batch.family),
        src.master_seed(),
        src.stream_index(),
        values,
    ))
}

/// The summand law of a random sum.
#[derive(Debug, Clone)]
pub enum Summand {
    Continuous(ContinuousLaw, String),
    Discrete(DiscreteLaw, String),
}

impl Summand {
    pub fn from_transform(phi: &Transform) -> Result<Self> {
        Ok(Summand::Continuous(ContinuousLaw::for_transform(phi)?, phi.to_string()))
    }

    pub fn from_discrete(q: &DiscretePgf) -> Result<Self> {
        Ok(Summand::Discrete(DiscreteLaw::for_discrete(q)?, q.to_string()))
    }

    pub fn from_compounder(p: &PgfFamily) -> Result<Self> {
        Ok(Summand::Discrete(DiscreteLaw::for_pgf(p)?, p.to_string()))
    }
}

/// `c·(X_1 + … + X_N)` for continuous summands, `Σ c∘X_i` (binomial
/// thinning) for discrete ones. Draws with `N = 0` are counted in
/// [`SampleBatch::zero_count`]; `N > SUM_CAP` is an overflow error.
pub fn sample_random_sum(
    count: &PgfFamily,
    summand: &Summand,
    c: f64,
    n: usize,
    src: &mut RandomSource,
) -> Result<SampleBatch> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("scale c must lie in (0, 1], got {c}")));
    }
    let n_law = DiscreteLaw::for_pgf(count)?;
    let mut zeros = 0;
    let mut draw_count = |src: &mut RandomSource| -> Result<u64> {
        let k = n_law.draw(src.rng())?;
        if k > SUM_CAP {
            return Err(Error::Overflow(format!("random sum drew N = {k} above the cap {SUM_CAP}")));
        }
        if k == 0 {
            zeros += 1;
        }
        Ok(k)
    };
    let mut batch = match summand {
        Summand::Continuous(law, name) => {
            let mut values = Vec::with_capacity(n);
            for _ in 0..n {
                let k = draw_count(src)?;
                let sum: f64 = (0..k).map(|_| law.draw(src.rng())).sum();
                values.push(c * sum);
            }
            SampleBatch::continuous(format!("sum[{count}]({name})*{c}"), src.master_seed(), src.stream_index(), values)
        }
        Summand::Discrete(law, name) => {
            let mut values = Vec::with_capacity(n);
            for _ in 0..n {
                let k = draw_count(src)?;
                let mut sum = 0u64;
                for _ in 0..k {
                    let x = law.draw(src.rng())?;
                    let kept = if c == 1.0 { x } else { laws::binomial(x, c, src.rng())? };
                    sum = sum.saturating_add(kept);
                }
                values.push(sum);
            }
            SampleBatch::discrete(format!("sum[{count}]({name})@{c}"), src.master_seed(), src.stream_index(), values)
        }
    };
    batch.zero_count = Some(zeros);
    Ok(batch)
}
