use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::discrete::PmfTable;
use crate::error::{Error, Result};
use crate::sample::SampleBatch;
use crate::transform::CfFamily;

/// KS batches smaller than this are refused.
pub const KS_MIN_N: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // P(K ≤ x) = √(2π)/x Σ exp(−(2k−1)²π²/(8x²)), fast for small x
        let sum: f64 = (1..=20)
            .map(|k| {
                let j = (2 * k - 1) as f64;
                (-j * j * PI * PI / (8.0 * x * x)).exp()
            })
            .sum();
        return (1.0 - (2.0 * PI).sqrt() / x * sum).clamp(0.0, 1.0);
    }
    let sum: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * x * x).exp()
        })
        .sum();
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value at
/// effective size `n1·n2/(n1+n2)`.
pub fn ks_two_sample(b1: &SampleBatch, b2: &SampleBatch) -> Result<KsResult> {
    if b1.is_discrete() || b2.is_discrete() {
        return Err(Error::Domain(
            "KS needs continuous batches; compare discrete batches with tv_distance_pmf".into(),
        ));
    }
    let mut x = b1.reals()?.to_vec();
    let mut y = b2.reals()?.to_vec();
    if x.len() < KS_MIN_N || y.len() < KS_MIN_N {
        return Err(Error::Domain(format!(
            "KS needs at least {KS_MIN_N} values per batch, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(&y).any(|v| v.is_nan()) {
        return Err(Error::Domain("batch contains NaN".into()));
    }
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n1 && j < n2 {
        let v = x[i].min(y[j]);
        while i < n1 && x[i] <= v {
            i += 1;
        }
        while j < n2 && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let n_eff = (n1 * n2) as f64 / (n1 + n2) as f64;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf(n_eff.sqrt() * d),
        n1,
        n2,
    })
}

/// Total variation between a count batch and an exact table. Mass above
/// `n_max` on both sides is lumped into one cell:
/// `½Σ|p̂_n − p_n| + ½|tail − deficiency|`.
pub fn tv_distance_pmf(batch: &SampleBatch, exact: &PmfTable) -> Result<f64> {
    let (freq, tail) = batch.empirical_pmf(exact.n_max())?;
    let body: f64 = freq.iter().zip(&exact.coeffs).map(|(a, b)| (a - b).abs()).sum();
    Ok(0.5 * body + 0.5 * (tail - exact.mass_deficiency.max(0.0)).abs())
}

/// Total variation between the empirical pmfs of two count batches.
pub fn tv_distance_batches(b1: &SampleBatch, b2: &SampleBatch) -> Result<f64> {
    let mut diff: BTreeMap<u64, f64> = BTreeMap::new();
    for (batch, sign) in [(b1, 1.0), (b2, -1.0)] {
        let weight = sign / batch.len() as f64;
        for &x in batch.counts()? {
            *diff.entry(x).or_default() += weight;
        }
    }
    Ok(0.5 * diff.values().map(|d| d.abs()).sum::<f64>())
}

/// Sample correlation of two equally long real sequences.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// `max_u |mean(e^{iuX}) − φ(u)|` over `grid`.
pub fn ecf_distance(batch: &SampleBatch, phi: &CfFamily, grid: &[f64]) -> Result<f64> {
    let xs = batch.reals()?;
    let n = xs.len() as f64;
    Ok(grid
        .iter()
        .map(|&u| {
            let (re, im) = xs
                .iter()
                .fold((0.0, 0.0), |(re, im), x| (re + (u * x).cos(), im + (u * x).sin()));
            let exact = phi.eval(u);
            ((re / n - exact.re).powi(2) + (im / n - exact.im).powi(2)).sqrt()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_branches_agree() {
        // both series are valid near x = 1
        let small = |x: f64| {
            let sum: f64 = (1..=20)
                .map(|k| {
                    let j = (2 * k - 1) as f64;
                    (-j * j * PI * PI / (8.0 * x * x)).exp()
                })
                .sum();
            1.0 - (2.0 * PI).sqrt() / x * sum
        };
        assert!((small(1.0) - kolmogorov_sf(1.0)).abs() < 1e-14);
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn identical_batches() {
        let b = SampleBatch::continuous("x", 0, 0, (0..200).map(|i| i as f64).collect());
        let r = ks_two_sample(&b, &b).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn refusals() {
        let small = SampleBatch::continuous("x", 0, 0, vec![1.0; 50]);
        assert!(ks_two_sample(&small, &small).is_err());
        let counts = SampleBatch::discrete("n", 0, 0, vec![1; 500]);
        assert!(ks_two_sample(&counts, &counts).is_err());
    }

    #[test]
    fn tv_of_exact_frequencies() {
        let table = PmfTable::from_coeffs(vec![0.25, 0.5, 0.25], 0.5);
        let b = SampleBatch::discrete("n", 0, 0, vec![0, 1, 1, 2]);
        assert_eq!(tv_distance_pmf(&b, &table).unwrap(), 0.0);
        let shifted = SampleBatch::discrete("n", 0, 0, vec![1, 2, 2, 3]);
        assert!((tv_distance_pmf(&shifted, &table).unwrap() - 0.5).abs() < 1e-15);
    }
}
