use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Linear,
    Geometric,
}

/// Evaluation grid description, serialised as `{kind, lo, hi, n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::build(GridKind::Linear, lo, hi, n)
    }

    pub fn geometric(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0) {
            return Err(Error::Domain(format!("geometric grid needs lo > 0, got {lo}")));
        }
        Self::build(GridKind::Geometric, lo, hi, n)
    }

    fn build(kind: GridKind, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("grid must have at least one point".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || (n > 1 && lo == hi) {
            return Err(Error::Domain(format!("bad grid bounds {lo}:{hi}")));
        }
        Ok(GridSpec { kind, lo, hi, n })
    }

    /// 200 geometric points on `[1e-3, 1e2]`.
    pub fn lt_default() -> Self {
        GridSpec {
            kind: GridKind::Geometric,
            lo: 1e-3,
            hi: 1e2,
            n: 200,
        }
    }

    /// 201 linear points on `[−50, 50]`.
    pub fn cf_default() -> Self {
        GridSpec {
            kind: GridKind::Linear,
            lo: -50.0,
            hi: 50.0,
            n: 201,
        }
    }

    /// 200 linear points on `[1e-3, 0.999]`.
    pub fn unit_default() -> Self {
        GridSpec {
            kind: GridKind::Linear,
            lo: 1e-3,
            hi: 0.999,
            n: 200,
        }
    }

    /// Parses `lo:hi:n`. Positive ranges spanning more than two decades
    /// are spaced geometrically, everything else linearly.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::descriptor(text, "expected `lo:hi:n`");
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if lo > 0.0 && hi / lo > 100.0 {
            Self::geometric(lo, hi, n)
        } else {
            Self::linear(lo, hi, n)
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let f = i as f64 / last;
                match self.kind {
                    GridKind::Linear => self.lo + (self.hi - self.lo) * f,
                    GridKind::Geometric => self.lo * (self.hi / self.lo).powf(f),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let lt = GridSpec::lt_default().points();
        assert_eq!(lt.len(), 200);
        assert!((lt[0] - 1e-3).abs() < 1e-18 && (lt[199] - 100.0).abs() < 1e-12);
        let cf = GridSpec::cf_default().points();
        assert_eq!(cf.len(), 201);
        assert_eq!(cf[100], 0.0);
    }

    #[test]
    fn parsing() {
        assert_eq!(GridSpec::parse("0.001:100:50").unwrap().kind, GridKind::Geometric);
        assert_eq!(GridSpec::parse("-30:30:61").unwrap().kind, GridKind::Linear);
        assert!(GridSpec::parse("1:2").is_err());
        assert!(GridSpec::parse("2:1:5").is_err());
        assert!(GridSpec::parse("0:1:0").is_err());
    }
}
