use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Magic bytes opening the binary batch format.
pub const BINARY_MAGIC: &[u8; 4] = b"RSB1";
pub const BINARY_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BatchValues {
    Continuous(Vec<f64>),
    Discrete(Vec<u64>),
}

/// Draws plus provenance. Discrete batches hold counts only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    /// Random sums only: how many draws had `N = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_count: Option<usize>,
    pub values: BatchValues,
}

impl SampleBatch {
    pub fn continuous(family: impl Into<String>, seed: u64, stream: u64, values: Vec<f64>) -> Self {
        SampleBatch {
            family: family.into(),
            n: values.len(),
            seed,
            stream,
            zero_count: None,
            values: BatchValues::Continuous(values),
        }
    }

    pub fn discrete(family: impl Into<String>, seed: u64, stream: u64, values: Vec<u64>) -> Self {
        SampleBatch {
            family: family.into(),
            n: values.len(),
            seed,
            stream,
            zero_count: None,
            values: BatchValues::Discrete(values),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.values, BatchValues::Discrete(_))
    }

    pub fn counts(&self) -> Result<&[u64]> {
        match &self.values {
            BatchValues::Discrete(v) => Ok(v),
            BatchValues::Continuous(_) => Err(Error::Domain(format!("batch `{}` is continuous", self.family))),
        }
    }

    pub fn reals(&self) -> Result<&[f64]> {
        match &self.values {
            BatchValues::Continuous(v) => Ok(v),
            BatchValues::Discrete(_) => Err(Error::Domain(format!("batch `{}` is discrete", self.family))),
        }
    }

    /// Values as reals, whatever the kind.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.values {
            BatchValues::Continuous(v) => v.clone(),
            BatchValues::Discrete(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.to_f64().iter().sum::<f64>() / self.n as f64
    }

    /// `mean(e^{-sX})` and its standard error.
    pub fn empirical_lt(&self, s: f64) -> (f64, f64) {
        let vals: Vec<f64> = self.to_f64().iter().map(|x| (-s * x).exp()).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    /// Relative frequencies of `0..=n_max` and the mass above `n_max`.
    pub fn empirical_pmf(&self, n_max: usize) -> Result<(Vec<f64>, f64)> {
        let counts = self.counts()?;
        let mut freq = vec![0.0; n_max + 1];
        let mut tail = 0.0;
        for &x in counts {
            match usize::try_from(x) {
                Ok(i) if i <= n_max => freq[i] += 1.0,
                _ => tail += 1.0,
            }
        }
        let n = counts.len() as f64;
        freq.iter_mut().for_each(|f| *f /= n);
        Ok((freq, tail / n))
    }

    /// One value per line under a metadata comment and a `value` header.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# family={} n={} seed={} stream={}\nvalue\n",
            self.family, self.n, self.seed, self.stream
        );
        match &self.values {
            BatchValues::Continuous(v) => v.iter().for_each(|x| {
                let _ = writeln!(out, "{x:e}");
            }),
            BatchValues::Discrete(v) => v.iter().for_each(|x| {
                let _ = writeln!(out, "{x}");
            }),
        }
        out
    }

    /// `RSB1`, `n` as u32 LE, seed as u64 LE, then each value as f64 LE.
    pub fn to_bin(&self) -> Result<Vec<u8>> {
        let n = u32::try_from(self.n).map_err(|_| Error::Overflow(format!("{} values exceed the u32 header", self.n)))?;
        let mut out = Vec::with_capacity(BINARY_HEADER_LEN + 8 * self.n);
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&n.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for x in self.to_f64() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        Ok(out)
    }
}

/// Reads the binary form back as `(seed, values)`.
pub fn read_bin(bytes: &[u8]) -> Result<(u64, Vec<f64>)> {
    if bytes.len() < BINARY_HEADER_LEN || &bytes[..4] != BINARY_MAGIC {
        return Err(Error::Io("missing RSB1 header".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let seed = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let body = &bytes[BINARY_HEADER_LEN..];
    if body.len() != 8 * n {
        return Err(Error::Io(format!("header announces {n} values but body has {} bytes", body.len())));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((seed, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let b = SampleBatch::continuous("pstable:alpha=0.5,lambda=1", 42, 0, vec![1.5, -2.0, 1e300]);
        let bytes = b.to_bin().unwrap();
        assert_eq!(&bytes[..4], b"RSB1");
        assert_eq!(bytes.len(), 16 + 24);
        let (seed, values) = read_bin(&bytes).unwrap();
        assert_eq!(seed, 42);
        assert_eq!(values, vec![1.5, -2.0, 1e300]);
        assert!(read_bin(&bytes[..20]).is_err());
        assert!(read_bin(b"XXXX0000000000000").is_err());
    }

    #[test]
    fn csv_and_pmf() {
        let b = SampleBatch::discrete("geometric1:p=0.5", 1, 2, vec![0, 1, 1, 5]);
        let csv = b.to_csv();
        assert!(csv.starts_with("# family=geometric1:p=0.5 n=4 seed=1 stream=2\nvalue\n0\n1\n"));
        let (pmf, tail) = b.empirical_pmf(2).unwrap();
        assert_eq!(pmf, vec![0.25, 0.5, 0.0]);
        assert_eq!(tail, 0.25);
        assert!(b.reals().is_err());
    }
}
