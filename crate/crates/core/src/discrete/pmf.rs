use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::transform::ComplexPgf;

/// Coefficients below `-NEGATIVE_TOL` count as genuinely negative.
pub const NEGATIVE_TOL: f64 = 1e-10;

pub const DEFAULT_N_MAX: usize = 64;

/// Default contour radius. Round-off in coefficient `n` grows like
/// `eps·r^{-n}`, so the radius sits close to the unit circle; aliasing from
/// coefficient `n + m` is damped by `r^m` with `m = 4·n_max`.
pub const DEFAULT_RADIUS: f64 = 0.9;

/// Extracted coefficients `p_0..p_n` of a generating function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfTable {
    pub coeffs: Vec<f64>,
    #[serde(skip)]
    pub radius: f64,
    pub mass_deficiency: f64,
    pub first_negative_index: Option<usize>,
}

impl PmfTable {
    /// Builds a table from known coefficients, filling the diagnostics.
    pub fn from_coeffs(coeffs: Vec<f64>, radius: f64) -> Self {
        let mass_deficiency = 1.0 - coeffs.iter().sum::<f64>();
        let first_negative_index = coeffs.iter().position(|&p| p < -NEGATIVE_TOL);
        PmfTable {
            coeffs,
            radius,
            mass_deficiency,
            first_negative_index,
        }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Most negative coefficient, if any is below zero.
    pub fn min_coeff(&self) -> f64 {
        self.coeffs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p_n\n");
        for (n, p) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{n},{p:e}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "n,p_n" => {}
            other => return Err(Error::Io(format!("expected `n,p_n` header, found {other:?}"))),
        }
        let mut coeffs = Vec::new();
        for (i, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let (n, p) = line
                .split_once(',')
                .ok_or_else(|| Error::Io(format!("malformed row `{line}`")))?;
            if n.trim().parse::<usize>().ok() != Some(i) {
                return Err(Error::Io(format!("row {i} has index `{n}`")));
            }
            coeffs.push(
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Io(format!("bad probability `{p}`")))?,
            );
        }
        Ok(PmfTable::from_coeffs(coeffs, f64::NAN))
    }
}

/// Coefficients `p_0..p_{n_max}` by the trapezoidal rule on `m = 4·n_max`
/// equally spaced points of the circle `|t| = radius`:
/// `p_n = (1/m) Σ_j Q(r ω^j) r^{-n} ω^{-nj}`.
pub fn extract_pmf<Q: ComplexPgf + ?Sized>(q: &Q, n_max: usize, radius: f64) -> Result<PmfTable> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be positive".into()));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Domain(format!("contour radius must lie in (0, 1), got {radius}")));
    }
    let m = 4 * n_max;
    let values = (0..m)
        .map(|j| q.eval_complex(Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64)))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = (0..=n_max)
        .map(|n| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    // reduce n·j mod m before forming the angle
                    let k = (n * j) % m;
                    v * Complex64::from_polar(1.0, -2.0 * PI * k as f64 / m as f64)
                })
                .sum();
            sum.re / m as f64 * radius.powi(-(n as i32))
        })
        .collect();
    Ok(PmfTable::from_coeffs(coeffs, radius))
}

/// PGF-hood verdict: every coefficient and the mass deficiency at least
/// `-tol`. Returns the first offending index alongside.
pub fn is_pgf_coeffs(table: &PmfTable, tol: f64) -> (bool, Option<usize>) {
    let first = table.coeffs.iter().position(|&p| p < -tol);
    (first.is_none() && table.mass_deficiency >= -tol, first)
}
