use crate::error::{Error, Result};
use crate::transform::{LtFamily, PgfFamily};

/// Lower end of the initial bracket.
pub const BRACKET_LO: f64 = 1e-12;
/// Upper bracket end doubles from 1 until it straddles the target or
/// reaches this cap.
pub const BRACKET_CAP: f64 = 1e9;
pub const BISECTION_ITERATIONS: usize = 200;
pub const INVERSION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Decreasing on `[0, ∞)` from 1 (Laplace transforms).
    Decreasing,
    /// Increasing on `[0, 1]` up to 1 (PGFs).
    Increasing,
}

/// Solves `f(s) = t` for a monotone `f` by bracketing and bisection.
///
/// The result satisfies `|f(s) − t| ≤ max(tol, 8·eps)`; rounding in `f`
/// itself sets the floor.
pub fn invert_monotone<F>(f: F, t: f64, orientation: Orientation, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("inversion target must lie in (0, 1), got {t}")));
    }
    let (mut lo, mut hi) = match orientation {
        Orientation::Decreasing => {
            let lo = if f(BRACKET_LO)? > t { BRACKET_LO } else { 0.0 };
            let mut hi = 1.0;
            while f(hi)? > t {
                hi *= 2.0;
                if hi > BRACKET_CAP {
                    return Err(Error::Domain(format!(
                        "target {t} lies below the transform's value at s = {BRACKET_CAP:e}"
                    )));
                }
            }
            (lo, hi)
        }
        Orientation::Increasing => {
            let bottom = f(0.0)?;
            if !(bottom < t) {
                return Err(Error::Domain(format!("target {t} is not above P(0) = {bottom}")));
            }
            (0.0, 1.0)
        }
    };
    // `lo` stays on the side where f exceeds t for decreasing f, below t
    // for increasing f.
    let above = |v: f64| match orientation {
        Orientation::Decreasing => v > t,
        Orientation::Increasing => v < t,
    };
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(f(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo)?, f(hi)?);
    let s = if (flo - t).abs() <= (fhi - t).abs() { lo } else { hi };
    let miss = (f(s)? - t).abs();
    if miss > tol.max(8.0 * f64::EPSILON) {
        return Err(Error::Domain(format!("inversion stalled at s = {s} with |f(s) - t| = {miss:e}")));
    }
    Ok(s)
}

/// `φ^{-1}(t)` for a Laplace transform.
pub fn invert_lt(phi: &LtFamily, t: f64) -> Result<f64> {
    invert_monotone(|s| phi.eval(s), t, Orientation::Decreasing, INVERSION_TOL)
}

/// `P^{-1}(t)` for a PGF restricted to `[0, 1]`.
pub fn invert_pgf(p: &PgfFamily, t: f64) -> Result<f64> {
    invert_monotone(|s| p.eval_real(s), t, Orientation::Increasing, INVERSION_TOL)
}
