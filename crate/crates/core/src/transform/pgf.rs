use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::descriptor::Descriptor;

/// Slack on `|t| ≤ 1` so that CF values of modulus one up to rounding pass.
const DISK_SLACK: f64 = 1e-12;

/// Probability generating functions of compounding variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PgfFamily {
    /// `t·(a − (a−1)t^k)^{-1/k}`, support `{1, 1+k, 1+2k, ...}`.
    Harris { a: f64, k: u32 },
    /// `p·t / (1 − (1−p)t)` on `{1, 2, ...}`.
    Geometric1 { p: f64 },
    /// `1 − (1−t)^ν`.
    Sibuya { nu: f64 },
    /// `t^k`.
    Degenerate { k: u32 },
    /// `1 − λ(1−t)`: Bernoulli(λ) on `{0, 1}`.
    BernoulliShift { lambda: f64 },
}

/// Something with a power series around zero that can be evaluated on a
/// complex circle. Used by coefficient extraction.
pub trait ComplexPgf {
    fn eval_complex(&self, t: Complex64) -> Result<Complex64>;
}

fn check_unit_open(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "must lie in (0, 1)"))
    }
}

impl PgfFamily {
    pub fn harris(a: f64, k: u32) -> Result<Self> {
        let f = PgfFamily::Harris { a, k };
        f.validate().map(|_| f)
    }
    pub fn geometric1(p: f64) -> Result<Self> {
        let f = PgfFamily::Geometric1 { p };
        f.validate().map(|_| f)
    }
    pub fn sibuya(nu: f64) -> Result<Self> {
        let f = PgfFamily::Sibuya { nu };
        f.validate().map(|_| f)
    }
    pub fn degenerate(k: u32) -> Result<Self> {
        let f = PgfFamily::Degenerate { k };
        f.validate().map(|_| f)
    }
    pub fn bernoulli_shift(lambda: f64) -> Result<Self> {
        let f = PgfFamily::BernoulliShift { lambda };
        f.validate().map(|_| f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PgfFamily::Harris { a, k } => {
                if !(a > 1.0 && a.is_finite()) {
                    return Err(Error::param("a", a, "must exceed 1"));
                }
                if k == 0 {
                    return Err(Error::param("k", 0.0, "must be a positive integer"));
                }
                Ok(())
            }
            PgfFamily::Geometric1 { p } => check_unit_open("p", p),
            PgfFamily::Sibuya { nu } => check_unit_open("nu", nu),
            PgfFamily::Degenerate { k } => {
                if k == 0 {
                    Err(Error::param("k", 0.0, "must be a positive integer"))
                } else {
                    Ok(())
                }
            }
            PgfFamily::BernoulliShift { lambda } => check_unit_open("lambda", lambda),
        }
    }

    /// Evaluation on the closed unit disk. Non-integer powers use the
    /// principal branch and are refused when their base leaves the open
    /// right half-plane.
    pub fn eval(&self, t: Complex64) -> Result<Complex64> {
        let radius = t.norm();
        if radius > 1.0 + DISK_SLACK {
            return Err(Error::Domain(format!("PGF argument outside the unit disk (|t| = {radius})")));
        }
        let one = Complex64::new(1.0, 0.0);
        Ok(match *self {
            PgfFamily::Harris { a, k } => {
                let base = a - t.powu(k) * (a - 1.0);
                if k > 1 && !(base.re > 0.0) {
                    return Err(Error::BranchSafety {
                        radius,
                        detail: format!("Harris base {base} left the right half-plane"),
                    });
                }
                t * base.powf(-1.0 / k as f64)
            }
            PgfFamily::Geometric1 { p } => t * p / ((one - t) + t * p),
            PgfFamily::Sibuya { nu } => {
                let base = one - t;
                if base.re < 0.0 {
                    return Err(Error::BranchSafety {
                        radius,
                        detail: format!("Sibuya base {base} left the right half-plane"),
                    });
                }
                if base == Complex64::new(0.0, 0.0) {
                    one
                } else {
                    one - base.powf(nu)
                }
            }
            PgfFamily::Degenerate { k } => t.powu(k),
            PgfFamily::BernoulliShift { lambda } => one - (one - t) * lambda,
        })
    }

    /// Real evaluation on `(−∞, 1]`, where every family has a real closed
    /// form. Used by monotone inversion, which may step below zero.
    pub fn eval_real(&self, t: f64) -> Result<f64> {
        if !(t <= 1.0) {
            return Err(Error::Domain(format!("PGF real argument must not exceed 1, got {t}")));
        }
        Ok(match *self {
            PgfFamily::Harris { a, k } => {
                let base = a - (a - 1.0) * t.powi(k as i32);
                if !(base > 0.0) {
                    return Err(Error::Domain(format!("Harris base is non-positive at t = {t}")));
                }
                t * base.powf(-1.0 / k as f64)
            }
            PgfFamily::Geometric1 { p } => p * t / ((1.0 - t) + p * t),
            PgfFamily::Sibuya { nu } => 1.0 - (1.0 - t).powf(nu),
            PgfFamily::Degenerate { k } => t.powi(k as i32),
            PgfFamily::BernoulliShift { lambda } => 1.0 - lambda * (1.0 - t),
        })
    }

    /// `E[N]`, infinite for Sibuya.
    pub fn mean(&self) -> f64 {
        match *self {
            // P'(1) = 1 + (a−1)
            PgfFamily::Harris { a, .. } => a,
            PgfFamily::Geometric1 { p } => 1.0 / p,
            PgfFamily::Sibuya { .. } => f64::INFINITY,
            PgfFamily::Degenerate { k } => k as f64,
            PgfFamily::BernoulliShift { lambda } => lambda,
        }
    }

    pub fn descriptor(&self) -> Descriptor {
        match *self {
            PgfFamily::Harris { a, k } => Descriptor::new("harris").with("a", a).with("k", k),
            PgfFamily::Geometric1 { p } => Descriptor::new("geometric1").with("p", p),
            PgfFamily::Sibuya { nu } => Descriptor::new("sibuya").with("nu", nu),
            PgfFamily::Degenerate { k } => Descriptor::new("degenerate").with("k", k),
            PgfFamily::BernoulliShift { lambda } => Descriptor::new("bshift").with("lambda", lambda),
        }
    }

    pub fn from_descriptor(d: &Descriptor) -> Result<Self> {
        let family = match d.tag.as_str() {
            "harris" => {
                d.expect_only(&["a", "k"])?;
                PgfFamily::Harris {
                    a: d.f64("a")?,
                    k: d.u32("k")?,
                }
            }
            "geometric1" | "geometric" => {
                d.expect_only(&["p"])?;
                PgfFamily::Geometric1 { p: d.f64("p")? }
            }
            "sibuya" => {
                d.expect_only(&["nu"])?;
                PgfFamily::Sibuya { nu: d.f64("nu")? }
            }
            "degenerate" => {
                d.expect_only(&["k"])?;
                PgfFamily::Degenerate { k: d.u32("k")? }
            }
            "bshift" | "bernoulli" => {
                d.expect_only(&["lambda"])?;
                PgfFamily::BernoulliShift {
                    lambda: d.f64("lambda")?,
                }
            }
            other => return Err(Error::descriptor(other, "unknown compounder family")),
        };
        family.validate()?;
        Ok(family)
    }
}

impl ComplexPgf for PgfFamily {
    fn eval_complex(&self, t: Complex64) -> Result<Complex64> {
        self.eval(t)
    }
}

impl fmt::Display for PgfFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.descriptor().fmt(f)
    }
}

impl FromStr for PgfFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PgfFamily::from_descriptor(&Descriptor::parse(s)?)
    }
}

/// Adapts a closure to [`ComplexPgf`].
pub struct FnPgf<F>(pub F);

impl<F: Fn(Complex64) -> Result<Complex64>> ComplexPgf for FnPgf<F> {
    fn eval_complex(&self, t: Complex64) -> Result<Complex64> {
        (self.0)(t)
    }
}
