use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::descriptor::Descriptor;
use super::scale::ScaleFunction;

/// Laplace transforms of laws on `[0, ∞)`.
///
/// Every member factors as `outer(ψ(s))` with `outer` either
/// `x ↦ (1+x)^{-β}` or `x ↦ e^{-x}`; see [`LtFamily::factor`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LtFamily {
    /// `(1+s)^{-β}`
    Gamma { beta: f64 },
    /// `(1+λs^α)^{-1}`
    MittagLeffler { alpha: f64, lambda: f64 },
    /// `(1+λs^α)^{-β}`
    PositiveLinnik { alpha: f64, lambda: f64, beta: f64 },
    /// `(1+ψ(s))^{-1}`
    SemiMl { psi: ScaleFunction },
    /// `(1+ψ(s))^{-β}`
    GenSemiMl { psi: ScaleFunction, beta: f64 },
    /// `exp(-λs^α)`
    PositiveStable { alpha: f64, lambda: f64 },
    /// `exp(-ψ(s))`
    SemiStable { psi: ScaleFunction },
}

/// The outer function of an LT factorisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outer {
    /// `x ↦ (1+x)^{-β}`
    Power { beta: f64 },
    /// `x ↦ e^{-x}`
    Exp,
}

impl Outer {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Outer::Power { beta } => (1.0 + x).powf(-beta),
            Outer::Exp => (-x).exp(),
        }
    }

    /// Inverse on `(0, 1]`.
    pub fn invert(&self, t: f64) -> f64 {
        match *self {
            Outer::Power { beta } => t.powf(-1.0 / beta) - 1.0,
            Outer::Exp => -t.ln(),
        }
    }

    pub fn eval_complex(&self, x: Complex64) -> Result<Complex64> {
        match *self {
            Outer::Power { beta } => {
                let base = x + 1.0;
                if !(base.re > 0.0) {
                    return Err(Error::BranchSafety {
                        radius: x.norm(),
                        detail: format!("1 + psi = {base} left the right half-plane"),
                    });
                }
                Ok(base.powf(-beta))
            }
            Outer::Exp => Ok((-x).exp()),
        }
    }

    /// Principal-branch inverse.
    pub fn invert_complex(&self, t: Complex64) -> Complex64 {
        match *self {
            Outer::Power { beta } => t.powf(-1.0 / beta) - 1.0,
            Outer::Exp => -t.ln(),
        }
    }
}

fn check_lt_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "must lie in (0, 1] for a Laplace transform"))
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be positive"))
    }
}

fn check_lt_psi(psi: &ScaleFunction) -> Result<()> {
    check_lt_alpha(psi.alpha())?;
    if !psi.is_increasing() {
        return Err(Error::param(
            "eps",
            psi.epsilon(),
            "log-periodic amplitude too large: psi must be increasing",
        ));
    }
    Ok(())
}

impl LtFamily {
    pub fn gamma(beta: f64) -> Result<Self> {
        let f = LtFamily::Gamma { beta };
        f.validate().map(|_| f)
    }
    pub fn mittag_leffler(alpha: f64, lambda: f64) -> Result<Self> {
        let f = LtFamily::MittagLeffler { alpha, lambda };
        f.validate().map(|_| f)
    }
    pub fn positive_linnik(alpha: f64, lambda: f64, beta: f64) -> Result<Self> {
        let f = LtFamily::PositiveLinnik { alpha, lambda, beta };
        f.validate().map(|_| f)
    }
    pub fn semi_ml(psi: ScaleFunction) -> Result<Self> {
        let f = LtFamily::SemiMl { psi };
        f.validate().map(|_| f)
    }
    pub fn gen_semi_ml(psi: ScaleFunction, beta: f64) -> Result<Self> {
        let f = LtFamily::GenSemiMl { psi, beta };
        f.validate().map(|_| f)
    }
    pub fn positive_stable(alpha: f64, lambda: f64) -> Result<Self> {
        let f = LtFamily::PositiveStable { alpha, lambda };
        f.validate().map(|_| f)
    }
    pub fn semi_stable(psi: ScaleFunction) -> Result<Self> {
        let f = LtFamily::SemiStable { psi };
        f.validate().map(|_| f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LtFamily::Gamma { beta } => check_positive("beta", beta),
            LtFamily::MittagLeffler { alpha, lambda } | LtFamily::PositiveStable { alpha, lambda } => {
                check_lt_alpha(alpha)?;
                check_positive("lambda", lambda)
            }
            LtFamily::PositiveLinnik { alpha, lambda, beta } => {
                check_lt_alpha(alpha)?;
                check_positive("lambda", lambda)?;
                check_positive("beta", beta)
            }
            LtFamily::SemiMl { psi } | LtFamily::SemiStable { psi } => check_lt_psi(&psi),
            LtFamily::GenSemiMl { psi, beta } => {
                check_lt_psi(&psi)?;
                check_positive("beta", beta)
            }
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("Laplace transform needs s >= 0, got {s}")));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match *self {
            LtFamily::Gamma { beta } => (1.0 + s).powf(-beta),
            LtFamily::MittagLeffler { alpha, lambda } => 1.0 / (1.0 + lambda * s.powf(alpha)),
            LtFamily::PositiveLinnik { alpha, lambda, beta } => (1.0 + lambda * s.powf(alpha)).powf(-beta),
            LtFamily::SemiMl { psi } => 1.0 / (1.0 + psi.eval_unchecked(s)),
            LtFamily::GenSemiMl { psi, beta } => (1.0 + psi.eval_unchecked(s)).powf(-beta),
            LtFamily::PositiveStable { alpha, lambda } => (-lambda * s.powf(alpha)).exp(),
            LtFamily::SemiStable { psi } => (-psi.eval_unchecked(s)).exp(),
        }
    }

    /// Principal-branch continuation to `Re z ≥ 0`.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if z.re < 0.0 {
            return Err(Error::BranchSafety {
                radius: z.norm(),
                detail: format!("Laplace transform argument {z} has negative real part"),
            });
        }
        let (outer, psi) = self.factor();
        outer.eval_complex(psi.eval_complex(z))
    }

    /// `(outer, ψ)` with `φ = outer ∘ ψ`.
    pub fn factor(&self) -> (Outer, ScaleFunction) {
        // Parameters were validated at construction, so the power builders
        // cannot fail here.
        let power = |lambda, alpha| ScaleFunction::power(lambda, alpha).expect("validated power");
        match *self {
            LtFamily::Gamma { beta } => (Outer::Power { beta }, power(1.0, 1.0)),
            LtFamily::MittagLeffler { alpha, lambda } => (Outer::Power { beta: 1.0 }, power(lambda, alpha)),
            LtFamily::PositiveLinnik { alpha, lambda, beta } => (Outer::Power { beta }, power(lambda, alpha)),
            LtFamily::SemiMl { psi } => (Outer::Power { beta: 1.0 }, psi),
            LtFamily::GenSemiMl { psi, beta } => (Outer::Power { beta }, psi),
            LtFamily::PositiveStable { alpha, lambda } => (Outer::Exp, power(lambda, alpha)),
            LtFamily::SemiStable { psi } => (Outer::Exp, psi),
        }
    }

    /// Index `α` of the underlying scale function.
    pub fn alpha(&self) -> f64 {
        self.factor().1.alpha()
    }

    pub fn descriptor(&self) -> Descriptor {
        match *self {
            LtFamily::Gamma { beta } => Descriptor::new("gamma").with("beta", beta),
            LtFamily::MittagLeffler { alpha, lambda } => {
                Descriptor::new("ml").with("alpha", alpha).with("lambda", lambda)
            }
            LtFamily::PositiveLinnik { alpha, lambda, beta } => Descriptor::new("plinnik")
                .with("alpha", alpha)
                .with("lambda", lambda)
                .with("beta", beta),
            LtFamily::SemiMl { psi } => psi.write_params(Descriptor::new("sml")),
            LtFamily::GenSemiMl { psi, beta } => psi.write_params(Descriptor::new("gsml")).with("beta", beta),
            LtFamily::PositiveStable { alpha, lambda } => {
                Descriptor::new("pstable").with("alpha", alpha).with("lambda", lambda)
            }
            LtFamily::SemiStable { psi } => psi.write_params(Descriptor::new("semistable")),
        }
    }

    pub fn from_descriptor(d: &Descriptor) -> Result<Self> {
        const PSI: &[&str] = &["alpha", "lambda", "a", "b", "eps"];
        let family = match d.tag.as_str() {
            "gamma" => {
                d.expect_only(&["beta"])?;
                LtFamily::Gamma { beta: d.f64("beta")? }
            }
            "ml" => {
                d.expect_only(&["alpha", "lambda"])?;
                LtFamily::MittagLeffler {
                    alpha: d.f64("alpha")?,
                    lambda: d.f64_or("lambda", 1.0)?,
                }
            }
            "plinnik" => {
                d.expect_only(&["alpha", "lambda", "beta"])?;
                LtFamily::PositiveLinnik {
                    alpha: d.f64("alpha")?,
                    lambda: d.f64_or("lambda", 1.0)?,
                    beta: d.f64("beta")?,
                }
            }
            "pstable" => {
                d.expect_only(&["alpha", "lambda"])?;
                LtFamily::PositiveStable {
                    alpha: d.f64("alpha")?,
                    lambda: d.f64_or("lambda", 1.0)?,
                }
            }
            "sml" => {
                d.expect_only(PSI)?;
                LtFamily::SemiMl {
                    psi: ScaleFunction::read_params(d)?,
                }
            }
            "gsml" => {
                d.expect_only(&["alpha", "lambda", "a", "b", "eps", "beta"])?;
                LtFamily::GenSemiMl {
                    psi: ScaleFunction::read_params(d)?,
                    beta: d.f64("beta")?,
                }
            }
            "semistable" => {
                d.expect_only(PSI)?;
                LtFamily::SemiStable {
                    psi: ScaleFunction::read_params(d)?,
                }
            }
            other => return Err(Error::descriptor(other, "unknown Laplace-transform family")),
        };
        family.validate()?;
        Ok(family)
    }
}

impl fmt::Display for LtFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.descriptor().fmt(f)
    }
}

impl FromStr for LtFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LtFamily::from_descriptor(&Descriptor::parse(s)?)
    }
}
