use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::descriptor::Descriptor;
use super::scale::ScaleFunction;

/// Characteristic functions of the Linnik / semi-α-Laplace type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CfFamily {
    /// `(1 + λ|u|^α)^{-1}`
    Linnik { alpha: f64, lambda: f64 },
    /// `(1 + λ|u|^α e^{-iθ sgn u})^{-ν}`
    GeneralizedLinnik {
        alpha: f64,
        theta: f64,
        nu: f64,
        lambda: f64,
    },
    /// `(1 + ψ(|u|))^{-1}`
    SemiAlphaLaplace { psi: ScaleFunction },
    /// `(1 + ψ(|u|))^{-ν}`
    GenSemiAlphaLaplace { psi: ScaleFunction, nu: f64 },
}

/// Largest admissible `|θ|` for index `α`: `min(πα/2, π − πα/2)`.
pub fn theta_bound(alpha: f64) -> f64 {
    (PI * alpha / 2.0).min(PI - PI * alpha / 2.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "must lie in (0, 2]"))
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be positive"))
    }
}

impl CfFamily {
    pub fn linnik(alpha: f64, lambda: f64) -> Result<Self> {
        let f = CfFamily::Linnik { alpha, lambda };
        f.validate().map(|_| f)
    }

    pub fn generalized_linnik(alpha: f64, theta: f64, nu: f64, lambda: f64) -> Result<Self> {
        let f = CfFamily::GeneralizedLinnik {
            alpha,
            theta,
            nu,
            lambda,
        };
        f.validate().map(|_| f)
    }

    pub fn semi_alpha_laplace(psi: ScaleFunction) -> Result<Self> {
        Ok(CfFamily::SemiAlphaLaplace { psi })
    }

    pub fn gen_semi_alpha_laplace(psi: ScaleFunction, nu: f64) -> Result<Self> {
        let f = CfFamily::GenSemiAlphaLaplace { psi, nu };
        f.validate().map(|_| f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CfFamily::Linnik { alpha, lambda } => {
                check_alpha(alpha)?;
                check_positive("lambda", lambda)
            }
            CfFamily::GeneralizedLinnik {
                alpha,
                theta,
                nu,
                lambda,
            } => {
                check_alpha(alpha)?;
                check_positive("lambda", lambda)?;
                check_positive("nu", nu)?;
                // Small slack so that θ = πα/2 typed as a decimal is accepted.
                if !(theta.abs() <= theta_bound(alpha) + 1e-12) {
                    return Err(Error::param("theta", theta, "|theta| must not exceed min(pi*alpha/2, pi - pi*alpha/2)"));
                }
                Ok(())
            }
            CfFamily::SemiAlphaLaplace { .. } => Ok(()),
            CfFamily::GenSemiAlphaLaplace { nu, .. } => check_positive("nu", nu),
        }
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        let z = self.eval_nonneg(u.abs());
        if u < 0.0 {
            z.conj()
        } else {
            z
        }
    }

    fn eval_nonneg(&self, u: f64) -> Complex64 {
        match *self {
            CfFamily::Linnik { alpha, lambda } => Complex64::new(1.0 / (1.0 + lambda * u.powf(alpha)), 0.0),
            CfFamily::GeneralizedLinnik {
                alpha,
                theta,
                nu,
                lambda,
            } => {
                if u == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let x = Complex64::from_polar(lambda * u.powf(alpha), -theta);
                (x + 1.0).powf(-nu)
            }
            CfFamily::SemiAlphaLaplace { psi } => Complex64::new(1.0 / (1.0 + psi.eval_unchecked(u)), 0.0),
            CfFamily::GenSemiAlphaLaplace { psi, nu } => {
                Complex64::new((1.0 + psi.eval_unchecked(u)).powf(-nu), 0.0)
            }
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            CfFamily::Linnik { alpha, .. } | CfFamily::GeneralizedLinnik { alpha, .. } => alpha,
            CfFamily::SemiAlphaLaplace { psi } | CfFamily::GenSemiAlphaLaplace { psi, .. } => psi.alpha(),
        }
    }

    /// Exponent `ν` of the outer power.
    pub fn nu(&self) -> f64 {
        match *self {
            CfFamily::Linnik { .. } | CfFamily::SemiAlphaLaplace { .. } => 1.0,
            CfFamily::GeneralizedLinnik { nu, .. } | CfFamily::GenSemiAlphaLaplace { nu, .. } => nu,
        }
    }

    pub fn descriptor(&self) -> Descriptor {
        match *self {
            CfFamily::Linnik { alpha, lambda } => Descriptor::new("linnik").with("alpha", alpha).with("lambda", lambda),
            CfFamily::GeneralizedLinnik {
                alpha,
                theta,
                nu,
                lambda,
            } => Descriptor::new("gl")
                .with("alpha", alpha)
                .with("theta", theta)
                .with("nu", nu)
                .with("lambda", lambda),
            CfFamily::SemiAlphaLaplace { psi } => psi.write_params(Descriptor::new("sal")),
            CfFamily::GenSemiAlphaLaplace { psi, nu } => psi.write_params(Descriptor::new("gsal")).with("nu", nu),
        }
    }

    pub fn from_descriptor(d: &Descriptor) -> Result<Self> {
        let family = match d.tag.as_str() {
            "linnik" => {
                d.expect_only(&["alpha", "lambda"])?;
                CfFamily::Linnik {
                    alpha: d.f64("alpha")?,
                    lambda: d.f64_or("lambda", 1.0)?,
                }
            }
            "gl" => {
                d.expect_only(&["alpha", "theta", "nu", "lambda"])?;
                CfFamily::GeneralizedLinnik {
                    alpha: d.f64("alpha")?,
                    theta: d.f64_or("theta", 0.0)?,
                    nu: d.f64("nu")?,
                    lambda: d.f64_or("lambda", 1.0)?,
                }
            }
            "sal" => {
                d.expect_only(&["alpha", "lambda", "a", "b", "eps"])?;
                CfFamily::SemiAlphaLaplace {
                    psi: ScaleFunction::read_params(d)?,
                }
            }
            "gsal" => {
                d.expect_only(&["alpha", "lambda", "a", "b", "eps", "nu"])?;
                CfFamily::GenSemiAlphaLaplace {
                    psi: ScaleFunction::read_params(d)?,
                    nu: d.f64("nu")?,
                }
            }
            other => return Err(Error::descriptor(other, "unknown characteristic-function family")),
        };
        family.validate()?;
        Ok(family)
    }
}

impl fmt::Display for CfFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.descriptor().fmt(f)
    }
}

impl FromStr for CfFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CfFamily::from_descriptor(&Descriptor::parse(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linnik_values() {
        let f = CfFamily::linnik(1.0, 1.0).unwrap();
        assert!((f.eval(1.0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let g = CfFamily::generalized_linnik(1.0, 0.0, 0.5, 1.0).unwrap();
        assert!((g.eval(1.0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(g.eval(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn theta_region_enforced() {
        assert!(CfFamily::generalized_linnik(1.0, PI / 2.0, 1.0, 1.0).is_ok());
        assert!(CfFamily::generalized_linnik(1.0, 1.6, 1.0, 1.0).is_err());
        assert!(CfFamily::generalized_linnik(1.5, 0.8, 1.0, 1.0).is_err());
        assert!(CfFamily::generalized_linnik(2.5, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hermitian_symmetry() {
        let f = CfFamily::generalized_linnik(1.3, 0.5, 0.7, 2.0).unwrap();
        for u in [0.1, 1.0, 17.0] {
            assert!((f.eval(-u) - f.eval(u).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn descriptor_round_trip() {
        for text in ["linnik:alpha=1,lambda=1", "gl:alpha=1,theta=0.7854,nu=0.5,lambda=1", "gsal:alpha=1.5,lambda=1,b=0.5,eps=0.05,nu=0.5"] {
            let f: CfFamily = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
    }
}
