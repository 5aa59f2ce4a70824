//! Discrete analogues of positive laws.
//!
//! A Laplace transform `φ` yields the PGF `Q(s) = φ(1−s)`; probabilistically
//! `Q` is the Poisson mixture with mixing law `φ`. Two PGFs are of the same
//! D-type when `Q₁(s) = Q₂(1−c+cs)`, which is binomial `c`-thinning.

mod pmf;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use pmf::{extract_pmf, is_pgf_coeffs, PmfTable, DEFAULT_N_MAX, DEFAULT_RADIUS, NEGATIVE_TOL};

use crate::error::{Error, Result};
use crate::transform::{ComplexPgf, Descriptor, LtFamily, PgfFamily, ScaleFunction};

/// Where the generating function comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscreteBase {
    /// `s ↦ φ(1−s)`
    Lt(LtFamily),
    /// A compounder PGF used as a law in its own right.
    Native(PgfFamily),
    /// `1 − δ(1−s)^ν`: a Sibuya(ν)-sum of Bernoulli(δ^{1/ν}) variables.
    SibuyaBernoulli { delta: f64, nu: f64 },
}

/// Closed forms recognised after discretisation and thinning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `exp(−λ(1−s)^α)`
    DiscreteStable { lambda: f64, alpha: f64 },
    /// `1 / (1 + λ(1−s)^α)`
    DiscreteMl { lambda: f64, alpha: f64 },
    /// `(1 + λ(1−s)^α)^{−β}`
    DiscreteLinnik { lambda: f64, alpha: f64, beta: f64 },
    /// `(1 + ψ(1−s))^{−β}`
    DiscreteGenSml { psi: ScaleFunction, beta: f64 },
    /// `1 − δ(1−s)^ν`
    SibuyaBernoulli { delta: f64, nu: f64 },
}

/// `Q(s) = B(1 − c·(1−s))` where `B` is the base PGF and `c` the
/// accumulated thinning factor (1 when untouched).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretePgf {
    base: DiscreteBase,
    thin: f64,
}

impl DiscretePgf {
    pub fn from_lt(phi: LtFamily) -> Self {
        DiscretePgf {
            base: DiscreteBase::Lt(phi),
            thin: 1.0,
        }
    }

    pub fn native(p: PgfFamily) -> Self {
        DiscretePgf {
            base: DiscreteBase::Native(p),
            thin: 1.0,
        }
    }

    /// `δ ∈ (0, 1]`, `ν ∈ (0, 1)`; `δ = 1` is the Sibuya law itself.
    pub fn sibuya_bernoulli(delta: f64, nu: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::param("delta", delta, "must lie in (0, 1]"));
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::param("nu", nu, "must lie in (0, 1)"));
        }
        Ok(DiscretePgf {
            base: DiscreteBase::SibuyaBernoulli { delta, nu },
            thin: 1.0,
        })
    }

    pub fn base(&self) -> DiscreteBase {
        self.base
    }

    pub fn thinning(&self) -> f64 {
        self.thin
    }

    /// The LT whose discrete analogue this is, rescaled by the thinning
    /// factor, when the base is an LT.
    pub fn source_lt(&self) -> Option<LtFamily> {
        match self.base {
            DiscreteBase::Lt(phi) => Some(phi),
            _ => None,
        }
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        let c = self.thin;
        match self.base {
            DiscreteBase::Lt(phi) => match phi {
                LtFamily::PositiveStable { alpha, lambda } => Some(ClosedForm::DiscreteStable {
                    lambda: lambda * c.powf(alpha),
                    alpha,
                }),
                LtFamily::MittagLeffler { alpha, lambda } => Some(ClosedForm::DiscreteMl {
                    lambda: lambda * c.powf(alpha),
                    alpha,
                }),
                LtFamily::PositiveLinnik { alpha, lambda, beta } => Some(ClosedForm::DiscreteLinnik {
                    lambda: lambda * c.powf(alpha),
                    alpha,
                    beta,
                }),
                LtFamily::Gamma { beta } => Some(ClosedForm::DiscreteLinnik {
                    lambda: c,
                    alpha: 1.0,
                    beta,
                }),
                LtFamily::SemiMl { psi } | LtFamily::GenSemiMl { psi, .. } if psi.is_power() => {
                    let beta = match phi {
                        LtFamily::GenSemiMl { beta, .. } => beta,
                        _ => 1.0,
                    };
                    let lambda = psi.lambda() * c.powf(psi.alpha());
                    Some(if beta == 1.0 {
                        ClosedForm::DiscreteMl {
                            lambda,
                            alpha: psi.alpha(),
                        }
                    } else {
                        ClosedForm::DiscreteLinnik {
                            lambda,
                            alpha: psi.alpha(),
                            beta,
                        }
                    })
                }
                LtFamily::SemiMl { psi } if c == 1.0 => Some(ClosedForm::DiscreteGenSml { psi, beta: 1.0 }),
                LtFamily::GenSemiMl { psi, beta } if c == 1.0 => Some(ClosedForm::DiscreteGenSml { psi, beta }),
                LtFamily::SemiStable { psi } if psi.is_power() => Some(ClosedForm::DiscreteStable {
                    lambda: psi.lambda() * c.powf(psi.alpha()),
                    alpha: psi.alpha(),
                }),
                _ => None,
            },
            DiscreteBase::SibuyaBernoulli { delta, nu } => Some(ClosedForm::SibuyaBernoulli {
                delta: delta * c.powf(nu),
                nu,
            }),
            DiscreteBase::Native(_) => None,
        }
    }

    /// Evaluation on the closed unit disk.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let radius = s.norm();
        if radius > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("PGF argument outside the unit disk (|s| = {radius})")));
        }
        let one = Complex64::new(1.0, 0.0);
        let x = (one - s) * self.thin;
        match self.base {
            DiscreteBase::Lt(phi) => phi.eval_complex(x).map_err(|e| with_radius(e, radius)),
            DiscreteBase::Native(p) => p.eval(one - x),
            DiscreteBase::SibuyaBernoulli { delta, nu } => {
                if x == Complex64::new(0.0, 0.0) {
                    Ok(one)
                } else {
                    Ok(one - x.powf(nu) * delta)
                }
            }
        }
    }

    /// Real evaluation for `s ≤ 1`, where every base has a real closed form.
    pub fn eval_real(&self, s: f64) -> Result<f64> {
        if !(s <= 1.0) {
            return Err(Error::Domain(format!("PGF real argument must not exceed 1, got {s}")));
        }
        let x = self.thin * (1.0 - s);
        match self.base {
            DiscreteBase::Lt(phi) => Ok(phi.eval_unchecked(x)),
            DiscreteBase::Native(p) => p.eval_real(1.0 - x),
            DiscreteBase::SibuyaBernoulli { delta, nu } => Ok(1.0 - delta * x.powf(nu)),
        }
    }

    pub fn descriptor_string(&self) -> String {
        let base = match self.base {
            DiscreteBase::Lt(phi) => format!("d:{phi}"),
            DiscreteBase::Native(p) => p.to_string(),
            DiscreteBase::SibuyaBernoulli { delta, nu } => Descriptor::new("sibuya-bernoulli")
                .with("delta", delta)
                .with("nu", nu)
                .to_string(),
        };
        if self.thin == 1.0 {
            base
        } else {
            format!("{base}@{}", self.thin)
        }
    }
}

fn with_radius(e: Error, radius: f64) -> Error {
    match e {
        Error::BranchSafety { detail, .. } => Error::BranchSafety { radius, detail },
        other => other,
    }
}

impl ComplexPgf for DiscretePgf {
    fn eval_complex(&self, t: Complex64) -> Result<Complex64> {
        self.eval(t)
    }
}

impl fmt::Display for DiscretePgf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor_string())
    }
}

impl FromStr for DiscretePgf {
    type Err = Error;

    /// Accepts `d:<lt>`, the aliases `dstable`, `dml`, `dlinnik`, `dgsml`,
    /// `sibuya-bernoulli:delta=..,nu=..`, or any compounder descriptor, each
    /// optionally followed by `@c` for a thinning factor.
    fn from_str(text: &str) -> Result<Self> {
        let (body, thin) = match text.rsplit_once('@') {
            Some((body, c)) => {
                let c = c
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::descriptor(c, "thinning factor must be a number"))?;
                (body, Some(c))
            }
            None => (text, None),
        };
        let body = body.trim();
        let q = if let Some(lt) = body.strip_prefix("d:") {
            DiscretePgf::from_lt(lt.parse()?)
        } else {
            let d = Descriptor::parse(body)?;
            let alias = match d.tag.as_str() {
                "dstable" => Some("pstable"),
                "dml" => Some("ml"),
                "dlinnik" => Some("plinnik"),
                "dgsml" => Some("gsml"),
                _ => None,
            };
            if let Some(tag) = alias {
                let mut lt = Descriptor::parse(body)?;
                lt.tag = tag.to_string();
                DiscretePgf::from_lt(LtFamily::from_descriptor(&lt)?)
            } else if d.tag == "sibuya-bernoulli" {
                d.expect_only(&["delta", "nu"])?;
                DiscretePgf::sibuya_bernoulli(d.f64("delta")?, d.f64("nu")?)?
            } else {
                DiscretePgf::native(PgfFamily::from_descriptor(&d)?)
            }
        };
        match thin {
            Some(c) => d_type_transform(&q, c),
            None => Ok(q),
        }
    }
}

/// `Q(s) = φ(1−s)`.
pub fn discretize(phi: &LtFamily) -> DiscretePgf {
    DiscretePgf::from_lt(*phi)
}

/// `s ↦ Q(1−c+cs)`, the PGF of the binomial `c`-thinning of `Q`'s law.
pub fn d_type_transform(q: &DiscretePgf, c: f64) -> Result<DiscretePgf> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("thinning factor must lie in (0, 1), got {c}")));
    }
    Ok(DiscretePgf {
        base: q.base,
        thin: q.thin * c,
    })
}

/// `max |Q(s) − Q(1−c(1−s))·Q(1−(1−c^α)^{1/α}(1−s))|` over the grid.
pub fn selfdecomp_residual(q: &DiscretePgf, alpha: f64, c: f64, grid: &[f64]) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("c must lie in (0, 1), got {c}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
    }
    let d = (1.0 - c.powf(alpha)).powf(1.0 / alpha);
    grid.iter().try_fold(0.0f64, |worst, &s| {
        let lhs = q.eval_real(s)?;
        let rhs = q.eval_real(1.0 - c * (1.0 - s))? * q.eval_real(1.0 - d * (1.0 - s))?;
        Ok(worst.max((lhs - rhs).abs()))
    })
}

/// Self-decomposition residual for the discrete stable law
/// `exp(−λ(1−s)^α)`.
pub fn check_selfdecomp_discrete_stable(lambda: f64, alpha: f64, c: f64, grid: &[f64]) -> Result<f64> {
    let q = discretize(&LtFamily::positive_stable(alpha, lambda)?);
    selfdecomp_residual(&q, alpha, c, grid)
}

/// Residual of `P(Q(s))` against `1 − λδ(1−s)^ν` for `P(s) = 1 − λ(1−s)`
/// and `Q(s) = 1 − δ(1−s)^ν`.
pub fn compose_sibuya_bernoulli(lambda: f64, delta: f64, nu: f64, grid: &[f64]) -> Result<f64> {
    let p = PgfFamily::bernoulli_shift(lambda)?;
    let q = DiscretePgf::sibuya_bernoulli(delta, nu)?;
    grid.iter().try_fold(0.0f64, |worst, &s| {
        let lhs = p.eval_real(q.eval_real(s)?)?;
        let rhs = 1.0 - lambda * delta * (1.0 - s).powf(nu);
        Ok(worst.max((lhs - rhs).abs()))
    })
}
