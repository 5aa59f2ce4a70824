use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Bernoulli, Beta, Binomial, Distribution, Exp1, Gamma, Open01, Poisson, StandardNormal};

use crate::discrete::{DiscreteBase, DiscretePgf};
use crate::error::{Error, Result};
use crate::transform::{CfFamily, LtFamily, PgfFamily, ScaleFunction, Transform};

/// Largest count a random sum may draw before giving up.
pub const SUM_CAP: u64 = 10_000_000;

/// Slack when recognising the one-sided Linnik angle `θ = ±απ/2`.
const ANGLE_TOL: f64 = 1e-12;

/// Positive stable draw with LT `exp(−s^α)`, `0 < α < 1`, by Kanter's
/// representation.
pub fn kanter<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let e: f64 = Exp1.sample(rng);
    let (a, b) = (alpha * PI * u, (1.0 - alpha) * PI * u);
    let log = a.sin().ln() - (PI * u).sin().ln() / alpha + (1.0 - alpha) / alpha * (b.sin().ln() - e.ln());
    log.exp()
}

fn gamma(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::Domain(format!("gamma shape {shape}: {e}")))
}

fn power_psi(psi: &ScaleFunction) -> Result<(f64, f64)> {
    if psi.is_power() {
        Ok((psi.lambda(), psi.alpha()))
    } else {
        Err(Error::Domain(format!(
            "no sampler for log-periodic scale functions (eps = {})",
            psi.epsilon()
        )))
    }
}

/// A continuous law that can be drawn from one value at a time.
#[derive(Debug, Clone, Copy)]
pub enum ContinuousLaw {
    PointMass(f64),
    /// `scale · S` with `S` positive stable of index `alpha < 1`.
    Stable { alpha: f64, scale: f64 },
    /// `sign · (λG)^{1/α} · S` with `G ~ Gamma(shape)`; `S = 1` when
    /// `α = 1`.
    StableMixture {
        alpha: f64,
        lambda: f64,
        gamma: Gamma<f64>,
        sign: f64,
    },
    /// `(λG)^{1/α} · √(2A) · Z` with `A` positive stable of index `α/2`:
    /// CF `(1 + λ|u|^α)^{-shape}`.
    SymmetricMixture { alpha: f64, lambda: f64, gamma: Gamma<f64> },
}

impl ContinuousLaw {
    /// LT `(1 + λs^α)^{-β}`.
    pub fn gen_ml(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
        }
        if !(beta > 0.0 && lambda > 0.0) {
            return Err(Error::Domain(format!("beta and lambda must be positive, got {beta}, {lambda}")));
        }
        Ok(ContinuousLaw::StableMixture {
            alpha,
            lambda,
            gamma: gamma(beta)?,
            sign: 1.0,
        })
    }

    /// LT `exp(−λ s^α)`.
    pub fn positive_stable(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
        }
        if !(lambda > 0.0) {
            return Err(Error::param("lambda", lambda, "must be positive"));
        }
        let scale = lambda.powf(1.0 / alpha);
        Ok(if alpha == 1.0 {
            ContinuousLaw::PointMass(scale)
        } else {
            ContinuousLaw::Stable { alpha, scale }
        })
    }

    pub fn for_lt(phi: &LtFamily) -> Result<Self> {
        match *phi {
            LtFamily::Gamma { beta } => Self::gen_ml(1.0, beta, 1.0),
            LtFamily::MittagLeffler { alpha, lambda } => Self::gen_ml(alpha, 1.0, lambda),
            LtFamily::PositiveLinnik { alpha, lambda, beta } => Self::gen_ml(alpha, beta, lambda),
            LtFamily::SemiMl { psi } => {
                let (lambda, alpha) = power_psi(&psi)?;
                Self::gen_ml(alpha, 1.0, lambda)
            }
            LtFamily::GenSemiMl { psi, beta } => {
                let (lambda, alpha) = power_psi(&psi)?;
                Self::gen_ml(alpha, beta, lambda)
            }
            LtFamily::PositiveStable { alpha, lambda } => Self::positive_stable(alpha, lambda),
            LtFamily::SemiStable { psi } => {
                let (lambda, alpha) = power_psi(&psi)?;
                Self::positive_stable(alpha, lambda)
            }
        }
    }

    /// Symmetric members (`θ = 0`) and the one-sided ones (`θ = ±απ/2`,
    /// `α ≤ 1`) of the Linnik families.
    pub fn for_cf(phi: &CfFamily) -> Result<Self> {
        let symmetric = |alpha: f64, lambda: f64, nu: f64| -> Result<Self> {
            Ok(ContinuousLaw::SymmetricMixture {
                alpha,
                lambda,
                gamma: gamma(nu)?,
            })
        };
        match *phi {
            CfFamily::Linnik { alpha, lambda } => symmetric(alpha, lambda, 1.0),
            CfFamily::GeneralizedLinnik {
                alpha,
                theta,
                nu,
                lambda,
            } => {
                if theta == 0.0 {
                    return symmetric(alpha, lambda, nu);
                }
                let edge = alpha * PI / 2.0;
                if alpha <= 1.0 && (theta.abs() - edge).abs() <= ANGLE_TOL {
                    return Ok(ContinuousLaw::StableMixture {
                        alpha,
                        lambda,
                        gamma: gamma(nu)?,
                        sign: theta.signum(),
                    });
                }
                Err(Error::Domain(format!(
                    "no sampler for skewed generalized Linnik laws (theta = {theta})"
                )))
            }
            CfFamily::SemiAlphaLaplace { psi } => {
                let (lambda, alpha) = power_psi(&psi)?;
                symmetric(alpha, lambda, 1.0)
            }
            CfFamily::GenSemiAlphaLaplace { psi, nu } => {
                let (lambda, alpha) = power_psi(&psi)?;
                symmetric(alpha, lambda, nu)
            }
        }
    }

    pub fn for_transform(phi: &Transform) -> Result<Self> {
        match phi {
            Transform::Lt(lt) => Self::for_lt(lt),
            Transform::Cf(cf) => Self::for_cf(cf),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ContinuousLaw::PointMass(x) => x,
            ContinuousLaw::Stable { alpha, scale } => scale * kanter(alpha, rng),
            ContinuousLaw::StableMixture {
                alpha,
                lambda,
                gamma,
                sign,
            } => {
                let g: f64 = gamma.sample(rng);
                let s = if alpha == 1.0 { 1.0 } else { kanter(alpha, rng) };
                sign * (lambda * g).powf(1.0 / alpha) * s
            }
            ContinuousLaw::SymmetricMixture { alpha, lambda, gamma } => {
                let g: f64 = gamma.sample(rng);
                (lambda * g).powf(1.0 / alpha) * symmetric_stable(alpha, rng)
            }
        }
    }
}

/// CF `exp(−|u|^α)`, `0 < α ≤ 2`, as a normal variance mixture.
fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    let a = if alpha >= 2.0 { 1.0 } else { kanter(alpha / 2.0, rng) };
    (2.0 * a).sqrt() * z
}

/// A law on the nonnegative integers.
#[derive(Debug, Clone)]
pub enum DiscreteLaw {
    Constant(u64),
    Bernoulli(Bernoulli),
    /// On `{1, 2, ...}` by inversion.
    Geometric1 { p: f64 },
    /// `1 + k·M` with `M` negative binomial drawn as Poisson(Gamma).
    Harris { k: u64, gamma: Gamma<f64>, odds: f64 },
    /// Geometric on `{1, 2, ...}` with `p ~ Beta(ν, 1−ν)`.
    Sibuya { mixing: Beta<f64> },
    /// `Poisson(scale · Y)` with `Y` from a continuous law.
    PoissonMixture { law: ContinuousLaw, scale: f64 },
    /// Binomial `p`-thinning of an inner law.
    Thinned { inner: Box<DiscreteLaw>, p: f64 },
}

fn geometric1<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = Open01.sample(rng);
    // P(N > n) = (1−p)^n; heavy-tailed mixtures reach u64::MAX, where
    // the cast and the shift both saturate
    ((u.ln() / (-p).ln_1p()).floor() as u64).saturating_add(1)
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Overflow(format!("Poisson mean {mean:e}: {e}")))?;
    let x: f64 = dist.sample(rng);
    Ok(x as u64)
}

pub(crate) fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<u64> {
    let dist = Binomial::new(n, p).map_err(|e| Error::Domain(format!("binomial({n}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

impl DiscreteLaw {
    pub fn for_pgf(p: &PgfFamily) -> Result<Self> {
        p.validate()?;
        Ok(match *p {
            PgfFamily::Harris { a, k } => {
                // success probability 1/a, shape 1/k
                DiscreteLaw::Harris {
                    k: k as u64,
                    gamma: gamma(1.0 / k as f64)?,
                    odds: a - 1.0,
                }
            }
            PgfFamily::Geometric1 { p } => DiscreteLaw::Geometric1 { p },
            PgfFamily::Sibuya { nu } => DiscreteLaw::Sibuya {
                mixing: Beta::new(nu, 1.0 - nu).map_err(|e| Error::Domain(format!("beta({nu}): {e}")))?,
            },
            PgfFamily::Degenerate { k } => DiscreteLaw::Constant(k as u64),
            PgfFamily::BernoulliShift { lambda } => DiscreteLaw::Bernoulli(
                Bernoulli::new(lambda).map_err(|e| Error::Domain(format!("bernoulli({lambda}): {e}")))?,
            ),
        })
    }

    /// Poisson mixture for LT bases, thinning for the rest.
    pub fn for_discrete(q: &DiscretePgf) -> Result<Self> {
        let c = q.thinning();
        let thinned = |inner: DiscreteLaw, p: f64| {
            if p == 1.0 {
                inner
            } else {
                DiscreteLaw::Thinned {
                    inner: Box::new(inner),
                    p,
                }
            }
        };
        Ok(match q.base() {
            DiscreteBase::Lt(phi) => DiscreteLaw::PoissonMixture {
                law: ContinuousLaw::for_lt(&phi)?,
                scale: c,
            },
            DiscreteBase::Native(p) => thinned(Self::for_pgf(&p)?, c),
            DiscreteBase::SibuyaBernoulli { delta, nu } => {
                let sibuya = Self::for_pgf(&PgfFamily::sibuya(nu)?)?;
                thinned(sibuya, delta.powf(1.0 / nu) * c)
            }
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        Ok(match self {
            DiscreteLaw::Constant(k) => *k,
            DiscreteLaw::Bernoulli(b) => b.sample(rng) as u64,
            DiscreteLaw::Geometric1 { p } => geometric1(*p, rng),
            DiscreteLaw::Harris { k, gamma, odds } => {
                let rate: f64 = gamma.sample(rng);
                k.saturating_mul(poisson(rate * odds, rng)?).saturating_add(1)
            }
            DiscreteLaw::Sibuya { mixing } => {
                let w: f64 = mixing.sample(rng);
                if w <= 0.0 {
                    u64::MAX
                } else {
                    geometric1(w, rng)
                }
            }
            DiscreteLaw::PoissonMixture { law, scale } => poisson(scale * law.draw(rng), rng)?,
            DiscreteLaw::Thinned { inner, p } => binomial(inner.draw(rng)?, *p, rng)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::RandomSource;

    #[test]
    fn kanter_is_positive_and_finite() {
        let mut src = RandomSource::new(1, 0);
        for alpha in [0.05, 0.5, 0.95] {
            for _ in 0..1000 {
                let x = kanter(alpha, src.rng());
                assert!(x > 0.0 && x.is_finite(), "{alpha}: {x}");
            }
        }
    }

    #[test]
    fn skewed_linnik_is_refused() {
        let gl = CfFamily::generalized_linnik(1.0, 0.3, 0.5, 1.0).unwrap();
        assert!(ContinuousLaw::for_cf(&gl).is_err());
        let one_sided = CfFamily::generalized_linnik(0.5, PI / 4.0, 0.5, 1.0).unwrap();
        assert!(ContinuousLaw::for_cf(&one_sided).is_ok());
    }

    #[test]
    fn log_periodic_is_refused() {
        let psi = ScaleFunction::log_periodic(1.0, 0.5, 0.25, 0.05).unwrap();
        assert!(ContinuousLaw::for_lt(&LtFamily::semi_ml(psi).unwrap()).is_err());
    }

    #[test]
    fn vanishing_success_probability_saturates() {
        let mut src = RandomSource::new(2, 0);
        for _ in 0..100 {
            assert_eq!(geometric1(1e-300, src.rng()), u64::MAX);
        }
    }
}
