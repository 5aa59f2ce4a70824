//! Recovering the compounder from the law of the summand.
//!
//! If `P(φ(c·s)) = φ(s)` then `P(t) = φ(φ_c^{-1}(t))` with `φ_c(s) = φ(c·s)`;
//! likewise `P(t) = Q(Q_c^{-1}(t))` with `Q_c(s) = Q(1−c+cs)` for a discrete
//! law. The curve is only defined on `(0, 1)`, so its power series comes
//! either from a matched family, from the closed-form continuation
//! `F(κ·F^{-1}(t))` when `φ = F∘ψ` and `ψ(s) = κ·ψ(c·s)`, or from a
//! polynomial fit.

mod classify;
mod invert;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeStruct, Serializer};

pub use classify::{classify_compounder, parse_candidates, CandidatePattern, CompounderMatch, FIT_POINTS, MATCH_THRESHOLD};
pub use invert::{
    invert_lt, invert_monotone, invert_pgf, Orientation, BISECTION_ITERATIONS, BRACKET_CAP, BRACKET_LO,
    INVERSION_TOL,
};

use crate::discrete::{extract_pmf, is_pgf_coeffs, DiscreteBase, DiscretePgf, PmfTable, DEFAULT_N_MAX, DEFAULT_RADIUS, NEGATIVE_TOL};
use crate::error::{Error, Result};
use crate::transform::{FnPgf, LtFamily, Outer, PgfFamily, ScaleFunction};

/// Degree of the fallback polynomial fit. Converting to monomials about
/// `t = 0` amplifies rounding roughly like `6^degree / 2`.
pub const FIT_DEGREE: usize = 10;
/// Right end of the fallback fit interval.
pub const FIT_UPPER: f64 = 0.95;
/// Coefficients below this count as negative for a polynomial fit.
pub const FIT_NEGATIVE_TOL: f64 = 1e-6;

/// The law whose compounder is sought.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdentifySource {
    Lt(LtFamily),
    Discrete(DiscretePgf),
}

impl fmt::Display for IdentifySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentifySource::Lt(phi) => phi.fmt(f),
            IdentifySource::Discrete(q) => q.fmt(f),
        }
    }
}

impl From<LtFamily> for IdentifySource {
    fn from(phi: LtFamily) -> Self {
        IdentifySource::Lt(phi)
    }
}

impl From<DiscretePgf> for IdentifySource {
    fn from(q: DiscretePgf) -> Self {
        IdentifySource::Discrete(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CurveForm {
    /// `F(κ·F^{-1}(t))` for the outer function `F`.
    Outer { outer: Outer, kappa: f64 },
    /// `1 − κ(1−t)`
    Affine { kappa: f64 },
}

/// `κ` with `ψ(s) = κ·ψ(c·s)`: `c^{-α}` for a power, `a^m` for a
/// log-periodic `ψ` when `c = b^m`.
fn scale_kappa(psi: &ScaleFunction, c: f64) -> Option<f64> {
    if psi.is_power() {
        return Some(c.powf(-psi.alpha()));
    }
    let m = c.ln() / psi.b().ln();
    let rounded = m.round();
    (rounded >= 1.0 && (m - rounded).abs() <= 1e-9).then(|| psi.a().powf(rounded))
}

/// Snaps `κ` to an integer when it is one up to rounding, so `t^κ` stays
/// an exact monomial.
fn snap(kappa: f64) -> f64 {
    let r = kappa.round();
    if (kappa - r).abs() <= 1e-12 * r.max(1.0) {
        r
    } else {
        kappa
    }
}

/// `t ↦ Q(t)` on `(0, 1)` for a source law and scale `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentificationCurve {
    source: IdentifySource,
    c: f64,
    form: Option<CurveForm>,
}

impl IdentificationCurve {
    pub fn new(source: IdentifySource, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Domain(format!("scale c must lie in (0, 1), got {c}")));
        }
        let outer_form = |phi: &LtFamily| {
            let (outer, psi) = phi.factor();
            scale_kappa(&psi, c).map(|kappa| CurveForm::Outer {
                outer,
                kappa: snap(kappa),
            })
        };
        let form = match source {
            IdentifySource::Lt(phi) => outer_form(&phi),
            IdentifySource::Discrete(q) => match q.base() {
                DiscreteBase::Lt(phi) => outer_form(&phi),
                DiscreteBase::SibuyaBernoulli { nu, .. } => Some(CurveForm::Affine {
                    kappa: c.powf(-nu),
                }),
                DiscreteBase::Native(_) => None,
            },
        };
        Ok(IdentificationCurve { source, c, form })
    }

    pub fn source(&self) -> IdentifySource {
        self.source
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn has_closed_form(&self) -> bool {
        self.form.is_some()
    }

    /// The defining evaluation: invert the scaled transform, then apply
    /// the unscaled one.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let c = self.c;
        match self.source {
            IdentifySource::Lt(phi) => {
                let s = invert_monotone(|s| phi.eval(c * s), t, Orientation::Decreasing, INVERSION_TOL)?;
                phi.eval(s)
            }
            IdentifySource::Discrete(q) => {
                // x = 1 − s runs over [0, ∞), where Q(1 − x) decreases
                let x = invert_monotone(|x| q.eval_real(1.0 - c * x), t, Orientation::Decreasing, INVERSION_TOL)?;
                q.eval_real(1.0 - x)
            }
        }
    }

    /// Closed-form value on `(0, 1)`, when one exists.
    pub fn eval_closed(&self, t: f64) -> Option<f64> {
        Some(match self.form? {
            CurveForm::Outer {
                outer: Outer::Power { beta },
                kappa,
            } => t * (kappa - (kappa - 1.0) * t.powf(1.0 / beta)).powf(-beta),
            CurveForm::Outer { outer: Outer::Exp, kappa } => t.powf(kappa),
            CurveForm::Affine { kappa } => 1.0 - kappa * (1.0 - t),
        })
    }

    /// Principal-branch continuation into the unit disk, when a closed form
    /// exists.
    pub fn eval_complex(&self, t: Complex64) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        Some(match self.form? {
            CurveForm::Outer {
                outer: Outer::Power { beta },
                kappa,
            } => t * (kappa - t.powf(1.0 / beta) * (kappa - 1.0)).powf(-beta),
            CurveForm::Outer { outer: Outer::Exp, kappa } => {
                if kappa.fract() == 0.0 && kappa <= i32::MAX as f64 {
                    t.powi(kappa as i32)
                } else {
                    t.powf(kappa)
                }
            }
            CurveForm::Affine { kappa } => one - (one - t) * kappa,
        })
    }

    /// Closed form where available, inversion otherwise.
    pub fn value(&self, t: f64) -> Result<f64> {
        match self.eval_closed(t) {
            Some(v) => Ok(v),
            None => self.eval(t),
        }
    }

    /// `(t, Q(t))` on `n` evenly spaced points of `[0.01, 0.99]`.
    pub fn samples(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let t = 0.01 + 0.98 * i as f64 / (n - 1) as f64;
                self.value(t).map(|q| (t, q))
            })
            .collect()
    }

    pub fn to_csv(&self, n: usize) -> Result<String> {
        let mut out = String::from("t,q\n");
        for (t, q) in self.samples(n)? {
            out.push_str(&format!("{t},{q:e}\n"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ValidPgf,
    NotAPgf,
}

/// How the series of the curve was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PmfMethod {
    MatchedFamily,
    ClosedForm,
    PolynomialFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifyOptions {
    pub candidates: Vec<CandidatePattern>,
    pub n_max: usize,
    pub radius: f64,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        IdentifyOptions {
            candidates: CandidatePattern::defaults(),
            n_max: DEFAULT_N_MAX,
            radius: DEFAULT_RADIUS,
        }
    }
}

/// Outcome of identification. `verdict == ValidPgf` implies the table
/// passes [`is_pgf_coeffs`] at the method's tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiedCompounder {
    pub curve: IdentificationCurve,
    pub c: f64,
    pub pmf: PmfTable,
    pub pmf_method: PmfMethod,
    pub verdict: Verdict,
    pub matched: Option<CompounderMatch>,
}

impl Serialize for IdentifiedCompounder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IdentifiedCompounder", 6)?;
        s.serialize_field("source", &self.curve.source().to_string())?;
        s.serialize_field("c", &self.c)?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("matched", &self.matched)?;
        s.serialize_field("pmf", &self.pmf)?;
        s.serialize_field("pmf_method", &self.pmf_method)?;
        s.end()
    }
}

/// Interpolates `f` at Chebyshev nodes of `[0, upper]` and returns the
/// monomial coefficients in `t`.
fn chebyshev_monomials<F: Fn(f64) -> Result<f64>>(f: F, degree: usize, upper: f64) -> Result<Vec<f64>> {
    let m = degree + 1;
    let angles: Vec<f64> = (0..m).map(|j| PI * (j as f64 + 0.5) / m as f64).collect();
    let values = angles
        .iter()
        .map(|a| f(0.5 * upper * (a.cos() + 1.0)))
        .collect::<Result<Vec<_>>>()?;
    let cheb: Vec<f64> = (0..m)
        .map(|k| {
            let sum: f64 = values.iter().zip(&angles).map(|(v, a)| v * (k as f64 * a).cos()).sum();
            let scale = if k == 0 { 1.0 } else { 2.0 };
            scale * sum / m as f64
        })
        .collect();
    // Σ c_k T_k(u) as a polynomial in u
    let mut in_u = vec![0.0; m];
    let (mut prev, mut cur) = (vec![1.0], vec![0.0, 1.0]);
    for (k, ck) in cheb.iter().enumerate() {
        let tk = if k == 0 { &prev } else { &cur };
        for (i, coef) in tk.iter().enumerate() {
            in_u[i] += ck * coef;
        }
        if k >= 1 {
            let mut next = vec![0.0; cur.len() + 1];
            for (i, coef) in cur.iter().enumerate() {
                next[i + 1] += 2.0 * coef;
            }
            for (i, coef) in prev.iter().enumerate() {
                next[i] -= coef;
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    // substitute u = (2/upper)·t − 1 by Horner's rule
    let (slope, shift) = (2.0 / upper, -1.0);
    let mut in_t = vec![0.0; m];
    for &a in in_u.iter().rev() {
        let mut next = vec![0.0; m];
        for i in 0..m {
            next[i] += shift * in_t[i];
            if i + 1 < m {
                next[i + 1] += slope * in_t[i];
            }
        }
        next[0] += a;
        in_t = next;
    }
    Ok(in_t)
}

/// Identification for any source law.
pub fn identify(source: IdentifySource, c: f64, options: &IdentifyOptions) -> Result<IdentifiedCompounder> {
    let curve = IdentificationCurve::new(source, c)?;
    let matched = classify_compounder(&|t| curve.value(t), &options.candidates)?;
    let (pmf, pmf_method) = if let Some(m) = matched {
        (extract_pmf(&m.family, options.n_max, options.radius)?, PmfMethod::MatchedFamily)
    } else if curve.has_closed_form() {
        let continued = FnPgf(|t: Complex64| {
            curve
                .eval_complex(t)
                .ok_or_else(|| Error::Domain("curve has no closed form".into()))
        });
        (extract_pmf(&continued, options.n_max, options.radius)?, PmfMethod::ClosedForm)
    } else {
        let coeffs = chebyshev_monomials(|t| if t == 0.0 { curve.eval_at_zero() } else { curve.eval(t) }, FIT_DEGREE, FIT_UPPER)?;
        (PmfTable::from_coeffs(coeffs, f64::NAN), PmfMethod::PolynomialFit)
    };
    let tol = match pmf_method {
        PmfMethod::PolynomialFit => FIT_NEGATIVE_TOL,
        _ => NEGATIVE_TOL,
    };
    let verdict = if is_pgf_coeffs(&pmf, tol).0 {
        Verdict::ValidPgf
    } else {
        Verdict::NotAPgf
    };
    Ok(IdentifiedCompounder {
        curve,
        c,
        pmf,
        pmf_method,
        verdict,
        matched,
    })
}

impl IdentificationCurve {
    /// `Q(0) = lim_{t→0} Q(t)`: zero for a continuous source, `Q(1 − x)` as
    /// `x → ∞` for a discrete one.
    fn eval_at_zero(&self) -> Result<f64> {
        match self.source {
            IdentifySource::Lt(_) => Ok(0.0),
            IdentifySource::Discrete(_) => self.eval(f64::MIN_POSITIVE.sqrt()),
        }
    }
}

pub fn identify_from_lt(phi: &LtFamily, c: f64) -> Result<IdentifiedCompounder> {
    identify(IdentifySource::Lt(*phi), c, &IdentifyOptions::default())
}

pub fn identify_from_pgf(q: &DiscretePgf, c: f64) -> Result<IdentifiedCompounder> {
    identify(IdentifySource::Discrete(*q), c, &IdentifyOptions::default())
}

/// Identification at each `c`, run in parallel; results keep the order of
/// `cs`.
pub fn identify_sweep(source: IdentifySource, cs: &[f64], options: &IdentifyOptions) -> Vec<Result<IdentifiedCompounder>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(cs.len().max(1));
    let chunk = cs.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = cs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|&c| identify(source, c, options)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("identification worker panicked"))
            .collect()
    })
}

/// Whether `s ↦ P(s^u)` has a nonnegative power series. Uses the principal
/// branch of `s^u` on the extraction contour.
pub fn check_power_pgf(p: &PgfFamily, u: f64) -> Result<bool> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::param("u", u, "must be positive"));
    }
    let composed = FnPgf(|s: Complex64| {
        let inner = if u.fract() == 0.0 { s.powi(u as i32) } else { s.powf(u) };
        p.eval(inner)
    });
    let table = extract_pmf(&composed, DEFAULT_N_MAX, DEFAULT_RADIUS)?;
    Ok(is_pgf_coeffs(&table, NEGATIVE_TOL).0)
}
