use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::descriptor::Descriptor;

/// Ratio `b` given to pure-power scale functions when none is supplied.
/// A power satisfies the scaling equation for every `b`.
pub const DEFAULT_POWER_RATIO: f64 = 0.5;

/// Log-periodic amplitude used when a descriptor gives `b` without `eps`.
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleKind {
    PurePower,
    LogPeriodic,
}

/// Continuous `ψ` with `ψ(0) = 0` and `ψ(s) = a·ψ(b·s)`, `a·b^α = 1`.
///
/// Pure power: `λ·s^α`. Log-periodic: `λ·s^α·(1 + ε·cos(2π ln s / ln(1/b)))`,
/// whose cosine has period `ln(1/b)` in `ln s` so the scaling equation holds
/// exactly for the given `b` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFunction {
    kind: ScaleKind,
    lambda: f64,
    alpha: f64,
    b: f64,
    a: f64,
    epsilon: f64,
}

impl ScaleFunction {
    pub fn power(lambda: f64, alpha: f64) -> Result<Self> {
        Self::build(ScaleKind::PurePower, lambda, alpha, DEFAULT_POWER_RATIO, 0.0)
    }

    pub fn power_with_ratio(lambda: f64, alpha: f64, b: f64) -> Result<Self> {
        Self::build(ScaleKind::PurePower, lambda, alpha, b, 0.0)
    }

    pub fn log_periodic(lambda: f64, alpha: f64, b: f64, epsilon: f64) -> Result<Self> {
        Self::build(ScaleKind::LogPeriodic, lambda, alpha, b, epsilon)
    }

    /// Log-periodic `ψ` parameterised by `a` instead of `b` (`b = a^{-1/α}`).
    pub fn log_periodic_with_a(lambda: f64, alpha: f64, a: f64, epsilon: f64) -> Result<Self> {
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::param("a", a, "must exceed 1"));
        }
        if !(alpha > 0.0) {
            return Err(Error::param("alpha", alpha, "must be positive"));
        }
        let mut psi = Self::build(ScaleKind::LogPeriodic, lambda, alpha, a.powf(-1.0 / alpha), epsilon)?;
        psi.a = a;
        Ok(psi)
    }

    /// Builds from an explicit `(a, b)` pair, rejecting pairs with
    /// `a·b^α ≠ 1`.
    pub fn from_ratios(kind: ScaleKind, lambda: f64, alpha: f64, a: f64, b: f64, epsilon: f64) -> Result<Self> {
        let psi = Self::build(kind, lambda, alpha, b, epsilon)?;
        if !((a * b.powf(alpha) - 1.0).abs() <= 1e-12) {
            return Err(Error::param("a", a, "a·b^alpha must equal 1"));
        }
        Ok(psi)
    }

    fn build(kind: ScaleKind, lambda: f64, alpha: f64, b: f64, epsilon: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", lambda, "must be positive"));
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 2]"));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::param("b", b, "must lie in (0, 1)"));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::param("eps", epsilon, "must lie in [0, 1)"));
        }
        if kind == ScaleKind::PurePower && epsilon != 0.0 {
            return Err(Error::param("eps", epsilon, "pure power has no amplitude"));
        }
        Ok(ScaleFunction {
            kind,
            lambda,
            alpha,
            b,
            a: b.powf(-alpha),
            epsilon,
        })
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// True when `ψ` reduces to `λ·s^α`.
    pub fn is_power(&self) -> bool {
        self.kind == ScaleKind::PurePower || self.epsilon == 0.0
    }

    /// Angular frequency of the log-periodic factor in `ln s`.
    fn log_frequency(&self) -> f64 {
        2.0 * PI / (1.0 / self.b).ln()
    }

    /// `ψ` is strictly increasing on `(0, ∞)` iff `ε < α / sqrt(α² + κ²)`
    /// with `κ = 2π / ln(1/b)`.
    pub fn is_increasing(&self) -> bool {
        if self.is_power() {
            return true;
        }
        let kappa = self.log_frequency();
        self.epsilon < self.alpha / self.alpha.hypot(kappa)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("scale function needs s >= 0, got {s}")));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let power = self.lambda * s.powf(self.alpha);
        if self.is_power() {
            power
        } else {
            power * (1.0 + self.epsilon * (self.log_frequency() * s.ln()).cos())
        }
    }

    /// Principal-branch continuation to `Re z ≥ 0`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        if z == Complex64::new(0.0, 0.0) {
            return z;
        }
        let ln_z = z.ln();
        let power = (ln_z * self.alpha).exp() * self.lambda;
        if self.is_power() {
            power
        } else {
            power * (1.0 + (ln_z * self.log_frequency()).cos() * self.epsilon)
        }
    }

    /// Inverse of a pure power, `(x/λ)^{1/α}`. `None` for log-periodic `ψ`.
    pub fn invert_power(&self, x: f64) -> Option<f64> {
        self.is_power().then(|| (x / self.lambda).powf(1.0 / self.alpha))
    }

    pub(crate) fn write_params(&self, d: Descriptor) -> Descriptor {
        let d = d.with("alpha", self.alpha).with("lambda", self.lambda);
        match self.kind {
            ScaleKind::PurePower => d,
            ScaleKind::LogPeriodic => d.with("b", self.b).with("eps", self.epsilon),
        }
    }

    /// Reads `alpha`, `lambda` (default 1) and, for a log-periodic `ψ`,
    /// `b` or `a` plus `eps`.
    pub(crate) fn read_params(d: &Descriptor) -> Result<Self> {
        let alpha = d.f64("alpha")?;
        let lambda = d.f64_or("lambda", 1.0)?;
        let log_periodic = d.has("b") || d.has("a") || d.has("eps");
        if !log_periodic {
            return Self::power(lambda, alpha);
        }
        let eps = d.f64_or("eps", DEFAULT_EPSILON)?;
        match (d.has("a"), d.has("b")) {
            (true, true) => Self::from_ratios(ScaleKind::LogPeriodic, lambda, alpha, d.f64("a")?, d.f64("b")?, eps),
            (true, false) => Self::log_periodic_with_a(lambda, alpha, d.f64("a")?, eps),
            (false, true) => Self::log_periodic(lambda, alpha, d.f64("b")?, eps),
            (false, false) => Err(Error::descriptor(d.to_string(), "log-periodic scale needs `a` or `b`")),
        }
    }
}

/// `max_s |ψ(s) − a·ψ(b·s)| / ψ(s)` for the function's own `(a, b)`.
pub fn check_scale_equation(psi: &ScaleFunction, grid: &[f64]) -> Result<f64> {
    scale_equation_residual(psi, psi.a, psi.b, grid)
}

/// Relative residual of `ψ(s) = a·ψ(b·s)` for an arbitrary `(a, b)`.
pub fn scale_equation_residual(psi: &ScaleFunction, a: f64, b: f64, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Domain("scale-equation grid is empty".into()));
    }
    let mut worst = 0.0f64;
    for &s in grid {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("scale-equation grid needs s > 0, got {s}")));
        }
        let lhs = psi.eval_unchecked(s);
        worst = worst.max((lhs - a * psi.eval_unchecked(b * s)).abs() / lhs);
    }
    Ok(worst)
}
