//! Numerical certification of random-sum stability.
//!
//! Continuous: `P(φ(c·u)) = φ(u)` for an LT or CF `φ`. Discrete:
//! `P(Q(1−c+cs)) = Q(s)`. Both are sampled on a grid and reported as a
//! [`StabilityReport`].

mod grid;

use num_complex::Complex64;
use serde::Serialize;

pub use grid::{GridKind, GridSpec};

use crate::discrete::{d_type_transform, DiscretePgf};
use crate::error::{Error, Result};
use crate::transform::{CfFamily, LtFamily, Outer, PgfFamily, Transform};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Golden-section iterations used by [`solve_scale`].
pub const SCALE_SEARCH_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    ContinuousLt,
    ContinuousCf,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub equation: Equation,
    pub compounder: String,
    pub transform: String,
    pub c: f64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub pass: bool,
    pub grid: GridSpec,
    pub residuals: Vec<f64>,
}

impl StabilityReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        equation: Equation,
        compounder: String,
        transform: String,
        c: f64,
        tolerance: f64,
        grid: GridSpec,
        residuals: Vec<f64>,
        extra_ok: bool,
    ) -> Self {
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        // NaN residuals must fail the report.
        let finite = residuals.iter().all(|r| r.is_finite());
        StabilityReport {
            equation,
            compounder,
            transform,
            c,
            tolerance,
            max_residual,
            pass: finite && extra_ok && max_residual <= tolerance,
            grid,
            residuals,
        }
    }

    /// `(grid point, residual)` pairs for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,residual\n");
        for (x, r) in self.grid.points().iter().zip(&self.residuals) {
            out.push_str(&format!("{x:e},{r:e}\n"));
        }
        out
    }
}

fn check_scale(c: f64, is_lt: bool) -> Result<()> {
    if is_lt && c >= 1.0 {
        return Err(Error::Domain(format!(
            "scale c = {c} rejected: for a Laplace transform P(phi(cs)) = phi(s) forces 0 < c < 1"
        )));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("scale c must lie in (0, 1), got {c}")));
    }
    Ok(())
}

/// Residuals `|P(φ(c·u)) − φ(u)|` of the continuous stability equation.
///
/// For a CF the report also fails when `φ` vanishes somewhere on the grid.
pub fn verify_continuous(
    p: &PgfFamily,
    phi: &Transform,
    c: f64,
    grid: &GridSpec,
    tolerance: f64,
) -> Result<StabilityReport> {
    check_scale(c, matches!(phi, Transform::Lt(_)))?;
    let points = grid.points();
    let (equation, residuals, zero_free) = match phi {
        Transform::Lt(lt) => {
            let residuals = points
                .iter()
                .map(|&s| {
                    let inner = lt.eval(c * s)?;
                    Ok((p.eval_real(inner)? - lt.eval(s)?).abs())
                })
                .collect::<Result<Vec<_>>>()?;
            (Equation::ContinuousLt, residuals, true)
        }
        Transform::Cf(cf) => {
            let mut min_modulus = f64::INFINITY;
            let residuals = points
                .iter()
                .map(|&u| {
                    let target = cf.eval(u);
                    min_modulus = min_modulus.min(target.norm());
                    Ok((p.eval(cf.eval(c * u))? - target).norm())
                })
                .collect::<Result<Vec<_>>>()?;
            (Equation::ContinuousCf, residuals, min_modulus > 0.0)
        }
    };
    Ok(StabilityReport::assemble(
        equation,
        p.to_string(),
        phi.to_string(),
        c,
        tolerance,
        *grid,
        residuals,
        zero_free,
    ))
}

/// Residuals `|P(Q(1−c+cs)) − Q(s)|` of the discrete stability equation.
pub fn verify_discrete(
    p: &PgfFamily,
    q: &DiscretePgf,
    c: f64,
    grid: &GridSpec,
    tolerance: f64,
) -> Result<StabilityReport> {
    check_scale(c, false)?;
    let thinned = d_type_transform(q, c)?;
    let residuals = grid
        .points()
        .iter()
        .map(|&s| {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Domain(format!("discrete grid must lie in (0, 1), got {s}")));
            }
            let lhs = p.eval_real(thinned.eval_real(s)?)?;
            Ok((lhs - q.eval_real(s)?).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport::assemble(
        Equation::Discrete,
        p.to_string(),
        q.to_string(),
        c,
        tolerance,
        *grid,
        residuals,
        true,
    ))
}

/// What [`solve_scale`] found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleSolution {
    pub c: f64,
    pub max_residual: f64,
    pub closed_form: bool,
    pub stable: bool,
}

/// Anything [`solve_scale`] can search over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityTarget {
    Continuous(Transform),
    Discrete(DiscretePgf),
}

impl StabilityTarget {
    fn residual(&self, p: &PgfFamily, c: f64, grid: &GridSpec) -> Result<f64> {
        let report = match self {
            StabilityTarget::Continuous(phi) => verify_continuous(p, phi, c, grid, f64::INFINITY)?,
            StabilityTarget::Discrete(q) => verify_discrete(p, q, c, grid, f64::INFINITY)?,
        };
        Ok(report.max_residual)
    }
}

/// `(a, k)` when the compounder is Harris-type (geometric is `k = 1`).
fn harris_params(p: &PgfFamily) -> Option<(f64, u32)> {
    match *p {
        PgfFamily::Harris { a, k } => Some((a, k)),
        PgfFamily::Geometric1 { p } => Some((1.0 / p, 1)),
        _ => None,
    }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0)
}

/// Closed-form scale for the known stable pairs:
/// Harris(a,k) with `(1+ψ)^{-1/k}` gives `c = a^{-1/α}` (or `b` for a
/// log-periodic `ψ` whose `a` matches), and a degenerate `k` with `exp(−ψ)`
/// gives `c = k^{-1/α}`.
pub fn closed_form_scale(p: &PgfFamily, target: &StabilityTarget) -> Option<f64> {
    let (outer, psi) = match target {
        StabilityTarget::Continuous(Transform::Lt(lt)) => lt.factor(),
        StabilityTarget::Discrete(q) if q.thinning() == 1.0 => q.source_lt()?.factor(),
        StabilityTarget::Continuous(Transform::Cf(cf)) => {
            let psi = match *cf {
                CfFamily::Linnik { alpha, lambda } => crate::transform::ScaleFunction::power(lambda, alpha).ok()?,
                CfFamily::GeneralizedLinnik { alpha, lambda, .. } => {
                    crate::transform::ScaleFunction::power(lambda, alpha).ok()?
                }
                CfFamily::SemiAlphaLaplace { psi } | CfFamily::GenSemiAlphaLaplace { psi, .. } => psi,
            };
            (Outer::Power { beta: cf.nu() }, psi)
        }
        StabilityTarget::Discrete(_) => return None,
    };
    let count = match (outer, p) {
        (Outer::Power { beta }, _) => {
            let (a, k) = harris_params(p)?;
            if !close(beta * k as f64, 1.0) {
                return None;
            }
            a
        }
        (Outer::Exp, PgfFamily::Degenerate { k }) => *k as f64,
        _ => return None,
    };
    if psi.is_power() {
        Some(count.powf(-1.0 / psi.alpha()))
    } else if close(psi.a(), count) {
        Some(psi.b())
    } else {
        None
    }
}

/// Finds a scale `c` in `bracket` making the stability equation hold.
///
/// Known pairs return their closed form; otherwise the maximum residual is
/// minimised over `ln c` by golden-section search, preferring smaller `c`
/// on ties. Failure to reach `tolerance` is reported, not raised.
pub fn solve_scale(
    p: &PgfFamily,
    target: &StabilityTarget,
    bracket: (f64, f64),
    grid: &GridSpec,
    tolerance: f64,
) -> Result<ScaleSolution> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::Domain(format!("scale bracket must satisfy 0 < lo < hi < 1, got ({lo}, {hi})")));
    }
    if let Some(c) = closed_form_scale(p, target) {
        let max_residual = target.residual(p, c, grid)?;
        return Ok(ScaleSolution {
            c,
            max_residual,
            closed_form: true,
            stable: max_residual <= tolerance,
        });
    }
    let objective = |x: f64| target.residual(p, x.exp(), grid);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (objective(x1)?, objective(x2)?);
    for _ in 0..SCALE_SEARCH_ITERATIONS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2)?;
        }
    }
    let (x, max_residual) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(ScaleSolution {
        c: x.exp(),
        max_residual,
        closed_form: false,
        stable: max_residual <= tolerance,
    })
}

/// Residual of the class-L decomposition
/// `φ(u) = φ(cu)·{a − (a−1)φ(cu)^k}^{-1/k}` at `c = a^{-1/α}` for a
/// generalized Linnik CF with `ν = 1/k`.
pub fn check_class_l_decomposition(phi: &CfFamily, a: f64, grid: &GridSpec) -> Result<f64> {
    if !matches!(phi, CfFamily::Linnik { .. } | CfFamily::GeneralizedLinnik { .. }) {
        return Err(Error::Domain(format!("class-L identity needs a generalized Linnik CF, got {phi}")));
    }
    if !(a > 1.0) {
        return Err(Error::param("a", a, "must exceed 1"));
    }
    let k_real = 1.0 / phi.nu();
    let k = k_real.round();
    if !(k >= 1.0 && (k_real - k).abs() <= 1e-9) {
        return Err(Error::Domain(format!(
            "class-L identity needs nu = 1/k for a positive integer k, got nu = {}",
            phi.nu()
        )));
    }
    let k = k as u32;
    let c = a.powf(-1.0 / phi.alpha());
    Ok(grid.points().iter().fold(0.0f64, |worst, &u| {
        let inner = phi.eval(c * u);
        let factor: Complex64 = (a - inner.powu(k) * (a - 1.0)).powf(-1.0 / k as f64);
        worst.max((phi.eval(u) - inner * factor).norm())
    }))
}

/// Shorthand for stability of an LT under its own closed-form scale.
pub fn verify_lt_default(p: &PgfFamily, phi: &LtFamily, c: f64) -> Result<StabilityReport> {
    verify_continuous(p, &Transform::Lt(*phi), c, &GridSpec::lt_default(), DEFAULT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::discretize;
    use crate::transform::ScaleFunction;
    use std::f64::consts::PI;

    fn lt_grid() -> GridSpec {
        GridSpec::geometric(0.1, 20.0, 200).unwrap()
    }

    #[test]
    fn gamma_under_harris() {
        let r = verify_continuous(
            &PgfFamily::harris(3.0, 2).unwrap(),
            &LtFamily::gamma(0.5).unwrap().into(),
            1.0 / 3.0,
            &lt_grid(),
            1e-13,
        )
        .unwrap();
        assert!(r.pass, "{}", r.max_residual);
        assert_eq!(r.residuals.len(), 200);
    }

    #[test]
    fn ml_under_geometric() {
        let r = verify_continuous(
            &PgfFamily::geometric1(0.5).unwrap(),
            &LtFamily::mittag_leffler(0.5, 1.0).unwrap().into(),
            0.25,
            &lt_grid(),
            1e-13,
        )
        .unwrap();
        assert!(r.pass, "{}", r.max_residual);
    }

    #[test]
    fn generalized_linnik_under_harris() {
        let gl = CfFamily::generalized_linnik(1.0, std::f64::consts::FRAC_PI_4, 0.5, 1.0).unwrap();
        let r = verify_continuous(
            &PgfFamily::harris(2.0, 2).unwrap(),
            &gl.into(),
            0.5,
            &GridSpec::linear(-30.0, 30.0, 201).unwrap(),
            1e-13,
        )
        .unwrap();
        assert!(r.pass, "{}", r.max_residual);
        assert_eq!(r.equation, Equation::ContinuousCf);
    }

    #[test]
    fn negative_control() {
        let r = verify_continuous(
            &PgfFamily::geometric1(0.5).unwrap(),
            &LtFamily::gamma(1.0).unwrap().into(),
            0.3,
            &lt_grid(),
            1e-12,
        )
        .unwrap();
        assert!(!r.pass && r.max_residual > 1e-2);
    }

    #[test]
    fn lt_scale_at_least_one_rejected() {
        let err = verify_continuous(
            &PgfFamily::geometric1(0.5).unwrap(),
            &LtFamily::gamma(1.0).unwrap().into(),
            1.5,
            &lt_grid(),
            1e-12,
        )
        .unwrap_err();
        assert!(err.to_string().contains("0 < c < 1"));
    }

    #[test]
    fn discrete_examples() {
        let grid = GridSpec::unit_default();
        let dml = discretize(&LtFamily::mittag_leffler(0.5, 1.0).unwrap());
        let r = verify_discrete(&PgfFamily::geometric1(0.25).unwrap(), &dml, 0.0625, &grid, 1e-13).unwrap();
        assert!(r.pass, "{}", r.max_residual);

        let alpha = 0.5;
        let gsml = discretize(&LtFamily::gen_semi_ml(ScaleFunction::power(1.0, alpha).unwrap(), 0.5).unwrap());
        let c = 2f64.powf(-1.0 / alpha);
        let r = verify_discrete(&PgfFamily::harris(2.0, 2).unwrap(), &gsml, c, &grid, 1e-13).unwrap();
        assert!(r.pass, "{}", r.max_residual);
    }

    #[test]
    fn bernoulli_shift_keeps_sibuya_d_type() {
        // P(Q(s)) = 1 − 0.5(1−s)^{1/2} = Q(1 − c + cs) with c^{1/2} = 0.5
        let p = PgfFamily::bernoulli_shift(0.5).unwrap();
        let q = DiscretePgf::sibuya_bernoulli(1.0, 0.5).unwrap();
        let same_type = d_type_transform(&q, 0.25).unwrap();
        for s in GridSpec::unit_default().points() {
            let lhs = p.eval_real(q.eval_real(s).unwrap()).unwrap();
            assert!((lhs - (1.0 - 0.5 * (1.0 - s).sqrt())).abs() < 1e-15);
            assert!((lhs - same_type.eval_real(s).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_scales() {
        let grid = GridSpec::lt_default();
        let ml = StabilityTarget::Continuous(LtFamily::mittag_leffler(0.5, 1.0).unwrap().into());
        let s = solve_scale(&PgfFamily::harris(4.0, 1).unwrap(), &ml, (0.01, 0.99), &grid, 1e-12).unwrap();
        assert!(s.closed_form && s.stable);
        assert!((s.c - 0.0625).abs() < 1e-15);

        let stable = StabilityTarget::Continuous(LtFamily::positive_stable(0.5, 1.0).unwrap().into());
        let s = solve_scale(&PgfFamily::degenerate(4).unwrap(), &stable, (0.01, 0.99), &grid, 1e-12).unwrap();
        assert!(s.closed_form && s.stable);
        assert!((s.c - 0.0625).abs() < 1e-15);

        let gamma = StabilityTarget::Continuous(LtFamily::gamma(0.5).unwrap().into());
        let s = solve_scale(&PgfFamily::geometric1(0.5).unwrap(), &gamma, (0.01, 0.99), &grid, 1e-12).unwrap();
        assert!(!s.closed_form && !s.stable);
        assert!(s.max_residual > 1e-3, "{}", s.max_residual);
    }

    #[test]
    fn numeric_search_finds_known_scale() {
        // Harris(3,2) with gamma(1/2): the search alone should land on 1/3
        let gamma = StabilityTarget::Continuous(LtFamily::gamma(0.5).unwrap().into());
        let harris = PgfFamily::harris(3.0, 2).unwrap();
        assert!(closed_form_scale(&harris, &gamma).is_some());
        let grid = GridSpec::lt_default();
        let lt = LtFamily::gamma(0.5).unwrap();
        let mut best = (0.0, f64::INFINITY);
        for i in 1..999 {
            let c = i as f64 / 1000.0;
            let r = verify_continuous(&harris, &lt.into(), c, &grid, 1.0).unwrap().max_residual;
            if r < best.1 {
                best = (c, r);
            }
        }
        assert!((best.0 - 0.333).abs() < 2e-3);
    }

    #[test]
    fn class_l_identity() {
        let grid = GridSpec::cf_default();
        let gl = CfFamily::generalized_linnik(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(check_class_l_decomposition(&gl, 2.0, &grid).unwrap() <= 1e-13);
        let gl = CfFamily::generalized_linnik(0.5, 0.3, 0.5, 1.0).unwrap();
        assert!(check_class_l_decomposition(&gl, 5.0, &grid).unwrap() <= 1e-13);
        let at_zero = GridSpec::linear(0.0, 0.0, 1).unwrap();
        assert_eq!(check_class_l_decomposition(&gl, 5.0, &at_zero).unwrap(), 0.0);
        let bad = CfFamily::generalized_linnik(1.0, 0.0, 0.4, 1.0).unwrap();
        assert!(check_class_l_decomposition(&bad, 2.0, &grid).is_err());
    }

    #[test]
    fn degenerate_reduces_to_power() {
        let phi = CfFamily::generalized_linnik(1.2, PI / 8.0, 0.7, 1.3).unwrap();
        let k = 3;
        let c = 0.4;
        let grid = GridSpec::cf_default();
        let report = verify_continuous(&PgfFamily::degenerate(k).unwrap(), &phi.into(), c, &grid, 1.0).unwrap();
        for (u, r) in grid.points().iter().zip(&report.residuals) {
            let inner = phi.eval(c * u);
            let direct = (inner * inner * inner - phi.eval(*u)).norm();
            assert!((direct - r).abs() <= 1e-14);
        }
    }
}
