//! The regression suite behind `randstab suite paper`.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use serde::Serialize;

use crate::discrete::{
    check_selfdecomp_discrete_stable, compose_sibuya_bernoulli, discretize, extract_pmf, DiscretePgf, DEFAULT_RADIUS,
};
use crate::error::{Error, Result};
use crate::identify::{check_power_pgf, identify_from_lt, identify_from_pgf, IdentifiedCompounder, IdentifySource, Verdict};
use crate::sample::{binomial_thin, sample_discrete, sample_transform, RandomSource};
use crate::stability::{
    check_class_l_decomposition, solve_scale, verify_continuous, verify_discrete, GridSpec, StabilityTarget,
};
use crate::transform::{check_scale_equation, CfFamily, LtFamily, PgfFamily, ScaleFunction, Transform};

use super::mc::{discrete_sampler_verdict, monte_carlo, McTarget, TV_THRESHOLD};
use super::stats::{correlation, tv_distance_batches};

pub const SUITE_SAMPLES: usize = 100_000;
const IDENTITY_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    ExactIdentities,
    Identification,
    NegativeControls,
    RoundTrip,
    MonteCarlo,
    Oracles,
    Invariants,
}

impl Group {
    pub fn label(&self) -> &'static str {
        match self {
            Group::ExactIdentities => "exact-identities",
            Group::Identification => "identification",
            Group::NegativeControls => "negative-controls",
            Group::RoundTrip => "round-trip",
            Group::MonteCarlo => "monte-carlo",
            Group::Oracles => "oracles",
            Group::Invariants => "invariants",
        }
    }
}

/// One row of the traceability table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub group: Group,
    pub id: &'static str,
    pub claim: &'static str,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    /// Fixed-width table of group, check, value and outcome.
    pub fn table(&self) -> String {
        let mut out = format!("{:<18} {:<34} {:>12}  {}\n", "group", "check", "value", "result");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<18} {:<34} {:>12.3e}  {}",
                e.group.label(),
                e.id,
                e.value,
                if e.pass { "pass" } else { "FAIL" }
            );
        }
        let passed = self.entries.iter().filter(|e| e.pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.entries.len());
        out
    }

    pub fn group_pass(&self, group: Group) -> bool {
        self.entries.iter().filter(|e| e.group == group).all(|e| e.pass)
    }
}

/// `(pass, value, detail)` of one check.
type Outcome = (bool, f64, String);

struct Check {
    group: Group,
    id: &'static str,
    claim: &'static str,
    run: fn(u64) -> Result<Outcome>,
}

fn below(value: f64, tol: f64) -> Outcome {
    (value <= tol, value, format!("max residual {value:.3e} <= {tol:e}"))
}

fn lt_residual(p: PgfFamily, phi: LtFamily, c: f64) -> Result<f64> {
    Ok(verify_continuous(&p, &phi.into(), c, &GridSpec::lt_default(), IDENTITY_TOL)?.max_residual)
}

fn unit_grid() -> Vec<f64> {
    GridSpec::unit_default().points()
}

fn harris_gamma(_: u64) -> Result<Outcome> {
    Ok(below(
        lt_residual(PgfFamily::harris(3.0, 2)?, LtFamily::gamma(0.5)?, 1.0 / 3.0)?,
        IDENTITY_TOL,
    ))
}

fn geometric_ml(_: u64) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for c in [0.1, 0.25, 0.5] {
        for alpha in [0.3, 0.5, 1.0] {
            let p = PgfFamily::geometric1(f64::powf(c, alpha))?;
            worst = worst.max(lt_residual(p, LtFamily::mittag_leffler(alpha, 1.0)?, c)?);
        }
    }
    Ok(below(worst, IDENTITY_TOL))
}

fn harris_linnik_cf(_: u64) -> Result<Outcome> {
    let phi: Transform = CfFamily::generalized_linnik(1.0, PI / 4.0, 0.5, 1.0)?.into();
    let grid = GridSpec::linear(-50.0, 50.0, 200)?;
    let mut worst = 0.0f64;
    let mut zero_free = true;
    for a in [1.5, 2.0, E, 10.0] {
        let r = verify_continuous(&PgfFamily::harris(a, 2)?, &phi, 1.0 / a, &grid, IDENTITY_TOL)?;
        worst = worst.max(r.max_residual);
        zero_free &= r.pass || r.max_residual > IDENTITY_TOL;
    }
    let (pass, value, detail) = below(worst, IDENTITY_TOL);
    Ok((pass && zero_free, value, detail))
}

fn discrete_ml_geometric(_: u64) -> Result<Outcome> {
    let alpha = 0.5;
    let q = discretize(&LtFamily::mittag_leffler(alpha, 1.0)?);
    let mut worst = 0.0f64;
    for c in [0.0625, 0.1, 0.25, 0.5, 0.9] {
        let p = PgfFamily::geometric1(f64::powf(c, alpha))?;
        worst = worst.max(verify_discrete(&p, &q, c, &GridSpec::unit_default(), IDENTITY_TOL)?.max_residual);
    }
    Ok(below(worst, IDENTITY_TOL))
}

fn class_l(_: u64) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (alpha, theta, nu) in [(1.0, PI / 4.0, 0.5), (0.5, 0.2, 1.0), (1.5, 0.3, 1.0 / 3.0)] {
        let phi = CfFamily::generalized_linnik(alpha, theta, nu, 1.0)?;
        for a in [1.5, 2.0, E, 10.0] {
            worst = worst.max(check_class_l_decomposition(&phi, a, &GridSpec::cf_default())?);
        }
    }
    Ok(below(worst, IDENTITY_TOL))
}

fn self_decomposition(_: u64) -> Result<Outcome> {
    let grid = unit_grid();
    let mut worst = 0.0f64;
    for (lambda, alpha) in [(1.0, 0.5), (2.0, 0.8), (0.5, 1.0)] {
        for c in [0.2, 0.5, 0.9] {
            worst = worst.max(check_selfdecomp_discrete_stable(lambda, alpha, c, &grid)?);
        }
    }
    Ok(below(worst, IDENTITY_TOL))
}

fn sibuya_bernoulli(_: u64) -> Result<Outcome> {
    let grid = unit_grid();
    let mut worst = 0.0f64;
    for (lambda, delta, nu) in [(0.5, 1.0, 0.5), (0.3, 0.7, 0.2), (0.9, 0.4, 0.8)] {
        worst = worst.max(compose_sibuya_bernoulli(lambda, delta, nu, &grid)?);
    }
    Ok(below(worst, IDENTITY_TOL))
}

fn matched(id: &IdentifiedCompounder) -> Result<PgfFamily> {
    if id.verdict != Verdict::ValidPgf {
        return Err(Error::Domain(format!("identification at c = {} gave {:?}", id.c, id.verdict)));
    }
    id.matched
        .map(|m| m.family)
        .ok_or_else(|| Error::Domain(format!("no family matched at c = {}", id.c)))
}

fn exponential_geometric(_: u64) -> Result<Outcome> {
    let phi = LtFamily::gamma(1.0)?;
    let mut worst = 0.0f64;
    for c in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let id = identify_from_lt(&phi, c)?;
        let family = matched(&id)?;
        let PgfFamily::Geometric1 { p } = family else {
            return Ok((false, f64::NAN, format!("c = {c} matched {family}")));
        };
        worst = worst.max(id.matched.map_or(f64::INFINITY, |m| m.sup_distance)).max((p - c).abs());
    }
    Ok(below(worst, ROUND_TRIP_TOL))
}

fn gamma_harris(_: u64) -> Result<Outcome> {
    let id = identify_from_lt(&LtFamily::gamma(0.5)?, 1.0 / 3.0)?;
    let family = matched(&id)?;
    let ok = matches!(family, PgfFamily::Harris { a, k: 2 } if (a - 3.0).abs() < 1e-8);
    Ok((ok, id.matched.map_or(f64::NAN, |m| m.sup_distance), format!("matched {family}")))
}

fn stable_degenerate(_: u64) -> Result<Outcome> {
    let id = identify_from_lt(&LtFamily::positive_stable(0.5, 1.0)?, 1.0 / 16.0)?;
    let family = matched(&id)?;
    Ok((
        family == PgfFamily::Degenerate { k: 4 },
        id.matched.map_or(f64::NAN, |m| m.sup_distance),
        format!("matched {family}"),
    ))
}

fn semistable_power(_: u64) -> Result<Outcome> {
    let psi = ScaleFunction::log_periodic_with_a(1.0, 0.5, 2.0, 0.05)?;
    let id = identify_from_lt(&LtFamily::semi_stable(psi)?, psi.b())?;
    let worst = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&t| id.curve.eval(t).map(|q| (q - t * t).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (pass, value, detail) = below(worst, IDENTITY_TOL);
    Ok((pass && matched(&id)? == PgfFamily::Degenerate { k: 2 }, value, detail))
}

fn gamma_not_pgf(_: u64) -> Result<Outcome> {
    let id = identify_from_lt(&LtFamily::gamma(0.7)?, 0.5)?;
    let most_negative = id.pmf.min_coeff();
    Ok((
        id.verdict == Verdict::NotAPgf && most_negative < -1e-3,
        most_negative,
        format!("first negative coefficient at n = {:?}", id.pmf.first_negative_index),
    ))
}

fn fractional_power(_: u64) -> Result<Outcome> {
    let g = PgfFamily::geometric1(0.5)?;
    let (fractional, integer) = (check_power_pgf(&g, 1.5)?, check_power_pgf(&g, 2.0)?);
    Ok((
        !fractional && integer,
        1.5,
        format!("u = 1.5 accepted: {fractional}, u = 2 accepted: {integer}"),
    ))
}

fn no_stable_scale(_: u64) -> Result<Outcome> {
    let target = StabilityTarget::Continuous(LtFamily::gamma(0.5)?.into());
    let s = solve_scale(&PgfFamily::geometric1(0.5)?, &target, (1e-3, 0.999), &GridSpec::lt_default(), IDENTITY_TOL)?;
    Ok((
        !s.stable && s.max_residual > 1e-3,
        s.max_residual,
        format!("best c = {:.6} with residual {:.3e}", s.c, s.max_residual),
    ))
}

fn shifted_scale(_: u64) -> Result<Outcome> {
    let r = lt_residual(PgfFamily::harris(3.0, 2)?, LtFamily::gamma(0.5)?, 1.0 / 3.0 + 0.1)?;
    Ok((r > 1e-3, r, "c shifted by 0.1 from 1/3".into()))
}

fn round_trips(_: u64) -> Result<Outcome> {
    let mut cases: Vec<IdentifiedCompounder> = Vec::new();
    for c in [0.1, 0.5, 0.9] {
        cases.push(identify_from_lt(&LtFamily::gamma(1.0)?, c)?);
        cases.push(identify_from_lt(&LtFamily::mittag_leffler(0.5, 1.0)?, c)?);
    }
    cases.push(identify_from_lt(&LtFamily::gamma(0.5)?, 1.0 / 3.0)?);
    cases.push(identify_from_lt(&LtFamily::positive_linnik(0.7, 1.0, 1.0 / 3.0)?, 0.4)?);
    cases.push(identify_from_lt(&LtFamily::positive_stable(0.5, 1.0)?, 1.0 / 16.0)?);
    cases.push(identify_from_pgf(&discretize(&LtFamily::mittag_leffler(0.5, 1.0)?), 0.0625)?);
    cases.push(identify_from_pgf(&discretize(&LtFamily::gamma(0.5)?), 1.0 / 3.0)?);
    let mut worst = 0.0f64;
    for id in &cases {
        let family = matched(id)?;
        let r = match id.curve.source() {
            IdentifySource::Lt(phi) => lt_residual(family, phi, id.c)?,
            IdentifySource::Discrete(q) => {
                verify_discrete(&family, &q, id.c, &GridSpec::unit_default(), ROUND_TRIP_TOL)?.max_residual
            }
        };
        worst = worst.max(r);
    }
    let (pass, value, _) = below(worst, ROUND_TRIP_TOL);
    Ok((pass, value, format!("{} identified compounders re-verified", cases.len())))
}

fn mc_outcome(count: &str, target: &str, c: f64, seed: u64) -> Result<Outcome> {
    let v = monte_carlo(&count.parse()?, &McTarget::parse(target)?, c, SUITE_SAMPLES, seed)?;
    let detail = match v.p_value {
        Some(p) => format!("KS D = {:.4}, p = {p:.4}", v.statistic),
        None => format!("TV = {:.4}", v.statistic),
    };
    Ok((v.pass, v.p_value.unwrap_or(v.statistic), detail))
}

fn mc_geometric_ml(seed: u64) -> Result<Outcome> {
    mc_outcome("geometric1:p=0.25", "ml:alpha=0.5,lambda=1", 0.0625, seed)
}

fn mc_degenerate_stable(seed: u64) -> Result<Outcome> {
    mc_outcome("degenerate:k=4", "pstable:alpha=0.5,lambda=1", 0.0625, seed)
}

fn mc_thinned_discrete_ml(seed: u64) -> Result<Outcome> {
    mc_outcome("geometric1:p=0.25", "dml:alpha=0.5,lambda=1", 0.0625, seed)
}

fn harris_oracle(_: u64) -> Result<Outcome> {
    // p_{1+2m} = C(2m, m)/4^m · 2^{-1/2}·(1/2)^m for Harris(2, 2)
    let table = extract_pmf(&PgfFamily::harris(2.0, 2)?, 64, DEFAULT_RADIUS)?;
    let mut worst = 0.0f64;
    let mut mass = std::f64::consts::FRAC_1_SQRT_2;
    for n in 0..=32usize {
        let exact = if n % 2 == 1 {
            let m = (n - 1) / 2;
            if m > 0 {
                mass *= (2 * m - 1) as f64 / (2 * m) as f64 * 0.5;
            }
            mass
        } else {
            0.0
        };
        worst = worst.max((table.coeffs[n] - exact).abs());
    }
    Ok(below(worst, 1e-9))
}

fn poisson_mixture_tables(seed: u64) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (i, text) in ["dstable:alpha=0.5,lambda=1", "dml:alpha=0.5,lambda=1", "dlinnik:alpha=0.7,lambda=1,beta=2"]
        .iter()
        .enumerate()
    {
        let q: DiscretePgf = text.parse()?;
        let v = discrete_sampler_verdict(&q, SUITE_SAMPLES, seed.wrapping_add(i as u64))?;
        worst = worst.max(v.statistic);
    }
    Ok((worst < TV_THRESHOLD, worst, format!("max TV {worst:.4} < {TV_THRESHOLD}")))
}

fn scale_equation(_: u64) -> Result<Outcome> {
    let grid = GridSpec::lt_default().points();
    let mut worst = 0.0f64;
    for psi in [
        ScaleFunction::power(1.0, 0.5)?,
        ScaleFunction::power_with_ratio(2.0, 1.5, 0.3)?,
        ScaleFunction::log_periodic(1.0, 0.5, 0.25, 0.1)?,
        ScaleFunction::log_periodic(0.7, 0.9, 0.5, 0.05)?,
    ] {
        worst = worst.max(check_scale_equation(&psi, &grid)?);
    }
    Ok(below(worst, IDENTITY_TOL))
}

fn lt_catalog() -> Result<Vec<LtFamily>> {
    Ok(vec![
        LtFamily::gamma(0.5)?,
        LtFamily::mittag_leffler(0.3, 2.0)?,
        LtFamily::positive_linnik(0.7, 1.0, 2.5)?,
        LtFamily::positive_stable(0.5, 1.0)?,
        LtFamily::semi_ml(ScaleFunction::log_periodic(1.0, 0.5, 0.25, 0.1)?)?,
        LtFamily::semi_stable(ScaleFunction::log_periodic(1.0, 0.8, 0.5, 0.05)?)?,
    ])
}

fn lt_monotone(_: u64) -> Result<Outcome> {
    let points = GridSpec::geometric(1e-3, 1e2, 1000)?.points();
    let mut failures = 0usize;
    for phi in lt_catalog()? {
        let values = points.iter().map(|&s| phi.eval(s)).collect::<Result<Vec<_>>>()?;
        failures += values.windows(2).filter(|w| !(w[1] < w[0])).count();
    }
    Ok((failures == 0, failures as f64, format!("{failures} non-decreasing steps")))
}

fn cf_symmetry(_: u64) -> Result<Outcome> {
    let points = GridSpec::linear(0.0, 50.0, 501)?.points();
    let mut worst = 0.0f64;
    let mut min_modulus = f64::INFINITY;
    for phi in [
        CfFamily::linnik(1.5, 1.0)?,
        CfFamily::generalized_linnik(1.0, PI / 4.0, 0.5, 1.0)?,
        CfFamily::generalized_linnik(0.5, 0.7, 2.0, 3.0)?,
        CfFamily::semi_alpha_laplace(ScaleFunction::log_periodic(1.0, 1.2, 0.5, 0.05)?)?,
    ] {
        for &u in &points {
            worst = worst.max((phi.eval(-u) - phi.eval(u).conj()).norm());
            min_modulus = min_modulus.min(phi.eval(u).norm());
        }
    }
    Ok((
        worst <= 1e-15 && min_modulus > 0.0,
        worst,
        format!("min |phi| on the grid {min_modulus:.3e}"),
    ))
}

fn thinning_semigroup(seed: u64) -> Result<Outcome> {
    let q: DiscretePgf = "dml:alpha=0.8,lambda=4".parse()?;
    let base = sample_discrete(&q, SUITE_SAMPLES, &mut RandomSource::new(seed, 10))?;
    let mut src = RandomSource::new(seed, 11);
    let twice = binomial_thin(&binomial_thin(&base, 0.6, &mut src)?, 0.5, &mut src)?;
    let once = binomial_thin(&base, 0.3, &mut RandomSource::new(seed, 12))?;
    let tv = tv_distance_batches(&twice, &once)?;
    Ok((tv < TV_THRESHOLD, tv, format!("TV {tv:.4} < {TV_THRESHOLD}")))
}

fn determinism(seed: u64) -> Result<Outcome> {
    let phi: Transform = "ml:alpha=0.5,lambda=1".parse()?;
    let a = sample_transform(&phi, 1000, &mut RandomSource::new(seed, 3))?.to_bin()?;
    let b = sample_transform(&phi, 1000, &mut RandomSource::new(seed, 3))?.to_bin()?;
    let gamma: Transform = "gamma:beta=1".parse()?;
    let x = sample_transform(&gamma, SUITE_SAMPLES, &mut RandomSource::new(seed, 4))?;
    let y = sample_transform(&gamma, SUITE_SAMPLES, &mut RandomSource::new(seed, 5))?;
    let r = correlation(x.reals()?, y.reals()?);
    Ok((
        a == b && r.abs() < 0.01,
        r,
        format!("identical bytes: {}, cross-stream r = {r:.4}", a == b),
    ))
}

fn checks() -> Vec<Check> {
    use Group::*;
    let c = |group, id, claim, run| Check { group, id, claim, run };
    vec![
        c(ExactIdentities, "harris-gamma-half", "Harris(3,2) stabilises gamma(1/2) at c = 1/3", harris_gamma),
        c(ExactIdentities, "geometric-ml-grid", "geometric(c^alpha) stabilises ML", geometric_ml),
        c(ExactIdentities, "harris-linnik-cf", "Harris(a,2) stabilises GL(1, pi/4, 1/2) for every a", harris_linnik_cf),
        c(ExactIdentities, "discrete-ml-geometric", "discrete ML is geometric-sum stable", discrete_ml_geometric),
        c(ExactIdentities, "class-l-decomposition", "GL(alpha, theta, 1/k) splits as phi(cu) times a Harris factor", class_l),
        c(ExactIdentities, "discrete-self-decomposition", "discrete stable law is discrete self-decomposable", self_decomposition),
        c(ExactIdentities, "sibuya-bernoulli-composition", "Bernoulli-sum of Sibuya-Bernoulli stays in the family", sibuya_bernoulli),
        c(Identification, "exponential-geometric", "exponential law identifies geometric(c)", exponential_geometric),
        c(Identification, "gamma-half-harris", "gamma(1/2) at c = 1/3 identifies Harris(3,2)", gamma_harris),
        c(Identification, "stable-degenerate", "stable(1/2) at c = 1/16 identifies N = 4", stable_degenerate),
        c(Identification, "semistable-integer-power", "semi-stable law with a = 2 gives t^2", semistable_power),
        c(NegativeControls, "gamma-non-reciprocal-index", "gamma(0.7) has no compounder", gamma_not_pgf),
        c(NegativeControls, "power-pgf-fractional", "P(s^u) is a PGF only for integer u", fractional_power),
        c(NegativeControls, "geometric-gamma-no-scale", "geometric sums never stabilise gamma(1/2)", no_stable_scale),
        c(NegativeControls, "shifted-scale", "a wrong scale breaks the identity", shifted_scale),
        c(RoundTrip, "identified-reverify", "identified compounders satisfy the stability equation", round_trips),
        c(MonteCarlo, "mc-geometric-ml", "c S_N matches ML in law", mc_geometric_ml),
        c(MonteCarlo, "mc-degenerate-stable", "c S_4 matches stable(1/2) in law", mc_degenerate_stable),
        c(MonteCarlo, "mc-thinned-discrete-ml", "thinned geometric sum matches discrete ML", mc_thinned_discrete_ml),
        c(Oracles, "harris-series-oracle", "extracted Harris(2,2) masses match the binomial series", harris_oracle),
        c(Oracles, "poisson-mixture-tables", "Poisson-mixture samplers match extracted tables", poisson_mixture_tables),
        c(Invariants, "scale-equation", "psi(u) = a psi(bu)", scale_equation),
        c(Invariants, "lt-monotone", "Laplace transforms decrease strictly", lt_monotone),
        c(Invariants, "cf-hermitian-zero-free", "CFs are Hermitian and have no real zero", cf_symmetry),
        c(Invariants, "thinning-semigroup", "thinning by c1 then c2 equals thinning by c1 c2", thinning_semigroup),
        c(Invariants, "seeded-determinism", "seeded batches repeat and streams decorrelate", determinism),
    ]
}

/// Runs every check, in parallel, and reports them in a fixed order.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    if name != "paper" {
        return Err(Error::descriptor(name, "unknown suite; available: paper"));
    }
    let checks = checks();
    let entries = std::thread::scope(|scope| {
        let handles: Vec<_> = checks
            .iter()
            .map(|check| scope.spawn(move || (check.run)(seed)))
            .collect();
        checks
            .iter()
            .zip(handles)
            .map(|(check, h)| {
                let outcome = h
                    .join()
                    .unwrap_or_else(|_| Err(Error::Domain(format!("check {} panicked", check.id))));
                let (pass, value, detail) = outcome.unwrap_or_else(|e| (false, f64::NAN, format!("error: {e}")));
                SuiteEntry {
                    group: check.group,
                    id: check.id,
                    claim: check.claim,
                    pass,
                    value,
                    detail,
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(SuiteReport {
        suite: "paper",
        seed,
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}
