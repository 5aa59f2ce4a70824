//! One pass/fail line per acceptance criterion. Every numerical claim is
//! checked against an oracle written out in this file, and against the
//! library where the library computes the same quantity.

use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use randstab_core::discrete::*;
use randstab_core::harness::{monte_carlo, McTarget, TV_THRESHOLD};
use randstab_core::identify::*;
use randstab_core::sample::{sample_discrete, RandomSource};
use randstab_core::stability::*;
use randstab_core::transform::*;

const EXACT: f64 = 1e-12;
const MC_BUDGET: Duration = Duration::from_secs(10);

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn sup<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> f64 {
    grid.iter().map(|&x| f(x)).fold(0.0, f64::max)
}

fn harris(a: f64, k: u32, t: f64) -> f64 {
    t * (a - (a - 1.0) * t.powi(k as i32)).powf(-1.0 / k as f64)
}

fn harris_complex(a: f64, k: u32, t: Complex64) -> Complex64 {
    t * (a - t.powu(k) * (a - 1.0)).powf(-1.0 / k as f64)
}

/// `(1 + λ|u|^α e^{−iθ sgn u})^{−ν}`
fn gl_cf(alpha: f64, theta: f64, nu: f64, u: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    (Complex64::from_polar(u.abs().powf(alpha), -theta * u.signum()) + 1.0).powf(-nu)
}

fn library_lt(p: &PgfFamily, phi: &LtFamily, c: f64) -> f64 {
    verify_continuous(p, &(*phi).into(), c, &GridSpec::lt_default(), EXACT).unwrap().max_residual
}

fn criterion_1() -> Outcome {
    let lt_grid = geometric_grid(1e-3, 1e2, 200);
    let unit = linear_grid(1e-3, 0.999, 200);
    let mut worst = [0.0f64; 7];

    // Harris(3,2) with (1+s)^{-1/2}
    let oracle = sup(&lt_grid, |s| (harris(3.0, 2, (1.0 + s / 3.0).powf(-0.5)) - (1.0 + s).powf(-0.5)).abs());
    let lib = library_lt(&PgfFamily::harris(3.0, 2).unwrap(), &LtFamily::gamma(0.5).unwrap(), 1.0 / 3.0);
    worst[0] = oracle.max(lib);

    // Geometric(c^α) with 1/(1+s^α)
    for c in [0.1, 0.25, 0.5] {
        for alpha in [0.3, 0.5, 1.0] {
            let p = f64::powf(c, alpha);
            let ml = |s: f64| 1.0 / (1.0 + s.powf(alpha));
            let geo = |t: f64| p * t / (1.0 - (1.0 - p) * t);
            let oracle = sup(&lt_grid, |s| (geo(ml(c * s)) - ml(s)).abs());
            let lib = library_lt(&PgfFamily::geometric1(p).unwrap(), &LtFamily::mittag_leffler(alpha, 1.0).unwrap(), c);
            worst[1] = worst[1].max(oracle).max(lib);
        }
    }

    // Harris(a,2) with GL(1, π/4, 1/2) at c = 1/a
    let cf_grid = linear_grid(-50.0, 50.0, 200);
    let gl = CfFamily::generalized_linnik(1.0, PI / 4.0, 0.5, 1.0).unwrap();
    for a in [1.5, 2.0, E, 10.0] {
        let oracle = sup(&cf_grid, |u| {
            (harris_complex(a, 2, gl_cf(1.0, PI / 4.0, 0.5, u / a)) - gl_cf(1.0, PI / 4.0, 0.5, u)).norm()
        });
        let grid = GridSpec::linear(-50.0, 50.0, 200).unwrap();
        let report = verify_continuous(&PgfFamily::harris(a, 2).unwrap(), &gl.into(), 1.0 / a, &grid, EXACT).unwrap();
        let lib = if report.pass { report.max_residual } else { f64::INFINITY };
        worst[2] = worst[2].max(oracle).max(lib);
    }

    // discrete ML 1/(1+(1−s)^α) with Geometric(c^α), thinning by c
    let alpha = 0.5;
    let dml = |s: f64| 1.0 / (1.0 + (1.0 - s).powf(alpha));
    let q = discretize(&LtFamily::mittag_leffler(alpha, 1.0).unwrap());
    for c in [0.0625, 0.1, 0.25, 0.5, 0.9] {
        let p = f64::powf(c, alpha);
        let geo = |t: f64| p * t / (1.0 - (1.0 - p) * t);
        let oracle = sup(&unit, |s| (geo(dml(1.0 - c + c * s)) - dml(s)).abs());
        let lib = verify_discrete(&PgfFamily::geometric1(p).unwrap(), &q, c, &GridSpec::unit_default(), EXACT)
            .unwrap()
            .max_residual;
        worst[3] = worst[3].max(oracle).max(lib);
    }

    // class-L split of GL(α, θ, 1/k) at c = a^{-1/α}, in the equivalent form
    // φ(u) = φ(cu)·(1/a + (1 − 1/a)φ(u)^k)^{1/k}
    let cf_default = linear_grid(-50.0, 50.0, 201);
    for (alpha, theta, k) in [(1.0, PI / 4.0, 2u32), (0.5, 0.2, 1), (1.5, 0.3, 3)] {
        let nu = 1.0 / k as f64;
        let phi = CfFamily::generalized_linnik(alpha, theta, nu, 1.0).unwrap();
        for a in [1.5, 2.0, E, 10.0] {
            let c = f64::powf(a, -1.0 / alpha);
            let oracle = sup(&cf_default, |u| {
                let f = gl_cf(alpha, theta, nu, u);
                let factor = (f.powu(k) * (1.0 - 1.0 / a) + 1.0 / a).powf(nu);
                (f - gl_cf(alpha, theta, nu, c * u) * factor).norm()
            });
            let lib = check_class_l_decomposition(&phi, a, &GridSpec::cf_default()).unwrap();
            worst[4] = worst[4].max(oracle).max(lib);
        }
    }

    // exp(−λ(1−s)^α) = Q(1−c+cs)·exp(−λ(1−c^α)(1−s)^α)
    for (lambda, alpha) in [(1.0, 0.5), (2.0, 0.8), (0.5, 1.0)] {
        for c in [0.2, 0.5, 0.9] {
            let ds = |s: f64, l: f64| (-l * (1.0 - s).powf(alpha)).exp();
            let oracle = sup(&unit, |s| {
                (ds(s, lambda) - ds(1.0 - c + c * s, lambda) * ds(s, lambda * (1.0 - f64::powf(c, alpha)))).abs()
            });
            let lib = check_selfdecomp_discrete_stable(lambda, alpha, c, &unit).unwrap();
            worst[5] = worst[5].max(oracle).max(lib);
        }
    }

    // 1 − λ(1 − (1 − δ(1−s)^ν)) = 1 − λδ(1−s)^ν
    for (lambda, delta, nu) in [(0.5, 1.0, 0.5), (0.3, 0.7, 0.2), (0.9, 0.4, 0.8)] {
        let q = DiscretePgf::sibuya_bernoulli(delta, nu).unwrap();
        let oracle = sup(&unit, |s| {
            let inner = 1.0 - delta * (1.0 - s).powf(nu);
            ((1.0 - lambda * (1.0 - inner)) - (1.0 - lambda * delta * (1.0 - s).powf(nu))).abs()
        });
        let lib_q = sup(&unit, |s| (q.eval_real(s).unwrap() - (1.0 - delta * (1.0 - s).powf(nu))).abs());
        let lib = compose_sibuya_bernoulli(lambda, delta, nu, &unit).unwrap();
        worst[6] = worst[6].max(oracle).max(lib).max(lib_q);
    }

    let labels = ["harris-gamma", "geometric-ml", "harris-gl-cf", "dml-geometric", "class-l", "self-decomp", "sibuya-bernoulli"];
    let detail = labels
        .iter()
        .zip(&worst)
        .map(|(l, w)| format!("{l} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    (worst.iter().all(|&w| w <= EXACT), detail)
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    // exponential: Q(t) = ct/(1 − (1−c)t)
    let mut worst = 0.0f64;
    for c in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let id = identify_from_lt(&LtFamily::gamma(1.0).unwrap(), c).unwrap();
        let m = id.matched.expect("exponential matches");
        ok &= matches!(m.family, PgfFamily::Geometric1 { p } if (p - c).abs() <= 1e-10);
        let oracle = sup(&linear_grid(0.01, 0.99, 99), |t| {
            (id.curve.eval(t).unwrap() - c * t / (1.0 - (1.0 - c) * t)).abs()
        });
        worst = worst.max(m.sup_distance).max(oracle);
    }
    ok &= worst <= 1e-10;
    notes.push(format!("exponential sup {worst:.1e}"));

    // gamma(1/2), c = 1/3: Harris(3,2)
    let id = identify_from_lt(&LtFamily::gamma(0.5).unwrap(), 1.0 / 3.0).unwrap();
    let hit = matches!(id.matched.map(|m| m.family), Some(PgfFamily::Harris { a, k: 2 }) if (a - 3.0).abs() < 1e-8);
    let oracle = sup(&linear_grid(0.01, 0.99, 99), |t| (id.curve.eval(t).unwrap() - harris(3.0, 2, t)).abs());
    ok &= hit && oracle <= 1e-10;
    notes.push(format!("harris(3,2) {hit} ({oracle:.1e})"));

    // stable(1/2), c = 1/16: N ≡ 4
    let id = identify_from_lt(&LtFamily::positive_stable(0.5, 1.0).unwrap(), 1.0 / 16.0).unwrap();
    let hit = id.matched.map(|m| m.family) == Some(PgfFamily::Degenerate { k: 4 });
    let oracle = sup(&linear_grid(0.01, 0.99, 99), |t| (id.curve.eval(t).unwrap() - t.powi(4)).abs());
    ok &= hit && oracle <= 1e-10;
    notes.push(format!("degenerate(4) {hit} ({oracle:.1e})"));

    // semi-stable with a = 2 at c = b: t^2
    let psi = ScaleFunction::log_periodic_with_a(1.0, 0.5, 2.0, 0.05).unwrap();
    let id = identify_from_lt(&LtFamily::semi_stable(psi).unwrap(), psi.b()).unwrap();
    let oracle = sup(&linear_grid(0.01, 0.99, 99), |t| (id.curve.eval(t).unwrap() - t * t).abs());
    ok &= oracle <= 1e-10 && id.verdict == Verdict::ValidPgf;
    notes.push(format!("semi-stable t^2 {oracle:.1e}"));

    (ok, notes.join(", "))
}

fn criterion_3() -> Outcome {
    let id = identify_from_lt(&LtFamily::gamma(0.7).unwrap(), 0.5).unwrap();
    let min = id.pmf.min_coeff();
    let gamma_ok = id.verdict == Verdict::NotAPgf && min < -1e-3;

    let power_ok = !check_power_pgf(&PgfFamily::geometric1(0.5).unwrap(), 1.5).unwrap();

    let target = StabilityTarget::Continuous(LtFamily::gamma(0.5).unwrap().into());
    let s = solve_scale(&PgfFamily::geometric1(0.5).unwrap(), &target, (1e-3, 0.999), &GridSpec::lt_default(), EXACT)
        .unwrap();
    // independent scan of the same residual over c
    let lt_grid = geometric_grid(1e-3, 1e2, 200);
    let scan = linear_grid(1e-3, 0.999, 400)
        .into_iter()
        .map(|c| sup(&lt_grid, |x| (0.5 * (1.0 + c * x).powf(-0.5) / (1.0 - 0.5 * (1.0 + c * x).powf(-0.5)) - (1.0 + x).powf(-0.5)).abs()))
        .fold(f64::INFINITY, f64::min);
    let scale_ok = !s.stable && s.max_residual > 1e-3 && scan > 1e-3;

    (
        gamma_ok && power_ok && scale_ok,
        format!(
            "gamma(0.7) min coeff {min:.3e}, u=1.5 rejected {power_ok}, geometric+gamma(1/2) min residual {:.3e} (scan {scan:.3e})",
            s.max_residual
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut ok = true;
    let lt_sources = [
        (LtFamily::gamma(1.0).unwrap(), vec![0.1, 0.5, 0.9]),
        (LtFamily::gamma(0.5).unwrap(), vec![1.0 / 3.0, 0.1]),
        (LtFamily::gamma(1.0 / 3.0).unwrap(), vec![0.5]),
        (LtFamily::mittag_leffler(0.5, 1.0).unwrap(), vec![0.0625, 0.5]),
        (LtFamily::positive_linnik(0.7, 1.0, 0.5).unwrap(), vec![0.3]),
        (LtFamily::positive_stable(0.5, 1.0).unwrap(), vec![1.0 / 16.0, 1.0 / 9.0]),
    ];
    for (phi, cs) in &lt_sources {
        for &c in cs {
            let id = identify_from_lt(phi, c).unwrap();
            if id.verdict != Verdict::ValidPgf {
                continue;
            }
            count += 1;
            match id.matched {
                Some(m) => worst = worst.max(library_lt(&m.family, phi, c)),
                None => ok = false,
            }
        }
    }
    let discrete_sources = [
        ("dml:alpha=0.5,lambda=1", 0.0625),
        ("d:gamma:beta=0.5", 1.0 / 3.0),
        ("dstable:alpha=0.5,lambda=1", 0.25),
        ("dml:alpha=0.8,lambda=2@0.5", 0.3),
    ];
    for (text, c) in discrete_sources {
        let q: DiscretePgf = text.parse().unwrap();
        let id = identify_from_pgf(&q, c).unwrap();
        if id.verdict != Verdict::ValidPgf {
            continue;
        }
        count += 1;
        match id.matched {
            Some(m) => {
                worst = worst.max(
                    verify_discrete(&m.family, &q, c, &GridSpec::unit_default(), 1e-10).unwrap().max_residual,
                )
            }
            None => ok = false,
        }
    }
    (ok && count >= 10 && worst <= 1e-10, format!("{count} valid compounders, max residual {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let runs = [
        ("geometric1:p=0.25", "ml:alpha=0.5,lambda=1", 0.0625),
        ("degenerate:k=4", "pstable:alpha=0.5,lambda=1", 0.0625),
        ("geometric1:p=0.25", "dml:alpha=0.5,lambda=1", 0.0625),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (i, (n, x, c)) in runs.iter().enumerate() {
        let start = Instant::now();
        let v = monte_carlo(&n.parse().unwrap(), &McTarget::parse(x).unwrap(), *c, 100_000, 20 + i as u64).unwrap();
        let took = start.elapsed();
        ok &= v.pass && took < MC_BUDGET;
        notes.push(match v.p_value {
            Some(p) => format!("{x}: KS p {p:.3} in {:.2}s", took.as_secs_f64()),
            None => format!("{x}: TV {:.4} in {:.2}s", v.statistic, took.as_secs_f64()),
        });
    }
    (ok, notes.join(", "))
}

fn criterion_6() -> Outcome {
    let table = extract_pmf(&PgfFamily::harris(2.0, 2).unwrap(), 64, DEFAULT_RADIUS).unwrap();
    // p_{1+2j} = 2^{-1/2}·binom(j − 1/2, j)·2^{-j}
    let oracle = |n: usize| -> f64 {
        if n.is_multiple_of(2) {
            return 0.0;
        }
        let j = (n - 1) / 2;
        let binom: f64 = (1..=j).map(|i| (i as f64 - 0.5) / i as f64).product();
        0.5f64.sqrt() * binom * 0.5f64.powi(j as i32)
    };
    let series = (0..=32).map(|n| (table.coeffs[n] - oracle(n)).abs()).fold(0.0, f64::max);

    let mut worst_tv = 0.0f64;
    for (i, text) in ["dstable:alpha=0.5,lambda=1", "dml:alpha=0.5,lambda=1", "dlinnik:alpha=0.7,lambda=1,beta=2"]
        .iter()
        .enumerate()
    {
        let q: DiscretePgf = text.parse().unwrap();
        let batch = sample_discrete(&q, 100_000, &mut RandomSource::new(30 + i as u64, 0)).unwrap();
        let table = extract_pmf(&q, 64, DEFAULT_RADIUS).unwrap();
        let (freq, tail) = batch.empirical_pmf(64).unwrap();
        let body: f64 = freq.iter().zip(&table.coeffs).map(|(a, b)| (a - b).abs()).sum();
        worst_tv = worst_tv.max(0.5 * body + 0.5 * (tail - table.mass_deficiency.max(0.0)).abs());
    }
    (
        series <= 1e-9 && worst_tv < TV_THRESHOLD,
        format!("harris(2,2) series {series:.1e}, max Poisson-mixture TV {worst_tv:.4}"),
    )
}

fn criterion_7() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_randstab"))
        .args(["suite", "paper"])
        .env_remove("RANDSTAB_SEED")
        .output()
        .expect("suite binary runs");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let entries = report["entries"].as_array().cloned().unwrap_or_default();
    let invariants: Vec<_> = entries.iter().filter(|e| e["group"] == "invariants").collect();
    let green = invariants.iter().all(|e| e["pass"] == true);
    let total = entries.iter().filter(|e| e["pass"] == true).count();
    (
        out.status.code() == Some(0) && green && invariants.len() >= 5,
        format!(
            "exit {:?}, {} invariant checks green {green}, {total}/{} suite checks pass",
            out.status.code(),
            invariants.len(),
            entries.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("exact stability identities", criterion_1),
        ("identification closed forms", criterion_2),
        ("negative controls", criterion_3),
        ("round-trip re-verification", criterion_4),
        ("Monte Carlo distributional checks", criterion_5),
        ("oracle equivalence", criterion_6),
        ("invariant suite", criterion_7),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check();
        failures += usize::from(!pass);
        println!("criterion {} {:<36} {}  {detail}", i + 1, name, if pass { "PASS" } else { "FAIL" });
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
