use randstab_core::discrete::{discretize, DiscretePgf};
use randstab_core::identify::{
    identify_from_lt, identify_from_pgf, IdentifiedCompounder, IdentifySource, PmfMethod, Verdict,
};
use randstab_core::stability::{verify_continuous, verify_discrete, GridSpec};
use randstab_core::transform::{LtFamily, PgfFamily, ScaleFunction};

fn expect_match(id: &IdentifiedCompounder, want: PgfFamily, tol: f64) {
    assert_eq!(id.verdict, Verdict::ValidPgf);
    let m = id.matched.expect("a matched family");
    assert!(m.sup_distance < 1e-8);
    let close = match (m.family, want) {
        (PgfFamily::Geometric1 { p }, PgfFamily::Geometric1 { p: q }) => (p - q).abs() <= tol,
        (PgfFamily::Harris { a, k }, PgfFamily::Harris { a: b, k: l }) => k == l && (a - b).abs() <= tol * b,
        (PgfFamily::Degenerate { k }, PgfFamily::Degenerate { k: l }) => k == l,
        (PgfFamily::Sibuya { nu }, PgfFamily::Sibuya { nu: mu }) => (nu - mu).abs() <= tol,
        _ => false,
    };
    assert!(close, "matched {} but wanted {want}", m.family);
}

/// Feeds the match back through the stability equation.
fn round_trip(id: &IdentifiedCompounder) -> f64 {
    let family = id.matched.unwrap().family;
    match id.curve.source() {
        IdentifySource::Lt(phi) => {
            verify_continuous(&family, &phi.into(), id.c, &GridSpec::lt_default(), 1e-10)
                .unwrap()
                .max_residual
        }
        IdentifySource::Discrete(q) => {
            verify_discrete(&family, &q, id.c, &GridSpec::unit_default(), 1e-10)
                .unwrap()
                .max_residual
        }
    }
}

/// `curve(φ(c·s)) = φ(s)` on the standard grid.
fn defining_relation(phi: &LtFamily, id: &IdentifiedCompounder) -> f64 {
    GridSpec::lt_default()
        .points()
        .into_iter()
        .map(|s| {
            let t = phi.eval(id.c * s).unwrap();
            (id.curve.eval(t).unwrap() - phi.eval(s).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn generalized_ml_gives_harris() {
    for (alpha, lambda, k, a) in [(0.5, 1.0, 2, 3.0), (0.8, 2.0, 3, 1.7), (1.0, 0.5, 4, 5.0)] {
        let phi = LtFamily::positive_linnik(alpha, lambda, 1.0 / k as f64).unwrap();
        let c = f64::powf(a, -1.0 / alpha);
        let id = identify_from_lt(&phi, c).unwrap();
        expect_match(&id, PgfFamily::harris(a, k).unwrap(), 1e-8);
        assert!(round_trip(&id) <= 1e-10);
        assert!(defining_relation(&phi, &id) <= 1e-10);
    }
}

#[test]
fn semi_ml_gives_geometric_at_c_equal_b() {
    for (alpha, b, eps) in [(0.5, 0.25, 0.05), (0.8, 0.3, 0.1), (0.3, 0.1, 0.0)] {
        let psi = ScaleFunction::log_periodic(1.0, alpha, b, eps).unwrap();
        let phi = LtFamily::semi_ml(psi).unwrap();
        let id = identify_from_lt(&phi, b).unwrap();
        expect_match(&id, PgfFamily::geometric1(1.0 / psi.a()).unwrap(), 1e-9);
        assert!((1.0 / psi.a() - f64::powf(b, alpha)).abs() < 1e-14);
        assert!(round_trip(&id) <= 1e-10);
        assert!(defining_relation(&phi, &id) <= 1e-10);
    }
}

#[test]
fn ml_gives_geometric_with_p_c_to_alpha() {
    for alpha in [0.3, 0.5, 1.0] {
        for c in [0.1, 0.25, 0.5] {
            let phi = LtFamily::mittag_leffler(alpha, 1.0).unwrap();
            let id = identify_from_lt(&phi, c).unwrap();
            expect_match(&id, PgfFamily::geometric1(f64::powf(c, alpha)).unwrap(), 1e-9);
            assert!(round_trip(&id) <= 1e-10);
        }
    }
}

#[test]
fn exponential_gives_geometric_with_p_c() {
    let phi = LtFamily::gamma(1.0).unwrap();
    for c in [0.1, 0.3, 0.4, 0.6, 0.9] {
        let id = identify_from_lt(&phi, c).unwrap();
        assert!(id.matched.unwrap().sup_distance <= 1e-10);
        expect_match(&id, PgfFamily::geometric1(c).unwrap(), 1e-10);
        assert!(round_trip(&id) <= 1e-10);
    }
}

#[test]
fn gamma_gives_harris() {
    for (k, c) in [(2, 1.0 / 3.0), (3, 0.5), (5, 0.2)] {
        let phi = LtFamily::gamma(1.0 / k as f64).unwrap();
        let id = identify_from_lt(&phi, c).unwrap();
        expect_match(&id, PgfFamily::harris(1.0 / c, k).unwrap(), 1e-8);
        assert!(round_trip(&id) <= 1e-10);
        assert!(defining_relation(&phi, &id) <= 1e-10);
    }
}

#[test]
fn non_reciprocal_gamma_index_is_not_a_pgf() {
    for beta in [0.7, 0.4, 2.5] {
        let id = identify_from_lt(&LtFamily::gamma(beta).unwrap(), 0.5).unwrap();
        assert_eq!(id.verdict, Verdict::NotAPgf, "beta = {beta}");
        assert!(id.pmf.first_negative_index.is_some());
    }
    let id = identify_from_lt(&LtFamily::gamma(0.7).unwrap(), 0.5).unwrap();
    assert!(id.pmf.min_coeff() < -1e-3);
}

#[test]
fn semi_stable_with_integer_a_gives_power() {
    for a in [2.0, 3.0] {
        let psi = ScaleFunction::log_periodic_with_a(1.0, 0.5, a, 0.05).unwrap();
        let phi = LtFamily::semi_stable(psi).unwrap();
        let id = identify_from_lt(&phi, psi.b()).unwrap();
        for t in [0.05, 0.2, 0.5, 0.8, 0.99] {
            assert!((id.curve.eval(t).unwrap() - t.powf(a)).abs() <= 1e-12);
        }
        expect_match(&id, PgfFamily::degenerate(a as u32).unwrap(), 0.0);
    }
    let psi = ScaleFunction::log_periodic_with_a(1.0, 0.5, 2.5, 0.05).unwrap();
    let id = identify_from_lt(&LtFamily::semi_stable(psi).unwrap(), psi.b()).unwrap();
    assert_eq!(id.verdict, Verdict::NotAPgf);
    assert_eq!(id.pmf_method, PmfMethod::ClosedForm);
}

#[test]
fn stable_gives_degenerate() {
    for (alpha, k) in [(0.5, 4u32), (0.7, 2), (1.0, 3)] {
        let phi = LtFamily::positive_stable(alpha, 1.0).unwrap();
        let c = (k as f64).powf(-1.0 / alpha);
        let id = identify_from_lt(&phi, c).unwrap();
        expect_match(&id, PgfFamily::degenerate(k).unwrap(), 0.0);
        assert!(id.matched.unwrap().sup_distance <= 1e-12);
        assert!(round_trip(&id) <= 1e-10);
    }
}

#[test]
fn discrete_sources() {
    let dml = discretize(&LtFamily::mittag_leffler(0.5, 1.0).unwrap());
    let id = identify_from_pgf(&dml, 0.0625).unwrap();
    expect_match(&id, PgfFamily::geometric1(0.25).unwrap(), 1e-9);
    assert!(round_trip(&id) <= 1e-10);

    let dgamma = discretize(&LtFamily::gamma(0.5).unwrap());
    let id = identify_from_pgf(&dgamma, 1.0 / 3.0).unwrap();
    expect_match(&id, PgfFamily::harris(3.0, 2).unwrap(), 1e-8);
    assert!(round_trip(&id) <= 1e-10);

    let dstable = discretize(&LtFamily::positive_stable(0.5, 1.0).unwrap());
    let id = identify_from_pgf(&dstable, 1.0 / 16.0).unwrap();
    for t in [0.1, 0.5, 0.9] {
        assert!((id.curve.eval(t).unwrap() - t.powi(4)).abs() < 1e-12);
    }
    expect_match(&id, PgfFamily::degenerate(4).unwrap(), 0.0);
    assert!(round_trip(&id) <= 1e-10);
}

#[test]
fn thinned_discrete_source_keeps_its_compounder() {
    let q: DiscretePgf = "dml:alpha=0.5,lambda=1@0.3".parse().unwrap();
    let id = identify_from_pgf(&q, 0.0625).unwrap();
    expect_match(&id, PgfFamily::geometric1(0.25).unwrap(), 1e-9);
}

#[test]
fn sibuya_bernoulli_has_no_compounder() {
    // 1 − c^{-ν}(1−t) has a negative constant term
    let q = DiscretePgf::sibuya_bernoulli(0.5, 0.5).unwrap();
    let id = identify_from_pgf(&q, 0.25).unwrap();
    assert_eq!(id.verdict, Verdict::NotAPgf);
    assert_eq!(id.pmf.first_negative_index, Some(0));
}
