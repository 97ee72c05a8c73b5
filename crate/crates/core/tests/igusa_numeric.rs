use qmw_core::igusa::{
    closed_form_single_propagator, fit_tail_exponent, igusa_zeta, integrate_eta,
    laurent_coefficients, Exponent, IntegrandSpec, IntegrationOptions, Scheme,
};
use qmw_core::quadric::{deform_net, DeformationSchedule, QuadricNet};
use qmw_core::rational::{rat, ratio, Rational};
use qmw_core::transversality::sunset_net;

fn propagator(d: usize, m: i64, alpha: i64) -> IntegrandSpec {
    IntegrandSpec::new(
        QuadricNet::single_propagator(d, &rat(m)),
        Exponent::Rational(rat(alpha)),
    )
    .unwrap()
}

fn sunset(d: usize, alpha: Rational) -> IntegrandSpec {
    let (g, t, net) = sunset_net(&[rat(1), rat(2), rat(3)], d).unwrap();
    let deformed = deform_net(&net, &t, &g, &ratio(1, 3), DeformationSchedule::Paper).unwrap();
    IntegrandSpec::new(deformed, Exponent::Rational(alpha)).unwrap()
}

fn opts(samples: u64, seed: u64) -> IntegrationOptions {
    IntegrationOptions {
        samples,
        seed,
        ..Default::default()
    }
}

/// Three standard errors plus a rounding floor for zero-variance estimators.
fn within_3_sigma(value: f64, err: f64, expected: f64) -> bool {
    (value - expected).abs() <= 3.0 * err + 1e-12 * expected.abs()
}

#[test]
fn single_propagator_matches_closed_form() {
    for (d, m, alpha) in [(1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 1, 2), (4, 2, 3)] {
        let exact = closed_form_single_propagator(d, m as f64, alpha as f64).unwrap();
        let r = integrate_eta(&propagator(d, m, alpha), &opts(1 << 18, 7)).unwrap();
        assert!(
            within_3_sigma(r.value, r.std_error, exact),
            "(D,m,α)=({d},{m},{alpha}): {} ± {} vs {exact}",
            r.value,
            r.std_error
        );
    }
    assert!(
        (closed_form_single_propagator(2, 2.0, 2.0).unwrap() - std::f64::consts::FRAC_PI_4).abs()
            < 1e-15
    );
}

#[test]
fn grid_scheme_agrees_with_monte_carlo() {
    let spec = propagator(2, 2, 2);
    let grid = IntegrationOptions {
        scheme: Scheme::Grid,
        ..opts(1 << 16, 0)
    };
    let g = integrate_eta(&spec, &grid).unwrap();
    let exact = closed_form_single_propagator(2, 2.0, 2.0).unwrap();
    assert!(
        (g.value - exact).abs() < 1e-3 * exact,
        "{} vs {exact}",
        g.value
    );
}

#[test]
fn tail_exponent_is_ld_minus_2n_alpha() {
    let radii = [8.0, 16.0, 32.0, 64.0];
    for spec in [
        propagator(1, 1, 1),
        propagator(2, 1, 2),
        propagator(2, 2, 2),
    ] {
        let expected = spec.tail_exponent();
        let slope = fit_tail_exponent(&spec, &radii, &opts(1 << 18, 3)).unwrap();
        assert!(
            (slope - expected).abs() <= 0.1 * expected.abs(),
            "slope {slope} vs {expected}"
        );
    }
}

#[test]
fn laurent_coefficients_match_finite_differences() {
    let spec = sunset(2, rat(2));
    let o = opts(1 << 18, 11);
    let h = 1.0 / 16.0;
    let l = laurent_coefficients(&spec, 2, &o).unwrap();
    let value = integrate_eta(&spec, &o).unwrap();
    assert_eq!(l.coefficients[0].1.to_bits(), value.value.to_bits());

    let at = |s: f64| igusa_zeta(&spec, s, &o).unwrap().value;
    let (minus, centre, plus) = (at(2.0 - h), at(2.0), at(2.0 + h));
    let d1 = (plus - minus) / (2.0 * h);
    let d2 = (plus - 2.0 * centre + minus) / (2.0 * h * h);
    let (_, g1, e1) = l.coefficients[1];
    let (_, g2, e2) = l.coefficients[2];
    assert!(
        (g1 - d1).abs() <= 0.02 * d1.abs() + 3.0 * e1,
        "γ1 {g1} ± {e1} vs {d1}"
    );
    assert!(
        (g2 - d2).abs() <= 0.05 * d2.abs() + 3.0 * e2,
        "γ2 {g2} ± {e2} vs {d2}"
    );
}

#[test]
fn results_are_reproducible_and_chunk_independent() {
    let spec = sunset(2, rat(2));
    let a = integrate_eta(&spec, &opts(50_000, 5)).unwrap();
    let b = integrate_eta(&spec, &opts(50_000, 5)).unwrap();
    assert_eq!(a, b);
    for chunks in [1, 3, 16] {
        let c = integrate_eta(
            &spec,
            &IntegrationOptions {
                chunks,
                ..opts(50_000, 5)
            },
        )
        .unwrap();
        assert_eq!(c.value.to_bits(), a.value.to_bits());
    }
    assert_ne!(
        integrate_eta(&spec, &opts(50_000, 6)).unwrap().value,
        a.value
    );
}

#[test]
fn scaling_with_mass() {
    // ∫ (c²m² + |u|²)^{-α} d^D u = c^{D − 2α} ∫ (m² + |u|²)^{-α} d^D u
    let (d, alpha, c) = (2, 2, 2.0f64);
    let base = integrate_eta(&propagator(d, 1, alpha), &opts(1 << 18, 1)).unwrap();
    let scaled = integrate_eta(&propagator(d, 2, alpha), &opts(1 << 18, 1)).unwrap();
    let ratio = scaled.value / base.value;
    let expected = c.powi(d as i32 - 2 * alpha as i32);
    let err = ratio * (scaled.std_error / scaled.value + base.std_error / base.value);
    assert!(
        (ratio - expected).abs() <= 3.0 * err,
        "{ratio} ± {err} vs {expected}"
    );
}

#[test]
fn divergent_exponent_reports_threshold() {
    let spec = IntegrandSpec::new(
        sunset(2, rat(2)).net().clone(),
        Exponent::Rational(ratio(1, 2)),
    )
    .unwrap();
    let err = integrate_eta(&spec, &opts(100, 0)).unwrap_err();
    assert!(err.to_string().contains("2/3"), "{err}");
}
