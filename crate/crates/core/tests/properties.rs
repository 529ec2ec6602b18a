use proptest::prelude::*;

use rectwalk::hitting::{
    compute_ratio, end_probability, ratio_asymptotic_leading, ratio_asymptotic_two_term,
    ratio_from_probability, ratio_quadrature, HittingExponent, RatioMethod,
};
use rectwalk::quadrature::{
    integrate_adaptive, integrate_de, integrate_de_abscissa, Abscissa, IntegrationRequest,
};
use rectwalk::scmap::{
    alpha_from_aspect, alpha_series, aspect_from_alpha, rect_dims, sc_map_boundary, start_preimage,
    AspectRatio,
};
use rectwalk::specfun::{gamma_fn, theta2, theta3, theta4, Nome};

use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn r(v: f64) -> AspectRatio {
    AspectRatio::new(v).unwrap()
}

fn b(v: f64) -> HittingExponent {
    HittingExponent::new(v).unwrap()
}

fn de(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    integrate_de(&IntegrationRequest::new(f, lo, hi, 1e-13).unwrap())
        .unwrap()
        .value
}

fn de_abs(f: impl Fn(Abscissa) -> f64, lo: f64, hi: f64) -> f64 {
    integrate_de_abscissa(&IntegrationRequest::new(f, lo, hi, 1e-12).unwrap())
        .unwrap()
        .value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_quartic(q in 1e-8f64..0.9) {
        let q = Nome::new(q).unwrap();
        let (t2, t3, t4) = (theta2(q).unwrap(), theta3(q).unwrap(), theta4(q).unwrap());
        prop_assert!(rel(t2.powi(4) + t4.powi(4), t3.powi(4)) < 1e-13);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..40.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-13, "x = {x}: {lhs} vs {rhs}");
    }

    #[test]
    fn start_preimage_squares_to_alpha(rv in 1.0f64..25.0) {
        let alpha = alpha_from_aspect(r(rv)).unwrap();
        let d = start_preimage(alpha);
        prop_assert!(rel(d.d * d.d, alpha.value()) < 4.0 * f64::EPSILON);
        // (d - 1)(d + 1) = α - 1
        prop_assert!(rel(d.d_excess * (d.d + 1.0), alpha.excess()) < 1e-14);
    }

    #[test]
    fn aspect_roundtrip(rv in 1.0f64..25.0) {
        let back = aspect_from_alpha(alpha_from_aspect(r(rv)).unwrap());
        prop_assert!(rel(back, rv) < 1e-12, "r = {rv}: {back}");
    }

    #[test]
    fn quadrature_linear(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, k in 0.1f64..4.0) {
        let f = move |x: f64| (k * x).exp();
        let g = move |x: f64| 1.0 / (1.0 + k * x * x);
        let both = de(move |x| c1 * f(x) + c2 * g(x), 0.0, 1.0);
        let split = c1 * de(f, 0.0, 1.0) + c2 * de(g, 0.0, 1.0);
        prop_assert!((both - split).abs() < 1e-12 * (1.0 + split.abs()));
    }

    #[test]
    fn quadrature_additive(mid in 0.05f64..0.95, s in -0.45f64..0.5) {
        let whole = de_abs(move |p| (p.from_lower * p.from_upper).powf(s), 0.0, 1.0);
        let left = de_abs(move |p| (p.from_lower * ((1.0 - mid) + p.from_upper)).powf(s), 0.0, mid);
        let right = de_abs(move |p| ((mid + p.from_lower) * p.from_upper).powf(s), mid, 1.0);
        let parts = left + right;
        prop_assert!(rel(parts, whole) < 1e-11, "mid {mid} s {s}: {parts} vs {whole}");
    }

    #[test]
    fn de_matches_adaptive_on_smooth(k in 0.1f64..5.0, hi in 0.5f64..3.0) {
        let f = move |x: f64| (k * x).cos() * (-x).exp();
        let a = de(f, 0.0, hi);
        let g = integrate_adaptive(&IntegrationRequest::new(f, 0.0, hi, 1e-13).unwrap()).unwrap().value;
        prop_assert!((a - g).abs() < 1e-12 * (1.0 + g.abs()));
    }

    #[test]
    fn probability_roundtrip(l in -18.0f64..0.0) {
        let x = 10f64.powf(l);
        prop_assert!(rel(ratio_from_probability(end_probability(x)).unwrap(), x) <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn ratio_decreasing_in_aspect(rv in 1.0f64..12.0, dr in 0.05f64..2.0, bv in 0.2f64..2.0) {
        let lo = ratio_quadrature(alpha_from_aspect(r(rv)).unwrap(), b(bv), 1e-10).unwrap().value;
        let hi = ratio_quadrature(alpha_from_aspect(r(rv + dr)).unwrap(), b(bv), 1e-10).unwrap().value;
        prop_assert!(hi < lo);
    }

    #[test]
    fn reciprocal_aspect_inverts_ratio_at_square(bv in 0.2f64..2.0) {
        let one = ratio_quadrature(alpha_from_aspect(r(1.0)).unwrap(), b(bv), 1e-10).unwrap().value;
        prop_assert!((one - 1.0).abs() < 1e-9);
    }
}

#[test]
fn boundary_map_is_monotone() {
    for rv in [1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0] {
        let alpha = alpha_from_aspect(r(rv)).unwrap();
        let e = alpha.excess();
        let bottom: Vec<f64> = (0..=40)
            .map(|i| sc_map_boundary(-1.0 + i as f64 / 20.0, alpha).unwrap().x)
            .collect();
        assert!(bottom.windows(2).all(|w| w[0] < w[1]), "r = {rv}");
        let right: Vec<f64> = (1..=20)
            .map(|i| sc_map_boundary(1.0 + e * i as f64 / 20.0, alpha).unwrap().y)
            .collect();
        assert!(right.windows(2).all(|w| w[0] < w[1]), "r = {rv}");
        let left: Vec<f64> = (1..=20)
            .map(|i| {
                sc_map_boundary(-1.0 - e * i as f64 / 20.0, alpha)
                    .unwrap()
                    .y
            })
            .collect();
        assert!(left.windows(2).all(|w| w[0] < w[1]), "r = {rv}");
        let rect = rect_dims(alpha);
        let corner = sc_map_boundary(1.0, alpha).unwrap();
        assert!(rel(2.0 * corner.x, rect.a) < 1e-12, "r = {rv}");
        assert!(
            right
                .iter()
                .all(|&y| y > 0.0 && y <= rect.c * (1.0 + 1e-12)),
            "r = {rv}"
        );
    }
}

#[test]
fn series_residual_is_next_coefficient() {
    // excess - (8p + 32p²) ≈ 96p³
    for rv in [6.0, 6.5, 7.0, 7.5, 8.0] {
        let p = (-0.5 * PI * rv).exp();
        let e = alpha_from_aspect(r(rv)).unwrap().excess();
        let resid = e - (8.0 * p + 32.0 * p * p);
        let c = 96.0 * p.powi(3);
        assert!((resid - c).abs() <= 0.05 * c, "r = {rv}: {resid} vs {c}");
    }
    for i in 0..=28 {
        let rv = 6.0 + 0.5 * i as f64;
        let p = (-0.5 * PI * rv).exp();
        let e = alpha_from_aspect(r(rv)).unwrap().excess();
        let resid = (e - (8.0 * p + 32.0 * p * p)).abs();
        assert!(resid <= 100.0 * p.powi(3) + 1e-13 * e, "r = {rv}");
        assert!(rel(alpha_series(rv, 6), e) < 1e-12, "r = {rv}");
    }
}

#[test]
fn two_term_beats_leading() {
    for rv in [6.0, 8.0, 10.0, 12.0] {
        let alpha = alpha_from_aspect(r(rv)).unwrap();
        for bv in [0.4, 0.625, 0.9] {
            let q = ratio_quadrature(alpha, b(bv), 1e-12).unwrap().value;
            let one = ratio_asymptotic_leading(r(rv), b(bv)).unwrap().value;
            let two = ratio_asymptotic_two_term(r(rv), b(bv)).unwrap().value;
            assert!((two - q).abs() < (one - q).abs(), "r = {rv}, b = {bv}");
        }
    }
}

#[test]
fn brownian_methods_agree() {
    for rv in [4.0, 6.0, 10.0] {
        let get = |m| {
            compute_ratio(r(rv), HittingExponent::BROWNIAN, m, 1e-12)
                .unwrap()
                .value
        };
        let closed = get(RatioMethod::ClosedRw);
        assert!(rel(get(RatioMethod::Quadrature), closed) < 1e-10);
        // order 2 drops terms of relative size e^{-πr}
        assert!(rel(get(RatioMethod::TwoTerm), closed) < 10.0 * (-PI * rv).exp());
        assert!(rel(get(RatioMethod::Leading), closed) < 10.0 * (-0.5 * PI * rv).exp());
    }
}
