//! End-versus-side hitting ratio `R(α, b)` for a walk started at the centre
//! of the rectangle.
//!
//! Pulled back to the half-plane, the hitting density of a walk started at
//! `i sqrt(α)` is proportional to `(x² + α)^{-b}`, and the rectangle density
//! picks up `|f'(u)|^{1-b}` when transported along the edges. The ratio of
//! vertical-edge to horizontal-edge mass is
//!
//! ```text
//!            ∫_1^α  (u²+α)^{-b} (u²-1)^{(b-1)/2} (α²-u²)^{(b-1)/2} du
//! R(α, b) = ----------------------------------------------------------
//!            ∫_-1^1 (u²+α)^{-b} (1-u²)^{(b-1)/2} (α²-u²)^{(b-1)/2} du
//! ```
//!
//! `b = 1` is Brownian motion (harmonic measure) and `b = 5/8` the scaling
//! limit of the self-avoiding walk.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_de_abscissa, Abscissa, IntegrationRequest};
use crate::scmap::{alpha_from_aspect, aspect_from_alpha, AspectRatio, ModulusAlpha};
use crate::specfun::gamma_fn;

pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Aspect ratios below this are flagged as outside the asymptotic regime.
pub const ASYMPTOTIC_GUARD: f64 = 2.0;

/// Exponent `b > 0` of the conformal transport rule for the hitting density.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct HittingExponent(f64);

impl HittingExponent {
    pub const BROWNIAN: HittingExponent = HittingExponent(1.0);
    pub const SAW: HittingExponent = HittingExponent(0.625);

    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::domain(format!(
                "hitting exponent must be positive, got {b}"
            )));
        }
        Ok(Self(b))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_brownian(&self) -> bool {
        self.0 == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMethod {
    Quadrature,
    ClosedRw,
    Leading,
    TwoTerm,
}

impl RatioMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RatioMethod::Quadrature => "quadrature",
            RatioMethod::ClosedRw => "closed_rw",
            RatioMethod::Leading => "leading",
            RatioMethod::TwoTerm => "two_term",
        }
    }
}

impl fmt::Display for RatioMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The two correction terms inside the bracket of the two-term expansion,
/// reported separately since their relative order depends on `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corrections {
    /// Coefficient times `e^{-bπr/2}`.
    pub exponent_b: f64,
    /// `4(b - 1 + 2Λ) e^{-πr/2}`.
    pub exponent_one: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioResult {
    pub value: f64,
    pub method: RatioMethod,
    pub err_estimate: f64,
    pub r: f64,
    pub b: HittingExponent,
    /// Set when an asymptotic formula is used below [`ASYMPTOTIC_GUARD`].
    pub regime_warning: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrections: Option<Corrections>,
}

impl RatioResult {
    /// Probability of hitting an end (short side) first.
    pub fn end_probability(&self) -> f64 {
        end_probability(self.value)
    }
}

/// `Λ(b) = (Γ((1+b)/2) / Γ(b/2))²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LambdaConst(pub f64);

/// Unnormalised hitting density on the real axis for a start at
/// `i sqrt(α)`: `(x² + α)^{-b}`.
pub fn hit_density_halfplane(x: f64, alpha: f64, b: HittingExponent) -> f64 {
    (x * x + alpha).powf(-b.value())
}

/// `R(α, b)` by tanh-sinh quadrature of both integrals.
///
/// The numerator runs over `u = 1 + t(α - 1)`, `t ∈ [0, 1]`, which turns
/// `(u² - 1)(α² - u²)` into `(α-1)² t(1-t) (u+1)(α+u)` and pulls out the
/// factor `(α-1)^b` exactly. The denominator is even in `u` and is taken
/// over `[0, 1]`, with `α² - u² = ((1-u) + (α-1))(α+u)`.
pub fn ratio_quadrature(
    alpha: ModulusAlpha,
    b: HittingExponent,
    rel_tol: f64,
) -> Result<RatioResult> {
    let e = alpha.excess();
    let al = alpha.value();
    let bv = b.value();
    let s = 0.5 * (bv - 1.0);

    let numer_kernel = move |p: Abscissa| {
        let t = p.from_lower;
        let u = 1.0 + t * e;
        (p.from_lower * p.from_upper).powf(s)
            * (u * u + al).powf(-bv)
            * ((u + 1.0) * (al + u)).powf(s)
    };
    let numer_req = IntegrationRequest::new(numer_kernel, 0.0, 1.0, rel_tol)?;
    let numer = integrate_de_abscissa(&numer_req)?;
    let numer_scale = e.powf(bv);

    let denom_kernel = move |p: Abscissa| {
        let u = p.x;
        let one_minus_sq = p.from_upper * (1.0 + u);
        let alpha_minus_sq = (p.from_upper + e) * (al + u);
        (u * u + al).powf(-bv) * (one_minus_sq * alpha_minus_sq).powf(s)
    };
    let denom_req = IntegrationRequest::new(denom_kernel, 0.0, 1.0, rel_tol)?;
    let denom = integrate_de_abscissa(&denom_req)?;

    let value = numer_scale * numer.value / (2.0 * denom.value);
    let rel_err = numer.err_estimate / numer.value.abs() + denom.err_estimate / denom.value.abs();
    Ok(RatioResult {
        value,
        method: RatioMethod::Quadrature,
        err_estimate: value * rel_err,
        r: aspect_from_alpha(alpha),
        b,
        regime_warning: false,
        corrections: None,
    })
}

/// Brownian closed form
/// `R(α, 1) = [atan √α - atan(1/√α)] / [2 atan(1/√α)]`.
///
/// The numerator equals `atan((√α - 1/√α)/2)` and `√α - 1/√α = (α-1)/√α`,
/// so nothing cancels when `α` is close to 1.
pub fn ratio_closed_rw(alpha: ModulusAlpha) -> RatioResult {
    let sqrt_al = alpha.value().sqrt();
    let numer = (0.5 * alpha.excess() / sqrt_al).atan();
    let denom = 2.0 * (1.0 / sqrt_al).atan();
    let value = numer / denom;
    RatioResult {
        value,
        method: RatioMethod::ClosedRw,
        err_estimate: 4.0 * f64::EPSILON * value,
        r: aspect_from_alpha(alpha),
        b: HittingExponent::BROWNIAN,
        regime_warning: false,
        corrections: None,
    }
}

/// Brownian expansion in `p = e^{-πr/2}`: `(8/π) p` at order 1, plus
/// `(64/π²) p²` at order 2. The error estimate is the first omitted term;
/// the `p³` coefficient is `32(48 - π²)/(3π³)`.
pub fn ratio_rw_asymptotic(r: AspectRatio, order: u8) -> Result<RatioResult> {
    let p = (-0.5 * PI * r.value()).exp();
    let first = 8.0 / PI * p;
    let value = match order {
        1 => first,
        2 => first + 64.0 / (PI * PI) * p * p,
        _ => {
            return Err(Error::domain(format!(
                "Brownian expansion order must be 1 or 2, got {order}"
            )))
        }
    };
    let omitted = if order == 1 {
        64.0 / (PI * PI) * p * p
    } else {
        32.0 * (48.0 - PI * PI) / (3.0 * PI.powi(3)) * p.powi(3)
    };
    Ok(RatioResult {
        value,
        method: if order == 1 {
            RatioMethod::Leading
        } else {
            RatioMethod::TwoTerm
        },
        err_estimate: omitted,
        r: r.value(),
        b: HittingExponent::BROWNIAN,
        regime_warning: r.value() < ASYMPTOTIC_GUARD,
        corrections: None,
    })
}

pub fn lambda_const(b: HittingExponent) -> Result<LambdaConst> {
    let bv = b.value();
    let ratio = gamma_fn(0.5 * (1.0 + bv))? / gamma_fn(0.5 * bv)?;
    Ok(LambdaConst(ratio * ratio))
}

/// Both forms of the leading coefficient:
/// `2^{2b} Γ((1+b)/2)² / (Γ(1+b/2) Γ(b/2))` and `2^{2b+1} Λ / b`.
pub fn leading_coefficient_forms(b: HittingExponent) -> Result<(f64, f64)> {
    let bv = b.value();
    let g = gamma_fn(0.5 * (1.0 + bv))?;
    let gamma_form =
        2f64.powf(2.0 * bv) * g * g / (gamma_fn(1.0 + 0.5 * bv)? * gamma_fn(0.5 * bv)?);
    let lambda_form = 2f64.powf(2.0 * bv + 1.0) * lambda_const(b)?.0 / bv;
    Ok((gamma_form, lambda_form))
}

/// Coefficient of `e^{-πbr/2}` in the leading asymptotic ratio.
pub fn leading_coefficient(b: HittingExponent) -> Result<f64> {
    let (gamma_form, lambda_form) = leading_coefficient_forms(b)?;
    if ((gamma_form - lambda_form) / lambda_form).abs() > 1e-13 {
        return Err(Error::accuracy(
            format!("leading coefficient forms disagree: {gamma_form} vs {lambda_form}"),
            gamma_form,
        ));
    }
    Ok(gamma_form)
}

pub fn ratio_asymptotic_leading(r: AspectRatio, b: HittingExponent) -> Result<RatioResult> {
    let bv = b.value();
    let p_b = (-0.5 * PI * bv * r.value()).exp();
    let value = leading_coefficient(b)? * p_b;
    let next = p_b.max((-0.5 * PI * r.value()).exp());
    Ok(RatioResult {
        value,
        method: RatioMethod::Leading,
        err_estimate: value * next,
        r: r.value(),
        b,
        regime_warning: r.value() < ASYMPTOTIC_GUARD,
        corrections: None,
    })
}

/// Two-term expansion for `0 < b < 1`:
///
/// ```text
/// R ≈ (2^{2b+1} Λ / b) e^{-bπr/2} [1 + (Λ 2^{2b+1} / (b sin(πb/2))) e^{-bπr/2}
///                                    + 4(b - 1 + 2Λ) e^{-πr/2}]
/// ```
pub fn ratio_asymptotic_two_term(r: AspectRatio, b: HittingExponent) -> Result<RatioResult> {
    let bv = b.value();
    if bv >= 1.0 {
        return Err(Error::domain(format!(
            "two-term expansion holds only for 0 < b < 1, got b = {bv}; use the Brownian expansion for b = 1"
        )));
    }
    let lambda = lambda_const(b)?.0;
    let p_b = (-0.5 * PI * bv * r.value()).exp();
    let p_1 = (-0.5 * PI * r.value()).exp();
    let lead = 2f64.powf(2.0 * bv + 1.0) * lambda / bv * p_b;
    let corrections = Corrections {
        exponent_b: lambda * 2f64.powf(2.0 * bv + 1.0) / (bv * (0.5 * PI * bv).sin()) * p_b,
        exponent_one: 4.0 * (bv - 1.0 + 2.0 * lambda) * p_1,
    };
    let value = lead * (1.0 + corrections.exponent_b + corrections.exponent_one);
    Ok(RatioResult {
        value,
        method: RatioMethod::TwoTerm,
        err_estimate: value * p_b * p_b,
        r: r.value(),
        b,
        regime_warning: r.value() < ASYMPTOTIC_GUARD,
        corrections: Some(corrections),
    })
}

/// Denominator integral at `α = 1`: `√π Γ(b/2) / (2 Γ(b/2 + 1/2))`.
pub fn denom_approx(b: HittingExponent) -> Result<f64> {
    let bv = b.value();
    Ok(PI.sqrt() * gamma_fn(0.5 * bv)? / (2.0 * gamma_fn(0.5 * bv + 0.5)?))
}

/// Narrow-interval numerator:
/// `2^{-b-1} √π Γ((1+b)/2) / Γ(1+b/2) · (α-1)^b`.
pub fn numer_approx(alpha: ModulusAlpha, b: HittingExponent) -> Result<f64> {
    let bv = b.value();
    Ok(
        2f64.powf(-bv - 1.0) * PI.sqrt() * gamma_fn(0.5 * (1.0 + bv))? / gamma_fn(1.0 + 0.5 * bv)?
            * alpha.excess().powf(bv),
    )
}

/// `p = R / (1 + R)`.
pub fn end_probability(ratio: f64) -> f64 {
    ratio / (1.0 + ratio)
}

/// `R = p / (1 - p)` for `0 <= p < 1`.
pub fn ratio_from_probability(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!(
            "probability must lie in [0, 1), got {p}"
        )));
    }
    Ok(p / (1.0 - p))
}

/// Closed form of the end probability for the 10×1 rectangle from
/// singular-modulus identities,
/// `(2/π) asin[(3-2√2)² (2+√5)² (√10-3)² (5^{1/4}-√2)⁴]`.
///
/// Every small factor is rationalised first
/// (`3-2√2 = 1/(3+2√2)`, `√10-3 = 1/(√10+3)`,
/// `5^{1/4}-√2 = 1/((√5+2)(5^{1/4}+√2))`).
pub fn brownian_exact_pe() -> f64 {
    let s2 = 2f64.sqrt();
    let s5 = 5f64.sqrt();
    let q5 = s5.sqrt();
    let inv = (3.0 + 2.0 * s2) * (10f64.sqrt() + 3.0) * (s5 + 2.0) * (q5 + s2).powi(2);
    2.0 / PI * (1.0 / (inv * inv)).asin()
}

/// Which methods make sense for a given exponent.
pub fn applicable_methods(b: HittingExponent) -> Vec<RatioMethod> {
    let mut out = vec![RatioMethod::Quadrature];
    if b.is_brownian() {
        out.push(RatioMethod::ClosedRw);
    }
    out.push(RatioMethod::Leading);
    if b.value() < 1.0 || b.is_brownian() {
        out.push(RatioMethod::TwoTerm);
    }
    out
}

/// Computes the ratio for an aspect ratio by one method. For `b = 1`,
/// `Leading` and `TwoTerm` use the Brownian expansion of order 1 and 2.
pub fn compute_ratio(
    r: AspectRatio,
    b: HittingExponent,
    method: RatioMethod,
    rel_tol: f64,
) -> Result<RatioResult> {
    match method {
        RatioMethod::Quadrature => ratio_quadrature(alpha_from_aspect(r)?, b, rel_tol),
        RatioMethod::ClosedRw => {
            if !b.is_brownian() {
                return Err(Error::domain(format!(
                    "the closed form exists only for b = 1, got b = {}",
                    b.value()
                )));
            }
            Ok(ratio_closed_rw(alpha_from_aspect(r)?))
        }
        RatioMethod::Leading if b.is_brownian() => ratio_rw_asymptotic(r, 1),
        RatioMethod::TwoTerm if b.is_brownian() => ratio_rw_asymptotic(r, 2),
        RatioMethod::Leading => ratio_asymptotic_leading(r, b),
        RatioMethod::TwoTerm => ratio_asymptotic_two_term(r, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn b(v: f64) -> HittingExponent {
        HittingExponent::new(v).unwrap()
    }

    fn r(v: f64) -> AspectRatio {
        AspectRatio::new(v).unwrap()
    }

    #[test]
    fn density_values() {
        assert_eq!(
            hit_density_halfplane(0.0, 1.0, HittingExponent::BROWNIAN),
            1.0
        );
        assert_eq!(
            hit_density_halfplane(1.0, 1.0, HittingExponent::BROWNIAN),
            0.5
        );
        let v = hit_density_halfplane(2.0, ModulusAlpha::SQUARE.value(), HittingExponent::SAW);
        assert!(rel(v, 0.239_716_256_161_155_6) < 1e-14);
    }

    #[test]
    fn exponent_domain() {
        assert!(HittingExponent::new(0.0).is_err());
        assert!(HittingExponent::new(-0.5).is_err());
        assert!(HittingExponent::new(f64::INFINITY).is_err());
    }

    #[test]
    fn saw_quadrature_r10() {
        let al = alpha_from_aspect(r(10.0)).unwrap();
        let res = ratio_quadrature(al, HittingExponent::SAW, 1e-10).unwrap();
        assert!(
            rel(res.value, 6.682_989_935_305_54e-5) < 1e-9,
            "{:e}",
            res.value
        );
        assert!(res.err_estimate <= 2e-10 * res.value);
    }

    #[test]
    fn closed_form_values() {
        let res = ratio_closed_rw(ModulusAlpha::new(3.0).unwrap());
        assert!(rel(res.value, 0.5) < 1e-15);
        let res = ratio_closed_rw(ModulusAlpha::SQUARE);
        assert!(rel(res.value, 1.0) < 1e-15);
        let res = ratio_closed_rw(alpha_from_aspect(r(2.0)).unwrap());
        assert!(rel(res.value, 0.123_304_960_157_469_27) < 1e-13);
    }

    #[test]
    fn brownian_quadrature_reduces_to_closed_form() {
        for &e in &[1e-6, 0.01, 1.0, 4.8284] {
            let al = ModulusAlpha::from_excess(e).unwrap();
            let q = ratio_quadrature(al, HittingExponent::BROWNIAN, 1e-11).unwrap();
            let c = ratio_closed_rw(al);
            assert!(rel(q.value, c.value) < 1e-10, "alpha - 1 = {e}");
        }
    }

    #[test]
    fn square_symmetry() {
        for &bv in &[0.25, 0.625, 1.0, 1.5] {
            let al = alpha_from_aspect(r(1.0)).unwrap();
            let res = ratio_quadrature(al, b(bv), 1e-10).unwrap();
            assert!((res.value - 1.0).abs() < 1e-9, "b = {bv}: {}", res.value);
        }
    }

    #[test]
    fn rw_asymptotics() {
        let one = ratio_rw_asymptotic(r(10.0), 1).unwrap();
        let two = ratio_rw_asymptotic(r(10.0), 2).unwrap();
        assert!(rel(one.value, 3.837_587_979_251_34e-7) < 1e-13);
        assert!(rel(two.value, 3.837_589_451_959_4e-7) < 1e-12);
        let added = 64.0 / (PI * PI) * (-10.0 * PI).exp();
        assert!(rel(two.value - one.value, added) < 1e-6);
        assert!(ratio_rw_asymptotic(r(10.0), 3).is_err());
        assert!(ratio_rw_asymptotic(r(1.5), 1).unwrap().regime_warning);
    }

    #[test]
    fn lambda_values() {
        assert!(rel(lambda_const(b(1.0)).unwrap().0, 1.0 / PI) < 1e-14);
        assert!(rel(lambda_const(b(2.0)).unwrap().0, PI / 4.0) < 1e-14);
        assert!(
            rel(
                lambda_const(HittingExponent::SAW).unwrap().0,
                0.161_129_305_288_810_02
            ) < 1e-13
        );
    }

    #[test]
    fn leading_values() {
        let coef = leading_coefficient(HittingExponent::SAW).unwrap();
        assert!(rel(coef, 1.226_343_144_2) < 1e-10);
        assert!(rel(leading_coefficient(b(1.0)).unwrap(), 8.0 / PI) < 1e-14);
        let res = ratio_asymptotic_leading(r(10.0), HittingExponent::SAW).unwrap();
        assert!(rel(res.value, 6.682_452_8e-5) < 1e-7);
    }

    #[test]
    fn two_term_values() {
        let res = ratio_asymptotic_two_term(r(10.0), HittingExponent::SAW).unwrap();
        assert!(rel(res.value, 6.682_989_679e-5) < 1e-9, "{:e}", res.value);
        let dev = rel(res.value, 6.682_989_935e-5);
        assert!(dev > 3.0e-8 && dev < 4.5e-8, "{dev:e}");
        assert!(ratio_asymptotic_two_term(r(10.0), b(1.0)).is_err());
        // leading factor tends to 8/π as b → 1
        let near = leading_coefficient(b(1.0 - 1e-9)).unwrap();
        assert!(rel(near, 8.0 / PI) < 1e-8);
    }

    #[test]
    fn narrow_interval_approximations() {
        assert!(rel(denom_approx(b(1.0)).unwrap(), PI / 2.0) < 1e-14);
        assert!(
            rel(
                denom_approx(HittingExponent::SAW).unwrap(),
                2.207_789_549_873_957
            ) < 1e-13
        );
        let al = ModulusAlpha::from_excess(8.0 * (-5.0 * PI).exp()).unwrap();
        let quotient = numer_approx(al, HittingExponent::SAW).unwrap()
            / denom_approx(HittingExponent::SAW).unwrap();
        let lead = ratio_asymptotic_leading(r(10.0), HittingExponent::SAW).unwrap();
        assert!(rel(quotient, lead.value) < 1e-9);
    }

    #[test]
    fn probability_conversions() {
        assert!(
            rel(
                end_probability(3.837_589_451_959_941e-7),
                3.837_587_979_25e-7
            ) < 1e-11
        );
        assert_eq!(end_probability(1.0), 0.5);
        assert_eq!(end_probability(0.0), 0.0);
        assert!(ratio_from_probability(1.0).is_err());
        assert!(ratio_from_probability(-0.1).is_err());
    }

    #[test]
    fn exact_pe() {
        let pe = brownian_exact_pe();
        assert!(rel(pe, 3.837_587_979_251_226e-7) < 1e-13);
        let naive = {
            let s2 = 2f64.sqrt();
            let arg = (3.0 - 2.0 * s2).powi(2)
                * (2.0 + 5f64.sqrt()).powi(2)
                * (10f64.sqrt() - 3.0).powi(2)
                * (5f64.powf(0.25) - s2).powi(4);
            assert!(arg > 0.0 && arg < 1.0);
            2.0 / PI * arg.asin()
        };
        assert!(rel(pe, naive) < 1e-12);
        let ratio = ratio_from_probability(pe).unwrap();
        let closed = ratio_closed_rw(alpha_from_aspect(r(10.0)).unwrap());
        assert!(rel(ratio, closed.value) < 1e-12);
    }

    #[test]
    fn compute_ratio_routing() {
        let res = compute_ratio(r(10.0), b(1.0), RatioMethod::ClosedRw, 1e-10).unwrap();
        assert!(rel(res.value, 3.837_589_451_959_941e-7) < 1e-12);
        assert!(
            compute_ratio(r(10.0), HittingExponent::SAW, RatioMethod::ClosedRw, 1e-10).is_err()
        );
        assert_eq!(
            applicable_methods(HittingExponent::SAW),
            vec![
                RatioMethod::Quadrature,
                RatioMethod::Leading,
                RatioMethod::TwoTerm
            ]
        );
        assert_eq!(applicable_methods(b(1.5)).len(), 2);
    }
}
