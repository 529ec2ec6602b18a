//! Schwarz-Christoffel geometry of the half-plane to rectangle map
//!
//! ```text
//! f(z) = ∫_0^z dξ / (sqrt(1 - ξ²) sqrt(α² - ξ²)),   α > 1
//! ```
//!
//! which sends `±1` to the bottom corners `±a/2`, `±α` to the top corners
//! `±a/2 + ic`, and `i sqrt(α)` to the centre of the rectangle.
//!
//! Elongated rectangles push `α` towards 1 (`α - 1 ≈ 8 e^{-πr/2}`), so the
//! modulus is carried as its excess `α - 1` everywhere.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_de, IntegrationRequest};
use crate::specfun::{elliptic_k, theta2, theta4, EllipticModulus, Nome};

/// Aspect ratio at and above which [`AlphaMethod::Auto`] takes the
/// asymptotic branch.
pub const ASYMPTOTIC_CROSSOVER: f64 = 5.0;

const SERIES_COEFFS: [f64; 6] = [8.0, 32.0, 96.0, 256.0, 624.0, 1408.0];
const MAX_NEWTON_STEPS: usize = 4;
const BOUNDARY_TOL: f64 = 1e-14;

/// The map parameter `α > 1`, held as `α - 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ModulusAlpha {
    excess: f64,
}

impl ModulusAlpha {
    /// `α = 3 + 2√2`, the square.
    pub const SQUARE: ModulusAlpha = ModulusAlpha {
        excess: 2.0 + 2.0 * SQRT_2,
    };

    pub fn from_excess(excess: f64) -> Result<Self> {
        if !(excess > 0.0 && excess.is_finite()) {
            return Err(Error::domain(format!(
                "alpha must exceed 1 (alpha - 1 = {excess:e})"
            )));
        }
        Ok(Self { excess })
    }

    pub fn new(alpha: f64) -> Result<Self> {
        Self::from_excess(alpha - 1.0)
    }

    pub fn excess(&self) -> f64 {
        self.excess
    }

    pub fn value(&self) -> f64 {
        1.0 + self.excess
    }

    /// `α² - 1 = ε (2 + ε)`.
    pub fn alpha_sq_minus_one(&self) -> f64 {
        self.excess * (2.0 + self.excess)
    }

    /// `k = 1/α` with `k' = sqrt(α² - 1)/α` built from the excess.
    pub fn modulus(&self) -> EllipticModulus {
        EllipticModulus::from_alpha_excess(self.excess)
            .expect("a valid ModulusAlpha always has positive finite excess")
    }
}

/// Rectangle aspect ratio `r = a/c >= 1` (long horizontal edge over short
/// vertical edge).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AspectRatio(f64);

impl AspectRatio {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::domain(format!(
                "aspect ratio must be finite, got {r}"
            )));
        }
        if r < 1.0 {
            return Err(Error::domain(format!(
                "aspect ratio must be >= 1, got {r}; pass 1/r and swap the roles of ends and sides"
            )));
        }
        Ok(Self(r))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    /// Horizontal edge length.
    pub a: f64,
    /// Vertical edge length.
    pub c: f64,
}

impl Rectangle {
    pub fn aspect(&self) -> f64 {
        self.a / self.c
    }
}

/// Preimage `d·i` of the rectangle centre, `d = sqrt(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StartPreimage {
    pub d: f64,
    /// `d - 1`, kept separately for the same reason as `α - 1`.
    pub d_excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMethod {
    #[default]
    Auto,
    Theta,
    Asymptotic,
}

/// Image of a real boundary preimage `u` under the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
}

/// `a = (2/α) K(1/α)`, `c = (1/α) K(sqrt(α² - 1)/α)`.
pub fn rect_dims(alpha: ModulusAlpha) -> Rectangle {
    let m = alpha.modulus();
    let inv = 1.0 / alpha.value();
    Rectangle {
        a: 2.0 * inv * elliptic_k(m),
        c: inv * elliptic_k(m.complementary()),
    }
}

/// `r = 2K(1/α) / K'(1/α)`. Below 1 once `α > 3 + 2√2`, so this returns the
/// raw ratio rather than an [`AspectRatio`].
pub fn aspect_from_alpha(alpha: ModulusAlpha) -> f64 {
    rect_dims(alpha).aspect()
}

/// Finds `α` for the given aspect ratio.
pub fn alpha_from_aspect(r: AspectRatio) -> Result<ModulusAlpha> {
    alpha_from_aspect_with(r, AlphaMethod::Auto)
}

pub fn alpha_from_aspect_with(r: AspectRatio, method: AlphaMethod) -> Result<ModulusAlpha> {
    match method {
        AlphaMethod::Theta => alpha_theta(r),
        AlphaMethod::Asymptotic => alpha_asymptotic(r),
        AlphaMethod::Auto if r.value() >= ASYMPTOTIC_CROSSOVER => alpha_asymptotic(r),
        AlphaMethod::Auto => alpha_theta(r),
    }
}

/// `α - 1 = θ₄(√q)² / θ₂(q)²` with `q = e^{-2π/r}`; the identity
/// `θ₃(q)² - θ₂(q)² = θ₄(√q)²` removes the subtraction in `θ₃²/θ₂² - 1`.
fn alpha_theta(r: AspectRatio) -> Result<ModulusAlpha> {
    let q = Nome::new((-2.0 * PI / r.value()).exp())?;
    let sqrt_q = Nome::new((-PI / r.value()).exp())?;
    let t4 = theta4(sqrt_q)?;
    let t2 = theta2(q)?;
    ModulusAlpha::from_excess((t4 / t2).powi(2))
}

/// `α - 1 ≈ 8p + 32p² + 96p³ + ...`, `p = e^{-πr/2}`.
pub fn alpha_series(r: f64, terms: usize) -> f64 {
    let p = (-FRAC_PI_2 * r).exp();
    SERIES_COEFFS
        .iter()
        .take(terms)
        .rev()
        .fold(0.0, |acc, c| (acc + c) * p)
}

fn alpha_asymptotic(r: AspectRatio) -> Result<ModulusAlpha> {
    let target = r.value();
    let mut excess = alpha_series(target, SERIES_COEFFS.len());
    for _ in 0..MAX_NEWTON_STEPS {
        let step = newton_step(excess, target)?;
        let next = excess - step;
        if !(next > 0.0) {
            // overshoot: fall back to halving towards zero
            excess *= 0.5;
            continue;
        }
        excess = next;
        if step.abs() <= 4.0 * f64::EPSILON * excess {
            break;
        }
    }
    ModulusAlpha::from_excess(excess)
}

/// Newton step for `aspect_from_alpha(1 + ε) = target` with a centred
/// difference of width `ε·1e-4`.
fn newton_step(excess: f64, target: f64) -> Result<f64> {
    let at = |e: f64| -> Result<f64> { Ok(aspect_from_alpha(ModulusAlpha::from_excess(e)?)) };
    let h = excess * 1e-4;
    let slope = (at(excess + h)? - at(excess - h)?) / (2.0 * h);
    Ok((at(excess)? - target) / slope)
}

/// Log-Taylor expansion of `r(α)` around `α = 1`, through `(α - 1)³`.
/// Valid for `0 < α - 1 < 0.5`.
pub fn aspect_series_log(alpha: ModulusAlpha) -> Result<f64> {
    let e = alpha.excess();
    if e >= 0.5 {
        return Err(Error::domain(format!(
            "log series needs alpha - 1 < 0.5, got {e}"
        )));
    }
    let poly = e * (1.0 + e * (-3.0 / 8.0 + e * (5.0 / 24.0)));
    Ok((4.0 * (2.0 * SQRT_2).ln() - 2.0 * e.ln() + poly) / PI)
}

pub fn start_preimage(alpha: ModulusAlpha) -> StartPreimage {
    let e = alpha.excess();
    let d = alpha.value().sqrt();
    StartPreimage {
        d,
        d_excess: e / (1.0 + (1.0 + e).sqrt()),
    }
}

/// Image of `u ∈ [-α, α]`: the bottom edge for `|u| <= 1`, the vertical
/// edges for `1 < |u| <= α`.
///
/// The integrals are taken after `ξ = sin θ` (bottom edge, measured from
/// the corner when `|u| > 1/√2`) and `x² = 1 + (α² - 1) sin² φ` (vertical
/// edges), which leave smooth integrands with no endpoint singularity.
pub fn sc_map_boundary(u: f64, alpha: ModulusAlpha) -> Result<BoundaryPoint> {
    let al = alpha.value();
    if !u.is_finite() || u.abs() > al {
        return Err(Error::domain(format!(
            "boundary preimage must satisfy |u| <= alpha = {al}, got {u}"
        )));
    }
    let sign = u.signum();
    let v = u.abs();
    let a2m1 = alpha.alpha_sq_minus_one();
    let half_a = 0.5 * rect_dims(alpha).a;
    if v <= FRAC_1_SQRT_2 {
        let theta = v.asin();
        let x = smooth_integral(move |t: f64| 1.0 / (a2m1 + t.cos().powi(2)).sqrt(), theta)?;
        return Ok(BoundaryPoint {
            x: sign * x,
            y: 0.0,
        });
    }
    if v <= 1.0 {
        // distance from the corner: ∫_0^{acos v} dψ / sqrt(α²-1 + sin²ψ), then
        // sin ψ = sqrt(α²-1) sinh w removes the peak of width sqrt(α²-1) at ψ = 0
        let w_max = ((1.0 - v) * (1.0 + v) / a2m1).sqrt().asinh();
        let gap = smooth_integral(
            move |w: f64| 1.0 / (1.0 - a2m1 * w.sinh().powi(2)).sqrt(),
            w_max,
        )?;
        return Ok(BoundaryPoint {
            x: sign * (half_a - gap),
            y: 0.0,
        });
    }
    let s = (((v - 1.0) * (v + 1.0)) / a2m1).sqrt().min(1.0);
    let phi = s.asin();
    let y = smooth_integral(
        move |t: f64| 1.0 / (1.0 + a2m1 * t.sin().powi(2)).sqrt(),
        phi,
    )?;
    Ok(BoundaryPoint {
        x: sign * half_a,
        y,
    })
}

fn smooth_integral<F: Fn(f64) -> f64>(f: F, upper: f64) -> Result<f64> {
    if upper == 0.0 {
        return Ok(0.0);
    }
    let req = IntegrationRequest::new(f, 0.0, upper, BOUNDARY_TOL)?;
    Ok(integrate_de(&req)?.value)
}

/// `|f'(u)| = |1 - u²|^{-1/2} |α² - u²|^{-1/2}` on the real axis.
pub fn sc_map_deriv_abs(u: f64, alpha: ModulusAlpha) -> Result<f64> {
    let v = u.abs();
    let one_minus = (1.0 - v) * (1.0 + v);
    let al = alpha.value();
    // α - v = (1 - v) + ε
    let alpha_minus = ((1.0 - v) + alpha.excess()) * (al + v);
    if one_minus == 0.0 || alpha_minus == 0.0 || !u.is_finite() {
        return Err(Error::domain(format!(
            "|f'(u)| is singular at u = {u} (corner preimages are ±1 and ±alpha)"
        )));
    }
    Ok(1.0 / (one_minus.abs() * alpha_minus.abs()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const EXCESS_R10: f64 = 1.205_614_547_064_722_12e-6;

    #[test]
    fn dims_at_alpha_two() {
        let rect = rect_dims(ModulusAlpha::new(2.0).unwrap());
        assert!(rel(rect.a, 1.685_750_354_812_596) < 1e-14);
        assert!(rel(rect.c, 1.078_257_823_749_821_6) < 1e-14);
        assert!(rel(rect.aspect(), 1.563_401_922_696_111_5) < 1e-14);
    }

    #[test]
    fn square_fixed_point() {
        assert!(rel(aspect_from_alpha(ModulusAlpha::SQUARE), 1.0) < 1e-14);
        let a = alpha_from_aspect(AspectRatio::new(1.0).unwrap()).unwrap();
        assert!(rel(a.value(), 3.0 + 2.0 * SQRT_2) < 1e-14);
    }

    #[test]
    fn dims_shrink_as_alpha_grows() {
        let mut prev = f64::INFINITY;
        for &al in &[2.0, 10.0, 100.0, 1e4, 1e6] {
            let rect = rect_dims(ModulusAlpha::new(al).unwrap());
            assert!(rect.aspect() < prev);
            prev = rect.aspect();
        }
        let rect = rect_dims(ModulusAlpha::new(1e6).unwrap());
        assert!(rel(rect.a, PI / 1e6) < 1e-6);
    }

    #[test]
    fn alpha_at_r10() {
        let r = AspectRatio::new(10.0).unwrap();
        let a = alpha_from_aspect(r).unwrap();
        assert!(rel(a.excess(), EXCESS_R10) < 1e-12, "{:e}", a.excess());
        let lead = alpha_series(10.0, 1);
        assert!(rel(lead, 1.205_613_8e-6) < 1e-7);
        assert!((lead - EXCESS_R10).abs() < 1e-12);
        assert!(rel(aspect_from_alpha(a), 10.0) < 1e-12);
    }

    #[test]
    fn log_series_matches_r10() {
        let a = ModulusAlpha::from_excess(EXCESS_R10).unwrap();
        let r = aspect_series_log(a).unwrap();
        assert!(rel(r, 10.0) < 1e-13, "{r}");
        let a = ModulusAlpha::new(1.001).unwrap();
        assert!(rel(aspect_series_log(a).unwrap(), aspect_from_alpha(a)) < 1e-9);
        assert!(aspect_series_log(ModulusAlpha::new(1.6).unwrap()).is_err());
    }

    #[test]
    fn log_series_diverges_at_one() {
        let mut prev = 0.0;
        for e in 1..30 {
            let r = aspect_series_log(ModulusAlpha::from_excess(10f64.powi(-e)).unwrap()).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn aspect_domain() {
        assert!(AspectRatio::new(0.5).is_err());
        assert!(AspectRatio::new(f64::NAN).is_err());
        assert!(ModulusAlpha::new(1.0).is_err());
        assert!(ModulusAlpha::from_excess(-1e-3).is_err());
    }

    #[test]
    fn preimage() {
        let p = start_preimage(ModulusAlpha::new(4.0).unwrap());
        assert_eq!(p.d, 2.0);
        let p = start_preimage(ModulusAlpha::SQUARE);
        assert!(rel(p.d, 1.0 + SQRT_2) < 1e-15);
        let p = start_preimage(ModulusAlpha::from_excess(1.205_614_547_06e-6).unwrap());
        assert!(rel(p.d_excess, 6.028_070_918_418e-7) < 1e-11);
    }

    #[test]
    fn boundary_landmarks() {
        let al = ModulusAlpha::new(2.0).unwrap();
        let rect = rect_dims(al);
        assert_eq!(
            sc_map_boundary(0.0, al).unwrap(),
            BoundaryPoint { x: 0.0, y: 0.0 }
        );
        let at1 = sc_map_boundary(1.0, al).unwrap();
        assert!(rel(at1.x, rect.a / 2.0) < 1e-13 && at1.y == 0.0);
        let top = sc_map_boundary(2.0, al).unwrap();
        assert!(rel(top.x, rect.a / 2.0) < 1e-15);
        assert!(rel(top.y, rect.c) < 1e-13);
        let mid = sc_map_boundary(0.5, al).unwrap();
        assert!(rel(mid.x, 0.264_714_313_525_952_9) < 1e-13);
        let neg = sc_map_boundary(-0.5, al).unwrap();
        assert_eq!(neg.x, -mid.x);
        let side = sc_map_boundary(1.5, al).unwrap();
        assert!(rel(side.y, 0.598_296_412_820_026_8) < 1e-13);
        assert!(sc_map_boundary(2.1, al).is_err());
        let near = sc_map_boundary(0.9, al).unwrap();
        assert!(rel(near.x, 0.585_221_642_430_887_6) < 1e-13);
    }

    #[test]
    fn bottom_edge_near_corner_of_long_rectangle() {
        let al = ModulusAlpha::from_excess(1e-12).unwrap();
        let x = sc_map_boundary(0.999_999, al).unwrap().x;
        // oracle evaluated at the exact binary inputs; dx/du is about 5e5 here
        assert!(rel(x, 7.254_328_369_244_261) < 1e-12, "{x}");
        let corner = sc_map_boundary(1.0, al).unwrap().x;
        assert!(rel(corner, 14.855_231_328_797_014) < 1e-13);
        // both branches meet at 1/√2
        let lo = sc_map_boundary(FRAC_1_SQRT_2 * (1.0 - 1e-15), al)
            .unwrap()
            .x;
        let hi = sc_map_boundary(FRAC_1_SQRT_2 * (1.0 + 1e-15), al)
            .unwrap()
            .x;
        assert!((hi - lo).abs() < 1e-13);
    }

    #[test]
    fn deriv_values() {
        let al = ModulusAlpha::new(2.0).unwrap();
        assert!(rel(sc_map_deriv_abs(0.0, al).unwrap(), 0.5) < 1e-15);
        assert!(rel(sc_map_deriv_abs(0.5, al).unwrap(), 0.596_284_793_999_943_9) < 1e-14);
        assert_eq!(
            sc_map_deriv_abs(0.5, al).unwrap(),
            sc_map_deriv_abs(-0.5, al).unwrap()
        );
        for u in [1.0, -1.0, 2.0, -2.0] {
            assert!(sc_map_deriv_abs(u, al).is_err());
        }
    }

    #[test]
    fn theta_and_asymptotic_paths_agree() {
        for i in 0..=12 {
            let r = AspectRatio::new(3.0 + 0.25 * i as f64).unwrap();
            let t = alpha_from_aspect_with(r, AlphaMethod::Theta).unwrap();
            let s = alpha_from_aspect_with(r, AlphaMethod::Asymptotic).unwrap();
            assert!(rel(t.excess(), s.excess()) < 1e-12, "r = {}", r.value());
        }
    }
}
