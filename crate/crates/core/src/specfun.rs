//! Real-argument special functions: complete elliptic integrals of the first
//! kind, Jacobi theta constants, the nome, and the Gamma function.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Largest nome accepted by the theta series. Callers with larger q (very
/// elongated rectangles) go through the asymptotic branch in `scmap`.
pub const MAX_THETA_NOME: f64 = 0.95;

const THETA_STOP: f64 = 1e-17;
const AGM_MAX_ITER: usize = 64;

/// Elliptic modulus `k` carried together with its complement
/// `k' = sqrt(1 - k^2)`.
///
/// Either member may be tiny; whichever one the caller knows accurately is
/// used to build the other as `sqrt((1-x)(1+x))`, so neither is ever formed
/// by subtracting two nearly equal numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    kc: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::domain(format!(
                "elliptic modulus must satisfy 0 <= k < 1, got {k}"
            )));
        }
        Ok(Self {
            k,
            kc: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    /// Builds the modulus from a known complementary modulus `k'` in (0, 1].
    pub fn from_complement(kc: f64) -> Result<Self> {
        if !(kc > 0.0 && kc <= 1.0) {
            return Err(Error::domain(format!(
                "complementary modulus must satisfy 0 < k' <= 1, got {kc}"
            )));
        }
        Ok(Self {
            k: ((1.0 - kc) * (1.0 + kc)).sqrt(),
            kc,
        })
    }

    /// Builds `k = 1/alpha` from the excess `alpha - 1 > 0`, with
    /// `k' = sqrt(alpha-1) sqrt(alpha+1) / alpha`.
    pub fn from_alpha_excess(excess: f64) -> Result<Self> {
        if !(excess > 0.0 && excess.is_finite()) {
            return Err(Error::domain(format!(
                "alpha - 1 must be positive and finite, got {excess}"
            )));
        }
        let alpha = 1.0 + excess;
        Ok(Self {
            k: 1.0 / alpha,
            kc: excess.sqrt() * (2.0 + excess).sqrt() / alpha,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn complement(&self) -> f64 {
        self.kc
    }

    /// The modulus with the roles of `k` and `k'` exchanged.
    pub fn complementary(&self) -> Self {
        Self {
            k: self.kc,
            kc: self.k,
        }
    }
}

/// Nome `q` of the theta functions, `0 <= q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Nome(f64);

impl Nome {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::domain(format!(
                "nome must satisfy 0 <= q < 1, got {q}"
            )));
        }
        Ok(Self(q))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Arithmetic-geometric mean of two non-negative numbers, with the number of
/// iterations it took.
pub fn agm(mut a: f64, mut b: f64) -> (f64, usize) {
    let mut iters = 0;
    while iters < AGM_MAX_ITER {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        iters += 1;
    }
    (0.5 * (a + b), iters)
}

/// Complete elliptic integral of the first kind,
/// `K(k) = ∫_0^{π/2} dθ / sqrt(1 - k² sin² θ) = π / (2 AGM(1, k'))`.
pub fn elliptic_k(m: EllipticModulus) -> f64 {
    FRAC_PI_2 / agm(1.0, m.complement()).0
}

/// `K'(k) = K(k')`. Diverges as `k -> 0`, so `k = 0` is rejected.
pub fn elliptic_k_prime(m: EllipticModulus) -> Result<f64> {
    if m.k() <= 0.0 {
        return Err(Error::domain("K'(k) diverges at k = 0"));
    }
    Ok(elliptic_k(m.complementary()))
}

/// `q = exp(-π K'(k) / K(k))`.
pub fn nome_from_modulus(m: EllipticModulus) -> Result<Nome> {
    if m.k() <= 0.0 {
        return Err(Error::domain("nome requires 0 < k < 1"));
    }
    let ratio = elliptic_k_prime(m)? / elliptic_k(m);
    Nome::new((-PI * ratio).exp())
}

fn check_theta_nome(q: Nome) -> Result<f64> {
    let q = q.value();
    if q > MAX_THETA_NOME {
        return Err(Error::domain(format!(
            "theta series supported only for q <= {MAX_THETA_NOME}, got {q}"
        )));
    }
    Ok(q)
}

/// Sums `Σ_{n>=1} s^n q^{n^2 + shift·n}` for `s = ±1`.
fn theta_tail(q: f64, shift: f64, alternate: bool) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    // q^{n²+shift·n} advances by q^{2n+1+shift}
    let mut term = q.powf(1.0 + shift);
    let mut step = q.powf(3.0 + shift);
    let q2 = q * q;
    let mut sum = 0.0;
    let mut sign = 1.0;
    loop {
        sum += sign * term;
        if term <= THETA_STOP * sum.abs().max(1.0) {
            break;
        }
        term *= step;
        step *= q2;
        if alternate {
            sign = -sign;
        }
    }
    sum
}

/// `θ₂(q) = 2 Σ_{n>=0} q^{(n+1/2)²} = 2 q^{1/4} (1 + Σ_{n>=1} q^{n(n+1)})`.
pub fn theta2(q: Nome) -> Result<f64> {
    let q = check_theta_nome(q)?;
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * q.powf(0.25) * (1.0 + theta_tail(q, 1.0, false)))
}

/// `θ₃(q) = 1 + 2 Σ_{n>=1} q^{n²}`.
pub fn theta3(q: Nome) -> Result<f64> {
    let q = check_theta_nome(q)?;
    Ok(1.0 + 2.0 * theta_tail(q, 0.0, false))
}

/// `θ₄(q) = 1 + 2 Σ_{n>=1} (-1)^n q^{n²}`.
pub fn theta4(q: Nome) -> Result<f64> {
    let q = check_theta_nome(q)?;
    Ok(1.0 - 2.0 * theta_tail(q, 0.0, true))
}

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn lanczos_series(x: f64) -> f64 {
    let mut ser = LANCZOS_C0;
    for (j, c) in LANCZOS_COEF.iter().enumerate() {
        ser += c / (x + (j + 1) as f64);
    }
    ser
}

/// Gamma function for `0 < x <= 171`, accurate to a few ulps on `(0, 50]`.
///
/// Arguments below 1 are shifted up one step with `Γ(x) = Γ(x+1)/x`; the
/// rest use a 15-term Lanczos sum with `g = 671/128` evaluated directly
/// (not through `ln Γ`) so the result does not inherit the rounding of a
/// large logarithm.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    if x > 171.0 {
        return Err(Error::domain(format!("gamma_fn overflows for x = {x}")));
    }
    if x < 1.0 {
        return Ok(gamma_lanczos(x + 1.0) / x);
    }
    Ok(gamma_lanczos(x))
}

fn gamma_lanczos(x: f64) -> f64 {
    let t = x + LANCZOS_G;
    // t^(x+1/2) e^{-t} split in halves to stay finite up to x ≈ 171
    let half = t.powf(0.5 * (x + 0.5)) * (-0.5 * t).exp();
    SQRT_2PI * lanczos_series(x) / x * half * half
}
