//! One-dimensional quadrature.
//!
//! [`integrate_de`] is a tanh-sinh (double exponential) rule with level
//! doubling; it tolerates integrable power-law singularities at both ends.
//! [`integrate_adaptive`] is a Gauss-Kronrod 7/15 bisection scheme used to
//! cross-check the former on smooth integrands.

use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Maximum refinement level of the tanh-sinh rule (step `2^-MAX_LEVEL`).
pub const MAX_LEVEL: usize = 12;
/// Half-width of the truncated tanh-sinh parameter range.
const T_MAX: f64 = 4.5;
const MIN_REL_TOL: f64 = 1e-15;
const MAX_REL_TOL: f64 = 1e-3;
const MAX_SUBINTERVALS: usize = 2000;

/// A quadrature problem on a finite interval.
#[derive(Clone)]
pub struct IntegrationRequest<F> {
    pub integrand: F,
    pub lower: f64,
    pub upper: f64,
    pub rel_tol: f64,
}

impl<F> IntegrationRequest<F> {
    pub fn new(integrand: F, lower: f64, upper: f64, rel_tol: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::domain(format!(
                "integration bounds must be finite with lower < upper, got [{lower}, {upper}]"
            )));
        }
        if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
            return Err(Error::domain(format!(
                "rel_tol must lie in [{MIN_REL_TOL:e}, {MAX_REL_TOL:e}], got {rel_tol:e}"
            )));
        }
        Ok(Self {
            integrand,
            lower,
            upper,
            rel_tol,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

/// A tanh-sinh sample point together with its distances to both ends of the
/// interval. Near an endpoint the distance is exact to working precision
/// even when `x` itself has rounded onto the endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lower: f64,
    pub from_upper: f64,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// `1 - tanh(π/2 sinh t)` for `t >= 0`.
    complement: f64,
    weight: f64,
}

struct Level {
    /// Only present at level 0: the weight of the centre node.
    centre_weight: Option<f64>,
    nodes: Vec<Node>,
}

fn node_at(t: f64) -> Node {
    let s = FRAC_PI_2 * t.sinh();
    let cs = s.cosh();
    Node {
        complement: 1.0 / (s.exp() * cs),
        weight: FRAC_PI_2 * t.cosh() / (cs * cs),
    }
}

fn build_level(level: usize) -> Level {
    let h = 0.5f64.powi(level as i32);
    if level == 0 {
        let nodes = (1..)
            .map(|k| k as f64)
            .take_while(|&t| t <= T_MAX)
            .map(node_at)
            .collect();
        return Level {
            centre_weight: Some(FRAC_PI_2),
            nodes,
        };
    }
    let nodes = (0..)
        .map(|k| (2 * k + 1) as f64 * h)
        .take_while(|&t| t <= T_MAX)
        .map(node_at)
        .collect();
    Level {
        centre_weight: None,
        nodes,
    }
}

fn level_table(level: usize) -> &'static Level {
    static TABLES: [OnceLock<Level>; MAX_LEVEL + 1] = [const { OnceLock::new() }; MAX_LEVEL + 1];
    TABLES[level].get_or_init(|| build_level(level))
}

/// Tanh-sinh quadrature of a plain integrand `f(x)`.
///
/// Sample points that round onto an endpoint are skipped when the integrand
/// is not finite there; a non-finite value strictly inside the interval is
/// an [`Error::Integrand`].
pub fn integrate_de<F>(req: &IntegrationRequest<F>) -> Result<IntegrationResult>
where
    F: Fn(f64) -> f64,
{
    let (lower, upper) = (req.lower, req.upper);
    let f = &req.integrand;
    tanh_sinh(lower, upper, req.rel_tol, |p: Abscissa| {
        let y = f(p.x);
        if !y.is_finite() && (p.x <= lower || p.x >= upper) {
            Ok(0.0)
        } else {
            Ok(y)
        }
    })
}

/// Tanh-sinh quadrature of an integrand that receives the endpoint
/// distances along with `x`. Use this when the integrand contains factors
/// such as `(upper - x)^s` that must not be formed by subtraction.
pub fn integrate_de_abscissa<F>(req: &IntegrationRequest<F>) -> Result<IntegrationResult>
where
    F: Fn(Abscissa) -> f64,
{
    let f = &req.integrand;
    tanh_sinh(req.lower, req.upper, req.rel_tol, |p| Ok(f(p)))
}

fn tanh_sinh<G>(lower: f64, upper: f64, rel_tol: f64, g: G) -> Result<IntegrationResult>
where
    G: Fn(Abscissa) -> Result<f64>,
{
    let half = 0.5 * (upper - lower);
    let mid = lower + half;
    let mut evaluations = 0usize;

    let eval = |p: Abscissa, evaluations: &mut usize| -> Result<f64> {
        *evaluations += 1;
        let y = g(p)?;
        if !y.is_finite() {
            return Err(Error::Integrand { x: p.x, value: y });
        }
        Ok(y)
    };

    let mut sum = 0.0;
    let mut previous: Option<f64> = None;
    let mut last_diff = f64::INFINITY;
    for level in 0..=MAX_LEVEL {
        let table = level_table(level);
        let mut level_sum = 0.0;
        if let Some(w) = table.centre_weight {
            let p = Abscissa {
                x: mid,
                from_lower: half,
                from_upper: half,
            };
            level_sum += w * eval(p, &mut evaluations)?;
        }
        for node in &table.nodes {
            let near = half * node.complement;
            let far = half * (2.0 - node.complement);
            if near == 0.0 {
                continue;
            }
            let right = Abscissa {
                x: upper - near,
                from_lower: far,
                from_upper: near,
            };
            let left = Abscissa {
                x: lower + near,
                from_lower: near,
                from_upper: far,
            };
            level_sum +=
                node.weight * (eval(right, &mut evaluations)? + eval(left, &mut evaluations)?);
        }
        sum += level_sum;
        let h = 0.5f64.powi(level as i32);
        let estimate = half * h * sum;
        if let Some(prev) = previous {
            last_diff = (estimate - prev).abs();
            if level >= 2 && last_diff <= rel_tol * estimate.abs() {
                return Ok(IntegrationResult {
                    value: estimate,
                    err_estimate: last_diff,
                    evaluations,
                });
            }
        }
        previous = Some(estimate);
    }
    let best = previous.unwrap_or(0.0);
    Err(Error::accuracy(
        format!(
            "tanh-sinh did not reach rel_tol {rel_tol:e} after {MAX_LEVEL} levels (last difference {last_diff:e})"
        ),
        best,
    ))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let checked = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Integrand { x, value: y })
        }
    };
    let fc = checked(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = checked(c - dx)? + checked(c + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * h,
        err: ((kronrod - gauss) * h).abs(),
    })
}

/// Adaptive Gauss-Kronrod (7/15) quadrature with global bisection of the
/// panel carrying the largest error estimate.
pub fn integrate_adaptive<F>(req: &IntegrationRequest<F>) -> Result<IntegrationResult>
where
    F: Fn(f64) -> f64,
{
    let f = &req.integrand;
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod(f, req.lower, req.upper)?;
    let mut value = first.value;
    let mut err = first.err;
    let mut evaluations = 15;
    heap.push(first);
    while err > req.rel_tol * value.abs() {
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(Error::accuracy(
                format!("adaptive quadrature exceeded {MAX_SUBINTERVALS} panels (error {err:e})"),
                value,
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    let (value, err) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err));
    Ok(IntegrationResult {
        value,
        err_estimate: err,
        evaluations,
    })
}
