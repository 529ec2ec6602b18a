//! Exact discrete harmonic measure on a rectangular grid.
//!
//! A simple random walk starts at the centre site of a `width × height`
//! block of interior sites and is absorbed on the first step outside it.
//! The absorbing sites one step beyond the left and right columns are the
//! ends; those above and below the top and bottom rows are the sides. Corner
//! sites are counted with the sides, but no interior site is adjacent to a
//! corner so the choice never enters the 5-point equations.
//!
//! The probability of absorption on the ends is the discrete harmonic
//! function with boundary value 1 on the ends and 0 on the sides, found by
//! solving `4 p(v) - Σ_{n~v} p(n) = boundary terms` on the interior.

use serde::Serialize;

use crate::error::{Error, Result};

/// Interior cell count up to which [`Solver::Auto`] factors the system.
pub const DIRECT_SOLVE_LIMIT: usize = 100_000;
const SOR_MAX_SWEEPS: usize = 500_000;
const SOR_CHECK_EVERY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub interior_width: usize,
    pub interior_height: usize,
}

impl GridSpec {
    pub fn new(interior_width: usize, interior_height: usize) -> Result<Self> {
        if interior_width == 0 || interior_height == 0 {
            return Err(Error::domain("grid dimensions must be at least 1"));
        }
        if interior_width % 2 == 0 || interior_height % 2 == 0 {
            return Err(Error::domain(format!(
                "grid must be odd × odd so a centre site exists, got {interior_width} × {interior_height}"
            )));
        }
        if interior_width < interior_height {
            return Err(Error::domain(format!(
                "interior_width ({interior_width}) runs along the long axis and must be >= interior_height ({interior_height})"
            )));
        }
        Ok(Self {
            interior_width,
            interior_height,
        })
    }

    /// Grid whose absorbing frame has aspect `aspect` and whose interior is
    /// `height` sites tall: `width + 1 = aspect (height + 1)`.
    pub fn for_aspect(aspect: f64, height: usize) -> Result<Self> {
        let span = aspect * (height + 1) as f64;
        let rounded = span.round();
        if (span - rounded).abs() > 1e-9 * span || rounded < 2.0 {
            return Err(Error::domain(format!(
                "aspect {aspect} with height {height} does not give an integer width"
            )));
        }
        Self::new(rounded as usize - 1, height)
    }

    pub fn aspect(&self) -> f64 {
        (self.interior_width + 1) as f64 / (self.interior_height + 1) as f64
    }

    /// Lattice spacing when the short edge has unit length.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.interior_height + 1) as f64
    }

    pub fn cells(&self) -> usize {
        self.interior_width * self.interior_height
    }

    fn centre(&self) -> usize {
        self.index(
            (self.interior_width - 1) / 2,
            (self.interior_height - 1) / 2,
        )
    }

    fn index(&self, x: usize, y: usize) -> usize {
        x * self.interior_height + y
    }
}

/// Which pair of edges carries boundary value 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Ends,
    Sides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Auto,
    /// Banded Cholesky factorisation.
    Direct,
    /// Red-black successive over-relaxation.
    Sor,
}

/// Solved harmonic function on the interior sites, column-major in `x`.
#[derive(Debug, Clone)]
pub struct Field {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub residual: f64,
}

impl Field {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[self.spec.index(x, y)]
    }

    pub fn centre(&self) -> f64 {
        self.values[self.spec.centre()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSolution {
    pub p_end: f64,
    pub ratio: f64,
    pub residual: f64,
}

/// One row of the per-resolution table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub aspect: f64,
    pub height: usize,
    pub width: usize,
    pub p_end: f64,
    pub ratio: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub ratio: f64,
    /// Fitted convergence order; `None` when the sequence is already
    /// constant to rounding.
    pub order: Option<f64>,
    pub rows: Vec<GridRow>,
}

pub fn discrete_harmonic_ratio(spec: GridSpec, solve_tol: f64) -> Result<GridSolution> {
    discrete_harmonic_ratio_with(spec, solve_tol, Solver::Auto)
}

pub fn discrete_harmonic_ratio_with(
    spec: GridSpec,
    solve_tol: f64,
    solver: Solver,
) -> Result<GridSolution> {
    let field = solve_field(spec, Target::Ends, solver, solve_tol)?;
    let p_end = field.centre();
    Ok(GridSolution {
        p_end,
        ratio: p_end / (1.0 - p_end),
        residual: field.residual,
    })
}

pub fn solve_field(
    spec: GridSpec,
    target: Target,
    solver: Solver,
    solve_tol: f64,
) -> Result<Field> {
    if !(solve_tol > 0.0) {
        return Err(Error::domain(format!(
            "solve_tol must be positive, got {solve_tol}"
        )));
    }
    let rhs = boundary_rhs(spec, target);
    let use_direct = match solver {
        Solver::Direct => true,
        Solver::Sor => false,
        Solver::Auto => spec.cells() <= DIRECT_SOLVE_LIMIT,
    };
    let values = if use_direct {
        banded_cholesky_solve(spec, &rhs)
    } else {
        sor_solve(spec, &rhs, solve_tol)?
    };
    let residual = residual_norm(spec, &values, &rhs);
    if residual > solve_tol {
        return Err(Error::accuracy(
            format!("lattice residual {residual:e} exceeds solve_tol {solve_tol:e}"),
            values[spec.centre()],
        ));
    }
    Ok(Field {
        spec,
        values,
        residual,
    })
}

fn boundary_rhs(spec: GridSpec, target: Target) -> Vec<f64> {
    let (w, h) = (spec.interior_width, spec.interior_height);
    let mut rhs = vec![0.0; spec.cells()];
    match target {
        Target::Ends => {
            for y in 0..h {
                rhs[spec.index(0, y)] += 1.0;
                rhs[spec.index(w - 1, y)] += 1.0;
            }
        }
        Target::Sides => {
            for x in 0..w {
                rhs[spec.index(x, 0)] += 1.0;
                rhs[spec.index(x, h - 1)] += 1.0;
            }
        }
    }
    rhs
}

/// `max |rhs - A p|` with `A = 4I - adjacency`.
fn residual_norm(spec: GridSpec, p: &[f64], rhs: &[f64]) -> f64 {
    let (w, h) = (spec.interior_width, spec.interior_height);
    let mut worst = 0.0f64;
    for x in 0..w {
        for y in 0..h {
            let i = spec.index(x, y);
            let mut ap = 4.0 * p[i];
            if x > 0 {
                ap -= p[i - h];
            }
            if x + 1 < w {
                ap -= p[i + h];
            }
            if y > 0 {
                ap -= p[i - 1];
            }
            if y + 1 < h {
                ap -= p[i + 1];
            }
            worst = worst.max((rhs[i] - ap).abs());
        }
    }
    worst
}

/// Cholesky factorisation in band storage; the bandwidth is the interior
/// height since unknowns are numbered column by column.
fn banded_cholesky_solve(spec: GridSpec, rhs: &[f64]) -> Vec<f64> {
    let n = spec.cells();
    let bw = spec.interior_height;
    let stride = bw + 1;
    // l[i * stride + (j + bw - i)] holds L[i][j] for i - bw <= j <= i
    let mut l = vec![0.0; n * stride];
    let a = |i: usize, j: usize| -> f64 {
        if i == j {
            4.0
        } else if (i - j == 1 && i % bw != 0) || i - j == bw {
            -1.0
        } else {
            0.0
        }
    };
    for i in 0..n {
        let lo = i.saturating_sub(bw);
        for j in lo..=i {
            let mut sum = a(i, j);
            let klo = lo.max(j.saturating_sub(bw));
            let row_i = i * stride + bw - i;
            let row_j = j * stride + bw - j;
            for k in klo..j {
                sum -= l[row_i + k] * l[row_j + k];
            }
            if i == j {
                l[row_i + i] = sum.sqrt();
            } else {
                l[row_i + j] = sum / l[row_j + j];
            }
        }
    }
    let mut z = rhs.to_vec();
    for i in 0..n {
        let lo = i.saturating_sub(bw);
        let row = i * stride + bw - i;
        let mut s = z[i];
        for k in lo..i {
            s -= l[row + k] * z[k];
        }
        z[i] = s / l[row + i];
    }
    for i in (0..n).rev() {
        let hi = (i + bw).min(n - 1);
        let mut s = z[i];
        for k in i + 1..=hi {
            s -= l[k * stride + bw - k + i] * z[k];
        }
        z[i] = s / l[i * stride + bw];
    }
    z
}

/// Red-black SOR with `ω = 2 / (1 + sin(π / (height + 1)))`.
fn sor_solve(spec: GridSpec, rhs: &[f64], solve_tol: f64) -> Result<Vec<f64>> {
    let (w, h) = (spec.interior_width, spec.interior_height);
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / (h + 1) as f64).sin());
    let mut p = vec![0.0; spec.cells()];
    for sweep in 1..=SOR_MAX_SWEEPS {
        for colour in 0..2 {
            for x in 0..w {
                let start = (x + colour) % 2;
                for y in (start..h).step_by(2) {
                    let i = spec.index(x, y);
                    let mut s = rhs[i];
                    if x > 0 {
                        s += p[i - h];
                    }
                    if x + 1 < w {
                        s += p[i + h];
                    }
                    if y > 0 {
                        s += p[i - 1];
                    }
                    if y + 1 < h {
                        s += p[i + 1];
                    }
                    p[i] += omega * (0.25 * s - p[i]);
                }
            }
        }
        if sweep % SOR_CHECK_EVERY == 0 && residual_norm(spec, &p, rhs) <= solve_tol {
            return Ok(p);
        }
    }
    Err(Error::accuracy(
        format!("SOR did not reach residual {solve_tol:e} in {SOR_MAX_SWEEPS} sweeps"),
        p[spec.centre()],
    ))
}

/// Solves every grid and extrapolates the ratio to zero spacing from the
/// three finest levels, fitting `R(δ) = R₀ + C δ^p`.
pub fn refine_extrapolate(
    aspect: f64,
    sizes: &[GridSpec],
    solve_tol: f64,
) -> Result<Extrapolation> {
    if sizes.len() < 3 {
        return Err(Error::domain("extrapolation needs at least three grids"));
    }
    for s in sizes {
        if ((s.aspect() - aspect) / aspect).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "grid {} × {} has aspect {} instead of {aspect}",
                s.interior_width,
                s.interior_height,
                s.aspect()
            )));
        }
    }
    if sizes
        .windows(2)
        .any(|p| p[1].interior_height <= p[0].interior_height)
    {
        return Err(Error::domain(
            "grids must be ordered by increasing resolution",
        ));
    }
    let rows = sizes
        .iter()
        .map(|&s| {
            discrete_harmonic_ratio(s, solve_tol).map(|g| GridRow {
                aspect: s.aspect(),
                height: s.interior_height,
                width: s.interior_width,
                p_end: g.p_end,
                ratio: g.ratio,
                residual: g.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let (r1, r2, r3) = (rows[n - 3].ratio, rows[n - 2].ratio, rows[n - 1].ratio);
    let (h1, h2, h3) = (
        sizes[n - 3].spacing(),
        sizes[n - 2].spacing(),
        sizes[n - 1].spacing(),
    );
    let refine = h1 / h2;
    if ((h2 / h3 - refine) / refine).abs() > 1e-12 {
        return Err(Error::domain(
            "the three finest grids must refine geometrically",
        ));
    }
    let (d12, d23) = (r1 - r2, r2 - r3);
    let flat = 64.0 * f64::EPSILON * r3.abs();
    if d12.abs() <= flat && d23.abs() <= flat {
        return Ok(Extrapolation {
            ratio: r3,
            order: None,
            rows,
        });
    }
    if d12 == 0.0 || d23 == 0.0 || d12.signum() != d23.signum() || d23.abs() >= d12.abs() {
        return Err(Error::accuracy(
            format!("ratio sequence {r1:e}, {r2:e}, {r3:e} is not monotonically converging"),
            r3,
        ));
    }
    let order = (d12 / d23).ln() / refine.ln();
    let ratio = r3 - d23 / (refine.powf(order) - 1.0);
    Ok(Extrapolation {
        ratio,
        order: Some(order),
        rows,
    })
}
