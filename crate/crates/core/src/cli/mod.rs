//! Command-line front end. [`run`] parses arguments, dispatches one verb and
//! returns the process exit status.

mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{format_sig, write_records, Field, Format, OutputRecord};

use crate::error::Error;
use crate::hitting::{
    applicable_methods, compute_ratio, hit_density_halfplane, HittingExponent, RatioMethod,
    RatioResult, DEFAULT_REL_TOL,
};
use crate::scmap::{
    alpha_from_aspect_with, aspect_from_alpha, sc_map_boundary, sc_map_deriv_abs, AlphaMethod,
    AspectRatio, ModulusAlpha,
};
use crate::validate::{self, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rectwalk",
    version,
    about = "End-versus-side hitting ratios for a walk started at the centre of an r x 1 rectangle"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Significant digits for real-valued fields.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Elliptic parameter alpha of the half-plane map for aspect ratio r.
    Alpha {
        #[arg(long, allow_negative_numbers = true)]
        aspect: f64,
        #[arg(long, value_enum, default_value_t = AlphaChoice::Auto)]
        method: AlphaChoice,
    },
    /// Ratio R = P(end) / P(side).
    Ratio(RatioArgs),
    /// End probability p = R / (1 + R) alongside R.
    Probability(RatioArgs),
    /// One row per (aspect, exponent) pair.
    Table {
        #[arg(long)]
        aspect_min: f64,
        #[arg(long)]
        aspect_max: f64,
        #[arg(long)]
        aspect_step: f64,
        /// Comma-separated exponents.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        exponents: Vec<f64>,
        #[arg(long, value_enum, default_value_t = MethodChoice::Quadrature)]
        method: MethodChoice,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        tol: f64,
    },
    /// Boundary samples of the half-plane map for plotting.
    Map {
        #[arg(long, allow_negative_numbers = true)]
        aspect: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Exponent used for the density columns.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        exponent: f64,
    },
    /// Built-in reference and consistency checks.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelChoice::Quick)]
        level: LevelChoice,
    },
}

#[derive(Debug, Args)]
struct RatioArgs {
    #[arg(long, allow_negative_numbers = true)]
    aspect: f64,
    #[arg(long, allow_negative_numbers = true)]
    exponent: f64,
    #[arg(long, value_enum, default_value_t = MethodChoice::Quadrature)]
    method: MethodChoice,
    /// Relative tolerance for quadrature.
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    tol: f64,
    /// Also print the correction terms of the two-term expansion.
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlphaChoice {
    Auto,
    Theta,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodChoice {
    Quadrature,
    Closed,
    Leading,
    TwoTerm,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelChoice {
    Quick,
    Full,
}

/// Failure of a verb, already mapped to an exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
    partial: Vec<OutputRecord>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => EXIT_DOMAIN,
            Error::Accuracy { .. } | Error::Integrand { .. } => EXIT_ACCURACY,
        };
        Failure {
            code,
            message: e.to_string(),
            partial: Vec::new(),
        }
    }
}

type VerbResult = std::result::Result<Vec<OutputRecord>, Failure>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let digits = cli.digits as usize;
    let (records, code) = match dispatch(cli.command) {
        Ok(records) => (records, EXIT_OK),
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            (f.partial, f.code)
        }
    };
    if !records.is_empty() {
        let _ = out.write_all(write_records(&records, cli.format, digits).as_bytes());
    }
    code
}

fn dispatch(cmd: Command) -> VerbResult {
    match cmd {
        Command::Alpha { aspect, method } => cmd_alpha(aspect, method),
        Command::Ratio(a) => cmd_ratio(&a, false),
        Command::Probability(a) => cmd_ratio(&a, true),
        Command::Table {
            aspect_min,
            aspect_max,
            aspect_step,
            exponents,
            method,
            tol,
        } => cmd_table(aspect_min, aspect_max, aspect_step, &exponents, method, tol),
        Command::Map {
            aspect,
            samples,
            exponent,
        } => cmd_map(aspect, samples, exponent),
        Command::Validate { level } => cmd_validate(level),
    }
}

/// Aspect ratio in canonical form `r >= 1`, with the notice text when the
/// input was inverted.
fn canonical_aspect(r: f64) -> Result<(AspectRatio, Option<String>), Error> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!(
            "aspect ratio must be positive and finite, got {r}"
        )));
    }
    if r < 1.0 {
        let inv = 1.0 / r;
        let notice = format!(
            "aspect {r} inverted to {}; end and side are swapped relative to the input orientation",
            format_sig(inv, 17)
        );
        return Ok((AspectRatio::new(inv)?, Some(notice)));
    }
    Ok((AspectRatio::new(r)?, None))
}

fn cmd_alpha(aspect: f64, method: AlphaChoice) -> VerbResult {
    let (r, notice) = canonical_aspect(aspect)?;
    let m = match method {
        AlphaChoice::Auto => AlphaMethod::Auto,
        AlphaChoice::Theta => AlphaMethod::Theta,
        AlphaChoice::Asymptotic => AlphaMethod::Asymptotic,
    };
    let alpha = alpha_from_aspect_with(r, m)?;
    let back = aspect_from_alpha(alpha);
    let mut rec = OutputRecord::new()
        .with("aspect", r.value())
        .with("alpha", alpha.value())
        .with("alpha_excess", alpha.excess())
        .with("aspect_roundtrip", back)
        .with("roundtrip_rel_err", ((back - r.value()) / r.value()).abs());
    if let Some(n) = notice {
        rec.push("notice", n);
    }
    Ok(vec![rec])
}

fn methods_for(choice: MethodChoice, b: HittingExponent) -> Vec<RatioMethod> {
    match choice {
        MethodChoice::Quadrature => vec![RatioMethod::Quadrature],
        MethodChoice::Closed => vec![RatioMethod::ClosedRw],
        MethodChoice::Leading => vec![RatioMethod::Leading],
        MethodChoice::TwoTerm => vec![RatioMethod::TwoTerm],
        MethodChoice::All => applicable_methods(b),
    }
}

fn ratio_record(res: &RatioResult, probability: bool, verbose: bool) -> OutputRecord {
    let mut rec = OutputRecord::new()
        .with("aspect", res.r)
        .with("exponent", res.b.value())
        .with("method", res.method.name());
    if probability {
        rec.push("probability", res.end_probability());
        rec.push("ratio", res.value);
    } else {
        rec.push("value", res.value);
    }
    rec.push("err_estimate", res.err_estimate);
    rec.push("regime_warning", res.regime_warning);
    if verbose {
        if let Some(c) = res.corrections {
            rec.push("correction_exponent_b", c.exponent_b);
            rec.push("correction_exponent_one", c.exponent_one);
        }
    }
    rec
}

fn cmd_ratio(a: &RatioArgs, probability: bool) -> VerbResult {
    let (r, notice) = canonical_aspect(a.aspect)?;
    let b = HittingExponent::new(a.exponent)?;
    let mut records = Vec::new();
    for m in methods_for(a.method, b) {
        let res = compute_ratio(r, b, m, a.tol)?;
        let mut rec = ratio_record(&res, probability, a.verbose);
        if let Some(n) = &notice {
            rec.push("notice", n.clone());
        }
        records.push(rec);
    }
    Ok(records)
}

fn aspect_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
        return Err(Error::Domain(format!(
            "need finite aspect_min <= aspect_max and aspect_step > 0, got {min}, {max}, {step}"
        )));
    }
    // tolerate the usual decimal-step rounding at the top end
    let n = ((max - min) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(Error::Domain(format!(
            "table would have {} aspect rows",
            n + 1
        )));
    }
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

fn cmd_table(
    min: f64,
    max: f64,
    step: f64,
    exponents: &[f64],
    method: MethodChoice,
    tol: f64,
) -> VerbResult {
    let aspects = aspect_grid(min, max, step)?;
    let exps = exponents
        .iter()
        .map(|&b| HittingExponent::new(b))
        .collect::<Result<Vec<_>, _>>()?;
    let mut records = Vec::new();
    for &aspect in &aspects {
        let (r, notice) = canonical_aspect(aspect)?;
        for &b in &exps {
            for m in methods_for(method, b) {
                let res = compute_ratio(r, b, m, tol)?;
                let mut rec = ratio_record(&res, false, false);
                rec.push("probability", res.end_probability());
                if let Some(n) = &notice {
                    rec.push("notice", n.clone());
                }
                records.push(rec);
            }
        }
    }
    Ok(records)
}

/// Boundary preimages: half the samples on `|u| < 1` (bottom edge), a
/// quarter on each of `1 < |u| < α` (vertical edges), midpoint spaced so no
/// sample lands on a corner preimage.
fn map_preimages(alpha: ModulusAlpha, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let s = 4.0 * (i as f64 + 0.5) / n as f64 - 2.0;
            if s.abs() <= 1.0 {
                s
            } else {
                s.signum() * (1.0 + (s.abs() - 1.0) * alpha.excess())
            }
        })
        .collect()
}

fn cmd_map(aspect: f64, samples: usize, exponent: f64) -> VerbResult {
    if samples == 0 || samples > 1_000_000 {
        return Err(Error::Domain(format!("samples must be in 1..=1000000, got {samples}")).into());
    }
    let (r, notice) = canonical_aspect(aspect)?;
    let b = HittingExponent::new(exponent)?;
    let alpha = alpha_from_aspect_with(r, AlphaMethod::Auto)?;
    let mut records = Vec::with_capacity(samples);
    for u in map_preimages(alpha, samples) {
        let p = sc_map_boundary(u, alpha)?;
        let deriv = sc_map_deriv_abs(u, alpha)?;
        let density = hit_density_halfplane(u, alpha.value(), b);
        let mut rec = OutputRecord::new()
            .with("u", u)
            .with("x", p.x)
            .with("y", p.y)
            .with("deriv_abs", deriv)
            .with("density", density)
            .with("kernel", density * deriv.powf(1.0 - b.value()));
        if let Some(n) = &notice {
            rec.push("notice", n.clone());
        }
        records.push(rec);
    }
    Ok(records)
}

fn cmd_validate(level: LevelChoice) -> VerbResult {
    let level = match level {
        LevelChoice::Quick => Level::Quick,
        LevelChoice::Full => Level::Full,
    };
    let checks = validate::run(level)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let records: Vec<OutputRecord> = checks
        .into_iter()
        .map(|c| {
            OutputRecord::new()
                .with("id", c.id)
                .with("name", c.name)
                .with("passed", c.passed)
                .with("detail", c.detail)
        })
        .collect();
    if failed > 0 {
        return Err(Failure {
            code: EXIT_ACCURACY,
            message: format!("{failed} check(s) failed"),
            partial: records,
        });
    }
    Ok(records)
}
