use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use quadrange::decompose::decompose_gqo;
use quadrange::geometry::{boundary_points, gqo_numerical_range, membership};
use quadrange::linalg::ToleranceConfig;
use quadrange::model::OperatorModel;
use quadrange::oracle::{sample_range, verify_region, write_csv};
use quadrange::report::{analyze, to_canonical_json, ModelDocument};
use quadrange::selftest;

mod config;
mod svg;

use config::Config;

/// Norms, norm attainment and numerical ranges of generalized quadratic
/// operators [[aI, A], [cA*, bI]].
#[derive(Parser)]
#[command(name = "quadrange", version)]
struct Cli {
    /// TOML file with tolerances and oracle defaults.
    #[arg(long, global = true, env = "QUADRANGE_CONFIG")]
    config: Option<PathBuf>,

    #[command(flatten)]
    tolerances: ToleranceFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ToleranceFlags {
    /// Relative tolerance of the scalar predicates (|c| = 1, a = b, ...).
    #[arg(long, global = true)]
    eq_tol: Option<f64>,
    /// Boundary band width used by membership.
    #[arg(long, global = true)]
    geom_tol: Option<f64>,
    /// Jacobi convergence threshold.
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    /// Jacobi sweep cap.
    #[arg(long, global = true)]
    max_sweeps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Norm, attainment and numerical range report.
    Analyze { model: PathBuf },
    /// Membership of a point in the numerical range.
    Member {
        model: PathBuf,
        /// Point as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// CSV of points on the boundary of the numerical range.
    Boundary {
        model: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Rayleigh sampling and support-boundary check of the predicted range.
    Verify {
        model: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        angles: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the sample cloud as CSV.
        #[arg(long)]
        cloud: Option<PathBuf>,
    },
    /// Q + cQ* + kI decomposition or the reason none exists.
    Decompose { model: PathBuf },
    /// SVG figure of the numerical range.
    Plot {
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overlay this many Rayleigh samples (concrete models only).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Invariant checks on the built-in regression instances.
    Selftest,
}

/// Problems with what the user supplied; exit status 2.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// A check ran and failed; exit status 1.
#[derive(Debug)]
struct VerificationFailed(String);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let parse = |part: &str| {
        part.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{part}` is not a finite number"))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

fn load_model(path: &Path) -> Result<ModelDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        input_error(format!(
            "{}:{}:{}: malformed model document: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn settings(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(|e| input_error(format!("{e:#}")))?,
        None => Config::default(),
    };
    let t = &cli.tolerances;
    let tol = &mut cfg.tolerances;
    tol.eq_tol = t.eq_tol.unwrap_or(tol.eq_tol);
    tol.geom_tol = t.geom_tol.unwrap_or(tol.geom_tol);
    tol.eig_tol = t.eig_tol.unwrap_or(tol.eig_tol);
    tol.max_sweeps = t.max_sweeps.unwrap_or(tol.max_sweeps);
    tol.validate().map_err(|e| input_error(e.to_string()))?;
    Ok(cfg)
}

fn emit(out: &mut impl Write, doc: &impl serde::Serialize) -> Result<()> {
    writeln!(out, "{}", to_canonical_json(doc)?)?;
    Ok(())
}

fn concrete(doc: &ModelDocument, command: &str) -> Result<quadrange::linalg::Matrix> {
    match &doc.model {
        OperatorModel::Matrix(m) => Ok(m.clone()),
        OperatorModel::Diagonal(_) => Err(input_error(format!(
            "`{command}` needs a concrete matrix model; diagonal-spectrum models cannot be sampled"
        ))),
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = settings(&cli)?;
    let tol: &ToleranceConfig = &cfg.tolerances;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Analyze { model } => {
            let doc = load_model(&model)?;
            emit(&mut out, &analyze(&doc, tol)?)?;
        }
        Command::Member { model, z } => {
            let doc = load_model(&model)?;
            let region = gqo_numerical_range(&doc.params()?, &doc.model, tol)?;
            emit(&mut out, &membership(&region, z, tol))?;
        }
        Command::Boundary { model, n } => {
            let doc = load_model(&model)?;
            let region = gqo_numerical_range(&doc.params()?, &doc.model, tol)?;
            let n = n.unwrap_or(cfg.boundary_points);
            let points = boundary_points(&region, n).map_err(|e| input_error(e.to_string()))?;
            write_csv(&mut out, &points)?;
        }
        Command::Verify {
            model,
            samples,
            angles,
            seed,
            cloud,
        } => {
            let doc = load_model(&model)?;
            let off = concrete(&doc, "verify")?;
            let params = doc.params()?;
            let (samples, angles, seed) = (
                samples.unwrap_or(cfg.samples),
                angles.unwrap_or(cfg.angles),
                seed.unwrap_or(cfg.seed),
            );
            if samples == 0 || angles < 3 {
                return Err(input_error("verify needs --samples >= 1 and --angles >= 3"));
            }
            let report = verify_region(&params, &off, tol, samples, angles, seed)?;
            emit(&mut out, &report)?;
            if let Some(path) = cloud {
                let t = quadrange::model::assemble_matrix(params, &off).into_block();
                let points = sample_range(&t, samples, seed)?.points;
                let mut file = std::fs::File::create(&path).with_context(|| format!("{}", path.display()))?;
                write_csv(&mut file, &points)?;
            }
            if !report.passed {
                return Err(VerificationFailed(format!(
                    "samples leave the predicted region by {:.3e} (allowed {:.3e})",
                    report.max_outward_violation, report.violation_tolerance
                ))
                .into());
            }
        }
        Command::Decompose { model } => {
            let doc = load_model(&model)?;
            emit(&mut out, &decompose_gqo(&doc.params()?, tol))?;
        }
        Command::Plot {
            model,
            out: path,
            samples,
            seed,
        } => {
            let doc = load_model(&model)?;
            let params = doc.params()?;
            let region = gqo_numerical_range(&params, &doc.model, tol)?;
            let cloud = if samples > 0 {
                let off = concrete(&doc, "plot --samples")?;
                let t = quadrange::model::assemble_matrix(params, &off).into_block();
                sample_range(&t, samples, seed.unwrap_or(cfg.seed))?.points
            } else {
                Vec::new()
            };
            let figure = svg::render(&svg::Figure {
                region: &region,
                a: params.a,
                b: params.b,
                samples: &cloud,
                outline_points: cfg.boundary_points,
            });
            std::fs::write(&path, figure).with_context(|| format!("cannot write {}", path.display()))?;
        }
        Command::Selftest => {
            let lines = selftest::run(tol, cfg.samples.min(5000), cfg.angles.min(360), cfg.seed)?;
            let mut failed = 0;
            for l in &lines {
                writeln!(
                    out,
                    "{} {:<22} {:<28} {}",
                    if l.passed { "PASS" } else { "FAIL" },
                    l.instance,
                    l.check,
                    l.detail
                )?;
                failed += usize::from(!l.passed);
            }
            writeln!(out, "{} checks, {failed} failed", lines.len())?;
            if failed > 0 {
                bail!(VerificationFailed(format!("{failed} self-test checks failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
