//! Command-line front end: `generate`, `eval` and `verify`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::generators::PlaneSet;
use crate::harness::{random_cloud, verify_all};
use crate::invariants::{known_products, InvariantClass, InvariantGenerator, InvariantPolynomial};
use crate::moments::{central_moments, PointCloud};
use crate::multiindex::{parse_parts, product_basis, Part};
use crate::poly::{self, evaluate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Points in the random cloud used when `--points` is not given.
pub const DEFAULT_CLOUD_POINTS: usize = 500;

#[derive(Parser, Debug)]
#[command(name = "geoinv", version, about = "Generate, evaluate and verify geometric moment invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate invariants for a moment basis and write them to a file.
    Generate(GenerateArgs),
    /// Evaluate invariants on a point cloud.
    Eval(EvalArgs),
    /// Check invariants numerically under random transformations.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Spatial dimension (2 or more)
    #[arg(long)]
    pub dim: usize,
    /// Basis parts as `order:degree[,order:degree...]`.
    #[arg(long)]
    pub parts: String,
    /// scale, rotation or affine
    #[arg(long, default_value = "affine")]
    pub class: InvariantClass,
    /// Rotation planes: fan (planes through the first axis) or all
    #[arg(long, default_value = "fan")]
    pub planes: PlaneSet,
    /// Sub-descriptors whose pairwise products are excluded, separated by
    /// `;`. Without `;`, each `order:degree` item is its own sub-descriptor.
    #[arg(long)]
    pub exclude_products: Option<String>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Echoed in the output; generation itself is deterministic
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Invariant file written by `generate`
    #[arg(long)]
    pub invariants: PathBuf,
    /// Point file; a random cloud from `--seed` if absent.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Invariant file written by `generate`
    #[arg(long)]
    pub invariants: PathBuf,
    /// Point file; a random cloud from `--seed` if absent
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Random transforms per transform class
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Maximum relative error
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for transforms and the random cloud
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Splits an `--exclude-products` value into sub-descriptors.
pub fn parse_exclusions(s: &str) -> Result<Vec<Vec<Part>>> {
    if s.contains(';') {
        s.split(';')
            .map(str::trim)
            .filter(|g| !g.is_empty())
            .map(parse_parts)
            .collect()
    } else {
        Ok(parse_parts(s)?.into_iter().map(|p| vec![p]).collect())
    }
}

fn read_invariants(path: &Path) -> Result<poly::InvariantFile> {
    poly::parse(&fs::read_to_string(path)?)
}

fn load_cloud(points: Option<&Path>, dim: usize, seed: u64) -> Result<PointCloud> {
    match points {
        Some(p) => {
            let cloud = PointCloud::load(p)?;
            if cloud.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: cloud.dim(),
                });
            }
            Ok(cloud)
        }
        None => random_cloud(dim, DEFAULT_CLOUD_POINTS, seed),
    }
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<Vec<InvariantPolynomial>> {
    let parts = parse_parts(&args.parts)?;
    let desc = product_basis(args.dim, &parts)?;
    let gen = InvariantGenerator::new(args.planes);
    let known = match &args.exclude_products {
        Some(s) if args.class == InvariantClass::Scale => {
            return Err(Error::InvalidArgument(format!(
                "--exclude-products {s:?} needs a rotation or affine class"
            )))
        }
        Some(s) => known_products(&gen, &desc, &parse_exclusions(s)?, args.class)?,
        None => Vec::new(),
    };
    let generation = gen.generate(&desc, args.class, &known)?;
    let text = poly::serialize(args.dim, &generation.invariants)?;
    writeln!(out, "seed={}", args.seed)?;
    writeln!(out, "{}", generation.report)?;
    writeln!(out, "invariants={}", generation.invariants.len())?;
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(generation.invariants)
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<Vec<f64>> {
    let file = read_invariants(&args.invariants)?;
    let cloud = load_cloud(args.points.as_deref(), file.dim, args.seed)?;
    let order = file.invariants.iter().map(|i| i.max_order()).max().unwrap_or(0);
    let table = central_moments(&cloud, order)?;
    writeln!(out, "seed={}", args.seed)?;
    let mut values = Vec::with_capacity(file.invariants.len());
    for (k, inv) in file.invariants.iter().enumerate() {
        let v = evaluate(inv, &table)?;
        writeln!(out, "inv{k} {v:.17e}")?;
        values.push(v);
    }
    Ok(values)
}

/// Returns whether every check passed.
pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    if !(args.tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {}", args.tol)));
    }
    let file = read_invariants(&args.invariants)?;
    let cloud = load_cloud(args.points.as_deref(), file.dim, args.seed)?;
    let report = verify_all(&file.invariants, &cloud, args.trials, args.tol, args.seed)?;
    out.write_all(report.to_text().as_bytes())?;
    if let Some(path) = &args.out {
        fs::write(path, report.to_json())?;
    }
    let ok = report.all_pass();
    writeln!(out, "{}", if ok { "all invariants pass" } else { "verification failed" })?;
    Ok(ok)
}

/// Runs the CLI on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, out).map(|_| EXIT_OK),
        Command::Eval(a) => cmd_eval(a, out).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(a, out).map(|ok| if ok { EXIT_OK } else { EXIT_VERIFY_FAILED }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
