//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error (bad flags,
//! unknown catalog name, invalid input file), 3 I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::diagnostics::{run_suite, Comparison, SuiteConfig};
use crate::error::{Error, Result};
use crate::harmonic::{
    apriori_ratio, check_compatibility, mixed_norm, solve_with, write_field_csv, Convention, HarmonicSolution,
    StripGrid,
};
use crate::rootbasis::{reconstruct, root_coeffs, root_combination, trig_coeffs, RootCoefficients};
use crate::vectorfn::{
    catalog, lp_norm, sobolev2_norm, DerivativeMode, FunctionOnI, NormParams, QuadratureKind, QuadratureRule,
    CATALOG_NAMES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Tolerance of the compatibility report printed by `solve`.
const COMPAT_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "halfstrip", version, about = "Root-function expansions and the nonlocal Laplace problem on the half-strip")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root-system and trigonometric coefficients of a function.
    Expand(ExpandArgs),
    /// Series solution on the half-strip, as JSON and a CSV field sample.
    Solve(SolveArgs),
    /// Run the invariant suite; exit 1 if any non-xfail check fails.
    Verify(VerifyArgs),
    /// Norms of a function and of its solution, plus the a-priori ratio.
    Norms(NormsArgs),
    /// List the built-in functions.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuadratureChoice {
    Gauss,
    Trapezoid,
}

#[derive(Debug, Args)]
pub struct QuadratureArgs {
    /// Quadrature family on [0, 2pi].
    #[arg(long, value_enum, env = "HALFSTRIP_QUADRATURE", default_value = "gauss")]
    pub quadrature: QuadratureChoice,
    #[arg(long, env = "HALFSTRIP_PANELS", default_value_t = crate::vectorfn::quadrature::DEFAULT_PANELS)]
    pub panels: usize,
    /// Gauss points per panel (ignored by the trapezoid rule).
    #[arg(long, env = "HALFSTRIP_ORDER", default_value_t = crate::vectorfn::quadrature::DEFAULT_ORDER)]
    pub order: usize,
}

impl QuadratureArgs {
    fn rule(&self) -> Result<QuadratureRule> {
        let kind = match self.quadrature {
            QuadratureChoice::Gauss => QuadratureKind::GaussComposite,
            QuadratureChoice::Trapezoid => QuadratureKind::TrapezoidPeriodic,
        };
        QuadratureRule::new(kind, self.panels, self.order)
    }
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Catalog name (see `catalog`) or path to a root-coefficient JSON file.
    #[arg(long = "f")]
    pub f: String,
    /// Value-space dimension for catalog functions.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    /// Coefficient output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the trigonometric coefficients here.
    #[arg(long)]
    pub trig_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    /// Height of the sampled strip.
    #[arg(long, default_value_t = 10.0)]
    pub xi: f64,
    /// Field sample size `NXxNY`.
    #[arg(long, default_value = "65x65", value_parser = parse_grid)]
    pub grid: (usize, usize),
    #[arg(long, value_enum, default_value = "harmonic-consistent")]
    pub convention: ConventionArg,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    /// Primary output (solution JSON, or the field CSV with `--format csv`);
    /// standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the field CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    HarmonicConsistent,
    StrictPaper,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::HarmonicConsistent => Convention::HarmonicConsistent,
            ConventionArg::StrictPaper => Convention::StrictPaper,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Truncations, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Exponents, comma separated.
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// Value-space dimensions, comma separated.
    #[arg(long = "dim", value_delimiter = ',')]
    pub dim: Option<Vec<usize>>,
    /// Catalog subset, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub catalog: Option<Vec<String>>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random root combinations.
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long, value_enum, default_value = "harmonic-consistent")]
    pub convention: ConventionArg,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    /// Report output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Do not print the summary table to standard error.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    #[arg(long = "p", default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 10.0)]
    pub xi: f64,
    #[arg(long, default_value = "65x65", value_parser = parse_grid)]
    pub grid: (usize, usize),
    #[arg(long, value_enum, default_value = "harmonic-consistent")]
    pub convention: ConventionArg,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NXxNY, got `{s}`"))?;
    let nx = a.trim().parse().map_err(|_| format!("bad grid width `{a}`"))?;
    let ny = b.trim().parse().map_err(|_| format!("bad grid height `{b}`"))?;
    Ok((nx, ny))
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad tolerance value `{v}`"))?;
    Ok((k.trim().to_string(), v))
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command against the
/// process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// [`run`] with explicit output and diagnostic streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Expand(a) => cmd_expand(a, out, err),
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Norms(a) => cmd_norms(a, out, err),
        Command::Catalog(a) => cmd_catalog(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Catalog name, or a root-coefficient file when `arg` names an existing
/// file or looks like a path.
pub fn resolve_function(arg: &str, dim: usize) -> Result<FunctionOnI> {
    let path = Path::new(arg);
    if path.is_file() || arg.ends_with(".json") || arg.contains(std::path::MAIN_SEPARATOR) {
        let coeffs = RootCoefficients::from_json(&fs::read_to_string(path)?)?;
        let name = path.file_stem().map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok(root_combination(name, &coeffs));
    }
    catalog(arg, dim)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn coefficients_csv(c: &RootCoefficients) -> String {
    let mut s = String::from("term");
    for j in 0..c.dim {
        s.push_str(&format!(",component_{j}"));
    }
    s.push('\n');
    let mut row = |label: String, v: &[f64]| {
        s.push_str(&label);
        for x in v {
            s.push_str(&format!(",{x:.16e}"));
        }
        s.push('\n');
    };
    row("a0".into(), &c.a0);
    for k in 0..c.n {
        row(format!("a{}", k + 1), &c.a[k]);
    }
    for k in 0..c.n {
        row(format!("b{}", k + 1), &c.b[k]);
    }
    s
}

/// Max pointwise and L² error of the partial sums `S_M f`, `M = 1, 2, 4, …, N`.
fn reconstruction_table(f: &FunctionOnI, coeffs: &RootCoefficients, rule: &QuadratureRule) -> Result<String> {
    let mut ms: Vec<usize> = std::iter::successors(Some(1usize), |m| Some(m * 2)).take_while(|&m| m < coeffs.n).collect();
    ms.push(coeffs.n);
    let mut s = format!("{:>6} {:>14} {:>14}\n", "N", "max_error", "l2_error");
    for m in ms {
        let c = coeffs.truncated(m);
        let max = (0..=512)
            .map(|i| {
                let x = std::f64::consts::TAU * i as f64 / 512.0;
                let d: Vec<f64> = reconstruct(&c, x).iter().zip(f.eval(x)).map(|(a, b)| a - b).collect();
                crate::vectorfn::norms::euclidean(&d)
            })
            .fold(0.0, f64::max);
        let l2 = crate::vectorfn::norms::lp_norm_with(f.dim(), 2.0, rule, |x, out| {
            crate::rootbasis::reconstruct_into(&c, x, out);
            let fx = f.eval(x);
            out.iter_mut().zip(fx).for_each(|(o, v)| *o -= v);
        })?;
        s.push_str(&format!("{m:>6} {max:>14.6e} {l2:>14.6e}\n"));
    }
    Ok(s)
}

fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if a.n < 1 {
        return Err(Error::Parameter("--N must be >= 1".into()));
    }
    let f = resolve_function(&a.function.f, a.function.dim)?;
    let rule = a.quadrature.rule()?;
    let coeffs = root_coeffs(&f, a.n, &rule);
    let text = match a.format {
        Format::Json => coeffs.to_json()? + "\n",
        Format::Csv => coefficients_csv(&coeffs),
    };
    emit(&text, a.out.as_deref(), out)?;
    if let Some(path) = &a.trig_out {
        fs::write(path, trig_coeffs(&f, a.n, &rule).to_json()? + "\n")?;
    }
    let table = reconstruction_table(&f, &coeffs, &rule)?;
    if a.out.is_some() {
        out.write_all(table.as_bytes())?;
    } else {
        err.write_all(table.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let f = resolve_function(&a.function.f, a.function.dim)?;
    let rule = a.quadrature.rule()?;
    let grid = StripGrid::uniform(a.grid.0, a.grid.1, a.xi)?;
    let sol = solve_with(&f, a.n, &rule, a.convention.into())?;

    let report = check_compatibility(&f, &rule, COMPAT_TOL);
    for w in report.warnings() {
        writeln!(err, "warning: compatibility: {w}")?;
    }
    if report.all_satisfied() {
        writeln!(err, "compatibility: all conditions hold")?;
    }
    writeln!(err, "tail bound at xi = {}: {:e}", a.xi, sol.tail_bound(a.xi))?;

    let mut csv = Vec::new();
    write_field_csv(&sol, &grid, &mut csv)?;
    let csv = String::from_utf8(csv).expect("CSV is ASCII");
    let primary = match a.format {
        Format::Json => sol.to_json()? + "\n",
        Format::Csv => csv.clone(),
    };
    emit(&primary, a.out.as_deref(), out)?;
    if let Some(path) = &a.csv {
        fs::write(path, &csv)?;
    }
    Ok(EXIT_OK)
}

fn suite_config(a: &VerifyArgs) -> Result<SuiteConfig> {
    let rule = a.quadrature.rule().map_err(|e| Error::Config(e.to_string()))?;
    let mut cfg = SuiteConfig {
        convention: a.convention.into(),
        quadrature_kind: rule.kind,
        quadrature_panels: rule.panels,
        quadrature_order: rule.order,
        ..SuiteConfig::default()
    };
    if let Some(v) = &a.n {
        cfg.n_list = v.clone();
    }
    if let Some(v) = &a.p {
        cfg.p_list = v.clone();
    }
    if let Some(v) = &a.dim {
        cfg.dims = v.clone();
    }
    if let Some(v) = &a.catalog {
        cfg.catalog = v.clone();
    }
    if let Some(xi) = a.xi {
        cfg.xi = xi;
    }
    if let Some((nx, ny)) = a.grid {
        cfg.grid_nx = nx;
        cfg.grid_ny = ny;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(cases) = a.cases {
        cfg.random_cases = cases;
    }
    for (k, v) in &a.tol {
        cfg.set_tolerance(k, *v)?;
    }
    Ok(cfg)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = suite_config(a)?;
    let report = run_suite(&cfg)?;
    let text = match a.format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => {
            let mut s = String::from("family,name,measured,comparison,tolerance,pass,xfail\n");
            for c in &report.checks {
                let cmp = if c.comparison == Comparison::AtLeast { "ge" } else { "le" };
                s.push_str(&format!(
                    "{},{},{:.16e},{cmp},{:.16e},{},{}\n",
                    c.family, c.name, c.measured, c.tolerance, c.pass, c.xfail
                ));
            }
            s
        }
    };
    emit(&text, a.out.as_deref(), out)?;
    if !a.quiet {
        err.write_all(report.table().as_bytes())?;
    }
    Ok(if report.ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn cmd_norms(a: &NormsArgs, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32> {
    let f = resolve_function(&a.function.f, a.function.dim)?;
    let rule = a.quadrature.rule()?;
    let params = NormParams::new(a.p, a.xi)?;
    let grid = StripGrid::uniform(a.grid.0, a.grid.1, a.xi)?;
    let sol: HarmonicSolution = solve_with(&f, a.n, &rule, a.convention.into())?;
    let lp = lp_norm(&f, a.p, &rule)?;
    let w2p = sobolev2_norm(&f, a.p, &rule, DerivativeMode::PreferAnalytic)?;
    let field = mixed_norm(&sol, &params, &grid, &rule, false)?;
    let field_w2 = mixed_norm(&sol, &params, &grid, &rule, true)?;
    let (ratio, status) = match apriori_ratio(&f, &sol, &params, &rule, &grid) {
        Ok(r) => (Some(r), "ok"),
        Err(Error::Degenerate(_)) => (None, "degenerate"),
        Err(e) => return Err(e),
    };
    let text = match a.format {
        Format::Json => {
            let v = json!({
                "function": f.name(),
                "dim": f.dim(),
                "N": a.n,
                "p": a.p,
                "xi": a.xi,
                "lp": lp,
                "w2p": w2p,
                "field_lp1": field,
                "field_w2p1": field_w2,
                "apriori_ratio": ratio,
                "apriori_status": status,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => {
            let ratio = ratio.map_or_else(|| status.to_string(), |r| format!("{r:.16e}"));
            format!(
                "quantity,value\nlp,{lp:.16e}\nw2p,{w2p:.16e}\nfield_lp1,{field:.16e}\nfield_w2p1,{field_w2:.16e}\napriori_ratio,{ratio}\n"
            )
        }
    };
    emit(&text, a.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

fn cmd_catalog(a: &CatalogArgs, out: &mut dyn Write) -> Result<i32> {
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(CATALOG_NAMES)? + "\n",
        Format::Csv => std::iter::once("name").chain(CATALOG_NAMES.iter().copied()).collect::<Vec<_>>().join("\n") + "\n",
    };
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}
