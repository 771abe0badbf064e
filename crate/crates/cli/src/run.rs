//! Argument definitions and the subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l2curves::catalog::{self, FamilyDescriptor, FamilyId, ParamSpec, Parameterization};
use l2curves::quadrature::{solve_kappa_rho, solve_kappa_v, RealFn};
use l2curves::verify::{
    check_curvature_law_with, check_elastica_with, check_soliton_with, check_unit_speed_with, compare_intrinsic_with,
    CheckConfig, CheckReport, Law,
};
use l2curves::{CurveSamples, Error, MomentumSpec, SamplingPolicy, SolveRequest, Spacing, Variable};
use serde::Serialize;

use crate::config::{verify_tolerance, RunConfig, TOL_ENV};
use crate::expr::parse_kappa;
use crate::io::{read_samples, render, Format, ReadError};
use crate::plot::{render_svg, PlotOptions};

/// Why a run stopped early. Each maps to its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::PseudopolarOnly(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn read_failure(path: &Path, e: ReadError) -> Failure {
    match e {
        ReadError::Io(e) => Failure::Io(format!("{}: {e}", path.display())),
        ReadError::Malformed(m) => Failure::Usage(format!("{}: {m}", path.display())),
    }
}

/// Outcome of a run that got to the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "l2curves", version, about = "Curves in the Lorentz-Minkowski plane with prescribed curvature")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a closed-form family.
    #[command(allow_negative_numbers = true)]
    Generate(GenerateArgs),
    /// Reconstruct a curve from a curvature law κ(ρ) or κ(v).
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Run invariant checks on a sample file or a family.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Compare the intrinsic equations κ(s) of two sample files, up to a shift in s.
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
    /// Print the family registry with parameter schemas.
    ListFamilies(ListArgs),
    /// Draw sample files as SVG with the light cone.
    Plot(PlotArgs),
}

fn parse_epsilon(s: &str) -> Result<i8, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "+1" | "spacelike" => Ok(1),
        "-1" | "timelike" => Ok(-1),
        _ => Err(format!("expected 1, -1, spacelike or timelike, got `{s}`")),
    }
}

fn parse_unit(s: &str) -> Result<i8, String> {
    match s.trim() {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("expected 1 or -1, got `{s}`")),
    }
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Args, Debug, Clone, Default)]
pub struct FamilyArgs {
    /// Family name (see `list-families`).
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub phi0: Option<f64>,
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Any family parameter as name=value (repeatable).
    #[arg(long = "param", value_parser = parse_kv)]
    pub params: Vec<(String, f64)>,
}

impl FamilyArgs {
    fn given(&self, c: Option<f64>) -> Vec<(String, f64)> {
        let named = [
            ("phi0", self.phi0),
            ("k0", self.k0),
            ("c", c),
            ("mu", self.mu),
            ("lambda", self.lambda),
            ("n", self.n),
            ("a", self.a),
            ("b", self.b),
        ];
        let mut out: Vec<(String, f64)> = named
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
        out.extend(self.params.iter().cloned());
        out
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct SignArgs {
    /// Causal sign: 1 (spacelike) or -1 (timelike).
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<i8>,
    /// Pseudopolar wedge: 1 (|y| >= |x|) or -1 (|x| >= |y|).
    #[arg(long, value_parser = parse_unit)]
    pub branch: Option<i8>,
    /// Sign of the dominant coordinate.
    #[arg(long, value_parser = parse_unit)]
    pub sign: Option<i8>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Output format; defaults to the output extension, else CSV.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format
            .or_else(|| self.output.as_deref().map(Format::from_path))
            .unwrap_or(Format::Csv)
    }
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Integration constant parameter of families that have one.
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub signs: SignArgs,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// Parameter range (arc length, or the auxiliary parameter of the family).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub range: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VarArg {
    Rho,
    V,
}

impl From<VarArg> for Variable {
    fn from(v: VarArg) -> Self {
        match v {
            VarArg::Rho => Variable::Rho,
            VarArg::V => Variable::V,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Uniform,
    Geometric,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Curvature law, e.g. "2 + 1/rho" or "2*v".
    #[arg(long)]
    pub kappa: String,
    #[arg(long, value_enum, default_value = "rho")]
    pub var: VarArg,
    /// Integration constant (always explicit).
    #[arg(long)]
    pub c: f64,
    /// Point where the antiderivative of the law starts.
    #[arg(long, default_value_t = 0.0)]
    pub anchor: f64,
    #[command(flatten)]
    pub signs: SignArgs,
    /// Range of ρ or v to sample.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub window: Option<Vec<f64>>,
    /// Explicit arc-length range.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], alias = "range")]
    pub s_range: Option<Vec<f64>>,
    /// Restrict the admissible interval of ρ or v.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub hint: Option<Vec<f64>>,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    pub spacing: SpacingArg,
    /// Absolute accuracy of each quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_integral: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Sample file to check (CSV or JSON).
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub signs: SignArgs,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub range: Option<Vec<f64>>,
    /// Check g(γ', γ') = ε (the default when no check is named).
    #[arg(long)]
    pub unit_speed: bool,
    /// Check numeric curvature against a law in --var.
    #[arg(long = "law")]
    pub law: Option<String>,
    #[arg(long, value_enum, default_value = "rho")]
    pub var: VarArg,
    /// Check 2κ'' - κ³ - σκ = 0 and the energy κ'² - κ⁴/4 - σκ²/2 = E.
    #[arg(long)]
    pub elastica: bool,
    #[arg(long, requires = "elastica")]
    pub sigma: Option<f64>,
    #[arg(long, requires = "elastica")]
    pub energy: Option<f64>,
    /// Check κ = g((1, 1), N).
    #[arg(long)]
    pub soliton: bool,
    /// Threshold; overrides L2CURVES_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Print reports as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Threshold; overrides L2CURVES_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ListFormat {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: ListFormat,
}

#[derive(Args, Debug, Clone)]
pub struct PlotArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 600.0)]
    pub size: f64,
    /// Skip the reflected branch.
    #[arg(long)]
    pub no_mirror: bool,
}

/// Where output goes and how the process environment looks.
pub struct Context<'a> {
    pub stdout: &'a mut dyn Write,
    pub tol_env: Option<String>,
}

impl<'a> Context<'a> {
    pub fn from_env(stdout: &'a mut dyn Write) -> Self {
        Context {
            stdout,
            tol_env: std::env::var(TOL_ENV).ok(),
        }
    }

    fn emit(&mut self, text: &str, path: Option<&Path>) -> Result<(), Failure> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Io(format!("stdout: {e}"))),
        }
    }
}

pub fn run(cli: Cli, ctx: &mut Context) -> Result<Status, Failure> {
    match cli.command {
        Command::Generate(a) => generate(a, ctx),
        Command::Solve(a) => solve(a, ctx),
        Command::Verify(a) => verify(a, ctx),
        Command::Compare(a) => compare(a, ctx),
        Command::ListFamilies(a) => list_families(a, ctx),
        Command::Plot(a) => plot(a, ctx),
    }
}

fn pair(v: &Option<Vec<f64>>) -> Option<(f64, f64)> {
    v.as_ref().map(|v| (v[0], v[1]))
}

fn apply_signs(cfg: &mut RunConfig, s: &SignArgs) {
    cfg.epsilon = s.epsilon.unwrap_or(1);
    cfg.branch = s.branch.unwrap_or(1);
    cfg.sign = s.sign.unwrap_or(1);
}

/// Builds and validates a family member from flags.
fn family_config(command: &str, fam: &FamilyArgs, c: Option<f64>, signs: &SignArgs) -> Result<RunConfig, Failure> {
    let name = fam
        .family
        .as_deref()
        .ok_or_else(|| Failure::Usage("--family is required".into()))?;
    let id: FamilyId = name.parse()?;
    let mut cfg = RunConfig::new(command);
    apply_signs(&mut cfg, signs);
    cfg.family = Some(id.name().to_string());
    let known: Vec<&str> = id.params().iter().map(|p| p.name).collect();
    for (k, v) in fam.given(c) {
        if !known.contains(&k.as_str()) {
            return Err(Failure::Usage(format!(
                "family {id} has no parameter `{k}` (parameters: {})",
                known.join(", ")
            )));
        }
        cfg.params.insert(k, v);
    }
    // record the effective value of every parameter
    for p in id.params() {
        cfg.params.entry(p.name.to_string()).or_insert(p.default);
    }
    Ok(cfg)
}

fn descriptor(cfg: &RunConfig) -> Result<FamilyDescriptor, Failure> {
    let id: FamilyId = cfg.family.as_deref().unwrap_or_default().parse()?;
    let mut d = FamilyDescriptor::new(id, cfg.causal_sign())
        .with_branch(cfg.branch())
        .with_sign(cfg.side());
    for (k, &v) in &cfg.params {
        d = d.with(k, v);
    }
    d.validate()?;
    Ok(d)
}

fn generate(a: GenerateArgs, ctx: &mut Context) -> Result<Status, Failure> {
    let mut cfg = family_config("generate", &a.family, a.c, &a.signs)?;
    cfg.samples = a.samples;
    cfg.range = pair(&a.range);
    cfg.format = a.out.format();
    cfg.output = a.out.output.as_ref().map(|p| p.display().to_string());
    cfg.validate().map_err(Failure::Usage)?;
    let d = descriptor(&cfg)?;
    let samples = catalog::sample_family(&d, cfg.samples, cfg.range)?;
    ctx.emit(&render(&samples, cfg.format, Some(&cfg)), a.out.output.as_deref())?;
    Ok(Status::Pass)
}

fn default_window(v: Variable) -> (f64, f64) {
    match v {
        Variable::Rho => (0.0, 10.0),
        Variable::V => (-4.0, 4.0),
    }
}

fn solve(a: SolveArgs, ctx: &mut Context) -> Result<Status, Failure> {
    let var: Variable = a.var.into();
    let expr = parse_kappa(&a.kappa, var).map_err(|e| Failure::Usage(format!("--kappa: {e}")))?;
    let mut cfg = RunConfig::new("solve");
    apply_signs(&mut cfg, &a.signs);
    cfg.expression = Some(a.kappa.clone());
    cfg.variable = Some(var);
    cfg.c = Some(a.c);
    cfg.anchor = Some(a.anchor);
    cfg.window = pair(&a.window);
    cfg.range = pair(&a.s_range);
    cfg.samples = a.samples;
    cfg.tolerances.integral = a.tol_integral;
    cfg.format = a.out.format();
    cfg.output = a.out.output.as_ref().map(|p| p.display().to_string());
    cfg.validate().map_err(Failure::Usage)?;
    if let Some((lo, hi)) = pair(&a.hint) {
        if !(lo < hi) {
            return Err(Failure::Usage(format!("--hint needs lo < hi, got [{lo}, {hi}]")));
        }
    }

    let eps = cfg.causal_sign();
    let window = cfg.window.unwrap_or_else(|| default_window(var));
    let kappa: RealFn = Arc::new(move |x| expr.eval(x));
    let momentum = MomentumSpec::from_kappa(var, kappa, a.c, a.anchor, eps, window)?;
    let mut sampling = SamplingPolicy::default().with_count(cfg.samples).with_spacing(match a.spacing {
        SpacingArg::Uniform => Spacing::Uniform,
        SpacingArg::Geometric => Spacing::Geometric,
    });
    if let Some((lo, hi)) = cfg.window {
        sampling = sampling.with_window(lo, hi);
    }
    if let Some((lo, hi)) = cfg.range {
        sampling = sampling.with_s_range(lo, hi);
    }
    let mut req = SolveRequest::new(momentum, eps)
        .with_branch(cfg.branch())
        .with_sign(cfg.side())
        .with_sampling(sampling);
    req.tolerances.integral = cfg.tolerances.integral;
    if let Some((lo, hi)) = pair(&a.hint) {
        req = req.with_hint(lo, hi);
    }
    let samples = match var {
        Variable::Rho => solve_kappa_rho(&req),
        Variable::V => solve_kappa_v(&req),
    }?;
    ctx.emit(&render(&samples, cfg.format, Some(&cfg)), a.out.output.as_deref())?;
    Ok(Status::Pass)
}

fn load(path: &Path, epsilon: Option<i8>) -> Result<CurveSamples, Failure> {
    let eps = epsilon.map(|e| {
        if e > 0 {
            l2curves::CausalSign::Spacelike
        } else {
            l2curves::CausalSign::Timelike
        }
    });
    read_samples(path, eps)
        .map(|l| l.samples)
        .map_err(|e| read_failure(path, e))
}

fn report(ctx: &mut Context, reports: &[CheckReport], json: bool) -> Result<Status, Failure> {
    let text = if json {
        let mut s = serde_json::to_string_pretty(reports).expect("serializable");
        s.push('\n');
        s
    } else {
        reports.iter().map(|r| format!("{r}\n")).collect()
    };
    ctx.emit(&text, None)?;
    Ok(if reports.iter().all(|r| r.pass) {
        Status::Pass
    } else {
        Status::Fail
    })
}

fn verify(a: VerifyArgs, ctx: &mut Context) -> Result<Status, Failure> {
    let tol = verify_tolerance(a.tol, ctx.tol_env.as_deref()).map_err(Failure::Usage)?;
    let law = match &a.law {
        Some(src) => Some(parse_kappa(src, a.var.into()).map_err(|e| Failure::Usage(format!("--law: {e}")))?),
        None => None,
    };
    let samples = match (&a.input, &a.family.family) {
        (Some(path), _) => load(path, a.signs.epsilon)?,
        (None, Some(_)) => {
            let mut cfg = family_config("verify", &a.family, a.c, &a.signs)?;
            cfg.samples = a.samples;
            cfg.range = pair(&a.range);
            cfg.validate().map_err(Failure::Usage)?;
            catalog::sample_family(&descriptor(&cfg)?, cfg.samples, cfg.range)?
        }
        (None, None) => return Err(Failure::Usage("verify needs --input or --family".into())),
    };
    let cfg = CheckConfig::default().with_threshold(tol);
    let mut reports = Vec::new();
    let any = law.is_some() || a.elastica || a.soliton;
    if a.unit_speed || !any {
        reports.push(check_unit_speed_with(&samples, &cfg)?);
    }
    if let Some(expr) = &law {
        let l = Law::from(expr.variable);
        reports.push(check_curvature_law_with(&samples, l, &|x| expr.eval(x), &cfg)?);
    }
    if a.elastica {
        let (Some(sigma), Some(energy)) = (a.sigma, a.energy) else {
            return Err(Failure::Usage("--elastica needs --sigma and --energy".into()));
        };
        let r = check_elastica_with(&samples, sigma, energy, &cfg)?;
        reports.push(r.equation);
        reports.push(r.energy);
    }
    if a.soliton {
        reports.push(check_soliton_with(&samples, &cfg)?);
    }
    report(ctx, &reports, a.json)
}

fn compare(a: CompareArgs, ctx: &mut Context) -> Result<Status, Failure> {
    let tol = verify_tolerance(a.tol, ctx.tol_env.as_deref()).map_err(Failure::Usage)?;
    let x = load(&a.first, None)?;
    let y = load(&a.second, None)?;
    let cfg = CheckConfig::default().with_threshold(tol);
    match compare_intrinsic_with(&x, &y, &cfg) {
        Ok(r) => report(ctx, &[r], a.json),
        Err(Error::NoOverlap) => {
            let r = CheckReport::new("compare_intrinsic", f64::INFINITY, tol, f64::NAN);
            ctx.emit("the arc-length ranges do not overlap\n", None)?;
            report(ctx, &[r], a.json)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct FamilyEntry {
    name: &'static str,
    variable: Variable,
    parameterization: Parameterization,
    summary: &'static str,
    params: &'static [ParamSpec],
}

fn list_families(a: ListArgs, ctx: &mut Context) -> Result<Status, Failure> {
    let entries: Vec<FamilyEntry> = FamilyId::ALL
        .iter()
        .map(|&f| FamilyEntry {
            name: f.name(),
            variable: f.variable(),
            parameterization: f.parameterization(),
            summary: f.summary(),
            params: f.params(),
        })
        .collect();
    let text = match a.format {
        ListFormat::Json => {
            let mut s = serde_json::to_string_pretty(&entries).expect("serializable");
            s.push('\n');
            s
        }
        ListFormat::Text => entries
            .iter()
            .map(|e| {
                let ps: Vec<String> = e.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
                format!("{:<20} kappa({:<3}) {:<24} {}\n", e.name, e.variable.name(), ps.join(" "), e.summary)
            })
            .collect(),
    };
    ctx.emit(&text, None)?;
    Ok(Status::Pass)
}

fn plot(a: PlotArgs, ctx: &mut Context) -> Result<Status, Failure> {
    if !(a.size > 0.0 && a.size.is_finite()) {
        return Err(Failure::Usage(format!("--size must be positive, got {}", a.size)));
    }
    let curves = a
        .inputs
        .iter()
        .map(|p| load(p, None))
        .collect::<Result<Vec<_>, _>>()?;
    let svg = render_svg(
        &curves,
        PlotOptions {
            size: a.size,
            mirror: !a.no_mirror,
        },
    );
    ctx.emit(&svg, a.output.as_deref())?;
    Ok(Status::Pass)
}
