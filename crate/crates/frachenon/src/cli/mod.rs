//! Command-line surface: classification sweeps, lambda tables, threshold
//! computation, identity verification suites and extension evaluation,
//! with deterministic machine-readable output.

pub mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::energetics::{
    dh_dlambda_residual, energy_e, half_space_gradient_energy, hs_bilinear_form,
    pohozaev_residuals, IdentityResidual,
};
use crate::error::{Error, Result};
use crate::extension::{
    extend_with_error, frac_laplacian_pv, load_profile, model_v_alpha, ExtensionField,
    HalfSpacePoint, RadialProfile,
};
use crate::regimes::{classify, jl_threshold, sobolev_exponent, ProblemParams, RegimeReport, JL_PROBE_CAP};
use crate::special::{kappa_s, lambda_alpha, FracParams};
use output::{csv_line, g17, json_array, JsonObject};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILURE: i32 = 1;
pub const EXIT_PARARAM_REJECTED: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA_FORMAT: i32 = 65;

const SCHEMA: &str = "frachenon/1";

/// Initialize logging from the FRACHENON_LOG environment variable.
pub fn init_logging() {
    let env = env_logger::Env::new().filter("FRACHENON_LOG");
    let _ = env_logger::Builder::from_env(env).try_init();
}

#[derive(Parser, Debug)]
#[command(name = "frachenon", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify parameter tuples into existence/nonexistence regimes.
    Classify(CommonArgs),
    /// Tabulate the spectral constant over a grid of shifts.
    LambdaTable(CommonArgs),
    /// Compute the stability threshold exponent.
    JlThreshold(CommonArgs),
    /// Run identity verification suites on explicit fields.
    Verify(VerifyArgs),
    /// Evaluate the s-harmonic extension of a profile at given points.
    ExtendEval(ExtendArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Dimension(s): single integer or comma list.
    #[arg(long = "N")]
    n: Option<String>,
    /// Fractional order s in (0,1): value or min:max:count[:log].
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Weight exponent l > -2s: value or range.
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<String>,
    /// Nonlinearity exponent p > 1: value or range.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Shift alpha (or range for lambda-table).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Radius or comma list of radii.
    #[arg(long = "R", allow_hyphen_values = true)]
    radius: Option<String>,
    /// Residual tolerance override.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<String>,
    /// Output format.
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
    /// Key=value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Include an RFC 3339 timestamp in JSON documents.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    /// Which identity suite: pohozaev | monotonicity | homogeneity | eigen | dirichlet | all.
    which: String,
    /// Profile: "zero", or a profile file path (dirichlet suite).
    #[arg(long)]
    profile: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct ExtendArgs {
    /// Sampled profile file; mutually exclusive with --alpha.
    #[arg(long)]
    profile: Option<String>,
    /// Evaluation point "r,t"; repeatable.
    #[arg(long = "point")]
    points: Vec<String>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Parse the command line and run; returns the process exit code.
pub fn run() -> i32 {
    let argv: Vec<std::ffi::OsString> = std::env::args_os().collect();
    run_from(argv)
}

pub fn run_from(argv: Vec<std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            eprint!("{e}");
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Classify(args) => cmd_classify(&args),
        Cmd::LambdaTable(args) => cmd_lambda_table(&args),
        Cmd::JlThreshold(args) => cmd_jl_threshold(&args),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::ExtendEval(args) => cmd_extend_eval(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::Domain(_) => EXIT_PARARAM_REJECTED,
                Error::Convergence(_) | Error::DivergentIntegral(_) => EXIT_NO_CONVERGENCE,
                Error::ProfileFormat { .. } => EXIT_DATA_FORMAT,
            }
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_DATA_FORMAT
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Resolved option values: command line first, then config file.
struct Resolved {
    cfg: BTreeMap<String, String>,
}

impl Resolved {
    fn load(args: &CommonArgs) -> CliResult<Self> {
        let mut cfg = BTreeMap::new();
        if let Some(path) = &args.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    usage(format!("config line {}: expected key=value", idx + 1))
                })?;
                cfg.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Resolved { cfg })
    }

    fn get(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.cfg.get(key).cloned())
    }

    fn flag_bool(&self, flag: bool, key: &str) -> bool {
        flag || self.cfg.get(key).map(|v| v == "true" || v == "1").unwrap_or(false)
    }
}

fn parse_u32_list(text: &str, what: &str) -> CliResult<Vec<u32>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| usage(format!("invalid {what} entry '{tok}'")))
        })
        .collect()
}

fn parse_f64(text: &str, what: &str) -> CliResult<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("invalid {what} value '{text}'")))
}

/// A value or a `min:max:count[:log|:linear]` range.
fn parse_range(text: &str, what: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parse_f64(parts[0], what)?]),
        3 | 4 => {
            let lo = parse_f64(parts[0], what)?;
            let hi = parse_f64(parts[1], what)?;
            let count: usize = parts[2]
                .parse()
                .map_err(|_| usage(format!("invalid {what} count '{}'", parts[2])))?;
            let log = match parts.get(3) {
                None => false,
                Some(&"linear") => false,
                Some(&"log") => true,
                Some(other) => {
                    return Err(usage(format!("unknown {what} spacing '{other}'")))
                }
            };
            if count == 0 {
                return Err(usage(format!("{what} count must be positive")));
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            if log && !(lo > 0.0 && hi > 0.0) {
                return Err(usage(format!("log-spaced {what} needs positive endpoints")));
            }
            let mut out = Vec::with_capacity(count);
            for k in 0..count {
                let f = k as f64 / (count - 1) as f64;
                out.push(if log {
                    (lo.ln() + f * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + f * (hi - lo)
                });
            }
            Ok(out)
        }
        _ => Err(usage(format!(
            "{what}: expected a value or min:max:count[:log], got '{text}'"
        ))),
    }
}

fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(|tok| parse_f64(tok, what)).collect()
}

fn configure_jobs(resolved: &Resolved, args: &CommonArgs) -> CliResult<()> {
    if let Some(jobs) = resolved.get(&args.jobs, "jobs") {
        let jobs: usize = jobs
            .parse()
            .map_err(|_| usage(format!("invalid jobs value '{jobs}'")))?;
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn output_format(resolved: &Resolved, args: &CommonArgs) -> CliResult<Format> {
    match resolved.get(&args.format, "format").as_deref() {
        None | Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        Some(other) => Err(usage(format!("unknown format '{other}'"))),
    }
}

fn emit(resolved: &Resolved, args: &CommonArgs, text: &str) -> CliResult<()> {
    match resolved.get(&args.out, "out") {
        Some(path) => fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn document_header(obj: JsonObject, command: &str, with_timestamp: bool) -> JsonObject {
    let obj = obj
        .field_str("schema", SCHEMA)
        .field_str("command", command)
        .field_str("version", env!("CARGO_PKG_VERSION"));
    if with_timestamp {
        obj.field_str("timestamp", &chrono::Utc::now().to_rfc3339())
    } else {
        obj
    }
}

fn regime_json(report: &RegimeReport) -> String {
    JsonObject::new()
        .field_int("N", report.params.n as i64)
        .field_num("s", report.params.s)
        .field_num("ell", report.params.ell)
        .field_num("p", report.params.p)
        .field_num("p_sobolev", report.p_sobolev)
        .field_num("alpha_tilde", report.alpha_tilde)
        .field_num("lambda_alpha_tilde", report.lambda_at_alpha_tilde)
        .field_num("lambda_zero", report.lambda_at_zero)
        .field_num("gamma", report.gamma)
        .field_str("regime", report.regime.as_str())
        .field_num("amplitude", report.amplitude)
        .build()
}

fn regime_csv(report: &RegimeReport) -> String {
    csv_line(&[
        report.params.n.to_string(),
        g17(report.params.s),
        g17(report.params.ell),
        g17(report.params.p),
        g17(report.p_sobolev),
        g17(report.alpha_tilde),
        g17(report.lambda_at_alpha_tilde),
        g17(report.lambda_at_zero),
        g17(report.gamma),
        report.regime.as_str().to_string(),
        g17(report.amplitude),
    ])
}

fn cmd_classify(args: &CommonArgs) -> CliResult<i32> {
    let resolved = Resolved::load(args)?;
    configure_jobs(&resolved, args)?;
    let format = output_format(&resolved, args)?;
    let ns = parse_u32_list(
        &resolved.get(&args.n, "N").ok_or_else(|| usage("--N is required"))?,
        "N",
    )?;
    let ss = parse_range(
        &resolved.get(&args.s, "s").ok_or_else(|| usage("--s is required"))?,
        "s",
    )?;
    let ells = parse_range(
        &resolved.get(&args.ell, "ell").ok_or_else(|| usage("--ell is required"))?,
        "ell",
    )?;
    let ps = parse_range(
        &resolved.get(&args.p, "p").ok_or_else(|| usage("--p is required"))?,
        "p",
    )?;

    let mut tuples = Vec::new();
    for &n in &ns {
        for &s in &ss {
            for &ell in &ells {
                for &p in &ps {
                    tuples.push((n, s, ell, p));
                }
            }
        }
    }
    let results: Vec<Result<RegimeReport>> = tuples
        .par_iter()
        .map(|&(n, s, ell, p)| ProblemParams::new(n, s, ell, p).and_then(classify))
        .collect();

    let mut reports = Vec::new();
    let mut first_rejection = None;
    for (tuple, res) in tuples.iter().zip(results) {
        match res {
            Ok(report) => reports.push(report),
            Err(e) => {
                log::warn!(
                    "skipping (N={}, s={}, ell={}, p={}): {e}",
                    tuple.0, tuple.1, tuple.2, tuple.3
                );
                if first_rejection.is_none() {
                    first_rejection = Some(e);
                }
            }
        }
    }
    if reports.is_empty() {
        if let Some(e) = first_rejection {
            return Err(e.into());
        }
        return Err(usage("no parameter tuples generated"));
    }

    let text = match format {
        Format::Json => {
            let rows: Vec<String> = reports.iter().map(regime_json).collect();
            let doc = document_header(JsonObject::new(), "classify", resolved.flag_bool(args.timestamp, "timestamp"))
                .field_raw("results", &json_array(&rows))
                .build();
            format!("{doc}\n")
        }
        Format::Csv => {
            let mut lines = vec![
                "N,s,ell,p,p_sobolev,alpha_tilde,lambda_alpha_tilde,lambda_zero,gamma,regime,amplitude"
                    .to_string(),
            ];
            lines.extend(reports.iter().map(regime_csv));
            format!("{}\n", lines.join("\n"))
        }
    };
    emit(&resolved, args, &text)?;
    Ok(EXIT_OK)
}

fn cmd_lambda_table(args: &CommonArgs) -> CliResult<i32> {
    let resolved = Resolved::load(args)?;
    let format = output_format(&resolved, args)?;
    let n: u32 = resolved
        .get(&args.n, "N")
        .ok_or_else(|| usage("--N is required"))?
        .parse()
        .map_err(|_| usage("invalid N"))?;
    let s = parse_f64(
        &resolved.get(&args.s, "s").ok_or_else(|| usage("--s is required"))?,
        "s",
    )?;
    let fp = FracParams::new(n, s).map_err(CliError::Lib)?;
    let sup = fp.alpha_sup();
    let grid_text = resolved
        .get(&args.alpha, "alpha")
        .unwrap_or_else(|| format!("0:{}:50", 0.999 * sup));
    let mut grid = parse_range(&grid_text, "alpha")?;
    let before = grid.len();
    grid.retain(|&a| (0.0..sup).contains(&a));
    if grid.len() != before {
        log::warn!("alpha grid clipped to [0, {sup}) ({} points dropped)", before - grid.len());
    }
    if grid.first() != Some(&0.0) {
        grid.insert(0, 0.0);
    }
    let rows: Vec<(f64, f64)> = grid
        .iter()
        .map(|&a| lambda_alpha(fp, a).map(|l| (a, l)))
        .collect::<Result<_>>()
        .map_err(CliError::Lib)?;

    let text = match format {
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|&(a, l)| JsonObject::new().field_num("alpha", a).field_num("lambda", l).build())
                .collect();
            let doc = document_header(JsonObject::new(), "lambda-table", resolved.flag_bool(args.timestamp, "timestamp"))
                .field_int("N", n as i64)
                .field_num("s", s)
                .field_raw("rows", &json_array(&items))
                .build();
            format!("{doc}\n")
        }
        Format::Csv => {
            let mut lines = vec!["alpha,lambda".to_string()];
            lines.extend(rows.iter().map(|&(a, l)| csv_line(&[g17(a), g17(l)])));
            format!("{}\n", lines.join("\n"))
        }
    };
    emit(&resolved, args, &text)?;
    Ok(EXIT_OK)
}

fn cmd_jl_threshold(args: &CommonArgs) -> CliResult<i32> {
    let resolved = Resolved::load(args)?;
    let n: u32 = resolved
        .get(&args.n, "N")
        .ok_or_else(|| usage("--N is required"))?
        .parse()
        .map_err(|_| usage("invalid N"))?;
    let s = parse_f64(
        &resolved.get(&args.s, "s").ok_or_else(|| usage("--s is required"))?,
        "s",
    )?;
    let ell = parse_f64(
        &resolved.get(&args.ell, "ell").ok_or_else(|| usage("--ell is required"))?,
        "ell",
    )?;
    let p_s = sobolev_exponent(n, s, ell).map_err(CliError::Lib)?;
    let threshold = jl_threshold(n, s, ell).map_err(CliError::Lib)?;
    let fp = FracParams::new(n, s).map_err(CliError::Lib)?;

    let mut doc = document_header(JsonObject::new(), "jl-threshold", resolved.flag_bool(args.timestamp, "timestamp"))
        .field_int("N", n as i64)
        .field_num("s", s)
        .field_num("ell", ell)
        .field_num("p_sobolev", p_s);
    if threshold.is_finite() {
        let alpha = fp.alpha_sup() - (2.0 * s + ell) / (threshold - 1.0);
        let defect = threshold * lambda_alpha(fp, alpha).map_err(CliError::Lib)?
            - lambda_alpha(fp, 0.0).map_err(CliError::Lib)?;
        doc = doc
            .field_num("threshold", threshold)
            .field_num("defect", defect);
    } else {
        doc = doc
            .field_str("threshold", "infinite")
            .field_num("probe_cap", JL_PROBE_CAP);
    }
    emit(&resolved, args, &format!("{}\n", doc.build()))?;
    Ok(EXIT_OK)
}

/// One verified identity with its pass verdict.
struct Check {
    name: String,
    lhs: f64,
    rhs: f64,
    abs_residual: f64,
    rel_residual: f64,
    quadrature_error: f64,
    threshold: f64,
}

impl Check {
    fn from_residual(res: &IdentityResidual, threshold: f64) -> Self {
        Check {
            name: res.identity_name.clone(),
            lhs: res.lhs,
            rhs: res.rhs,
            abs_residual: res.abs_residual,
            rel_residual: res.rel_residual,
            quadrature_error: res.quadrature_error,
            threshold,
        }
    }

    fn trivial(name: &str, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            lhs: 0.0,
            rhs: 0.0,
            abs_residual: 0.0,
            rel_residual: 0.0,
            quadrature_error: 0.0,
            threshold,
        }
    }

    fn pass(&self) -> bool {
        self.rel_residual <= self.threshold
    }

    fn json(&self) -> String {
        JsonObject::new()
            .field_str("identity", &self.name)
            .field_num("lhs", self.lhs)
            .field_num("rhs", self.rhs)
            .field_num("abs_residual", self.abs_residual)
            .field_num("rel_residual", self.rel_residual)
            .field_num("quadrature_error", self.quadrature_error)
            .field_num("threshold", self.threshold)
            .field_bool("pass", self.pass())
            .build()
    }
}

const TOL_EIGEN: f64 = 1e-4;
const TOL_POHOZAEV: f64 = 1e-3;
const TOL_HOMOGENEITY: f64 = 1e-6;
const TOL_DIRICHLET: f64 = 1e-3;

struct VerifyInputs {
    n: u32,
    s: f64,
    ell: f64,
    p: Option<f64>,
    alpha: Option<f64>,
    radii: Vec<f64>,
    tol: Option<f64>,
    zero: bool,
    profile_path: Option<String>,
}

fn verify_inputs(args: &VerifyArgs, resolved: &Resolved) -> CliResult<VerifyInputs> {
    let n: u32 = resolved
        .get(&args.common.n, "N")
        .unwrap_or_else(|| "3".into())
        .parse()
        .map_err(|_| usage("invalid N"))?;
    let s = parse_f64(
        &resolved.get(&args.common.s, "s").unwrap_or_else(|| "0.5".into()),
        "s",
    )?;
    let ell = parse_f64(
        &resolved.get(&args.common.ell, "ell").unwrap_or_else(|| "0".into()),
        "ell",
    )?;
    let p = match resolved.get(&args.common.p, "p") {
        Some(v) => Some(parse_f64(&v, "p")?),
        None => None,
    };
    let alpha = match resolved.get(&args.common.alpha, "alpha") {
        Some(v) => Some(parse_f64(&v, "alpha")?),
        None => None,
    };
    let radii = match resolved.get(&args.common.radius, "R") {
        Some(v) => parse_f64_list(&v, "R")?,
        None => vec![1.0],
    };
    let tol = match resolved.get(&args.common.tol, "tol") {
        Some(v) => Some(parse_f64(&v, "tol")?),
        None => None,
    };
    let profile = args.profile.clone().or_else(|| resolved.cfg.get("profile").cloned());
    let zero = profile.as_deref() == Some("zero");
    Ok(VerifyInputs {
        n,
        s,
        ell,
        p,
        alpha,
        radii,
        tol,
        zero,
        profile_path: if zero { None } else { profile },
    })
}

fn singular_setup(inp: &VerifyInputs) -> Result<(ProblemParams, ExtensionField, RadialProfile)> {
    let p = inp.p.ok_or_else(|| {
        Error::InvalidParameter("--p is required for solution-based suites".into())
    })?;
    let pp = ProblemParams::new(inp.n, inp.s, inp.ell, p)?;
    let field = ExtensionField::singular_solution(pp)?;
    let amp = crate::regimes::singular_amplitude(pp)?;
    let trace = RadialProfile::power_law(0.5 * pp.gamma(), amp);
    Ok((pp, field, trace))
}

fn default_bump() -> RadialProfile {
    let grid: Vec<f64> = (1..=240).map(|k| k as f64 / 200.0).collect();
    let values: Vec<f64> = grid.iter().map(|&r| (1.0 - r * r).max(0.0).powi(3)).collect();
    RadialProfile::sampled(grid, values, f64::INFINITY).expect("static bump profile")
}

fn checks_pohozaev(inp: &VerifyInputs, tol: f64) -> Result<Vec<Check>> {
    if inp.zero {
        return Ok(vec![
            Check::trivial("Pohozaev scaling (Eq. 2.21)", tol),
            Check::trivial("Pohozaev energy (Eq. 2.22)", tol),
        ]);
    }
    let (pp, field, trace) = singular_setup(inp)?;
    let mut checks = Vec::new();
    for &radius in &inp.radii {
        let (scaling, energy) = pohozaev_residuals(&field, &trace, radius, pp)?;
        let tag = |res: &IdentityResidual| IdentityResidual {
            identity_name: format!("{} at R={}", res.identity_name, g17(radius)),
            ..res.clone()
        };
        checks.push(Check::from_residual(&tag(&scaling), tol));
        checks.push(Check::from_residual(&tag(&energy), tol));
    }
    Ok(checks)
}

fn checks_monotonicity(inp: &VerifyInputs, tol: f64) -> Result<Vec<Check>> {
    if inp.zero {
        return Ok(vec![Check::trivial("E(lambda) degeneracy", tol)]);
    }
    let (pp, field, trace) = singular_setup(inp)?;
    let lambdas = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &l in &lambdas {
        let e = energy_e(&field, &trace, l, pp)?.e;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    let spread = IdentityResidual::new("E(lambda) degeneracy", hi, lo, 0.0);
    let dh = dh_dlambda_residual(&field, 1.0, pp)?;
    Ok(vec![
        Check::from_residual(&spread, tol),
        Check::from_residual(&dh, tol),
    ])
}

fn checks_homogeneity(inp: &VerifyInputs, tol: f64) -> Result<Vec<Check>> {
    if inp.zero {
        return Ok(vec![Check::trivial("homogeneity (Eq. 4.22)", tol)]);
    }
    let fp = FracParams::new(inp.n, inp.s)?;
    let alpha = inp.alpha.unwrap_or(0.5 * fp.alpha_sup());
    let m = fp.alpha_sup() - alpha;
    let pt = HalfSpacePoint::new(0.8, 0.6)?;
    let base = model_v_alpha(fp, alpha, pt)?;
    let mut checks = Vec::new();
    for k in [0.5, 2.0, 4.0] {
        let scaled = model_v_alpha(fp, alpha, HalfSpacePoint::new(k * pt.r, k * pt.t)?)?;
        let res = IdentityResidual::new(
            &format!("homogeneity (Eq. 4.22) at k={}", g17(k)),
            scaled,
            k.powf(-m) * base,
            0.0,
        );
        checks.push(Check::from_residual(&res, tol));
    }
    Ok(checks)
}

fn checks_eigen(inp: &VerifyInputs, tol: f64) -> Result<Vec<Check>> {
    if inp.zero {
        return Ok(vec![Check::trivial("eigen identity (Eq. 1.7)", tol)]);
    }
    let fp = FracParams::new(inp.n, inp.s)?;
    let alpha = inp.alpha.unwrap_or(0.5 * fp.alpha_sup());
    let lam = lambda_alpha(fp, alpha)?;
    let m = fp.alpha_sup() - alpha;
    let profile = RadialProfile::power_law(m, 1.0);
    let mut checks = Vec::new();
    for &r in &inp.radii {
        let pv = frac_laplacian_pv(&profile, fp, r)?;
        let res = IdentityResidual::new(
            &format!("eigen identity (Eq. 1.7) at r={}", g17(r)),
            pv,
            lam * r.powf(-2.0 * fp.s - m),
            0.0,
        );
        checks.push(Check::from_residual(&res, tol));
    }
    Ok(checks)
}

fn checks_dirichlet(inp: &VerifyInputs, tol: f64) -> Result<Vec<Check>> {
    if inp.zero {
        return Ok(vec![Check::trivial("Dirichlet trace energy (Eq. 2.7)", tol)]);
    }
    let fp = FracParams::new(inp.n, inp.s)?;
    let bump = match &inp.profile_path {
        Some(path) => {
            let (n, profile) = load_profile(std::path::Path::new(path))?;
            if n != inp.n {
                return Err(Error::InvalidParameter(format!(
                    "profile file declares N={n} but --N {} was given",
                    inp.n
                )));
            }
            profile
        }
        None => default_bump(),
    };
    let field = ExtensionField::poisson_of(fp, bump.clone())?;
    // The bilinear form rejects out-of-class profiles cheaply; do it first.
    let rhs = kappa_s(fp.s)? * hs_bilinear_form(&bump, &bump, fp)?;
    let lhs = half_space_gradient_energy(&field, 12.0)?;
    let res = IdentityResidual::new("Dirichlet trace energy (Eq. 2.7)", lhs, rhs, 0.0);
    Ok(vec![Check::from_residual(&res, tol)])
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<i32> {
    let resolved = Resolved::load(&args.common)?;
    configure_jobs(&resolved, &args.common)?;
    let inp = verify_inputs(args, &resolved)?;
    let suites: Vec<&str> = match args.which.as_str() {
        "all" => vec!["eigen", "homogeneity", "pohozaev", "monotonicity", "dirichlet"],
        w @ ("pohozaev" | "monotonicity" | "homogeneity" | "eigen" | "dirichlet") => vec![w],
        other => return Err(usage(format!("unknown verify suite '{other}'"))),
    };
    let mut checks = Vec::new();
    for suite in &suites {
        let default_tol = match *suite {
            "eigen" => TOL_EIGEN,
            "homogeneity" => TOL_HOMOGENEITY,
            "dirichlet" => TOL_DIRICHLET,
            _ => TOL_POHOZAEV,
        };
        let tol = inp.tol.unwrap_or(default_tol);
        let mut suite_checks = match *suite {
            "pohozaev" => checks_pohozaev(&inp, tol)?,
            "monotonicity" => checks_monotonicity(&inp, tol)?,
            "homogeneity" => checks_homogeneity(&inp, tol)?,
            "eigen" => checks_eigen(&inp, tol)?,
            "dirichlet" => checks_dirichlet(&inp, tol)?,
            _ => unreachable!(),
        };
        checks.append(&mut suite_checks);
    }
    let all_pass = checks.iter().all(Check::pass);

    let params = JsonObject::new()
        .field_int("N", inp.n as i64)
        .field_num("s", inp.s)
        .field_num("ell", inp.ell)
        .field_num("p", inp.p.unwrap_or(f64::NAN))
        .build();
    let items: Vec<String> = checks.iter().map(Check::json).collect();
    let doc = document_header(JsonObject::new(), "verify", resolved.flag_bool(args.common.timestamp, "timestamp"))
        .field_str("which", &args.which)
        .field_raw("params", &params)
        .field_raw("checks", &json_array(&items))
        .field_bool("pass", all_pass)
        .build();
    emit(&resolved, &args.common, &format!("{doc}\n"))?;
    Ok(if all_pass { EXIT_OK } else { EXIT_IDENTITY_FAILURE })
}

fn cmd_extend_eval(args: &ExtendArgs) -> CliResult<i32> {
    let resolved = Resolved::load(&args.common)?;
    let format = output_format(&resolved, &args.common)?;
    let profile_path = args.profile.clone().or_else(|| resolved.cfg.get("profile").cloned());
    let alpha_text = resolved.get(&args.common.alpha, "alpha");

    let (n_declared, profile) = match (&profile_path, &alpha_text) {
        (Some(path), None) => {
            let (n, profile) = load_profile(std::path::Path::new(path))?;
            (Some(n), profile)
        }
        (None, Some(alpha)) => {
            let n: u32 = resolved
                .get(&args.common.n, "N")
                .ok_or_else(|| usage("--N is required with --alpha"))?
                .parse()
                .map_err(|_| usage("invalid N"))?;
            let s = parse_f64(
                &resolved
                    .get(&args.common.s, "s")
                    .ok_or_else(|| usage("--s is required with --alpha"))?,
                "s",
            )?;
            let fp = FracParams::new(n, s).map_err(CliError::Lib)?;
            let alpha = parse_f64(alpha, "alpha")?;
            (Some(n), RadialProfile::power_law(fp.alpha_sup() - alpha, 1.0))
        }
        _ => {
            return Err(usage(
                "extend-eval needs exactly one of --profile FILE or --alpha (model spec)",
            ))
        }
    };
    let n = n_declared.expect("dimension resolved above");
    let s = parse_f64(
        &resolved
            .get(&args.common.s, "s")
            .ok_or_else(|| usage("--s is required"))?,
        "s",
    )?;
    let fp = FracParams::new(n, s).map_err(CliError::Lib)?;

    if args.points.is_empty() {
        return Err(usage("at least one --point r,t is required"));
    }
    let mut rows = Vec::new();
    for ptext in &args.points {
        let (r_str, t_str) = ptext
            .split_once(',')
            .ok_or_else(|| usage(format!("invalid point '{ptext}', expected r,t")))?;
        let r = parse_f64(r_str, "point radius")?;
        let t = parse_f64(t_str, "point height")?;
        let pt = HalfSpacePoint::new(r, t).map_err(CliError::Lib)?;
        let (value, err) = extend_with_error(&profile, fp, pt).map_err(CliError::Lib)?;
        rows.push((r, t, value, err));
    }

    let text = match format {
        Format::Csv => {
            let mut lines = vec!["r,t,value,quadrature_error".to_string()];
            lines.extend(
                rows.iter()
                    .map(|&(r, t, v, e)| csv_line(&[g17(r), g17(t), g17(v), g17(e)])),
            );
            format!("{}\n", lines.join("\n"))
        }
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|&(r, t, v, e)| {
                    JsonObject::new()
                        .field_num("r", r)
                        .field_num("t", t)
                        .field_num("value", v)
                        .field_num("quadrature_error", e)
                        .build()
                })
                .collect();
            let doc = document_header(JsonObject::new(), "extend-eval", resolved.flag_bool(args.common.timestamp, "timestamp"))
                .field_int("N", n as i64)
                .field_num("s", s)
                .field_raw("rows", &json_array(&items))
                .build();
            format!("{doc}\n")
        }
    };
    emit(&resolved, &args.common, &text)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("2.5", "x").unwrap(), vec![2.5]);
        let lin = parse_range("1:3:3", "x").unwrap();
        assert_eq!(lin, vec![1.0, 2.0, 3.0]);
        let log = parse_range("1:100:3:log", "x").unwrap();
        assert!((log[1] - 10.0).abs() < 1e-12);
        assert!(parse_range("1:2", "x").is_err());
        assert!(parse_range("1:2:0", "x").is_err());
    }

    #[test]
    fn exit_codes_for_bad_input() {
        let run = |args: &[&str]| {
            let mut argv: Vec<std::ffi::OsString> = vec!["frachenon".into()];
            argv.extend(args.iter().map(|s| s.into()));
            run_from(argv)
        };
        assert_eq!(run(&["classify", "--bogus"]), EXIT_USAGE);
        assert_eq!(
            run(&["classify", "--N", "3", "--s", "0.5", "--ell", "-1.0", "--p", "2"]),
            EXIT_PARARAM_REJECTED
        );
    }
}
