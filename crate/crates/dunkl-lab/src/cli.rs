//! Command-line front end: argument parsing, config-file merging, result
//! serialization, and exit-code policy.
//!
//! Every subcommand resolves its parameters the same way: start from the
//! built-in defaults, overlay a JSON config file when `--config` is given
//! (unknown fields rejected), then overlay any explicitly passed flags.
//! The resolved record is echoed in the JSON output together with an
//! FNV-1a hash of its canonical serialization, so any result can be traced
//! back to the exact configuration that produced it. All randomness is
//! seeded, so every command is reproducible bit for bit from its config.
//!
//! Exit codes: 0 success; 2 invalid input or environment; 3 mathematically
//! empty result (asking for boundary blow-up when the growth condition
//! rules it out); 4 a computed result failed its own verification.
//!
//! CSV output is RFC-4180-style: header row, comma separators, CRLF line
//! endings, `.` as the decimal mark. JSON field names are stable.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::phi::Phi;
use crate::radial::{
    blowup_radius, classify_entire_solution, integrate_radial_ivp, ko_report,
    solve_blowup_problem, solve_radial_dirichlet_shooting, BlowupControls, EntireSolutions,
    IvpControls, KoReport, RadialSolution, BLOWUP_BRACKET_REL_WIDTH,
};
use crate::root_system::{FamilySpec, RootSystem};
use crate::semilinear::{picard_solve, verify_solution, DirichletProblem, PicardConfig};
use crate::sim::{
    radial_law_check, simulate_exit, support_check, BoundaryCorrection, Domain, ExitStudy,
    RateConvention, SimConfig,
};
use crate::verify::{run_suite, CheckResult};

/// Shooting tolerance used when the Dirichlet command runs the ODE method.
pub const CLI_SHOOTING_TOL: f64 = 1e-9;

/// Sup-norm disagreement between the two Dirichlet methods above which the
/// command reports a verification failure (exit code 4). The two solvers
/// share no numerics, so agreement at this level certifies both.
pub const CLI_METHOD_AGREEMENT_TOL: f64 = 1e-5;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "dunkl-lab",
    version,
    about = "Semilinear analysis and path simulation for Dunkl Laplacians",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a nonlinearity by its growth integral (does the equation
    /// keep entire solutions, or do profiles blow up?)
    Ko(KoArgs),
    /// Boundary blow-up: explosion radii, seeds, and profiles
    Blowup(BlowupArgs),
    /// Dirichlet problem on a centered ball with constant boundary data
    Dirichlet(DirichletArgs),
    /// Monte Carlo studies of the reflected jump diffusion
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Run the named invariant checks and report pass/fail per check
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum SimulateCmd {
    /// First-exit times and exit points from a domain
    Exit(SimArgs),
    /// Exit-point membership in the reflected closure of the domain
    Support(SimArgs),
    /// Squared-radius law at a fixed time against the Gamma benchmark
    RadialLaw(SimArgs),
}

#[derive(Args, Debug, Clone)]
pub struct KoArgs {
    /// Nonlinearity: power:c,p | linear:c | expm1:c | poly:c1,c2,...
    #[arg(long)]
    pub phi: Option<String>,
    /// Threshold seed value(s), comma separated (default 1)
    #[arg(long)]
    pub a: Option<String>,
    /// Write one CSV row per seed value here
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BlowupArgs {
    /// Nonlinearity: power:c,p | linear:c | expm1:c | poly:c1,c2,...
    #[arg(long)]
    pub phi: Option<String>,
    /// Effective dimension m > 2 (default 3)
    #[arg(long)]
    pub m: Option<f64>,
    /// Ball radius: solve for the seed whose profile explodes at the
    /// boundary (default 1; ignored with --seed or --seed-sweep)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Launch directly from this seed instead of solving for one
    #[arg(long, conflicts_with = "radius")]
    pub seed: Option<f64>,
    /// Comma-separated seed list; emit the explosion-radius table instead
    /// of a profile
    #[arg(long, conflicts_with_all = ["radius", "seed"])]
    pub seed_sweep: Option<String>,
    /// Write the profile (r,u,u_prime) or sweep table as CSV here
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DirichletArgs {
    /// Nonlinearity: power:c,p | linear:c | expm1:c | poly:c1,c2,...
    #[arg(long)]
    pub phi: Option<String>,
    /// Effective dimension m > 2 (default 3)
    #[arg(long)]
    pub m: Option<f64>,
    /// Ball radius (default 1)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Constant boundary value c >= 0 (default 1)
    #[arg(long)]
    pub c: Option<f64>,
    /// picard | shooting | both (default both)
    #[arg(long)]
    pub method: Option<String>,
    /// Grid points for the fixed-point iteration (default 201)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write the profile as CSV (r,u,u_prime) here
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    /// Root system: a1:k | a1xa1:k[,k2] | dihedral:n,k[,k2] | b2:ks,kl |
    /// path to a JSON file (default a1:1)
    #[arg(long)]
    pub system: Option<String>,
    /// Domain: ball:R | offset_ball:c1,..,cd,R | half_ball:R[,axis]
    #[arg(long, conflicts_with = "ball")]
    pub domain: Option<String>,
    /// Shorthand for a centered ball of this radius
    #[arg(long)]
    pub ball: Option<f64>,
    /// Start point, comma-separated coordinates (default: domain center)
    #[arg(long)]
    pub x0: Option<String>,
    /// Number of paths (default 1000)
    #[arg(long)]
    pub paths: Option<usize>,
    /// Euler time step (default 1e-3)
    #[arg(long)]
    pub h: Option<f64>,
    /// RNG seed (default 1)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-path process-time cap (default 50)
    #[arg(long)]
    pub t_max: Option<f64>,
    /// generator | levy_kernel (default generator)
    #[arg(long)]
    pub rate_convention: Option<String>,
    /// half_order_shift | none (default half_order_shift)
    #[arg(long)]
    pub correction: Option<String>,
    /// Membership tolerance for the support test (default 2 sqrt(h))
    #[arg(long)]
    pub tol: Option<f64>,
    /// Observation time for the radial law (default 1)
    #[arg(long)]
    pub t: Option<f64>,
    /// Write one CSV row per path here
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Analytic and ODE checks only; seconds, no Monte Carlo
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Include the production-scale Monte Carlo batteries
    #[arg(long)]
    pub full: bool,
}

// ---------------------------------------------------------------------------
// Resolved configs (JSON-file form; flags overlay these)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KoConfig {
    pub phi: String,
    pub a: Vec<f64>,
    pub csv: Option<String>,
}

impl Default for KoConfig {
    fn default() -> Self {
        KoConfig {
            phi: String::new(),
            a: vec![1.0],
            csv: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupConfig {
    pub phi: String,
    pub m: f64,
    pub radius: f64,
    pub seed: Option<f64>,
    pub seed_sweep: Vec<f64>,
    pub csv: Option<String>,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        BlowupConfig {
            phi: String::new(),
            m: 3.0,
            radius: 1.0,
            seed: None,
            seed_sweep: Vec::new(),
            csv: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletMethod {
    Picard,
    Shooting,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirichletConfig {
    pub phi: String,
    pub m: f64,
    pub radius: f64,
    pub c: f64,
    pub method: DirichletMethod,
    pub grid: usize,
    pub csv: Option<String>,
}

impl Default for DirichletConfig {
    fn default() -> Self {
        DirichletConfig {
            phi: String::new(),
            m: 3.0,
            radius: 1.0,
            c: 1.0,
            method: DirichletMethod::Both,
            grid: 201,
            csv: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub system: String,
    pub domain: Option<String>,
    pub ball: Option<f64>,
    pub x0: Option<Vec<f64>>,
    pub paths: usize,
    pub h: f64,
    pub seed: u64,
    pub t_max: f64,
    pub rate_convention: RateConvention,
    pub correction: BoundaryCorrection,
    pub tol: Option<f64>,
    pub t: f64,
    pub csv: Option<String>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            system: "a1:1".into(),
            domain: None,
            ball: None,
            x0: None,
            paths: 1000,
            h: 1e-3,
            seed: 1,
            t_max: 50.0,
            rate_convention: RateConvention::default(),
            correction: BoundaryCorrection::default(),
            tol: None,
            t: 1.0,
            csv: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Small parsers and plumbing
// ---------------------------------------------------------------------------

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// FNV-1a, 64-bit: the config fingerprint carried by every JSON output.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn config_hash<T: Serialize>(cfg: &T) -> Result<String> {
    let text = serde_json::to_string(cfg)?;
    Ok(format!("{:016x}", fnv1a_64(text.as_bytes())))
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("expected a number, got {:?}", p.trim())))
        })
        .collect()
}

/// Build a root system from the textual grammar or a JSON file path.
pub fn parse_system(spec: &str) -> Result<RootSystem> {
    let s = spec.trim();
    if s.starts_with('@') || s.ends_with(".json") {
        let path = s.strip_prefix('@').unwrap_or(s);
        let text = fs::read_to_string(path)?;
        let file: SystemFile = serde_json::from_str(&text)?;
        return file.build();
    }
    let (name, rest) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("system spec needs name:params, got {s:?}")))?;
    if !name.is_empty() && name.split('x').all(|p| p == "a1") {
        let d = name.split('x').count();
        let ks = parse_f64_list(rest)?;
        let k = if ks.len() == 1 {
            vec![ks[0]; d]
        } else if ks.len() == d {
            ks
        } else {
            return Err(invalid(format!(
                "{name} takes 1 or {d} multiplicities, got {}",
                ks.len()
            )));
        };
        return RootSystem::build(&FamilySpec::A1Product { k });
    }
    match name {
        "dihedral" => {
            let v = parse_f64_list(rest)?;
            if v.len() < 2 || v.len() > 3 {
                return Err(invalid("dihedral takes n,k or n,k1,k2"));
            }
            let order = v[0] as usize;
            if (order as f64 - v[0]).abs() > 0.0 || order == 0 {
                return Err(invalid(format!("dihedral order must be a positive integer, got {}", v[0])));
            }
            RootSystem::build(&FamilySpec::Dihedral {
                order,
                k: v[1..].to_vec(),
            })
        }
        "b2" => {
            let v = parse_f64_list(rest)?;
            if v.len() != 2 {
                return Err(invalid("b2 takes k_short,k_long"));
            }
            RootSystem::build(&FamilySpec::BRank2 {
                k_short: v[0],
                k_long: v[1],
            })
        }
        other => Err(invalid(format!(
            "unknown system family {other:?}; expected a1, a1xa1, ..., dihedral, or b2"
        ))),
    }
}

/// On-disk root-system description. Field names are part of the interface.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    /// "a1_product" | "dihedral" | "b2" | "custom"
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_short: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_long: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Vec<f64>>>,
}

impl SystemFile {
    pub fn build(&self) -> Result<RootSystem> {
        let need = |field: &str| invalid(format!("system file: family {:?} needs {field}", self.family));
        match self.family.as_str() {
            "a1_product" => RootSystem::build(&FamilySpec::A1Product {
                k: self.k.clone().ok_or_else(|| need("k"))?,
            }),
            "dihedral" => RootSystem::build(&FamilySpec::Dihedral {
                order: self.order.ok_or_else(|| need("order"))?,
                k: self.k.clone().ok_or_else(|| need("k"))?,
            }),
            "b2" => RootSystem::build(&FamilySpec::BRank2 {
                k_short: self.k_short.ok_or_else(|| need("k_short"))?,
                k_long: self.k_long.ok_or_else(|| need("k_long"))?,
            }),
            "custom" => RootSystem::build(&FamilySpec::Custom {
                d: self.d.ok_or_else(|| need("d"))?,
                positive_roots: self.roots.clone().ok_or_else(|| need("roots"))?,
                k: self.k.clone().ok_or_else(|| need("k"))?,
            }),
            other => Err(invalid(format!(
                "unknown system family {other:?}; expected a1_product, dihedral, b2, or custom"
            ))),
        }
    }
}

/// Domain grammar: `ball:R`, `offset_ball:c1,..,cd,R`, `half_ball:R[,axis]`.
pub fn parse_domain(spec: &str, d: usize) -> Result<Domain> {
    let (name, rest) = spec
        .trim()
        .split_once(':')
        .ok_or_else(|| invalid(format!("domain spec needs name:params, got {spec:?}")))?;
    let v = parse_f64_list(rest)?;
    match name {
        "ball" | "centered_ball" => {
            if v.len() != 1 {
                return Err(invalid("ball takes a single radius"));
            }
            Ok(Domain::CenteredBall { radius: v[0] })
        }
        "offset_ball" => {
            if v.len() != d + 1 {
                return Err(invalid(format!(
                    "offset_ball takes {d} center coordinates then a radius"
                )));
            }
            Ok(Domain::OffsetBall {
                center: v[..d].to_vec(),
                radius: v[d],
            })
        }
        "half_ball" => {
            let axis = match v.len() {
                1 => d - 1,
                2 => {
                    let a = v[1] as usize;
                    if (a as f64 - v[1]).abs() > 0.0 || a >= d {
                        return Err(invalid(format!("half_ball axis must be an integer below {d}")));
                    }
                    a
                }
                _ => return Err(invalid("half_ball takes R or R,axis")),
            };
            Ok(Domain::HalfBall { radius: v[0], axis })
        }
        other => Err(invalid(format!(
            "unknown domain {other:?}; expected ball, offset_ball, or half_ball"
        ))),
    }
}

fn parse_rate_convention(s: &str) -> Result<RateConvention> {
    match s {
        "generator" => Ok(RateConvention::Generator),
        "levy_kernel" | "levy-kernel" => Ok(RateConvention::LevyKernel),
        other => Err(invalid(format!(
            "unknown rate convention {other:?}; expected generator or levy_kernel"
        ))),
    }
}

fn parse_correction(s: &str) -> Result<BoundaryCorrection> {
    match s {
        "half_order_shift" | "half-order-shift" => Ok(BoundaryCorrection::HalfOrderShift),
        "none" => Ok(BoundaryCorrection::None),
        other => Err(invalid(format!(
            "unknown boundary correction {other:?}; expected half_order_shift or none"
        ))),
    }
}

fn parse_method(s: &str) -> Result<DirichletMethod> {
    match s {
        "picard" => Ok(DirichletMethod::Picard),
        "shooting" => Ok(DirichletMethod::Shooting),
        "both" => Ok(DirichletMethod::Both),
        other => Err(invalid(format!(
            "unknown method {other:?}; expected picard, shooting, or both"
        ))),
    }
}

fn load_config<T: Default + for<'de> Deserialize<'de>>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_csv<R: IntoIterator<Item = Vec<String>>>(
    path: &Path,
    header: &[String],
    rows: R,
) -> Result<()> {
    let mut out = String::new();
    let line = |cells: &[String]| {
        cells
            .iter()
            .map(|c| csv_field(c))
            .collect::<Vec<_>>()
            .join(",")
    };
    let _ = write!(out, "{}\r\n", line(header));
    for row in rows {
        let _ = write!(out, "{}\r\n", line(&row));
    }
    fs::write(path, out)?;
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Map a library error to the process exit code.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::KOHoldsNoBlowup => 3,
        Error::VerificationFailed { .. }
        | Error::NoConvergence { .. }
        | Error::UnclassifiableTail { .. } => 4,
        _ => 2,
    }
}

/// Cap the worker pool from `DUNKL_LAB_THREADS`; default is the available
/// parallelism. Must run before any parallel work.
pub fn init_threads_from_env() -> std::result::Result<(), String> {
    match std::env::var("DUNKL_LAB_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("DUNKL_LAB_THREADS: {e}")),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("DUNKL_LAB_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("DUNKL_LAB_THREADS must be at least 1".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let outcome = match cli.command {
        Command::Ko(args) => cmd_ko(args),
        Command::Blowup(args) => cmd_blowup(args),
        Command::Dirichlet(args) => cmd_dirichlet(args),
        Command::Simulate(sub) => cmd_simulate(sub),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

/// Write a line to stdout, exiting quietly if the reader closed the pipe
/// (e.g. `dunkl-lab ... | head`).
fn emit_line(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn print_json(value: &Value) -> Result<()> {
    emit_line(&serde_json::to_string_pretty(value)?);
    Ok(())
}

fn classification_str(e: EntireSolutions) -> &'static str {
    match e {
        EntireSolutions::Exist => "KO_holds",
        EntireSolutions::DoNotExist => "KO_fails",
    }
}

// ---------------------------------------------------------------------------
// ko
// ---------------------------------------------------------------------------

fn resolve_ko(args: KoArgs) -> Result<KoConfig> {
    let mut cfg: KoConfig = load_config(&args.config)?;
    set(&mut cfg.phi, args.phi);
    if let Some(list) = args.a {
        cfg.a = parse_f64_list(&list)?;
    }
    set_opt(&mut cfg.csv, args.csv.map(|p| p.display().to_string()));
    if cfg.phi.is_empty() {
        return Err(invalid("a nonlinearity is required (--phi or config file)"));
    }
    if cfg.a.is_empty() {
        return Err(invalid("at least one seed value is required"));
    }
    Ok(cfg)
}

fn ko_integral_as_f64(i: &crate::radial::KoIntegral) -> f64 {
    match i {
        crate::radial::KoIntegral::Finite(v) => *v,
        crate::radial::KoIntegral::Divergent => f64::INFINITY,
    }
}

fn cmd_ko(args: KoArgs) -> Result<u8> {
    let cfg = resolve_ko(args)?;
    let phi = Phi::parse(&cfg.phi)?;
    let reports: Vec<KoReport> = cfg
        .a
        .iter()
        .map(|&a| ko_report(&phi, a))
        .collect::<Result<_>>()?;
    let classification = classification_str(reports[0].entire_solutions);

    if let Some(path) = &cfg.csv {
        let header: Vec<String> = ["a", "integral_from_zero", "integral_from_a", "classification"]
            .map(String::from)
            .to_vec();
        let rows = reports.iter().map(|r| {
            vec![
                fmt_f64(r.a),
                fmt_f64(ko_integral_as_f64(&r.integral_from_zero)),
                fmt_f64(ko_integral_as_f64(&r.integral_from_a)),
                classification.to_string(),
            ]
        });
        write_csv(Path::new(path), &header, rows)?;
    }

    print_json(&json!({
        "command": "ko",
        "config": &cfg,
        "config_hash": config_hash(&cfg)?,
        "units": {
            "a": "solution amplitude at the inner limit",
            "integral": "integral of 1/sqrt(2 Phi) over amplitude; infinite when divergent"
        },
        "phi": phi.describe(),
        "classification": classification,
        "reports": reports,
    }))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// blowup
// ---------------------------------------------------------------------------

fn resolve_blowup(args: BlowupArgs) -> Result<BlowupConfig> {
    let mut cfg: BlowupConfig = load_config(&args.config)?;
    set(&mut cfg.phi, args.phi);
    set(&mut cfg.m, args.m);
    set(&mut cfg.radius, args.radius);
    set_opt(&mut cfg.seed, args.seed);
    if let Some(list) = args.seed_sweep {
        cfg.seed_sweep = parse_f64_list(&list)?;
    }
    set_opt(&mut cfg.csv, args.csv.map(|p| p.display().to_string()));
    if cfg.phi.is_empty() {
        return Err(invalid("a nonlinearity is required (--phi or config file)"));
    }
    if cfg.seed.is_some() && !cfg.seed_sweep.is_empty() {
        return Err(invalid("seed and seed_sweep are mutually exclusive"));
    }
    Ok(cfg)
}

fn profile_csv(path: &str, sol: &RadialSolution) -> Result<()> {
    let header: Vec<String> = ["r", "u", "u_prime"].map(String::from).to_vec();
    let rows = (0..sol.grid.len()).map(|i| {
        vec![
            fmt_f64(sol.grid[i]),
            fmt_f64(sol.values[i]),
            fmt_f64(sol.derivatives[i]),
        ]
    });
    write_csv(Path::new(path), &header, rows)
}

fn cmd_blowup(args: BlowupArgs) -> Result<u8> {
    let cfg = resolve_blowup(args)?;
    let phi = Phi::parse(&cfg.phi)?;

    // The whole command is about explosion; when the growth integral
    // diverges there is nothing to compute, which is its own exit code.
    if classify_entire_solution(&phi)? == EntireSolutions::Exist {
        print_json(&json!({
            "command": "blowup",
            "config": &cfg,
            "config_hash": config_hash(&cfg)?,
            "phi": phi.describe(),
            "classification": "KO_holds",
            "message": "no boundary blow-up: KO holds",
        }))?;
        eprintln!("no boundary blow-up: KO holds");
        return Ok(3);
    }

    let units = json!({
        "r": "Euclidean radius",
        "u": "solution amplitude",
        "radius": "explosion radius (Euclidean)",
    });

    if !cfg.seed_sweep.is_empty() {
        let mut table: Vec<(f64, f64, crate::radial::BlowupStatus)> = Vec::new();
        for &a in &cfg.seed_sweep {
            let (radius, status) = blowup_radius(cfg.m, &phi, a, &BlowupControls::default())?;
            table.push((a, radius, status));
        }
        // Explosion radii shrink as the seed grows; report whether the
        // sweep respects that (it must, up to bracketing tolerance).
        let mut by_seed = table.clone();
        by_seed.sort_by(|x, y| f64::total_cmp(&x.0, &y.0));
        let monotone = by_seed
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 * (1.0 + 4.0 * BLOWUP_BRACKET_REL_WIDTH));

        if let Some(path) = &cfg.csv {
            let header: Vec<String> = ["a", "radius", "status"].map(String::from).to_vec();
            let csv_rows = table.iter().map(|(a, radius, status)| {
                vec![
                    fmt_f64(*a),
                    fmt_f64(*radius),
                    serde_json::to_value(status)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default(),
                ]
            });
            write_csv(Path::new(path), &header, csv_rows)?;
        }

        let rows: Vec<Value> = table
            .iter()
            .map(|(a, radius, status)| json!({ "a": a, "radius": radius, "status": status }))
            .collect();
        print_json(&json!({
            "command": "blowup",
            "config": &cfg,
            "config_hash": config_hash(&cfg)?,
            "units": units,
            "phi": phi.describe(),
            "classification": "KO_fails",
            "rows": rows,
            "monotone_decreasing": monotone,
        }))?;
        return Ok(0);
    }

    let sol = match cfg.seed {
        Some(a) => {
            let (r_b, _) = blowup_radius(cfg.m, &phi, a, &BlowupControls::default())?;
            integrate_radial_ivp(cfg.m, &phi, a, r_b, &IvpControls::default())?
        }
        None => solve_blowup_problem(cfg.m, &phi, cfg.radius)?,
    };
    let (r_b, status) = blowup_radius(
        cfg.m,
        &phi,
        sol.seed,
        &BlowupControls {
            initial_horizon: (4.0 * sol.max_radius()).max(4.0),
            ..BlowupControls::default()
        },
    )?;

    if let Some(path) = &cfg.csv {
        profile_csv(path, &sol)?;
    }

    print_json(&json!({
        "command": "blowup",
        "config": &cfg,
        "config_hash": config_hash(&cfg)?,
        "units": units,
        "phi": phi.describe(),
        "classification": "KO_fails",
        "seed": sol.seed,
        "grid": sol.grid,
        "values": sol.values,
        "derivatives": sol.derivatives,
        "blowup": { "radius": r_b, "status": status },
        "bracket": {
            "lo": r_b * (1.0 - BLOWUP_BRACKET_REL_WIDTH),
            "hi": r_b * (1.0 + BLOWUP_BRACKET_REL_WIDTH),
            "rel_width": BLOWUP_BRACKET_REL_WIDTH,
        },
        "ko": ko_report(&phi, sol.seed)?,
    }))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// dirichlet
// ---------------------------------------------------------------------------

fn resolve_dirichlet(args: DirichletArgs) -> Result<DirichletConfig> {
    let mut cfg: DirichletConfig = load_config(&args.config)?;
    set(&mut cfg.phi, args.phi);
    set(&mut cfg.m, args.m);
    set(&mut cfg.radius, args.radius);
    set(&mut cfg.c, args.c);
    if let Some(s) = args.method {
        cfg.method = parse_method(&s)?;
    }
    set(&mut cfg.grid, args.grid);
    set_opt(&mut cfg.csv, args.csv.map(|p| p.display().to_string()));
    if cfg.phi.is_empty() {
        return Err(invalid("a nonlinearity is required (--phi or config file)"));
    }
    Ok(cfg)
}

fn cmd_dirichlet(args: DirichletArgs) -> Result<u8> {
    let cfg = resolve_dirichlet(args)?;
    let phi = Phi::parse(&cfg.phi)?;
    let problem = DirichletProblem {
        m: cfg.m,
        phi: phi.clone(),
        r_ball: cfg.radius,
        boundary_value: cfg.c,
    };
    let picard_cfg = PicardConfig {
        n_grid: cfg.grid,
        ..PicardConfig::default()
    };

    let mut iterations = None;
    let mut update_size = None;
    let mut sup_disagreement = None;

    let profile = match cfg.method {
        DirichletMethod::Picard => {
            let sol = picard_solve(&problem, &picard_cfg)?;
            iterations = Some(sol.iterations);
            update_size = Some(sol.update_size);
            sol.profile
        }
        DirichletMethod::Shooting => {
            solve_radial_dirichlet_shooting(cfg.m, &phi, cfg.radius, cfg.c, CLI_SHOOTING_TOL)?
        }
        DirichletMethod::Both => {
            let fixed = picard_solve(&problem, &picard_cfg)?;
            iterations = Some(fixed.iterations);
            update_size = Some(fixed.update_size);
            let shot =
                solve_radial_dirichlet_shooting(cfg.m, &phi, cfg.radius, cfg.c, CLI_SHOOTING_TOL)?;
            let mut worst: f64 = 0.0;
            for i in 0..=512 {
                let r = cfg.radius * i as f64 / 512.0;
                worst = worst.max((fixed.profile.eval(r) - shot.eval(r)).abs());
            }
            sup_disagreement = Some(worst);
            fixed.profile
        }
    };

    let check = verify_solution(&problem, &profile)?;

    if let Some(path) = &cfg.csv {
        profile_csv(path, &profile)?;
    }

    print_json(&json!({
        "command": "dirichlet",
        "config": &cfg,
        "config_hash": config_hash(&cfg)?,
        "units": { "r": "Euclidean radius", "u": "solution amplitude" },
        "phi": phi.describe(),
        "boundary_value": cfg.c,
        "seed": profile.seed,
        "grid": profile.grid,
        "values": profile.values,
        "derivatives": profile.derivatives,
        "iterations": iterations,
        "update_size": update_size,
        "sup_disagreement": sup_disagreement,
        "checks": check,
    }))?;

    if let Some(worst) = sup_disagreement {
        if worst > CLI_METHOD_AGREEMENT_TOL {
            eprintln!(
                "methods disagree by {worst:.3e} (tolerance {CLI_METHOD_AGREEMENT_TOL:.0e})"
            );
            return Err(Error::VerificationFailed { failed: 1, total: 1 });
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn resolve_simulate(args: SimArgs) -> Result<SimulateConfig> {
    let mut cfg: SimulateConfig = load_config(&args.config)?;
    set(&mut cfg.system, args.system);
    set_opt(&mut cfg.domain, args.domain);
    set_opt(&mut cfg.ball, args.ball);
    if let Some(s) = args.x0 {
        cfg.x0 = Some(parse_f64_list(&s)?);
    }
    set(&mut cfg.paths, args.paths);
    set(&mut cfg.h, args.h);
    set(&mut cfg.seed, args.seed);
    set(&mut cfg.t_max, args.t_max);
    if let Some(s) = args.rate_convention {
        cfg.rate_convention = parse_rate_convention(&s)?;
    }
    if let Some(s) = args.correction {
        cfg.correction = parse_correction(&s)?;
    }
    set_opt(&mut cfg.tol, args.tol);
    set(&mut cfg.t, args.t);
    set_opt(&mut cfg.csv, args.csv.map(|p| p.display().to_string()));
    if cfg.domain.is_some() && cfg.ball.is_some() {
        return Err(invalid("domain and ball are mutually exclusive"));
    }
    Ok(cfg)
}

fn sim_config(cfg: &SimulateConfig) -> SimConfig {
    SimConfig {
        h: cfg.h,
        n_paths: cfg.paths,
        rng_seed: cfg.seed,
        max_time: cfg.t_max,
        rate_convention: cfg.rate_convention,
        boundary_correction: cfg.correction,
    }
}

fn resolve_domain(cfg: &SimulateConfig, d: usize) -> Result<Domain> {
    if let Some(r) = cfg.ball {
        return Ok(Domain::CenteredBall { radius: r });
    }
    match &cfg.domain {
        Some(spec) => parse_domain(spec, d),
        None => Ok(Domain::CenteredBall { radius: 1.0 }),
    }
}

/// Closed-form mean exit time, available for centered balls only:
/// (R^2 - |x0|^2) / (2m).
fn closed_form_mean_exit(domain: &Domain, x0: &[f64], m: f64) -> Option<f64> {
    match domain {
        Domain::CenteredBall { radius } => {
            let rho2 = x0.iter().map(|v| v * v).sum::<f64>();
            Some((radius * radius - rho2) / (2.0 * m))
        }
        _ => None,
    }
}

fn domain_center(domain: &Domain, d: usize) -> Vec<f64> {
    match domain {
        Domain::CenteredBall { .. } => vec![0.0; d],
        Domain::OffsetBall { center, .. } => center.clone(),
        Domain::HalfBall { radius, axis } => {
            let mut x = vec![0.0; d];
            x[*axis] = radius / 2.0;
            x
        }
    }
}

fn resolve_x0(cfg: &SimulateConfig, domain: &Domain, d: usize) -> Result<Vec<f64>> {
    match &cfg.x0 {
        Some(x) => {
            if x.len() != d {
                return Err(invalid(format!(
                    "x0 has {} coordinates but the system lives in dimension {d}",
                    x.len()
                )));
            }
            Ok(x.clone())
        }
        None => Ok(domain_center(domain, d)),
    }
}

fn exit_samples_csv(path: &str, study: &ExitStudy, d: usize) -> Result<()> {
    let mut header: Vec<String> = vec!["path_id".into(), "tau".into()];
    for i in 1..=d {
        header.push(format!("x{i}"));
    }
    header.push("n_jumps".into());
    header.push("capped".into());
    let rows = study.samples.iter().enumerate().map(|(id, s)| {
        let mut row = vec![id.to_string(), fmt_f64(s.exit_time)];
        row.extend(s.exit_point.iter().map(|&x| fmt_f64(x)));
        row.push(s.n_jumps.to_string());
        row.push(s.capped.to_string());
        row
    });
    write_csv(Path::new(path), &header, rows)
}

fn forbid_flag(present: bool, flag: &str, mode: &str) -> Result<()> {
    if present {
        Err(invalid(format!("--{flag} does not apply to simulate {mode}")))
    } else {
        Ok(())
    }
}

fn cmd_simulate(sub: SimulateCmd) -> Result<u8> {
    match sub {
        SimulateCmd::Exit(args) => {
            forbid_flag(args.tol.is_some(), "tol", "exit")?;
            forbid_flag(args.t.is_some(), "t", "exit")?;
            let cfg = resolve_simulate(args)?;
            let sys = parse_system(&cfg.system)?;
            let d = sys.dimension();
            let m = sys.effective_dimension();
            let domain = resolve_domain(&cfg, d)?;
            let x0 = resolve_x0(&cfg, &domain, d)?;
            let study = simulate_exit(&sys, &domain, &x0, &sim_config(&cfg))?;
            let closed_form = closed_form_mean_exit(&domain, &x0, m);
            if let Some(path) = &cfg.csv {
                exit_samples_csv(path, &study, d)?;
            }
            print_json(&json!({
                "command": "simulate",
                "mode": "exit",
                "config": &cfg,
                "config_hash": config_hash(&cfg)?,
                "units": { "tau": "process time", "exit_point": "Euclidean coordinates" },
                "system": { "d": d, "m": m },
                "n_paths": cfg.paths,
                "mean_exit_time": study.mean_exit_time,
                "stderr_exit_time": study.stderr_exit_time,
                "closed_form_mean": closed_form,
                "mean_jumps": study.mean_jumps,
                "capped_fraction": study.capped_fraction,
                "jump_norm_violations": study.jump_norm_violations,
            }))?;
            Ok(0)
        }
        SimulateCmd::Support(args) => {
            forbid_flag(args.t.is_some(), "t", "support")?;
            let cfg = resolve_simulate(args)?;
            let sys = parse_system(&cfg.system)?;
            let d = sys.dimension();
            let domain = resolve_domain(&cfg, d)?;
            let x0 = resolve_x0(&cfg, &domain, d)?;
            let (study, report) = support_check(&sys, &domain, &x0, &sim_config(&cfg), cfg.tol)?;
            if let Some(path) = &cfg.csv {
                exit_samples_csv(path, &study, d)?;
            }
            print_json(&json!({
                "command": "simulate",
                "mode": "support",
                "config": &cfg,
                "config_hash": config_hash(&cfg)?,
                "units": {
                    "distance": "Euclidean distance to the reflected closure",
                    "tau": "process time"
                },
                "system": { "d": d, "m": sys.effective_dimension() },
                "n_paths": cfg.paths,
                "mean_exit_time": study.mean_exit_time,
                "capped_fraction": study.capped_fraction,
                "support": report,
            }))?;
            Ok(0)
        }
        SimulateCmd::RadialLaw(args) => {
            forbid_flag(args.domain.is_some(), "domain", "radial-law")?;
            forbid_flag(args.ball.is_some(), "ball", "radial-law")?;
            forbid_flag(args.x0.is_some(), "x0", "radial-law")?;
            forbid_flag(args.tol.is_some(), "tol", "radial-law")?;
            forbid_flag(args.csv.is_some(), "csv", "radial-law")?;
            let cfg = resolve_simulate(args)?;
            let sys = parse_system(&cfg.system)?;
            let report = radial_law_check(&sys, cfg.t, &sim_config(&cfg))?;
            print_json(&json!({
                "command": "simulate",
                "mode": "radial-law",
                "config": &cfg,
                "config_hash": config_hash(&cfg)?,
                "units": {
                    "statistic": "Kolmogorov-Smirnov distance of |X_t|^2/(4t) from Gamma(m/2, 1)"
                },
                "report": report,
            }))?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let full = args.full;
    let cfg = json!({ "full": full });
    let results = run_suite(full, &mut |r: &CheckResult| {
        emit_line(&format!(
            "{} {} -- {}",
            if r.passed { "pass" } else { "FAIL" },
            r.name,
            r.detail
        ));
    });
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    print_json(&json!({
        "command": "verify",
        "config": &cfg,
        "config_hash": config_hash(&cfg)?,
        "units": { "detail": "per-check numeric summary; tolerances live in the library" },
        "tier": if full { "full" } else { "quick" },
        "total": results.len(),
        "passed": results.len() - failed.len(),
        "failed": failed.len(),
        "failed_names": failed,
    }))?;
    if !failed.is_empty() {
        eprintln!("violated invariants: {}", failed.join(", "));
        return Err(Error::VerificationFailed {
            failed: failed.len(),
            total: results.len(),
        });
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_hash_matches_reference_vectors() {
        // Standard FNV-1a 64 test vectors.
        assert_eq!(fnv1a_64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a_64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a_64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn config_hash_is_stable_across_reserialization() {
        let cfg = KoConfig {
            phi: "power:1,2".into(),
            a: vec![0.5, 1.0],
            csv: None,
        };
        let h1 = config_hash(&cfg).unwrap();
        let round: KoConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(h1, config_hash(&round).unwrap());
        assert_eq!(h1.len(), 16);
    }

    #[test]
    fn system_grammar_covers_the_families() {
        assert_eq!(parse_system("a1:1").unwrap().dimension(), 1);
        let s = parse_system("a1xa1:0.75").unwrap();
        assert_eq!(s.dimension(), 2);
        assert!((s.effective_dimension() - 5.0).abs() < 1e-12);
        let s = parse_system("a1xa1:0.5,0").unwrap();
        assert!((s.effective_dimension() - 3.0).abs() < 1e-12);
        assert_eq!(parse_system("a1xa1xa1:0.5").unwrap().dimension(), 3);
        assert_eq!(parse_system("dihedral:3,1").unwrap().positive_roots().len(), 3);
        assert_eq!(parse_system("b2:0.5,0.75").unwrap().positive_roots().len(), 4);
        assert!(parse_system("e8:1").is_err());
        assert!(parse_system("a1").is_err());
        assert!(parse_system("a1xa1:1,2,3").is_err());
    }

    #[test]
    fn system_file_round_trips() {
        let dir = std::env::temp_dir().join("dunkl_lab_cli_test_system");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sys.json");
        std::fs::write(
            &path,
            r#"{"family":"custom","d":2,"roots":[[1.4142135623730951,0.0]],"k":[0.75]}"#,
        )
        .unwrap();
        let sys = parse_system(path.to_str().unwrap()).unwrap();
        assert_eq!(sys.dimension(), 2);
        assert!((sys.effective_dimension() - 3.5).abs() < 1e-12);
        // Unknown fields are rejected.
        std::fs::write(&path, r#"{"family":"a1_product","k":[1.0],"extra":3}"#).unwrap();
        assert!(parse_system(path.to_str().unwrap()).is_err());
    }

    #[test]
    fn domain_grammar_covers_the_shapes() {
        assert!(matches!(
            parse_domain("ball:1", 2).unwrap(),
            Domain::CenteredBall { .. }
        ));
        match parse_domain("offset_ball:0.6,0.5,0.35", 2).unwrap() {
            Domain::OffsetBall { center, radius } => {
                assert_eq!(center, vec![0.6, 0.5]);
                assert!((radius - 0.35).abs() < 1e-15);
            }
            other => panic!("wrong domain {other:?}"),
        }
        match parse_domain("half_ball:1", 2).unwrap() {
            Domain::HalfBall { axis, .. } => assert_eq!(axis, 1),
            other => panic!("wrong domain {other:?}"),
        }
        match parse_domain("half_ball:1,0", 2).unwrap() {
            Domain::HalfBall { axis, .. } => assert_eq!(axis, 0),
            other => panic!("wrong domain {other:?}"),
        }
        assert!(parse_domain("offset_ball:0.5,1", 2).is_err());
        assert!(parse_domain("cube:1", 2).is_err());
    }

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(exit_code_for(&Error::InvalidInput("x".into())), 2);
        assert_eq!(exit_code_for(&Error::KOHoldsNoBlowup), 3);
        assert_eq!(
            exit_code_for(&Error::VerificationFailed { failed: 1, total: 9 }),
            4
        );
        assert_eq!(
            exit_code_for(&Error::NoConvergence {
                residual: 1.0,
                iters: 3,
                tol: 0.1
            }),
            4
        );
        assert_eq!(exit_code_for(&Error::ZeroRadius), 2);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = std::env::temp_dir().join("dunkl_lab_cli_test_cfg");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ko.json");
        std::fs::write(&path, r#"{"phi":"linear:1","a":[2.0]}"#).unwrap();
        let cfg = resolve_ko(KoArgs {
            phi: Some("power:1,2".into()),
            a: None,
            csv: None,
            config: Some(path.clone()),
        })
        .unwrap();
        assert_eq!(cfg.phi, "power:1,2");
        assert_eq!(cfg.a, vec![2.0]);
        // Unknown config fields are rejected.
        std::fs::write(&path, r#"{"phi":"linear:1","zzz":1}"#).unwrap();
        assert!(resolve_ko(KoArgs {
            phi: None,
            a: None,
            csv: None,
            config: Some(path),
        })
        .is_err());
    }

    #[test]
    fn csv_fields_are_escaped_when_needed() {
        assert_eq!(csv_field("1.25"), "1.25");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn classification_strings_are_fixed() {
        assert_eq!(classification_str(EntireSolutions::Exist), "KO_holds");
        assert_eq!(classification_str(EntireSolutions::DoNotExist), "KO_fails");
    }
}
