//! Command-line front end: machine-readable reports over the library's operations.
//!
//! Every report embeds the exact configuration used plus the library version, and
//! contains nothing run-dependent (no timestamps, no host data), so identical
//! invocations produce identical bytes. Exit codes: 0 success, 1 invariant
//! failure, 2 usage error, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use wehrl::combinatorics::{a_const, c_tilde_sq_by_degree, Params};
use wehrl::geometry::distance_to_v;
use wehrl::hessian::HessianCoefficients;
use wehrl::measure::{entropy_g, sup_g, QuadratureScheme};
use wehrl::phi::parse_phi_spec;
use wehrl::stability::{stability_scan, Sampler};
use wehrl::state_space::PolynomialState;
use wehrl::verify::{run_verification, VerifyLevel};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wehrl",
    version,
    about = "Numerical laboratory for Wehrl-type entropy of SU(N+1) coherent states"
)]
struct Cli {
    /// Worker threads (default: all cores); results are thread-count invariant.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis layout and normalization tables for (N, M).
    Info(InfoArgs),
    /// Run the library's named invariant suites.
    Verify(VerifyArgs),
    /// Entropy G(X) of a state read from a file.
    Entropy(EntropyArgs),
    /// Distance from a state (read from a file) to the coherent manifold.
    Distance(DistanceArgs),
    /// Closed-form second-derivative coefficients by degree.
    Hessian(HessianArgs),
    /// Deficit/distance scan over sampled states.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long = "M")]
    m: u32,
    /// quick (closed forms only) or full (adds Monte Carlo cross-checks).
    #[arg(long, default_value = "quick")]
    level: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// State file (JSON with N, M, coeffs).
    #[arg(long)]
    state: PathBuf,
    /// Convex function spec: pow:<p>, xlogx, hinge:<T>, affcont:<a>,<b>,<inner>,
    /// mollify:<eta>,<inner>.
    #[arg(long, default_value = "pow:2")]
    phi: String,
    /// Quadrature spec mc:<n>:<seed> or tensor:<radial>:<angular>
    /// (default: tensor for N = 1, mc:1000000:<seed> otherwise).
    #[arg(long)]
    scheme: Option<String>,
    /// Seed for the default Monte Carlo scheme.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    /// State file (JSON with N, M, coeffs).
    #[arg(long)]
    state: PathBuf,
    /// Random ascent starts added after the heuristic one.
    #[arg(long, default_value_t = 16)]
    starts: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HessianArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value = "pow:2")]
    phi: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value = "pow:2")]
    phi: String,
    /// uniform, nearv:<t_max>, or coherent.
    #[arg(long, default_value = "uniform")]
    sampler: String,
    /// Number of sampled states.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    starts: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        // Ignore the error if a global pool already exists (e.g. repeated calls in
        // one process during tests); results do not depend on the pool size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Error wrapper distinguishing usage problems from I/O problems.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(msg) | Self::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Io(_) => EXIT_IO,
        }
    }
}

impl From<wehrl::Error> for CliError {
    fn from(e: wehrl::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Info(a) => cmd_info(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Distance(a) => cmd_distance(a),
        Command::Hessian(a) => cmd_hessian(a),
        Command::Scan(a) => cmd_scan(a),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}

fn read_state(path: &Path) -> Result<PolynomialState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let (state, norm_deviation) = PolynomialState::from_json(&text)?;
    if norm_deviation > 1e-6 {
        eprintln!(
            "warning: coefficients renormalized (norm deviated from 1 by {norm_deviation:.3e})"
        );
    }
    Ok(state)
}

fn resolve_scheme(
    spec: &Option<String>,
    params: &Params,
    seed: u64,
) -> Result<QuadratureScheme, CliError> {
    match spec {
        Some(s) => Ok(QuadratureScheme::parse(s)?),
        None if params.n() == 1 => Ok(QuadratureScheme::tensor_default(params.m())),
        None => Ok(QuadratureScheme::MonteCarlo { n: 1_000_000, seed }),
    }
}

/// Wrap a payload with the config echo and library version.
fn report<C: Serialize, P: Serialize>(command: &str, config: &C, payload: &P) -> String {
    let value = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "result": payload,
    });
    serde_json::to_string_pretty(&value).expect("reports are serializable")
}

fn cmd_info(a: InfoArgs) -> Result<ExitCode, CliError> {
    let params = Params::new(a.n, a.m)?;
    let (n, m) = (a.n, a.m);
    let degrees: Vec<u32> = (0..=m).collect();
    let a_table: Vec<f64> = degrees
        .iter()
        .map(|&k| a_const(m, n, k))
        .collect::<Result<_, _>>()?;
    let c_table: Vec<f64> = degrees
        .iter()
        .map(|&k| c_tilde_sq_by_degree(k, m, n))
        .collect::<Result<_, _>>()?;
    let text = match a.format {
        Format::Text => {
            let mut out = format!("N = {n}, M = {m}, d = {}\n", params.dim());
            out.push_str("index order (graded lexicographic):\n");
            for (i, alpha) in params.indices().iter().enumerate() {
                out.push_str(&format!("  {i:4}  {alpha}\n"));
            }
            out.push_str("degree   A_K                     c̃²_K\n");
            for &k in &degrees {
                out.push_str(&format!(
                    "  {k:4}   {:<22}  {}\n",
                    a_table[k as usize], c_table[k as usize]
                ));
            }
            out.trim_end().to_string()
        }
        Format::Json => {
            let config = json!({"N": n, "M": m});
            let payload = json!({
                "d": params.dim(),
                "index_order": params.indices().iter().map(|x| x.components().to_vec()).collect::<Vec<_>>(),
                "a_by_degree": a_table,
                "c_tilde_sq_by_degree": c_table,
            });
            report("info", &config, &payload)
        }
        Format::Csv => {
            return Err(CliError::Usage(
                "info supports --format text or json".into(),
            ))
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode, CliError> {
    let params = Params::new(a.n, a.m)?;
    let level = VerifyLevel::parse(&a.level)?;
    let rep = run_verification(&params, level)?;
    let config = json!({"N": a.n, "M": a.m, "level": level.as_str()});
    emit(&report("verify", &config, &rep), a.out.as_deref())?;
    Ok(if rep.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn cmd_entropy(a: EntropyArgs) -> Result<ExitCode, CliError> {
    let phi = parse_phi_spec(&a.phi)?;
    let state = read_state(&a.state)?;
    let scheme = resolve_scheme(&a.scheme, state.params(), a.seed)?;
    let (value, error) = entropy_g(&state, &phi, scheme)?;
    let (sup, sup_err) = sup_g(state.params(), &phi);
    let config = json!({
        "state": a.state.display().to_string(),
        "N": state.params().n(),
        "M": state.params().m(),
        "phi": phi.id(),
        "scheme": scheme.spec_string(),
    });
    let payload = json!({
        "value": value,
        "error": error,
        "sup_g": sup,
        "sup_g_error": sup_err,
        "deficit": sup - value,
    });
    emit(&report("entropy", &config, &payload), a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_distance(a: DistanceArgs) -> Result<ExitCode, CliError> {
    let state = read_state(&a.state)?;
    let r = distance_to_v(&state, a.starts, a.seed)?;
    let config = json!({
        "state": a.state.display().to_string(),
        "N": state.params().n(),
        "M": state.params().m(),
        "starts": a.starts,
        "seed": a.seed,
    });
    let payload = json!({
        "t_sup": r.t_sup,
        "d_euclid": r.d_euclid,
        "dist_geodesic": r.dist_geodesic,
        "argmax_v": r.argmax_v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "n_starts_used": r.n_starts_used,
        "converged": r.converged,
    });
    emit(&report("distance", &config, &payload), a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_hessian(a: HessianArgs) -> Result<ExitCode, CliError> {
    let params = Params::new(a.n, a.m)?;
    let phi = parse_phi_spec(&a.phi)?;
    let coeffs = HessianCoefficients::compute(&params, &phi)?;
    let mut by_degree = serde_json::Map::new();
    let mut errors = serde_json::Map::new();
    for k in 1..=a.m {
        let (b, err) = coeffs.by_degree(k)?;
        by_degree.insert(k.to_string(), json!(b));
        errors.insert(k.to_string(), json!(err));
    }
    let config = json!({"N": a.n, "M": a.m, "phi": phi.id()});
    let payload = json!({
        "by_degree": by_degree,
        "quadrature_error_by_degree": errors,
        "phi": phi.id(),
    });
    emit(&report("hessian", &config, &payload), a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(a: ScanArgs) -> Result<ExitCode, CliError> {
    let params = Params::new(a.n, a.m)?;
    let phi = parse_phi_spec(&a.phi)?;
    let sampler = Sampler::parse(&a.sampler)?;
    let scheme = resolve_scheme(&a.scheme, &params, a.seed.wrapping_add(1))?;
    let rep = stability_scan(&params, &phi, a.samples, sampler, scheme, a.starts, a.seed)?;
    let text = match a.format {
        Format::Json => {
            let config = json!({
                "N": a.n,
                "M": a.m,
                "phi": phi.id(),
                "sampler": rep.sampler,
                "scheme": rep.scheme,
                "samples": a.samples,
                "starts": a.starts,
                "seed": a.seed,
            });
            report("scan", &config, &rep)
        }
        Format::Csv => rep.to_csv().trim_end().to_string(),
        Format::Text => {
            return Err(CliError::Usage("scan supports --format json or csv".into()))
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}
