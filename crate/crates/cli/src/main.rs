//! `equimap`: JSON reports for building, decomposing and testing unitarily
//! equivariant maps.

mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use equimap::Error;
use serde::Serialize;

/// Seed used when `--seed` is not given; always echoed in the report.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "equimap", version, about = "Unitarily equivariant maps: synthesis, positivity and entanglement detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the permutation basis of (a,b)-equivariant maps with wiring diagrams.
    Basis(BasisArgs),
    /// Synthesize a Choi matrix from permutation coefficients.
    Build(BuildArgs),
    /// Recover permutation coefficients from a Choi matrix.
    Decompose(DecomposeArgs),
    /// Test (a,b)-equivariance of a Choi matrix against Haar unitaries.
    Equiv(EquivArgs),
    /// Decide k-positivity of an equivariant map by the block criterion.
    Kpos(KposArgs),
    /// k-positivity for every k and complete positivity.
    Profile(ProfileArgs),
    /// Search for a state witnessing failure of k-positivity.
    Falsify(FalsifyArgs),
    /// Apply i ⊗ φ to a state and report the minimum eigenvalue.
    Detect(DetectArgs),
    /// Certify a Schmidt-number bound with a t-positive map.
    Sn(SnArgs),
    /// Detection curve of a sampled family of rotated copies of a map.
    Family(FamilyArgs),
    /// Positivity regions of the collins family over an (alpha, beta) grid.
    Scan(ScanArgs),
    /// Draw the wiring diagram of one basis element.
    Diagram(DiagramArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Args, Debug, Serialize)]
pub struct Signature {
    /// Input dimension.
    #[arg(long)]
    pub n: usize,
    /// Number of conjugated output legs.
    #[arg(long)]
    pub a: usize,
    /// Number of plain output legs.
    #[arg(long)]
    pub b: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct BasisArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Coefficient file `{"n","a","b","coeffs":[{"perm","re","im"}]}`.
    #[arg(long)]
    pub coeffs: String,
    /// Where to write the map; without it the map is embedded in the report.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecomposeArgs {
    /// Map file or bare matrix file.
    #[arg(long)]
    pub choi: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
}

#[derive(Args, Debug, Serialize)]
pub struct EquivArgs {
    /// Map file or bare matrix file.
    #[arg(long)]
    pub choi: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct KposArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = equimap::positivity::PSD_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = equimap::positivity::PSD_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FalsifyArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct DetectArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub map: String,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = equimap::detection::DETECT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SnArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub map: String,
    /// Positivity order of the map; a detection certifies Schmidt number ≥ t + 1.
    #[arg(long)]
    pub t: usize,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = equimap::detection::DETECT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long)]
    pub map: String,
    /// Number of sampled members.
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = equimap::detection::DETECT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// `collins` or `collins3`.
    #[arg(long, default_value = "collins")]
    pub map: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// `lo:hi:steps`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// `lo:hi:steps`.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    /// Weight of the two 3-cycles, used with `collins3`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, env = "EQUIMAP_TOL", default_value_t = equimap::positivity::PSD_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagramArgs {
    /// Cycle notation, e.g. "(1 2 3)"; "()" is the identity.
    #[arg(long)]
    pub pi: String,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub b: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub results: serde_json::Value,
    pub elapsed_ms: f64,
    pub seed: Option<u64>,
    pub version: &'static str,
}

/// What a subcommand produced: a JSON payload or human-readable text.
pub enum Output {
    Json { results: serde_json::Value, seed: Option<u64> },
    Text(String),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Parameter(_) | Error::Capacity(_) => 1,
        Error::Contract(_) | Error::Shape(_) => 2,
        Error::Numeric(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let (name, parameters) = commands::describe(&cli.command);
    match commands::run(&cli.command) {
        Ok(Output::Text(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(Output::Json { results, seed }) => {
            let report = RunReport {
                command: name,
                parameters,
                results,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                seed,
                version: env!("CARGO_PKG_VERSION"),
            };
            let mut out = std::io::stdout().lock();
            let _ = serde_json::to_writer_pretty(&mut out, &report);
            let _ = writeln!(out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
