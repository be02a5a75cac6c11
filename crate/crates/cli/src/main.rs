/// `println!` that stops quietly when stdout is closed.
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

mod commands;
mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "trxy", version, about = "Exact topological recursion and x-y duality workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in spectral curves.
    ListCurves(OutArgs),
    /// Compute one correlator as a jet (and as a pole tensor for `--method tr`).
    Compute(ComputeArgs),
    /// Extract an enumerative invariant.
    Extract(ExtractArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub out: OutFormat,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Preset name (see `list-curves`).
    #[arg(long, conflicts_with = "curve_file")]
    pub curve: Option<String>,
    /// Preset parameter `k=v` with rational `v`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Custom curve in TOML or JSON.
    #[arg(long)]
    pub curve_file: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub g: usize,
    #[arg(long)]
    pub n: usize,
    /// tr, xy-cycles, xy-graphs or xy-general.
    #[arg(long, default_value = "tr")]
    pub method: String,
    #[arg(long, default_value_t = 4)]
    pub jet_order: usize,
    /// Comma-separated rationals, one per point.
    #[arg(long)]
    pub base_points: Option<String>,
    /// Offsets the default base points reproducibly.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Invariant {
    Psi,
    Rspin,
    HodgeLinear,
    TripleHodge,
    GwP1,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long, value_enum)]
    pub invariant: Invariant,
    #[arg(long)]
    pub g: usize,
    /// psi powers or Hodge indices, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// r-spin labels, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<usize>,
    /// Descendant powers of the point class on the projective line.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<usize>,
    #[arg(long)]
    pub r: Option<i64>,
    /// Framing, rational.
    #[arg(long)]
    pub f: Option<String>,
    /// Contour order for gw-p1, innermost first (1-based).
    #[arg(long, value_delimiter = ',')]
    pub contour: Vec<usize>,
    /// tr or xy-cycles; the default depends on the invariant.
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// gamma, dilog, airy, rspin, lambert, vertex, p1, cauchy, oracle or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Largest genus; each suite has its own default.
    #[arg(long)]
    pub gmax: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Jet order for correlator comparisons.
    #[arg(long, default_value_t = 2)]
    pub jet_order: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Failure of a command before any check ran.
#[derive(Debug)]
pub enum Failure {
    Core(trxy::Error),
    Usage(String),
}

impl From<trxy::Error> for Failure {
    fn from(e: trxy::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn to_json(&self) -> serde_json::Value {
        let (code, message) = match self {
            Failure::Core(e) => (e.code(), e.to_string()),
            Failure::Usage(m) => ("usage", m.clone()),
        };
        serde_json::json!({ "error": { "code": code, "message": message } })
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("TRXY_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| Failure::Usage(format!("TRXY_THREADS must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(Failure::Usage("TRXY_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    match cli.command {
        Command::ListCurves(a) => commands::list_curves(a.out).map(|_| true),
        Command::Compute(a) => commands::compute(&a).map(|_| true),
        Command::Extract(a) => commands::extract(&a).map(|_| true),
        Command::Verify(a) => suites::verify(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", Failure::Usage(e.render().to_string().trim().to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(2)
        }
    }
}
