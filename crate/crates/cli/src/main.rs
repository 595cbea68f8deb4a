//! `apntri`: batch reports over the trivariate families.
//!
//! Exit codes: 0 when every check passes, 1 on a mathematical mismatch,
//! 2 on a usage or configuration error, 3 when a budget or size cap stops
//! the computation.

mod commands;
mod output;

use std::process::ExitCode;

use apntri::{CtxOptions, Family, FieldCtx};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "apntri", version, about = "Permutation and APN checks for trivariate quadratic maps over GF(2^m)")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "APNTRI_THREADS")]
    threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    output: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root counts, permutation/APN status and diagonal flag for every a.
    Scan(ScanArgs),
    /// Timed permutation/APN status for selected a.
    Check(ScanArgs),
    /// Good-parameter counts.
    Table1(Table1Args),
    /// Permutation counts and correlation with the univariate criterion.
    Table2(Table2Args),
    /// Fiber statistics of the parameter map and the lower bound.
    Curve(FieldArgs),
    /// Companion-matrix singularity test, cross-checked against roots.
    Matrix(MatrixArgs),
    /// Equivalence searches.
    #[command(subcommand)]
    Equiv(EquivCommand),
}

#[derive(Subcommand, Debug)]
enum EquivCommand {
    /// Diagonal equivalence of F_a with F_1 within one family.
    Diag(DiagArgs),
    /// Monomial equivalence search between G_a and H_b.
    Cross(CrossArgs),
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    i: u32,
    /// Irreducible modulus in hex, including the x^m bit.
    #[arg(long, value_parser = parse_hex_u32)]
    modulus: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct ScanArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    family: FamilyArg,
    /// Restrict to these parameters (hex, comma separated or repeated).
    #[arg(long = "a", value_delimiter = ',')]
    a: Vec<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Args, Debug, Clone)]
struct Table1Args {
    /// Single row for this m (requires --i); default rows otherwise.
    #[arg(long, requires = "i")]
    m: Option<u32>,
    #[arg(long, requires = "m")]
    i: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct Table2Args {
    #[arg(long, requires = "i")]
    m: Option<u32>,
    #[arg(long, requires = "m")]
    i: Option<u32>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    family: FamilyArg,
    /// `auto` uses the image permutation test with the kernel APN test.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Args, Debug, Clone)]
struct MatrixArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long = "a", value_delimiter = ',')]
    a: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct DiagArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long = "a")]
    a: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::G)]
    family: FamilyArg,
}

#[derive(Args, Debug, Clone)]
struct CrossArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long = "a")]
    a: String,
    #[arg(long = "b")]
    b: String,
    /// Maximum number of inner maps to examine.
    #[arg(long, default_value_t = u64::MAX)]
    budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyArg {
    G,
    H,
    Both,
}

impl FamilyArg {
    fn families(self) -> &'static [Family] {
        match self {
            FamilyArg::G => &[Family::G],
            FamilyArg::H => &[Family::H],
            FamilyArg::Both => &Family::BOTH,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Auto,
    Kernel,
    Exhaustive,
    Image,
}

impl From<MethodArg> for apntri::checkers::Method {
    fn from(m: MethodArg) -> Self {
        use apntri::checkers::Method;
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Kernel => Method::Kernel,
            MethodArg::Exhaustive => Method::Exhaustive,
            MethodArg::Image => Method::Image,
        }
    }
}

fn parse_hex_u32(s: &str) -> Result<u32, String> {
    let t = s.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u32::from_str_radix(digits, 16).map_err(|e| format!("invalid hex {s:?}: {e}"))
}

/// Failure classes, one per non-zero exit code.
#[derive(Debug)]
enum Failure {
    Mismatch(String),
    Usage(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Mismatch(s) | Failure::Usage(s) | Failure::Budget(s) => s,
        }
    }
}

impl From<apntri::Error> for Failure {
    fn from(e: apntri::Error) -> Self {
        match e {
            apntri::Error::FieldTooLarge { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Theorem-mode field context.
fn field(args: &FieldArgs) -> Result<FieldCtx, Failure> {
    let ctx = FieldCtx::with_options(
        args.m,
        args.i,
        CtxOptions {
            modulus: args.modulus,
            theorem_mode: true,
        },
    )?;
    ctx.ensure_theorem_field()?;
    Ok(ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let fmt = cli.output;
    let result = match cli.command {
        Command::Scan(a) => commands::scan(&a, fmt),
        Command::Check(a) => commands::check(&a, fmt),
        Command::Table1(a) => commands::table1(&a, fmt),
        Command::Table2(a) => commands::table2(&a, fmt),
        Command::Curve(a) => commands::curve(&a, fmt),
        Command::Matrix(a) => commands::matrix(&a, fmt),
        Command::Equiv(EquivCommand::Diag(a)) => commands::diag(&a, fmt),
        Command::Equiv(EquivCommand::Cross(a)) => commands::cross(&a, fmt),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}: {}", if f.code() == 1 { "mismatch" } else { "error" }, f.message());
            ExitCode::from(f.code())
        }
    }
}
