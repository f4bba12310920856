use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hens_core::io::{parse_instance, run_pipeline, Format, RunConfig, Stage};
use hens_core::milp::{count_configurations, ModelScope, ObjectiveScope};
use hens_core::symmetry::{KeyMatch, DEFAULT_ELEMENT_BOUND};
use hens_core::{Rational, Scalar};

#[derive(Parser)]
#[command(name = "hens", version, about = "Minimum-matches heat exchanger network synthesis with symmetry analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One optimal match network per block.
    Solve(RunArgs),
    /// All optimal match patterns up to the cap.
    Enumerate(RunArgs),
    /// Optima plus classes, group, action checks and orbits.
    Symmetry(RunArgs),
    /// Every stage.
    Pipeline(RunArgs),
    /// Number of match configurations, n^m.
    CountConfigs {
        /// Hot streams.
        n: u32,
        /// Cold streams.
        m: u32,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FixedInterval,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    ProcessPairs,
    AllPairs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file, `-` for standard input.
    input: String,
    #[arg(long, value_enum, default_value_t = ModeArg::FixedInterval)]
    mode: ModeArg,
    /// Matches counted by the objective; defaults by mode.
    #[arg(long, value_enum)]
    objective_scope: Option<ScopeArg>,
    /// Minimum approach temperature in K; overrides the instance.
    #[arg(long)]
    dt_min: Option<String>,
    #[arg(long, default_value_t = 1000)]
    cap: usize,
    /// Re-solve with symmetry-breaking rows.
    #[arg(long)]
    sbc: bool,
    /// Relative key matching for imported floating-point data.
    #[arg(long)]
    epsilon: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    node_limit: usize,
    /// Largest group listed element by element.
    #[arg(long, default_value_t = DEFAULT_ELEMENT_BOUND)]
    element_bound: u64,
    /// Write every block's LP in tableau form to this file.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("hens: {message}");
    ExitCode::from(code)
}

fn run(args: RunArgs, stop_after: Stage) -> ExitCode {
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(1, format!("cannot read {}: {e}", args.input)),
    };
    let instance = match parse_instance::<Rational>(&text) {
        Ok(i) => i,
        Err(e) => return fail(3, e),
    };
    let dt_min = match args.dt_min.as_deref().map(Rational::parse_decimal) {
        None => None,
        Some(Some(v)) => Some(v),
        Some(None) => return fail(3, "--dt-min is not a number"),
    };
    let config = RunConfig {
        mode: match args.mode {
            ModeArg::FixedInterval => ModelScope::FixedInterval,
            ModeArg::Full => ModelScope::Full,
        },
        objective_scope: args.objective_scope.map(|s| match s {
            ScopeArg::ProcessPairs => ObjectiveScope::ProcessPairs,
            ScopeArg::AllPairs => ObjectiveScope::AllPairs,
        }),
        dt_min,
        cap: args.cap,
        sbc: args.sbc,
        key_match: if args.epsilon { KeyMatch::Relative } else { KeyMatch::Exact },
        format: match args.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        seed: args.seed,
        node_limit: args.node_limit,
        element_bound: args.element_bound,
        stop_after,
    };
    let run = match run_pipeline(&instance, &config) {
        Ok(r) => r,
        Err(e) => return fail(e.exit_code() as u8, e),
    };
    if let Some(path) = &args.dump_lp {
        let dump: String = run.models.iter().map(|(name, m)| format!("# block {name}\n{}", m.lp)).collect();
        if let Err(e) = fs::write(path, dump) {
            return fail(1, format!("cannot write {}: {e}", path.display()));
        }
    }
    let out = match config.format {
        Format::Text => run.report.to_text(),
        Format::Json => run.report.to_json() + "\n",
    };
    match write_output(args.output.as_ref(), &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(1, format!("cannot write report: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Solve(a) => run(a, Stage::Solve),
        Command::Enumerate(a) => run(a, Stage::Enumerate),
        Command::Symmetry(a) => run(a, Stage::Symmetry),
        Command::Pipeline(a) => run(a, Stage::Full),
        Command::CountConfigs { n, m, format } => match count_configurations(n, m) {
            Ok(count) => {
                let out = match format {
                    FormatArg::Text => format!("{n}^{m} = {count}\n"),
                    FormatArg::Json => format!("{}\n", serde_json::json!({ "n": n, "m": m, "count": count.to_string() })),
                };
                print!("{out}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(3, e),
        },
    }
}
