use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use minksum_cli::bench::{run_bench, BenchArgs};
use minksum_cli::{run_problem, run_sequence_file, CliError, EngineKind, Mode, Options, ProblemFile, QueryKind, SequenceQuery};

/// Selection, ranking and finding over constrained Minkowski sums.
#[derive(Parser)]
#[command(name = "minksum", version)]
struct Cli {
    #[arg(long, value_enum, global = true)]
    engine: Option<EngineKind>,
    /// Seed for the randomized engine.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Boundary tolerance in float mode.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Number mode; detected from the input when absent.
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-th largest feasible objective value.
    Select {
        /// Problem file, or `-` for standard input.
        problem: PathBuf,
        #[arg(long)]
        k: Option<u64>,
    },
    /// Number of feasible values strictly above t, plus one.
    Rank {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Feasible value closest to delta.
    Find {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
    },
    /// k-th largest sum over segments with length in [l, u].
    Lcss {
        sequence: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        k: u64,
    },
    /// k-th largest sum over all segments.
    SumSelect {
        sequence: PathBuf,
        #[arg(long)]
        k: u64,
    },
    /// Segment with total width in [l, u] whose density is closest to delta.
    Density {
        sequence: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
    },
    /// Timing table over doubling input sizes, as CSV.
    Bench(BenchArgs),
}

fn execute(cli: Cli) -> Result<Option<String>, CliError> {
    let opts = Options { engine: cli.engine, seed: cli.seed, epsilon: cli.epsilon, mode: cli.mode };
    let problem = |path: &PathBuf, kind, value: Option<String>| {
        let file = ProblemFile::load(path)?;
        run_problem(&file, kind, value.as_deref(), &opts).map(|r| Some(r.to_json()))
    };
    let sequence = |path: &PathBuf, q: SequenceQuery| run_sequence_file(path, &q, &opts).map(|r| Some(r.to_json()));
    match cli.command {
        Command::Select { problem: p, k } => problem(&p, QueryKind::Select, k.map(|k| k.to_string())),
        Command::Rank { problem: p, t } => problem(&p, QueryKind::Rank, t),
        Command::Find { problem: p, delta } => problem(&p, QueryKind::Find, delta),
        Command::Lcss { sequence: s, l, u, k } => sequence(&s, SequenceQuery::Lcss { l, u, k }),
        Command::SumSelect { sequence: s, k } => sequence(&s, SequenceQuery::SumSelect { k }),
        Command::Density { sequence: s, l, u, delta } => sequence(&s, SequenceQuery::Density { l, u, delta }),
        Command::Bench(args) => {
            if cli.engine.is_some_and(|e| e != EngineKind::Auto) {
                return Err(CliError::Schema("bench takes --engines, not --engine".into()));
            }
            run_bench(&args).map(|_| None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match panic::catch_unwind(|| execute(cli)) {
        Ok(Ok(line)) => {
            if let Some(line) = line {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(5),
    }
}
