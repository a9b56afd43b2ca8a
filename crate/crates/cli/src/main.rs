use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use floatfloat::fpmodel::Backend;
use floatfloat::harness::accuracy::{run_accuracy, AccuracyOp};
use floatfloat::harness::bench::{run_bench, BenchOp, DEFAULT_SIZES};
use floatfloat::harness::report::{render, OutputFormat, Render};
use floatfloat::harness::sampling::{DEFAULT_SEED, SEED_ENV};
use floatfloat::harness::selftest::run_selftest;
use floatfloat::probe::probe_report;
use floatfloat::{native_backend, sim_backend, Error, FpFormat};

/// Float-float arithmetic: accuracy, rounding probes, benchmarks and self-test.
#[derive(Debug, Parser)]
#[command(name = "floatfloat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Arithmetic to run on.
    #[arg(long, value_enum, default_value_t = BackendKind::Native, global = true)]
    backend: BackendKind,

    /// Simulator format, e.g. `p=24,emin=-126,emax=127,round=rz,guard=1,ftz=1`
    /// or `preset=ati-24`. Implies `--backend sim`.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Samples per operation (probe, accuracy, selftest).
    #[arg(long, default_value_t = 1 << 20, global = true)]
    samples: u64,

    /// 64-bit seed, decimal or 0x-prefixed hex.
    #[arg(long, env = SEED_ENV, value_parser = parse_seed, global = true)]
    seed: Option<u64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Machine-readable JSON report.
    #[arg(long, global = true, conflicts_with_all = ["csv", "text"])]
    json: bool,
    /// CSV report, one row per record.
    #[arg(long, global = true, conflicts_with = "text")]
    csv: bool,
    /// Plain text report (default).
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Native,
    Sim,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure the ulp error interval of + - * / on the backend.
    Probe,
    /// Measure the maximum error of one operator against the exact oracle.
    Accuracy {
        #[arg(long, value_parser = parse_op::<AccuracyOp>)]
        op: AccuracyOp,
    },
    /// Time the operators on host f32, normalized to addition.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_op::<BenchOp>,
              default_values_t = BenchOp::ALL)]
        ops: Vec<BenchOp>,
    },
    /// Check every invariant; exits 1 on any violation the backend must not show.
    Selftest,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_op<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Outcome {
    Pass(String),
    Violation(String),
}

fn output_format(cli: &Cli) -> OutputFormat {
    if cli.json {
        OutputFormat::Json
    } else if cli.csv {
        OutputFormat::Csv
    } else {
        OutputFormat::Text
    }
}

fn finish<R: Render>(report: &R, ok: bool, cli: &Cli) -> Result<Outcome, Error> {
    let text = render(report, output_format(cli))?;
    Ok(if ok {
        Outcome::Pass(text)
    } else {
        Outcome::Violation(text)
    })
}

fn run_on<B: Backend>(backend: &B, cli: &Cli, seed: u64) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Probe => finish(&probe_report(backend, cli.samples, seed)?, true, cli),
        Command::Accuracy { op } => {
            let r = run_accuracy(*op, backend, cli.samples, seed)?;
            finish(&r, r.passed(), cli)
        }
        Command::Selftest => {
            let r = run_selftest(backend, cli.samples, seed)?;
            finish(&r, r.passed(), cli)
        }
        Command::Bench { sizes, reps, ops } => {
            if backend.name() != "native" {
                return Err(Error::InvalidArgument(
                    "bench runs on the native backend only".into(),
                ));
            }
            finish(&run_bench(ops, sizes, *reps, seed)?, true, cli)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let sim = cli.backend == BackendKind::Sim || cli.format.is_some();
    if sim {
        let format = match &cli.format {
            Some(s) => s.parse::<FpFormat>()?,
            None => FpFormat::binary32(),
        };
        run_on(&sim_backend(format), cli, seed)
    } else {
        run_on(&native_backend(), cli, seed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (text, code) = match outcome {
        Outcome::Pass(t) => (t, ExitCode::SUCCESS),
        Outcome::Violation(t) => (t, ExitCode::from(1)),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    code
}
