//! `maci run` executes a `.mac` program under a scheduling policy;
//! `maci explore` enumerates its interleavings and checks the invariants.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mac_core::explore::Checks;
use mac_core::interp::Outcome;
use mac_core::{parse_program, ExploreOptions, Interpreter, Policy};

#[derive(Parser)]
#[command(name = "maci", version, about = "Interpreter for multi-threaded actor programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program to quiescence.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fifo")]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 1_000_000)]
        fuel: usize,
        /// Write one JSON object per step.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Explore every interleaving up to a depth.
    Explore {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Comma-separated: `theorem1` (lock disjointness), `order`.
        #[arg(long, value_delimiter = ',', default_value = "theorem1,order")]
        check: Vec<CheckArg>,
        #[arg(long)]
        max_states: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Fifo,
    Random,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CheckArg {
    #[value(alias = "locks")]
    Theorem1,
    Order,
}

fn load(path: &Path) -> Result<Interpreter, String> {
    let source = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let program = parse_program(&source).map_err(|e| e.render(&path.display().to_string()))?;
    Ok(Interpreter::new(&program))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Run { file, policy, seed, fuel, trace } => {
            let interp = load(&file)?;
            let policy = match policy {
                PolicyArg::Fifo => Policy::Fifo,
                PolicyArg::Random => Policy::Random(seed),
            };
            let result = interp.run(interp.initial_config(), policy, fuel);
            if let Some(path) = trace {
                let io = |e: std::io::Error| format!("{}: {e}", path.display());
                let mut out = BufWriter::new(File::create(&path).map_err(io)?);
                for label in &result.trace {
                    serde_json::to_writer(&mut out, label).map_err(|e| e.to_string())?;
                    out.write_all(b"\n").map_err(io)?;
                }
                out.flush().map_err(io)?;
            }
            println!("steps: {}", result.trace.len());
            if let Some(env) = result.config.main_env() {
                for var in env.keys() {
                    if let Some(v) = result.config.main_value(var) {
                        println!("{var} = {v}");
                    } else {
                        println!("{var} = <unresolved>");
                    }
                }
            }
            let code = match &result.outcome {
                Outcome::Quiescent => {
                    println!("outcome: quiescent");
                    ExitCode::SUCCESS
                }
                Outcome::FuelExhausted => {
                    println!("outcome: fuel exhausted");
                    ExitCode::from(3)
                }
                Outcome::Fault(msg) => {
                    println!("outcome: {msg}");
                    ExitCode::FAILURE
                }
                other => {
                    println!("outcome: {other:?}");
                    ExitCode::FAILURE
                }
            };
            Ok(code)
        }
        Command::Explore { file, depth, check, max_states } => {
            let interp = load(&file)?;
            let opts = ExploreOptions {
                depth,
                checks: Checks {
                    lock_disjointness: check.contains(&CheckArg::Theorem1),
                    dispatch_order: check.contains(&CheckArg::Order),
                },
                max_states,
            };
            let report = interp.explore_all(interp.initial_config(), &opts);
            println!("states: {}", report.states);
            println!("transitions: {}", report.transitions);
            println!("max depth: {}", report.max_depth);
            println!("terminal states: {}", report.terminals.len());
            println!("complete: {}", report.complete());
            println!("lock violations: {}", report.lock_violations);
            println!("order violations: {}", report.order_violations);
            if let Some(v) = &report.first_violation {
                println!("first violation: {}", v.kind);
                for (i, step) in v.trace.iter().enumerate() {
                    println!("  {i:4}  {step}");
                }
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
