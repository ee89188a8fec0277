use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use mac_bench::{audit, sweep, write_csv, Mix, RunOptions, Workload};
use mac_runtime::log::read_jsonl;

/// Bank throughput benchmark on multi-threaded actors.
#[derive(Parser, Debug)]
#[command(name = "macbench", version)]
struct Args {
    #[arg(long, default_value_t = 64)]
    accounts: usize,
    /// Request counts to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100000")]
    requests: Vec<usize>,
    /// Employee counts to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    workers: Vec<usize>,
    /// Consecutive requests per account.
    #[arg(long, default_value_t = 10)]
    batch: usize,
    /// Busy work per request in microseconds.
    #[arg(long, default_value_t = 100)]
    work_us: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weights as withdraw,deposit,transfer,check.
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "40,40,10,10")]
    mix: Vec<u32>,
    #[arg(long, default_value_t = 1000)]
    initial_balance: i64,
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
    /// Write every runtime event here as JSONL and audit it afterwards.
    #[arg(long)]
    audit_log: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("macbench: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<bool, Box<dyn std::error::Error>> {
    if args.accounts == 0 || args.batch == 0 || args.workers.contains(&0) {
        return Err("--accounts, --batch and --workers must be positive".into());
    }
    let mix = Mix { withdraw: args.mix[0], deposit: args.mix[1], transfer: args.mix[2], check: args.mix[3] };
    let base = Workload {
        accounts: args.accounts,
        requests: 0,
        batch: args.batch,
        mix,
        seed: args.seed,
        initial_balance: args.initial_balance,
    };
    let mut opts = RunOptions::with_work(Duration::from_micros(args.work_us));
    if let Some(path) = &args.audit_log {
        opts = opts.logging_to(path)?;
    }

    println!("volume,workers,time_ms,throughput_mps");
    let rows = sweep(&args.requests, &args.workers, &base, &opts, |r| {
        println!("{},{},{:.3},{:.1}", r.volume, r.workers, r.time_ms, r.throughput_mps);
    })?;
    write_csv(&rows, File::create(&args.out)?)?;
    eprintln!("wrote {}", args.out.display());

    let Some(path) = &args.audit_log else { return Ok(true) };
    drop(opts);
    let report = audit(&read_jsonl(File::open(path)?)?);
    eprintln!(
        "audit: {} messages, {} keys, {} overlaps, {} misordered, {} unfinished",
        report.messages, report.keys, report.overlaps, report.misordered, report.unfinished
    );
    if let Some(p) = &report.first_problem {
        eprintln!("audit: {p}");
    }
    Ok(report.ok())
}
