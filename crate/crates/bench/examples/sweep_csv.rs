//! A small throughput sweep written as CSV to stdout.

use std::time::Duration;

use mac_bench::{sweep, write_csv, RunOptions, Workload};

fn main() {
    let base = Workload::new(16, 0, 42);
    let opts = RunOptions::with_work(Duration::from_micros(20));
    let rows = sweep(&[1_000, 5_000], &[1, 2, 4], &base, &opts, |r| {
        eprintln!("{} messages, {} workers: {:.1} ms", r.volume, r.workers, r.time_ms);
    })
    .unwrap();
    write_csv(&rows, std::io::stdout()).unwrap();
}
