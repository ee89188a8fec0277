//! Runs one seeded workload with a JSONL log, reads it back, and checks
//! per-account exclusion and ordering. Also shows a damaged log failing.

use mac_bench::{audit, run_scenario_with, RunOptions, Workload};
use mac_runtime::log::read_jsonl;
use mac_runtime::EventKind;

fn main() {
    let path = std::env::temp_dir().join("mac-audit-example.jsonl");
    let w = Workload::new(10, 5_000, 3);
    let opts = RunOptions::default().logging_to(&path).unwrap();
    let report = run_scenario_with(&w, 4, &opts).unwrap();
    println!("{} messages in {:.1?}, balances {:?}", report.messages, report.wall, report.balances);

    let mut records = read_jsonl(std::fs::File::open(&path).unwrap()).unwrap();
    println!("{:?}", audit(&records));

    // Pretend the last message on some account started before its
    // predecessor had finished.
    let last = records.iter().rposition(|r| r.event == EventKind::Start && !r.sync.is_empty()).unwrap();
    records[last].t_ns = 0;
    let damaged = audit(&records);
    println!("damaged: ok={} first problem: {:?}", damaged.ok(), damaged.first_problem);
}
