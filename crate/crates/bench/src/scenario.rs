use std::path::Path;
use std::time::{Duration, Instant};

use mac_runtime::{ActorConfig, ActorError, EventLog, Future, FutureError};
use serde::Serialize;
use thiserror::Error;

use crate::bank::Bank;
use crate::workload::{replay, replay_replies, Reply, Request, Workload};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Actor(#[from] ActorError),
    #[error("request {index} failed: {source}")]
    Request { index: usize, source: FutureError },
    #[error("request {index} ({request:?}) returned {got:?}, sequential replay gives {want:?}")]
    Reply { index: usize, request: Request, got: Reply, want: Reply },
    #[error("final balances differ from the sequential replay at account {account}: {got} vs {want}")]
    Balance { account: usize, got: i64, want: i64 },
    #[error("{0} overlapping accesses to one account")]
    Overlap(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Busy work per request.
    pub work: Duration,
    pub log: Option<EventLog>,
}

impl RunOptions {
    pub fn with_work(work: Duration) -> Self {
        RunOptions { work, log: None }
    }

    /// Logs every event to `path` as JSONL.
    pub fn logging_to(mut self, path: impl AsRef<Path>) -> std::io::Result<Self> {
        self.log = Some(EventLog::to_file(path)?);
        Ok(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub workers: usize,
    pub messages: usize,
    /// From the first send until every reply is in.
    #[serde(serialize_with = "as_ms")]
    pub wall: Duration,
    pub throughput_mps: f64,
    pub balances: Vec<i64>,
}

fn as_ms<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

enum Pending {
    Done(Future<bool>),
    Balance(Future<i64>),
}

impl Pending {
    fn wait(self) -> Result<Reply, FutureError> {
        match self {
            Pending::Done(f) => f.get().map(Reply::Done),
            Pending::Balance(f) => f.get().map(Reply::Balance),
        }
    }
}

pub fn run_scenario(w: &Workload, workers: usize) -> Result<BenchReport, BenchError> {
    run_scenario_with(w, workers, &RunOptions::default())
}

/// Runs the workload on a fresh bank and checks every reply and the final
/// balances against the sequential replay. Account creation is not timed.
pub fn run_scenario_with(w: &Workload, workers: usize, opts: &RunOptions) -> Result<BenchReport, BenchError> {
    let requests = w.generate();
    let want = replay_replies(w.accounts, w.initial_balance, &requests);
    let bank = Bank::new(w.accounts, workers, opts.work, ActorConfig { log: opts.log.clone() })?;
    let opened: Vec<_> = (0..w.accounts).map(|_| bank.create_account(w.initial_balance)).collect();
    // createAcc has no sync entries, so numbers may come back in any order.
    let mut numbers = Vec::with_capacity(opened.len());
    for (index, f) in opened.into_iter().enumerate() {
        numbers.push(f.get().map_err(|source| BenchError::Request { index, source })?);
    }
    numbers.sort_unstable();
    debug_assert!(numbers.iter().enumerate().all(|(i, &n)| n == i as i64 + 1));

    let start = Instant::now();
    let pending: Vec<Pending> = requests
        .iter()
        .map(|r| match *r {
            Request::Withdraw { acc, amount } => Pending::Done(bank.withdraw(acc, amount)),
            Request::Deposit { acc, amount } => Pending::Done(bank.deposit(acc, amount)),
            Request::Transfer { from, to, amount } => Pending::Done(bank.transfer(from, to, amount)),
            Request::Check { acc } => Pending::Balance(bank.check(acc)),
        })
        .collect();
    let mut got = Vec::with_capacity(pending.len());
    for (index, p) in pending.into_iter().enumerate() {
        got.push(p.wait().map_err(|source| BenchError::Request { index, source })?);
    }
    let wall = start.elapsed();
    bank.shutdown();
    if let Some(log) = &opts.log {
        log.flush()?;
    }

    let overlaps = bank.accounts().overlaps();
    if overlaps > 0 {
        return Err(BenchError::Overlap(overlaps));
    }
    for (index, (g, wnt)) in got.iter().zip(&want).enumerate() {
        if g != wnt {
            return Err(BenchError::Reply { index, request: requests[index], got: *g, want: *wnt });
        }
    }
    let balances = bank.accounts().balances();
    let oracle = replay(w.accounts, w.initial_balance, &requests);
    if let Some(account) = (0..balances.len()).find(|&i| balances[i] != oracle[i]) {
        return Err(BenchError::Balance { account: account + 1, got: balances[account], want: oracle[account] });
    }
    Ok(BenchReport {
        workers,
        messages: requests.len(),
        wall,
        throughput_mps: requests.len() as f64 / wall.as_secs_f64().max(1e-9),
        balances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub volume: usize,
    pub workers: usize,
    pub time_ms: f64,
    pub throughput_mps: f64,
}

/// One fresh run per (volume, worker count); `base` supplies everything
/// except the request count.
pub fn sweep(
    volumes: &[usize],
    workers: &[usize],
    base: &Workload,
    opts: &RunOptions,
    mut progress: impl FnMut(&SweepRow),
) -> Result<Vec<SweepRow>, BenchError> {
    let mut rows = Vec::new();
    for &volume in volumes {
        for &n in workers {
            let w = Workload { requests: volume, ..base.clone() };
            let r = run_scenario_with(&w, n, opts)?;
            let row = SweepRow { volume, workers: n, time_ms: r.wall.as_secs_f64() * 1e3, throughput_mps: r.throughput_mps };
            progress(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// CSV with header `volume,workers,time_ms,throughput_mps`.
pub fn write_csv(rows: &[SweepRow], out: impl std::io::Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::Mix;

    #[test]
    fn small_run_matches_replay() {
        let w = Workload::new(4, 500, 7);
        let r = run_scenario(&w, 3).unwrap();
        assert_eq!(r.messages, 500);
        assert_eq!(r.balances, crate::workload::replay_oracle(&w));
    }

    #[test]
    fn csv_header_and_rows() {
        let base = Workload { mix: Mix::transfers_only(), ..Workload::new(3, 0, 1) };
        let rows = sweep(&[20, 40], &[1, 2], &base, &RunOptions::default(), |_| {}).unwrap();
        assert_eq!(rows.len(), 4);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("volume,workers,time_ms,throughput_mps"));
        assert!(lines.next().unwrap().starts_with("20,1,"));
        assert_eq!(lines.count(), 3);
    }
}
