//! A bank on multi-threaded actors, and the throughput benchmark built on it.
//!
//! Employees are the workers of one [`MacActor`](mac_runtime::MacActor).
//! Each call locks the accounts named by its `sync<a>` parameters, so
//! requests on different accounts run in parallel and requests on the same
//! account run one at a time in send order.

pub mod audit;
pub mod bank;
pub mod scenario;
pub mod workload;

pub use audit::{audit, AuditReport};
pub use bank::{employee_signatures, Accounts, Bank, BankBehavior};
pub use scenario::{run_scenario, run_scenario_with, sweep, write_csv, BenchError, BenchReport, RunOptions, SweepRow};
pub use workload::{replay, replay_oracle, replay_replies, Mix, Reply, Request, Workload};
