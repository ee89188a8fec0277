use std::time::Duration;

use mac_bench::*;
use mac_runtime::{ActorConfig, EventLog};
use proptest::prelude::*;

#[test]
fn one_request_reports_positive_throughput() {
    let w = Workload::new(1, 1, 5);
    let r = run_scenario(&w, 1).unwrap();
    assert_eq!(r.messages, 1);
    assert!(r.throughput_mps > 0.0);
    assert_eq!(r.balances, replay_oracle(&w));
}

#[test]
fn single_worker_matches_replay() {
    let w = Workload::new(10, 10_000, 11);
    let r = run_scenario(&w, 1).unwrap();
    assert_eq!(r.balances, replay_oracle(&w));
}

#[test]
fn sweep_has_one_row_per_pair() {
    let base = Workload::new(4, 0, 2);
    let rows = sweep(&[100, 1000, 2000, 3000], &[1, 2, 4], &base, &RunOptions::default(), |_| {}).unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!((rows[0].volume, rows[0].workers), (100, 1));
    assert_eq!((rows[11].volume, rows[11].workers), (3000, 4));
}

#[test]
fn transfer_locks_both_accounts() {
    let log = EventLog::memory();
    let bank = Bank::new(3, 4, Duration::from_micros(200), ActorConfig { log: Some(log.clone()) }).unwrap();
    for _ in 0..3 {
        bank.create_account(500).get().unwrap();
    }
    let fs: Vec<_> = (0..60)
        .map(|i| match i % 3 {
            0 => bank.transfer(1, 2, 7),
            1 => bank.transfer(2, 3, 5),
            _ => bank.transfer(3, 1, 3),
        })
        .collect();
    assert!(fs.iter().all(|f| f.get() == Ok(true)));
    bank.shutdown();
    assert_eq!(bank.accounts().overlaps(), 0);
    assert_eq!(bank.accounts().balances(), vec![500 - 20 * 7 + 20 * 3, 500 + 20 * 7 - 20 * 5, 500 + 20 * 5 - 20 * 3]);
    let report = audit(&log.records());
    assert!(report.ok(), "{report:?}");
    assert_eq!(report.keys, 3);
}

#[test]
fn messages_by_name_use_the_same_behavior() {
    use mac_core::Value;
    let bank = Bank::new(2, 2, Duration::ZERO, ActorConfig::default()).unwrap();
    let acc = bank.create_account(10).get().unwrap();
    let sync = bank.sync_for("deposit", &[Value::Int(acc), Value::Int(5)]);
    let f = bank.actor().send("deposit", vec![Value::Int(acc), Value::Int(5)], sync);
    assert_eq!(f.get(), Ok(Value::Bool(true)));
    assert_eq!(bank.check(acc).get(), Ok(15));
    let bad = bank.actor().send("deposit", vec![Value::Bool(true)], mac_core::LockSet::new());
    assert!(bad.get().is_err());
    bank.shutdown();
}

#[test]
fn added_employees_share_accounts() {
    let bank = Bank::new(2, 1, Duration::ZERO, ActorConfig::default()).unwrap();
    let acc = bank.create_account(100).get().unwrap();
    assert_eq!(bank.add_employee(), Ok(1));
    let fs: Vec<_> = (0..50).map(|_| bank.withdraw(acc, 1)).collect();
    assert!(fs.iter().all(|f| f.get() == Ok(true)));
    assert_eq!(bank.check(acc).get(), Ok(50));
    bank.shutdown();
}

#[test]
fn audit_log_round_trips_through_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.jsonl");
    let w = Workload::new(3, 300, 9);
    let opts = RunOptions::default().logging_to(&path).unwrap();
    run_scenario_with(&w, 2, &opts).unwrap();
    let records = mac_runtime::log::read_jsonl(std::fs::File::open(&path).unwrap()).unwrap();
    // createAcc has no entries but is still logged.
    assert_eq!(records.len(), 4 * 303);
    let r = audit(&records);
    assert!(r.ok(), "{r:?}");
    assert_eq!((r.messages, r.keys), (303, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transfers_conserve_the_total(seed in any::<u64>(), accounts in 2usize..6, workers in 1usize..5) {
        let w = Workload { mix: Mix::transfers_only(), ..Workload::new(accounts, 400, seed) };
        let r = run_scenario(&w, workers).unwrap();
        prop_assert_eq!(r.balances.iter().sum::<i64>(), 1000 * accounts as i64);
    }

    #[test]
    fn concurrent_runs_match_replay(seed in any::<u64>(), batch in 1usize..20, workers in 1usize..5) {
        let w = Workload { batch, ..Workload::new(5, 500, seed) };
        let r = run_scenario(&w, workers).unwrap();
        prop_assert_eq!(r.balances, replay_oracle(&w));
    }

    #[test]
    fn balances_follow_from_replies(seed in any::<u64>()) {
        let w = Workload::new(4, 300, seed);
        let reqs = w.generate();
        let replies = replay_replies(4, 1000, &reqs);
        let mut bal = vec![1000i64; 4];
        for (r, reply) in reqs.iter().zip(&replies) {
            match (*r, *reply) {
                (Request::Deposit { acc, amount }, Reply::Done(true)) => bal[acc as usize - 1] += amount,
                (Request::Withdraw { acc, amount }, Reply::Done(true)) => bal[acc as usize - 1] -= amount,
                (Request::Transfer { from, to, amount }, Reply::Done(true)) => {
                    bal[from as usize - 1] -= amount;
                    bal[to as usize - 1] += amount;
                }
                (Request::Check { acc }, Reply::Balance(b)) => prop_assert_eq!(bal[acc as usize - 1], b),
                (_, Reply::Done(false)) => {}
                (r, reply) => prop_assert!(false, "{:?} replied {:?}", r, reply),
            }
        }
        prop_assert_eq!(bal, replay(4, 1000, &reqs));
    }
}

#[test]
fn runtime_agrees_with_interpreter() {
    use mac_core::explore::ExploreOptions;
    use mac_core::testing::{bank_with_main, interpreter, BANK_FIVE_REQUESTS};
    use mac_core::Value;

    let interp = interpreter(&bank_with_main(BANK_FIVE_REQUESTS));
    let report = interp.explore_all(interp.initial_config(), &ExploreOptions::new(500));
    assert!(report.complete());
    let names = ["w1", "d2", "t", "w2", "c"];
    let outcome = |c: &mac_core::Configuration| names.map(|n| c.main_value(n).cloned());
    let want = outcome(&report.terminals[0]);
    assert!(report.terminals.iter().all(|c| outcome(c) == want));

    for _ in 0..50 {
        let bank = Bank::new(2, 2, Duration::ZERO, ActorConfig::default()).unwrap();
        let a1 = bank.create_account(100).get().unwrap();
        let a2 = bank.create_account(100).get().unwrap();
        let (w1, d2, t, w2, c) =
            (bank.withdraw(a1, 30), bank.deposit(a2, 10), bank.transfer(a1, a2, 20), bank.withdraw(a1, 60), bank.check(a1));
        let got = [w1.get(), d2.get(), t.get(), w2.get()].map(|f| Some(Value::Bool(f.unwrap())));
        assert_eq!(got[..], want[..4]);
        assert_eq!(Some(Value::Int(c.get().unwrap())), want[4]);
        bank.shutdown();
    }
}
