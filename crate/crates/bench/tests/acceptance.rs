//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs::File;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use mac_bench::{audit, run_scenario_with, sweep, Bank, RunOptions, Workload};
use mac_core::explore::ExploreOptions;
use mac_core::interp::{Event, SelectFn};
use mac_core::parse::parse_unresolved;
use mac_core::testing::*;
use mac_core::{parse_program, pretty_print, select, LockSet, ObjId, SyncEntry, Value};
use mac_runtime::log::read_jsonl;
use mac_runtime::ActorConfig;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn select_equivalence() -> Outcome {
    let t = Instant::now();
    // All messages supported, entry sets up to two entries.
    let full = compare_select(6, 4, 2, false);
    // Every subset of the queue supported, singleton entry sets.
    let support = compare_select(6, 4, 1, true);
    let elapsed = t.elapsed();
    for r in [&full, &support] {
        ensure(r.mismatches == 0, || format!("{} mismatches, first {:?}", r.mismatches, r.first_mismatch))?;
    }
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{} + {} cases agree in {elapsed:.2?}", full.cases, support.cases))
}

fn set(entries: &[(&str, i64)]) -> LockSet {
    entries.iter().map(|(l, v)| SyncEntry::new(*l, *v)).collect()
}

fn worked_example() -> Outcome {
    let (m1, m2, m3, m4, m5) =
        (set(&[("l", 1)]), set(&[("lp", 1)]), set(&[("l", 1), ("l", 2)]), set(&[("l", 2)]), set(&[("l", 3)]));
    let all = |_: &LockSet| true;
    let queue = [m2.clone(), m3.clone(), m4.clone(), m5.clone()];
    ensure(select(&queue, &m1, all) == Some(0), || "m2 is not schedulable next to m1".into())?;
    let held = m1.union(&m2);
    let rest = [m3, m4, m5];
    let pick = select(&rest, &held, all);
    ensure(pick == Some(2), || format!("with m1, m2 running select gave {pick:?}, want m5"))?;

    // The same narrative on interpreter objects.
    let interp = interpreter(WORKED);
    let c = run_main(&interp, interp.initial_config()).ok_or("worked program did not reach its queue")?;
    let actor = ObjId(1);
    let objects: Vec<ObjId> = c.actors[&actor].processes.keys().copied().collect();
    ensure(objects.len() == 3, || format!("{} objects", objects.len()))?;
    let steps = interp.enabled_steps(&c);
    let c = interp.step(&c, &steps[0]).map_err(|e| e.to_string())?;
    let second = interp.selectable(&c, objects[1]).ok_or("nothing selectable after m1")?;
    ensure(second.method == "other", || format!("second object took {}", second.method))?;
    let label = interp
        .enabled_steps(&c)
        .into_iter()
        .find(|l| l.object == objects[1] && l.message.as_deref() == Some("other"))
        .ok_or("m2 step not enabled")?;
    let c = interp.step(&c, &label).map_err(|e| e.to_string())?;
    let third = interp.selectable(&c, objects[2]).ok_or("nothing selectable with m1, m2 running")?;
    ensure(third.method == "one" && third.args == [Value::Int(3)], || format!("third object took {}{:?}", third.method, third.args))?;
    Ok("m2 runs with m1, m3 and m4 wait, m5 runs; library and interpreter agree".into())
}

/// The selection rule with the check against held entries removed.
fn ignores_held(q: &[Event], _held: &LockSet, supported: &dyn Fn(&Event) -> bool) -> Option<usize> {
    q.iter().position(|e| supported(e))
}

fn bank_exploration() -> Outcome {
    let t = Instant::now();
    let src = bank_with_main(BANK_FIVE_REQUESTS);
    let interp = interpreter(&src);
    let report = interp.explore_all(interp.initial_config(), &ExploreOptions::new(500));
    ensure(report.complete(), || "state space not exhausted within depth 500".into())?;
    ensure(report.violations() == 0, || format!("{:?}", report.first_violation))?;
    ensure(
        report.lock_violations == 0 && report.order_violations == 0,
        || format!("{} lock, {} order violations", report.lock_violations, report.order_violations),
    )?;

    let faulty: SelectFn = ignores_held;
    let broken = interpreter(&src).with_selector(faulty);
    let bad = broken.explore_all(broken.initial_config(), &ExploreOptions::new(500));
    let v = bad.first_violation.as_ref().ok_or("fault-injected select produced no violation")?;
    ensure(!v.trace.is_empty(), || "violation without trace".into())?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{} states, {} transitions, 0 violations; faulty select: {} lock violations, trace of {} steps; {elapsed:.2?}",
        report.states,
        report.transitions,
        bad.lock_violations,
        v.trace.len()
    ))
}

fn withdraw_then_check() -> Outcome {
    const INITIAL: i64 = 100;
    for run in 0..100 {
        let bank = Bank::new(4, 4, Duration::ZERO, ActorConfig::default()).map_err(|e| e.to_string())?;
        let acc = bank.create_account(INITIAL).get().map_err(|e| e.to_string())?;
        bank.add_employee().map_err(|e| e.to_string())?;
        let _w = bank.withdraw(acc, 50);
        let c = bank.check(acc).get().map_err(|e| e.to_string())?;
        bank.shutdown();
        ensure(c == INITIAL - 50, || format!("run {run}: check gave {c}"))?;
    }
    let interp = interpreter(BANK);
    let report = interp.explore_all(interp.initial_config(), &ExploreOptions::new(500));
    ensure(report.complete() && !report.terminals.is_empty(), || "exploration incomplete".into())?;
    for c in &report.terminals {
        let v = c.main_value("f2");
        ensure(v == Some(&Value::Int(INITIAL - 50)), || format!("explored schedule ends with f2 = {v:?}"))?;
    }
    Ok(format!("100/100 runtime runs and {} explored terminal states give {}", report.terminals.len(), INITIAL - 50))
}

fn linearization(logs: &[PathBuf]) -> Outcome {
    let t = Instant::now();
    for (seed, path) in (0..20u64).zip(logs) {
        let w = Workload::new(10, 10_000, seed);
        let opts = RunOptions::with_work(Duration::from_micros(10)).logging_to(path).map_err(|e| e.to_string())?;
        run_scenario_with(&w, 4, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!("20 seeds match the sequential replay in {elapsed:.2?}"))
}

fn scaling() -> Outcome {
    let t = Instant::now();
    let base = Workload::new(64, 0, 1);
    let opts = RunOptions::with_work(Duration::from_micros(100));
    let volumes = [10_000, 50_000, 100_000];
    let rows = sweep(&volumes, &[1, 2, 4], &base, &opts, |_| {}).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let tp = |n: usize| rows.iter().find(|r| r.volume == 100_000 && r.workers == n).unwrap().throughput_mps;
    let (s2, s4) = (tp(2) / tp(1), tp(4) / tp(1));

    let mut worst = 0f64;
    for n in [1, 2, 4] {
        let per_msg: Vec<f64> =
            rows.iter().filter(|r| r.workers == n).map(|r| r.time_ms / r.volume as f64).collect();
        let mean = per_msg.iter().sum::<f64>() / per_msg.len() as f64;
        worst = per_msg.iter().map(|r| (r / mean - 1.0).abs()).fold(worst, f64::max);
    }
    let detail = format!(
        "tp(1)={:.0} tp(2)={:.0} tp(4)={:.0} msg/s, speedup x{s2:.2} x{s4:.2}, ratio deviation {:.1}%, {} cpus, {elapsed:.2?}",
        tp(1),
        tp(2),
        tp(4),
        worst * 100.0,
        std::thread::available_parallelism().map_or(0, |n| n.get())
    );
    ensure(s2 >= 1.4, || format!("tp(2) < 1.4 tp(1): {detail}"))?;
    ensure(s4 >= 1.8, || format!("tp(4) < 1.8 tp(1): {detail}"))?;
    ensure(worst <= 0.25, || format!("time per message not linear: {detail}"))?;
    within(elapsed, Duration::from_secs(300))?;
    Ok(detail)
}

fn interval_audit(logs: &[PathBuf]) -> Outcome {
    let (mut keys, mut messages) = (0, 0);
    for path in logs {
        let records = read_jsonl(File::open(path).map_err(|e| format!("{}: {e}", path.display()))?)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let r = audit(&records);
        ensure(r.ok(), || format!("{}: {r:?}", path.display()))?;
        ensure(r.keys > 0, || format!("{}: no sync keys logged", path.display()))?;
        keys += r.keys;
        messages += r.messages;
    }
    ensure(logs.len() == 20, || format!("{} logs", logs.len()))?;
    Ok(format!("{} logs, {messages} messages over {keys} keys, no overlap or misorder", logs.len()))
}

fn parser_round_trip() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 1000, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let count = std::cell::Cell::new(0u32);
    runner
        .run(&arb_program(), |p| {
            count.set(count.get() + 1);
            let printed = pretty_print(&p);
            let back = parse_unresolved(&printed)
                .map_err(|e| proptest::test_runner::TestCaseError::fail(format!("{e:?}\n{printed}")))?;
            proptest::prop_assert_eq!(back, p);
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let p = parse_program(BANK).map_err(|e| e.render("bank.mac"))?;
    let emp = p.interface("IEmployee").ok_or("no IEmployee")?;
    let labels = |m: &str| emp.sig(m).map(|s| s.sync_labels());
    let want: [(&str, Vec<Option<&str>>); 6] = [
        ("createAcc", vec![None]),
        ("addEmp", vec![]),
        ("withdraw", vec![Some("a"), None]),
        ("deposit", vec![Some("a"), None]),
        ("transfer", vec![Some("a"), Some("a"), None]),
        ("check", vec![Some("a")]),
    ];
    for (m, l) in &want {
        ensure(labels(m).as_ref() == Some(l), || format!("{m}: {:?}", labels(m)))?;
    }
    let printed = pretty_print(&p);
    let again = parse_program(&printed).map_err(|e| e.render("printed.mac"))?;
    ensure(pretty_print(&again) == printed, || "listing does not print back to itself".into())?;
    Ok(format!("{} generated programs round-trip; listing sync labels as documented", count.get()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let logs: Vec<PathBuf> = (0..20).map(|s| dir.path().join(format!("seed-{s}.jsonl"))).collect();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 select matches the literal oracle", Box::new(select_equivalence)),
        ("2 m1-m5 worked example", Box::new(worked_example)),
        ("3 bank exploration and fault injection", Box::new(bank_exploration)),
        ("4 withdraw then check", Box::new(withdraw_then_check)),
        ("5 linearization over 20 seeds", Box::new(|| linearization(&logs))),
        ("6 scaling and linearity", Box::new(scaling)),
        ("7 interval audit of the seed logs", Box::new(|| interval_audit(&logs))),
        ("8 parser round trip", Box::new(parser_round_trip)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.2?}]", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{:.2?}]", t.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
