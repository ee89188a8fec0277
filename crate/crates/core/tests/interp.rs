use std::collections::BTreeMap;

use mac_core::ast::Type;
use mac_core::interp::Outcome;
use mac_core::testing::*;
use mac_core::{Configuration, Interpreter, LockSet, ObjId, Policy, Rule, StepLabel, SyncEntry, Value};
use proptest::prelude::*;

fn set(entries: &[(&str, i64)]) -> LockSet {
    entries.iter().map(|(l, v)| SyncEntry::new(*l, *v)).collect()
}

fn main_of(src: &str) -> BTreeMap<String, Value> {
    let interp = interpreter(src);
    let run = interp.run(interp.initial_config(), Policy::Fifo, 100_000);
    assert_eq!(run.outcome, Outcome::Quiescent);
    run.config.main_env().unwrap().clone()
}

#[test]
fn initial_configuration_has_one_anonymous_process() {
    let interp = interpreter(BANK);
    let c = interp.initial_config();
    assert_eq!(c.actors.len(), 1);
    assert_eq!(c.process_count(), 1);
    assert!(c.queues.is_empty() && c.futures.is_empty());
    let anon = c.object(ObjId::ANONYMOUS).unwrap();
    assert!(anon.class.is_none() && anon.lock.is_empty());

    // Declared types of the bank main block, with their zero values.
    let expected: BTreeMap<String, Value> = [
        ("bank", Value::Null),
        ("f", Value::Null),
        ("acc1", Value::Int(0)),
        ("g", Value::Null),
        ("f3", Value::Null),
        ("f2", Value::Null),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    assert_eq!(c.main_env().unwrap(), &expected);
}

#[test]
fn default_values_by_type() {
    assert_eq!(Type::Bool.default_value(), Value::Bool(false));
    assert_eq!(Type::Int.default_value(), Value::Int(0));
    assert_eq!(Type::Interface("I".into()).default_value(), Value::Null);
    assert_eq!(Type::Actor("I".into()).default_value(), Value::Null);
    assert_eq!(Type::Fut(Box::new(Type::Int)).default_value(), Value::Null);
}

#[test]
fn empty_main_is_quiescent() {
    let interp = interpreter("{ }");
    let c = interp.initial_config();
    assert!(interp.enabled_steps(&c).is_empty());
    assert_eq!(interp.run(c, Policy::Fifo, 10).outcome, Outcome::Quiescent);
}

#[test]
fn local_rules_and_conditionals() {
    let env = main_of(
        "{ Int x = 3; Int y; Bool b = x < 5 && !false; if (b) { y = x + 1; } else { y = 0; }
           while (x > 0) { x = x - 1; } }",
    );
    assert_eq!(env["x"], Value::Int(0));
    assert_eq!(env["y"], Value::Int(4));
    assert_eq!(env["b"], Value::Bool(true));
}

#[test]
fn withdraw_then_check_under_fifo_and_random() {
    let interp = interpreter(BANK);
    let fifo = interp.run(interp.initial_config(), Policy::Fifo, 10_000);
    assert_eq!(fifo.outcome, Outcome::Quiescent);
    assert_eq!(fifo.config.main_value("f2"), Some(&Value::Int(50)));
    assert_eq!(fifo.config.main_value("f3"), Some(&Value::Bool(true)));
    for seed in 0..100 {
        let run = interp.run(interp.initial_config(), Policy::Random(seed), 10_000);
        assert_eq!(run.outcome, Outcome::Quiescent, "seed {seed}");
        assert_eq!(run.config.main_value("f2"), Some(&Value::Int(50)), "seed {seed}");
    }
}

#[test]
fn five_requests_reach_expected_balances() {
    let interp = interpreter(&bank_with_main(BANK_FIVE_REQUESTS));
    for seed in 0..50 {
        let run = interp.run(interp.initial_config(), Policy::Random(seed), 100_000);
        assert_eq!(run.outcome, Outcome::Quiescent);
        let c = &run.config;
        assert_eq!(c.main_value("w1"), Some(&Value::Bool(true)));
        assert_eq!(c.main_value("t"), Some(&Value::Bool(true)));
        assert_eq!(c.main_value("w2"), Some(&Value::Bool(false)));
        assert_eq!(c.main_value("c"), Some(&Value::Int(50)));
    }
}

#[test]
fn independent_actors_are_confluent() {
    let interp = interpreter(TWO_ACTORS);
    let values = |c: &Configuration| -> Vec<Value> {
        ["a", "b", "c", "d"].iter().map(|v| c.main_value(v).cloned().unwrap_or(Value::Undefined)).collect()
    };
    let want = vec![Value::Int(1), Value::Int(12), Value::Int(4), Value::Int(16)];
    let fifo = interp.run(interp.initial_config(), Policy::Fifo, 1000);
    assert_eq!(values(&fifo.config), want);
    for seed in 0..30 {
        let run = interp.run(interp.initial_config(), Policy::Random(seed), 1000);
        assert_eq!(run.outcome, Outcome::Quiescent);
        assert_eq!(values(&run.config), want);
        assert_eq!(run.config.heap, fifo.config.heap);
    }
}

#[test]
fn infinite_loop_exhausts_fuel_exactly() {
    let interp = interpreter(LOOP);
    let run = interp.run(interp.initial_config(), Policy::Fifo, 1000);
    assert_eq!(run.outcome, Outcome::FuelExhausted);
    assert_eq!(run.trace.len(), 1000);
    assert!(run.trace.iter().all(|l| l.rule == Rule::CondTrue));
}

#[test]
fn worked_example_dispatch() {
    let interp = interpreter(WORKED);
    let c = run_main(&interp, interp.initial_config()).unwrap();
    let actor = ObjId(1);
    let objects: Vec<ObjId> = c.actors[&actor].processes.keys().copied().collect();
    assert_eq!(objects.len(), 3);
    assert_eq!(c.queues[&actor].len(), 5);

    // All three idle objects would take m1, nothing else is enabled.
    let steps = interp.enabled_steps(&c);
    assert_eq!(steps.len(), 3);
    for s in &steps {
        assert_eq!((s.rule, s.message.as_deref()), (Rule::SchedMsg, Some("one")));
    }
    let m1 = steps[0].clone();
    let c = interp.step(&c, &m1).unwrap();
    assert_eq!(c.object(objects[0]).unwrap().lock, set(&[("l", 1)]));
    assert_eq!(c.queues[&actor].len(), 4);

    // m2 alongside m1.
    let m2 = interp.selectable(&c, objects[1]).unwrap();
    assert_eq!((m2.method.as_str(), &m2.args[..]), ("other", &[Value::Int(1)][..]));
    let label = StepLabel {
        rule: Rule::SchedMsg,
        actor,
        object: objects[1],
        message: Some("other".into()),
        priority: Some(m2.priority),
    };
    let c = interp.step(&c, &label).unwrap();

    // m3 needs (l,1), m4 is behind m3 on (l,2), m5 is free.
    let m5 = interp.selectable(&c, objects[2]).unwrap();
    assert_eq!((m5.method.as_str(), &m5.args[..]), ("one", &[Value::Int(3)][..]));
}

#[test]
fn message_dispatch_and_return() {
    let interp = interpreter(WORKED);
    let c = run_main(&interp, interp.initial_config()).unwrap();
    let actor = ObjId(1);
    let steps = interp.enabled_steps(&c);
    let c = interp.step(&c, &steps[0]).unwrap();
    let obj = steps[0].object;
    let closure = &c.actors[&actor].processes[&obj][0];
    assert_eq!(closure.env["x"], Value::Int(1));
    let dest = closure.dest.unwrap();
    assert!(c.future(dest).is_none());

    let ret = interp.enabled_steps(&c).into_iter().find(|l| l.object == obj).unwrap();
    assert_eq!(ret.rule, Rule::AsyncReturn);
    let c = interp.step(&c, &ret).unwrap();
    assert_eq!(c.future(dest), Some(&Value::Int(1)));
    assert!(c.object(obj).unwrap().lock.is_empty());
    assert!(c.actors[&actor].processes[&obj].is_empty());
}

#[test]
fn not_enabled_step_is_rejected() {
    let interp = interpreter(WORKED);
    let c = interp.initial_config();
    let bogus = StepLabel { rule: Rule::SchedMsg, actor: ObjId(1), object: ObjId(1), message: None, priority: None };
    assert!(interp.step(&c, &bogus).is_err());
}

#[test]
fn blocked_reads_are_not_enabled() {
    // `m` waits on a message only its own busy object could serve.
    let src = "interface I { Int m(Actor<I> me); Int n(); }
        class C implements I {
            Int m(Actor<I> me) { Fut<Int> g = me!n(); Int v = g.get; return v; }
            Int n() { return 1; }
        }
        { Actor<I> a = new actor C(); Fut<Int> f = a!m(a); Int x = f.get; }";
    let interp = interpreter(src);
    let run = interp.run(interp.initial_config(), Policy::Fifo, 1000);
    assert_eq!(run.outcome, Outcome::Quiescent);
    assert_eq!(run.config.queues[&ObjId(1)].len(), 1);
    assert_eq!(run.config.main_value("f"), None);
}

#[test]
fn free_objects_belong_to_the_anonymous_actor() {
    let src = "interface I { Int m(); } class C implements I { Int m() { return 7; } }
        { I o = new C(); Int x = o.m(); }";
    let interp = interpreter(src);
    let run = interp.run(interp.initial_config(), Policy::Fifo, 100);
    assert_eq!(run.outcome, Outcome::Quiescent);
    assert_eq!(run.config.main_value("x"), Some(&Value::Int(7)));
    assert_eq!(run.config.object(ObjId(1)).unwrap().myactor, ObjId::ANONYMOUS);
    let rules: Vec<Rule> = run.trace.iter().map(|l| l.rule).collect();
    assert_eq!(rules, vec![Rule::NewActob, Rule::SyncCall, Rule::SyncReturn]);
}

#[test]
fn faults_are_terminal() {
    let interp = interpreter("{ Int x; Bool b = x?; }");
    let run = interp.run(interp.initial_config(), Policy::Fifo, 100);
    assert!(matches!(run.outcome, Outcome::Fault(_)));
    assert_eq!(run.trace.last().unwrap().rule, Rule::Fault);
    assert!(interp.enabled_steps(&run.config).is_empty());

    // Synchronous calls across actors are not allowed.
    let src = "interface I { Int m(); } class C implements I { Int m() { return 1; } }
        { Actor<I> a = new actor C(); I o; o = a; Int x = o.m(); }";
    let interp = interpreter(src);
    assert!(matches!(interp.run(interp.initial_config(), Policy::Fifo, 100).outcome, Outcome::Fault(_)));
}

#[test]
fn resolved_check_reads_future_state() {
    let src = "interface I { Int m(); } class C implements I { Int m() { return 1; } }
        { Actor<I> a = new actor C(); Fut<Int> f = a!m(); Bool before = f?; Int v = f.get; Bool after = f?; }";
    let env = main_of(src);
    assert_eq!(env["before"], Value::Bool(false));
    assert_eq!(env["after"], Value::Bool(true));
    assert_eq!(env["v"], Value::Int(1));
}

#[test]
fn lifting_rules() {
    let mk = |rule| StepLabel { rule, actor: ObjId(1), object: ObjId(1), message: None, priority: None };
    assert_eq!(mk(Rule::NewActor).lifting(), (Rule::ProcessUpdate, Rule::ActorCreate));
    assert_eq!(mk(Rule::NewActob).lifting(), (Rule::ProcessCreate, Rule::ActorUpdate));
    assert_eq!(mk(Rule::AssignLocal).lifting(), (Rule::ProcessUpdate, Rule::ActorUpdate));
}

#[test]
fn step_labels_serialize_as_trace_lines() {
    let l = StepLabel {
        rule: Rule::SchedMsg,
        actor: ObjId(1),
        object: ObjId(2),
        message: Some("withdraw".into()),
        priority: Some(3),
    };
    let v: serde_json::Value = serde_json::to_value(&l).unwrap();
    assert_eq!(v["rule"], "SCHED-MSG");
    assert_eq!(v["message"], "withdraw");
    assert_eq!(v["priority"], 3);
    let bare = StepLabel { message: None, priority: None, rule: Rule::AssignLocal, ..l };
    let v: serde_json::Value = serde_json::to_value(&bare).unwrap();
    assert!(v.get("message").is_none() && v.get("priority").is_none());
}

/// Objects and queues touched by one step.
fn check_frame(before: &Configuration, label: &StepLabel, after: &Configuration) -> Result<(), String> {
    // Futures are written once.
    for (f, v) in &before.futures {
        if let Some(v) = v {
            if after.futures.get(f) != Some(&Some(v.clone())) {
                return Err(format!("future {f:?} rewritten"));
            }
        }
    }
    let changed_futures = after.futures.iter().filter(|(f, v)| before.futures.get(f) != Some(v)).count();
    if changed_futures > 1 {
        return Err("more than one future changed".into());
    }
    // At most one existing object's state changes; new objects only on creation.
    let changed = before.heap.iter().filter(|(o, s)| after.heap.get(o) != Some(s)).count();
    if changed > 1 {
        return Err(format!("{changed} objects changed in {label}"));
    }
    let created = after.heap.len() - before.heap.len();
    let creates = matches!(label.rule, Rule::NewActob | Rule::NewActor);
    if created != usize::from(creates) {
        return Err(format!("{created} objects created by {label}"));
    }
    // Queues change only by appending or dispatching one event.
    let changed_queues: Vec<_> =
        after.queues.iter().filter(|(a, q)| before.queues.get(a).is_some_and(|old| old != *q)).collect();
    match label.rule {
        Rule::AsyncCall => {
            let [(_, q)] = changed_queues[..] else { return Err("async call touched queues".into()) };
            let _ = q;
        }
        Rule::SchedMsg => {
            if changed_queues.len() != 1 || *changed_queues[0].0 != label.actor {
                return Err("dispatch touched another queue".into());
            }
        }
        _ if !changed_queues.is_empty() => return Err(format!("{label} changed a queue")),
        _ => {}
    }
    // Only the moving process changes, apart from a created one.
    for (a, state) in &before.actors {
        for (o, t) in &state.processes {
            let now = after.actors.get(a).and_then(|s| s.processes.get(o));
            if (*a, *o) != (label.actor, label.object) && now != Some(t) {
                return Err(format!("process {o} of {a} changed in {label}"));
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_respect_frame_and_lock_disjointness(seed in any::<u64>()) {
        let interp = interpreter(&bank_with_main(BANK_FIVE_REQUESTS));
        let mut c = interp.initial_config();
        let mut rng = seed;
        for _ in 0..2000 {
            let mut succ = interp.successors(&c);
            if succ.is_empty() {
                break;
            }
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let (label, next) = succ.swap_remove((rng >> 33) as usize % succ.len());
            prop_assert!(check_frame(&c, &label, &next).is_ok(), "{:?}", check_frame(&c, &label, &next));
            prop_assert!(mac_core::explore::lock_overlap(&next).is_none());
            prop_assert!(mac_core::explore::order_violation(&c, &label).is_none());
            c = next;
        }
        prop_assert!(!c.is_faulted());
        prop_assert_eq!(c.main_value("c"), Some(&Value::Int(50)));
    }
}

#[test]
fn interpreter_is_cloneable_and_reusable() {
    let interp: Interpreter = interpreter(TWO_ACTORS);
    let other = interp.clone();
    let a = interp.run(interp.initial_config(), Policy::Fifo, 1000);
    let b = other.run(other.initial_config(), Policy::Fifo, 1000);
    assert_eq!(a.trace, b.trace);
}
