//! Explores every interleaving of five bank requests, then repeats with a
//! selection rule that ignores held entries and prints the violating trace.

use mac_core::explore::ExploreOptions;
use mac_core::interp::{Event, SelectFn};
use mac_core::{parse_program, Interpreter, LockSet};

const MAIN: &str = "{
    Actor<IEmployee> bank = new actor Employee(null, null, 0);
    Fut<Int> f = bank!createAcc(100);
    Int a1 = f.get;
    f = bank!createAcc(100);
    Int a2 = f.get;
    Fut<Bool> g = bank!addEmp();
    Bool added = g.get;
    Fut<Bool> w1 = bank!withdraw(a1, 30);
    Fut<Bool> d2 = bank!deposit(a2, 10);
    Fut<Bool> t = bank!transfer(a1, a2, 20);
    Fut<Bool> w2 = bank!withdraw(a1, 60);
    Fut<Int> c = bank!check(a1);
}";

fn ignores_held(q: &[Event], _: &LockSet, supported: &dyn Fn(&Event) -> bool) -> Option<usize> {
    q.iter().position(|e| supported(e))
}

fn main() {
    let bank = mac_core::programs::BANK;
    let src = format!("{}{MAIN}", &bank[..bank.find("// main\n").unwrap()]);
    let program = parse_program(&src).unwrap();

    let interp = Interpreter::new(&program);
    let r = interp.explore_all(interp.initial_config(), &ExploreOptions::new(500));
    println!(
        "{} states, {} transitions, depth {}, {} terminal, {} violations",
        r.states,
        r.transitions,
        r.max_depth,
        r.terminals.len(),
        r.violations()
    );
    for c in &r.terminals {
        println!("  c = {:?}", c.main_value("c"));
    }

    let faulty: SelectFn = ignores_held;
    let interp = Interpreter::new(&program).with_selector(faulty);
    let r = interp.explore_all(interp.initial_config(), &ExploreOptions::new(500));
    let v = r.first_violation.expect("a violation");
    println!("\nfaulty select: {} lock violations; first: {:?}", r.lock_violations, v.kind);
    for (i, l) in v.trace.iter().enumerate() {
        println!("  {i:>3} {} {}", l.rule.name(), l.message.as_deref().unwrap_or(""));
    }
}
