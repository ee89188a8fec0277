//! Runs the bank program under a seeded random schedule and prints the
//! trace and the final `main` variables.

use mac_core::{parse_program, Interpreter, Policy};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let program = parse_program(mac_core::programs::BANK).unwrap();
    let interp = Interpreter::new(&program);
    let run = interp.run(interp.initial_config(), Policy::Random(seed), 10_000);
    for label in &run.trace {
        let msg = label.message.as_deref().unwrap_or("");
        println!("{:<12} actor {:<3} object {:<3} {msg}", label.rule.name(), label.actor.0, label.object.0);
    }
    println!("outcome {:?} after {} steps", run.outcome, run.trace.len());
    for (var, value) in run.config.main_env().unwrap() {
        println!("{var} = {value:?}");
    }
}
