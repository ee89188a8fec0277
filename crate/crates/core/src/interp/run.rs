use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Configuration, Interpreter, StepLabel};

/// How to pick among enabled steps.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Lowest actor id, then lowest object id.
    Fifo,
    /// Uniform choice from a seeded generator.
    Random(u64),
    /// Follow the given labels in order, then stop.
    Scripted(Vec<StepLabel>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// No step is enabled.
    Quiescent,
    /// The configuration entered a fault state.
    Fault(String),
    /// The step budget ran out while steps were still enabled.
    FuelExhausted,
    /// A scripted label was not enabled at the given trace position.
    ScriptRejected { index: usize, label: StepLabel },
    /// Every scripted label was taken.
    ScriptDone,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub config: Configuration,
    pub trace: Vec<StepLabel>,
    pub outcome: Outcome,
}

/// Steps `c` under `policy` until quiescence, a fault, or `fuel` steps.
pub fn run(interp: &Interpreter, c: Configuration, policy: Policy, fuel: usize) -> Run {
    let mut config = c;
    let mut trace = Vec::new();
    let mut rng = match &policy {
        Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut script = match policy {
        Policy::Scripted(labels) => Some(labels.into_iter()),
        _ => None,
    };
    loop {
        if let Some(f) = &config.fault {
            return Run { outcome: Outcome::Fault(f.to_string()), config, trace };
        }
        let mut options = interp.successors(&config);
        if options.is_empty() {
            return Run { config, trace, outcome: Outcome::Quiescent };
        }
        if trace.len() >= fuel {
            return Run { config, trace, outcome: Outcome::FuelExhausted };
        }
        let pick = if let Some(script) = script.as_mut() {
            let Some(want) = script.next() else {
                return Run { config, trace, outcome: Outcome::ScriptDone };
            };
            match options.iter().position(|(l, _)| *l == want) {
                Some(i) => i,
                None => {
                    let index = trace.len();
                    return Run { config, trace, outcome: Outcome::ScriptRejected { index, label: want } };
                }
            }
        } else if let Some(rng) = rng.as_mut() {
            rng.gen_range(0..options.len())
        } else {
            0
        };
        let (label, next) = options.swap_remove(pick);
        trace.push(label);
        config = next;
    }
}

impl Interpreter {
    pub fn run(&self, c: Configuration, policy: Policy, fuel: usize) -> Run {
        run(self, c, policy, fuel)
    }
}
