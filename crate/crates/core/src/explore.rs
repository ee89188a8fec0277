//! Breadth-first exploration of every interleaving up to a depth bound,
//! checking the scheduling invariants on every reached configuration.
//!
//! Visited configurations are deduplicated by a 64-bit fingerprint.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::interp::{Configuration, Interpreter, Rule, StepLabel};
use crate::scheduler::LockSet;
use crate::ObjId;

#[derive(Debug, Clone, Copy)]
pub struct Checks {
    /// Objects of one actor hold pairwise disjoint lock sets.
    pub lock_disjointness: bool,
    /// Messages with intersecting lock sets are dispatched in queue order.
    pub dispatch_order: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks { lock_disjointness: true, dispatch_order: true }
    }
}

#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub depth: usize,
    pub checks: Checks,
    /// Stop after visiting this many distinct configurations.
    pub max_states: Option<usize>,
}

impl ExploreOptions {
    pub fn new(depth: usize) -> Self {
        ExploreOptions { depth, checks: Checks::default(), max_states: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    LockOverlap { actor: ObjId, first: ObjId, second: ObjId, shared: LockSet },
    DispatchOrder { actor: ObjId, dispatched: u64, overtaken: u64 },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::LockOverlap { actor, first, second, shared } => {
                write!(f, "objects {first} and {second} of actor {actor} both hold {shared}")
            }
            ViolationKind::DispatchOrder { actor, dispatched, overtaken } => write!(
                f,
                "actor {actor} dispatched message #{dispatched} ahead of conflicting message #{overtaken}"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Steps from the initial configuration to the violation.
    pub trace: Vec<StepLabel>,
}

#[derive(Debug, Clone, Default)]
pub struct ExploreReport {
    pub states: usize,
    pub transitions: usize,
    /// Deepest level reached.
    pub max_depth: usize,
    /// Some configuration at the depth bound still had enabled steps.
    pub depth_exhausted: bool,
    pub state_limit_hit: bool,
    pub lock_violations: usize,
    pub order_violations: usize,
    /// The first violation found, with its trace.
    pub first_violation: Option<Violation>,
    /// Configurations with no enabled step (including fault states).
    pub terminals: Vec<Configuration>,
}

impl ExploreReport {
    pub fn violations(&self) -> usize {
        self.lock_violations + self.order_violations
    }

    /// Exploration covered every interleaving.
    pub fn complete(&self) -> bool {
        !self.depth_exhausted && !self.state_limit_hit
    }
}

fn fingerprint(c: &Configuration) -> u64 {
    let mut h = DefaultHasher::new();
    c.hash(&mut h);
    h.finish()
}

/// First pair of objects of one actor holding a common entry.
pub fn lock_overlap(c: &Configuration) -> Option<ViolationKind> {
    for actor in c.actors.keys() {
        let locks: Vec<_> = c.locks_of(*actor).filter(|(_, l)| !l.is_empty()).collect();
        for (i, (a, la)) in locks.iter().enumerate() {
            for (b, lb) in &locks[i + 1..] {
                if !la.is_disjoint(lb) {
                    return Some(ViolationKind::LockOverlap {
                        actor: *actor,
                        first: *a,
                        second: *b,
                        shared: la.intersection(lb),
                    });
                }
            }
        }
    }
    None
}

/// Whether a dispatch step overtook an earlier conflicting message.
pub fn order_violation(before: &Configuration, label: &StepLabel) -> Option<ViolationKind> {
    if label.rule != Rule::SchedMsg {
        return None;
    }
    let dispatched = label.priority?;
    let queue = before.queues.get(&label.actor)?;
    let msg = queue.iter().find(|e| e.priority == dispatched)?;
    queue
        .iter()
        .find(|e| e.priority < dispatched && !e.sync.is_disjoint(&msg.sync))
        .map(|e| ViolationKind::DispatchOrder { actor: label.actor, dispatched, overtaken: e.priority })
}

struct Node {
    parent: Option<usize>,
    label: Option<StepLabel>,
}

fn trace_to(nodes: &[Node], mut idx: usize, last: Option<&StepLabel>) -> Vec<StepLabel> {
    let mut out: Vec<StepLabel> = last.into_iter().cloned().collect();
    while let Some(node) = nodes.get(idx) {
        if let Some(l) = &node.label {
            out.push(l.clone());
        }
        match node.parent {
            Some(p) => idx = p,
            None => break,
        }
    }
    out.reverse();
    out
}

pub fn explore_all(interp: &Interpreter, initial: Configuration, opts: &ExploreOptions) -> ExploreReport {
    let mut report = ExploreReport::default();
    let mut nodes = vec![Node { parent: None, label: None }];
    let mut seen: HashMap<u64, usize> = HashMap::new();
    seen.insert(fingerprint(&initial), 0);
    let mut frontier = VecDeque::new();

    let record = |report: &mut ExploreReport, kind: ViolationKind, trace: &dyn Fn() -> Vec<StepLabel>| {
        match kind {
            ViolationKind::LockOverlap { .. } => report.lock_violations += 1,
            ViolationKind::DispatchOrder { .. } => report.order_violations += 1,
        }
        if report.first_violation.is_none() {
            report.first_violation = Some(Violation { kind, trace: trace() });
        }
    };

    if opts.checks.lock_disjointness {
        if let Some(kind) = lock_overlap(&initial) {
            record(&mut report, kind, &Vec::new);
        }
    }
    frontier.push_back((0usize, initial, 0usize));
    report.states = 1;

    while let Some((idx, config, depth)) = frontier.pop_front() {
        report.max_depth = report.max_depth.max(depth);
        let succ = interp.successors(&config);
        if succ.is_empty() {
            report.terminals.push(config);
            continue;
        }
        if depth >= opts.depth {
            report.depth_exhausted = true;
            continue;
        }
        for (label, next) in succ {
            report.transitions += 1;
            if opts.checks.dispatch_order {
                if let Some(kind) = order_violation(&config, &label) {
                    record(&mut report, kind, &|| trace_to(&nodes, idx, Some(&label)));
                }
            }
            let fp = fingerprint(&next);
            if seen.contains_key(&fp) {
                continue;
            }
            if opts.max_states.is_some_and(|m| report.states >= m) {
                report.state_limit_hit = true;
                continue;
            }
            let child = nodes.len();
            if opts.checks.lock_disjointness {
                if let Some(kind) = lock_overlap(&next) {
                    record(&mut report, kind, &|| trace_to(&nodes, idx, Some(&label)));
                }
            }
            nodes.push(Node { parent: Some(idx), label: Some(label) });
            seen.insert(fp, child);
            report.states += 1;
            frontier.push_back((child, next, depth + 1));
        }
    }
    report
}

impl Interpreter {
    pub fn explore_all(&self, initial: Configuration, opts: &ExploreOptions) -> ExploreReport {
        explore_all(self, initial, opts)
    }
}
