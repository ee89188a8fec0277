use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use super::code::Code;
use crate::scheduler::{LockSet, Pending};
use crate::{FutId, ObjId, Value};

/// The global state: heap, per-actor event queues, future store, and the
/// running actors with their processes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub heap: BTreeMap<ObjId, ObjectState>,
    pub queues: BTreeMap<ObjId, Vec<Event>>,
    /// `None` is ⊥.
    pub futures: BTreeMap<FutId, Option<Value>>,
    pub actors: BTreeMap<ObjId, ActorState>,
    pub fault: Option<Fault>,
    pub(crate) next_obj: u64,
    pub(crate) next_fut: u64,
    pub(crate) next_priority: u64,
}

/// The local state of an active object.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectState {
    /// `None` only for the anonymous object running `main`.
    pub class: Option<String>,
    pub myactor: ObjId,
    /// Entries locked by the message this object is running.
    pub lock: LockSet,
    pub fields: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ActorState {
    /// Each process is an object with its thread; an empty thread is idle.
    pub processes: BTreeMap<ObjId, Thread>,
}

/// A stack of closures, innermost last.
pub type Thread = Vec<Closure>;

/// An environment with the statements still to run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Closure {
    pub this: ObjId,
    /// Future receiving the return value; set for closures created by
    /// message dispatch.
    pub dest: Option<FutId>,
    pub env: BTreeMap<String, Value>,
    pub(crate) cont: Vec<Segment>,
    /// Variable waiting for the result of a synchronous call (`x = ?`).
    pub awaiting: Option<String>,
}

impl Closure {
    pub fn is_finished(&self) -> bool {
        self.cont.is_empty() && self.awaiting.is_none()
    }
}

/// A position inside a shared statement list.
#[derive(Clone)]
pub(crate) struct Segment {
    pub code: Arc<[Code]>,
    pub pc: usize,
}

impl Segment {
    pub(crate) fn current(&self) -> &Code {
        &self.code[self.pc]
    }
}

// Code is immutable and shared by one interpreter, so segments compare by
// address.
impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.code, &other.code) && self.pc == other.pc
    }
}

impl Eq for Segment {}

impl Hash for Segment {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (Arc::as_ptr(&self.code) as *const Code as usize).hash(state);
        self.pc.hash(state);
    }
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Segment(pc {} of {})", self.pc, self.code.len())
    }
}

/// A queued asynchronous call `m(v̄)` with its destination future.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Event {
    pub method: String,
    pub args: Vec<Value>,
    pub dest: FutId,
    /// Interface declaring the method's signature.
    pub interface: String,
    pub sync: LockSet,
    /// Arrival order, unique and increasing.
    pub priority: u64,
}

impl Pending for Event {
    fn sync_set(&self) -> &LockSet {
        &self.sync
    }
}

/// A terminal error state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Fault {
    pub object: ObjId,
    pub message: String,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fault in {}: {}", self.object, self.message)
    }
}

impl Configuration {
    pub fn future(&self, f: FutId) -> Option<&Value> {
        self.futures.get(&f).and_then(|v| v.as_ref())
    }

    pub fn object(&self, o: ObjId) -> Option<&ObjectState> {
        self.heap.get(&o)
    }

    /// Environment of the `main` closure.
    pub fn main_env(&self) -> Option<&BTreeMap<String, Value>> {
        self.actors
            .get(&ObjId::ANONYMOUS)?
            .processes
            .get(&ObjId::ANONYMOUS)?
            .first()
            .map(|c| &c.env)
    }

    /// A `main` variable, read through any future it holds.
    pub fn main_value(&self, var: &str) -> Option<&Value> {
        match self.main_env()?.get(var)? {
            Value::Fut(f) => self.future(*f),
            v => Some(v),
        }
    }

    /// Lock sets of the objects of `actor`.
    pub fn locks_of(&self, actor: ObjId) -> impl Iterator<Item = (ObjId, &LockSet)> + '_ {
        self.actors
            .get(&actor)
            .into_iter()
            .flat_map(|a| a.processes.keys())
            .filter_map(|o| self.heap.get(o).map(|s| (*o, &s.lock)))
    }

    /// Total number of processes across all actors.
    pub fn process_count(&self) -> usize {
        self.actors.values().map(|a| a.processes.len()).sum()
    }

    pub fn is_faulted(&self) -> bool {
        self.fault.is_some()
    }
}
