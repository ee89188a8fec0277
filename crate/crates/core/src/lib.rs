//! Multi-threaded actors: a language of actors built from groups of active
//! objects that share one message queue, a scheduling rule over
//! synchronized message arguments, and a reference interpreter.
//!
//! * [`parse`], [`resolve`] and [`print`] handle `.mac` source text.
//! * [`scheduler`] holds lock sets and the message selection rule, shared
//!   with the threaded runtime in `mac-runtime`.
//! * [`interp`] is the small-step interpreter; [`explore`] enumerates every
//!   interleaving of a small program and checks the scheduling invariants.

pub mod ast;
pub mod explore;
pub mod interp;
pub mod parse;
pub mod print;
pub mod programs;
pub mod resolve;
pub mod scheduler;
#[cfg(feature = "testing")]
pub mod testing;
mod value;

pub use explore::{explore_all, ExploreOptions, ExploreReport};
pub use interp::{Configuration, Interpreter, Policy, Rule, StepLabel};
pub use parse::{parse_program, SyntaxError};
pub use print::pretty_print;
pub use scheduler::{lock_union, select, sync_set_of, LockSet, SyncEntry};
pub use value::{FutId, ObjId, Value};
