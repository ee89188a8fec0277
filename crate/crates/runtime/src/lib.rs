//! Multi-threaded actors on real threads.
//!
//! A [`MacActor`] owns a pool of workers that share one message queue.
//! Each message carries a [`LockSet`](mac_core::LockSet) of sync entries;
//! the dispatcher hands a message to an idle worker only when its entries
//! are not held by a running message and not needed by an earlier pending
//! one, using the same selection rule as the interpreter in `mac-core`.
//!
//! ```
//! use mac_core::{LockSet, SyncEntry};
//! use mac_runtime::MacActor;
//!
//! let actor = MacActor::new(|| 0i64, 2).unwrap();
//! let key: LockSet = [SyncEntry::new("a", 1)].into_iter().collect();
//! let f = actor.submit(key, |n: &mut i64| {
//!     *n += 1;
//!     *n
//! });
//! assert_eq!(f.get(), Ok(1));
//! actor.shutdown(true);
//! ```

mod actor;
mod future;
pub mod log;
pub mod queue;

pub use actor::{ActiveObject, ActorConfig, ActorError, ActorStats, MacActor, ShutdownReport, Snapshot};
pub use future::{Future, FutureError};
pub use log::{EventKind, EventLog, LogRecord};
