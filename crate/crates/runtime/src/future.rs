use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FutureError {
    #[error("timed out waiting for the future")]
    Timeout,
    /// The method panicked or reported an error.
    #[error("message failed: {0}")]
    Failed(String),
    /// The actor shut down before the message ran.
    #[error("actor shut down before the message ran")]
    Shutdown,
    /// The message was sent after shutdown.
    #[error("actor is shut down; message rejected")]
    Rejected,
}

enum State<T> {
    Pending,
    Done(Result<T, FutureError>),
}

struct Slot<T> {
    state: Mutex<State<T>>,
    ready: Condvar,
}

/// Write-once result of an asynchronous call. Cloning shares the slot.
pub struct Future<T> {
    slot: Arc<Slot<T>>,
}

impl<T> Clone for Future<T> {
    fn clone(&self) -> Self {
        Future { slot: self.slot.clone() }
    }
}

impl<T> std::fmt::Debug for Future<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let done = self.is_resolved();
        f.debug_struct("Future").field("resolved", &done).finish()
    }
}

/// The writing side of a [`Future`].
pub(crate) struct Promise<T> {
    slot: Arc<Slot<T>>,
}

impl<T> Clone for Promise<T> {
    fn clone(&self) -> Self {
        Promise { slot: self.slot.clone() }
    }
}

pub(crate) fn promise<T>() -> (Promise<T>, Future<T>) {
    let slot = Arc::new(Slot { state: Mutex::new(State::Pending), ready: Condvar::new() });
    (Promise { slot: slot.clone() }, Future { slot })
}

impl<T> Promise<T> {
    /// Stores the outcome unless one is already stored. Returns whether
    /// this call wrote it.
    pub fn complete(&self, outcome: Result<T, FutureError>) -> bool {
        let mut st = self.slot.state.lock().unwrap();
        if matches!(*st, State::Done(_)) {
            return false;
        }
        *st = State::Done(outcome);
        self.slot.ready.notify_all();
        true
    }
}

impl<T> Future<T> {
    /// A future that already holds `outcome`.
    pub fn ready(outcome: Result<T, FutureError>) -> Self {
        let (p, f) = promise();
        p.complete(outcome);
        f
    }

    /// `f?`: whether a value or failure is stored.
    pub fn is_resolved(&self) -> bool {
        matches!(*self.slot.state.lock().unwrap(), State::Done(_))
    }
}

impl<T: Clone> Future<T> {
    /// Blocks until resolved.
    ///
    /// Calling this from a worker of the same actor on a message that
    /// needs that worker or its locks deadlocks.
    pub fn get(&self) -> Result<T, FutureError> {
        let mut st = self.slot.state.lock().unwrap();
        loop {
            if let State::Done(r) = &*st {
                return r.clone();
            }
            st = self.slot.ready.wait(st).unwrap();
        }
    }

    pub fn get_timeout(&self, timeout: Duration) -> Result<T, FutureError> {
        let deadline = Instant::now() + timeout;
        let mut st = self.slot.state.lock().unwrap();
        loop {
            if let State::Done(r) = &*st {
                return r.clone();
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(FutureError::Timeout);
            }
            st = self.slot.ready.wait_timeout(st, deadline - now).unwrap().0;
        }
    }

    /// The stored outcome, without blocking.
    pub fn try_get(&self) -> Option<Result<T, FutureError>> {
        match &*self.slot.state.lock().unwrap() {
            State::Done(r) => Some(r.clone()),
            State::Pending => None,
        }
    }
}
