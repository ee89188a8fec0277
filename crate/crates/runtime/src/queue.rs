//! The pending-message queue with a cached blocked prefix.
//!
//! Messages found blocked are kept at the front in priority order together
//! with the union of their lock sets, playing the part of the locked
//! queue: later scans start after them. Releasing any lock flushes the
//! prefix so everything is examined again. While no lock is released,
//! blocked messages stay blocked, so the result equals a full scan with
//! [`mac_core::select`].

use std::collections::{HashSet, VecDeque};

use mac_core::scheduler::Pending;
use mac_core::{LockSet, SyncEntry};

#[derive(Debug)]
pub struct Queued<T> {
    pub priority: u64,
    pub sync: LockSet,
    pub payload: T,
}

impl<T> Pending for Queued<T> {
    fn sync_set(&self) -> &LockSet {
        &self.sync
    }
}

#[derive(Debug)]
pub struct DispatchQueue<T> {
    items: VecDeque<Queued<T>>,
    /// Leading messages already found blocked.
    locked: usize,
    /// Union of the lock sets of the leading blocked messages.
    locked_data: HashSet<SyncEntry>,
}

impl<T> Default for DispatchQueue<T> {
    fn default() -> Self {
        DispatchQueue { items: VecDeque::new(), locked: 0, locked_data: HashSet::new() }
    }
}

impl<T> DispatchQueue<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Messages currently parked in the blocked prefix.
    pub fn locked_len(&self) -> usize {
        self.locked
    }

    /// Appends a message. Priorities must increase.
    pub fn push(&mut self, priority: u64, sync: LockSet, payload: T) {
        debug_assert!(self.items.back().is_none_or(|b| b.priority < priority));
        self.items.push_back(Queued { priority, sync, payload });
    }

    /// Forgets the blocked prefix. Call whenever a lock is released.
    pub fn flush(&mut self) {
        self.locked = 0;
        self.locked_data.clear();
    }

    /// Removes the first message whose lock set misses both `busy` and
    /// every earlier pending message's set.
    pub fn take_next(&mut self, busy: &HashSet<SyncEntry>) -> Option<Queued<T>> {
        while self.locked < self.items.len() {
            let m = &self.items[self.locked];
            let free = m.sync.iter().all(|e| !busy.contains(e) && !self.locked_data.contains(e));
            if free {
                return self.items.remove(self.locked);
            }
            self.locked_data.extend(m.sync.iter().cloned());
            self.locked += 1;
        }
        None
    }

    /// Removes every message, in priority order.
    pub fn drain(&mut self) -> impl Iterator<Item = Queued<T>> + '_ {
        self.flush();
        self.items.drain(..)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Queued<T>> {
        self.items.iter()
    }
}
