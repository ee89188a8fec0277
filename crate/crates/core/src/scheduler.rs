//! Synchronized-data bookkeeping and message selection.
//!
//! A message carries a [`LockSet`]: the `(label, value)` pairs of its
//! arguments declared `sync<label>`. An idle active object may take the
//! first queued message whose lock set is disjoint from
//!
//! * every entry currently held by some object of the actor, and
//! * every entry of a message queued before it that was skipped,
//!
//! and whose signature the object supports. This is the only selection
//! rule; the interpreter and the threaded runtime both call into it.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Value;

/// A lock claim on synchronized data: a user label paired with a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SyncEntry {
    pub label: String,
    pub value: Value,
}

impl SyncEntry {
    pub fn new(label: impl Into<String>, value: impl Into<Value>) -> Self {
        SyncEntry { label: label.into(), value: value.into() }
    }
}

impl fmt::Display for SyncEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.label, self.value)
    }
}

/// A finite set of sync entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LockSet(BTreeSet<SyncEntry>);

impl LockSet {
    pub fn new() -> Self {
        LockSet::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &SyncEntry) -> bool {
        self.0.contains(e)
    }

    pub fn insert(&mut self, e: SyncEntry) -> bool {
        self.0.insert(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SyncEntry> {
        self.0.iter()
    }

    pub fn is_disjoint(&self, other: &LockSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &LockSet) -> LockSet {
        LockSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &LockSet) -> LockSet {
        LockSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn extend(&mut self, other: &LockSet) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl FromIterator<SyncEntry> for LockSet {
    fn from_iter<T: IntoIterator<Item = SyncEntry>>(iter: T) -> Self {
        LockSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a LockSet {
    type Item = &'a SyncEntry;
    type IntoIter = std::collections::btree_set::Iter<'a, SyncEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for LockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("method takes {expected} argument(s), {found} given")]
pub struct ArityMismatch {
    pub expected: usize,
    pub found: usize,
}

/// The synchronized arguments of a call: `(label_i, args_i)` for every
/// parameter position `i` that carries a label.
pub fn sync_set_of<L: AsRef<str>>(labels: &[Option<L>], args: &[Value]) -> Result<LockSet, ArityMismatch> {
    if labels.len() != args.len() {
        return Err(ArityMismatch { expected: labels.len(), found: args.len() });
    }
    Ok(labels
        .iter()
        .zip(args)
        .filter_map(|(l, v)| l.as_ref().map(|l| SyncEntry::new(l.as_ref(), v.clone())))
        .collect())
}

/// Union of the lock sets held by the objects of one actor.
pub fn lock_union<'a>(parts: impl IntoIterator<Item = &'a LockSet>) -> LockSet {
    let mut out = LockSet::new();
    for p in parts {
        out.extend(p);
    }
    out
}

/// Anything that can sit in an actor queue.
pub trait Pending {
    fn sync_set(&self) -> &LockSet;
}

impl Pending for LockSet {
    fn sync_set(&self) -> &LockSet {
        self
    }
}

/// Read-only view of the entries currently held by an actor.
pub trait HeldLocks {
    fn holds(&self, e: &SyncEntry) -> bool;
}

impl HeldLocks for LockSet {
    fn holds(&self, e: &SyncEntry) -> bool {
        self.contains(e)
    }
}

impl HeldLocks for HashSet<SyncEntry> {
    fn holds(&self, e: &SyncEntry) -> bool {
        self.contains(e)
    }
}

/// How a message skipped because its signature is unsupported affects the
/// messages behind it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SkipMode {
    /// Every skipped message contributes its lock set, whatever the reason
    /// it was skipped. This is the normative rule.
    #[default]
    Literal,
    /// Non-normative: a message skipped only for its signature does not
    /// block later messages.
    IgnoreUnsupported,
}

/// Returns the queue index of the selected message, or `None` for ⊥.
///
/// `supported` decides whether the idle object's interface contains the
/// message's signature. The queue is not mutated.
pub fn select<'q, M, I, H, F>(queue: I, held: &H, supported: F) -> Option<usize>
where
    M: Pending + 'q,
    I: IntoIterator<Item = &'q M>,
    H: HeldLocks + ?Sized,
    F: FnMut(&M) -> bool,
{
    select_with(queue, held, supported, SkipMode::Literal)
}

pub fn select_with<'q, M, I, H, F>(queue: I, held: &H, mut supported: F, mode: SkipMode) -> Option<usize>
where
    M: Pending + 'q,
    I: IntoIterator<Item = &'q M>,
    H: HeldLocks + ?Sized,
    F: FnMut(&M) -> bool,
{
    let mut skipped: HashSet<&SyncEntry> = HashSet::new();
    for (idx, msg) in queue.into_iter().enumerate() {
        let set = msg.sync_set();
        let free = set.iter().all(|e| !held.holds(e) && !skipped.contains(e));
        let ok_sig = supported(msg);
        if free && ok_sig {
            return Some(idx);
        }
        if free && !ok_sig && mode == SkipMode::IgnoreUnsupported {
            continue;
        }
        skipped.extend(set.iter());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(entries: &[(&str, i64)]) -> LockSet {
        entries.iter().map(|(l, v)| SyncEntry::new(*l, *v)).collect()
    }

    #[test]
    fn sync_set_examples() {
        let withdraw = [Some("a"), None];
        assert_eq!(sync_set_of(&withdraw, &[7.into(), 50.into()]).unwrap(), set(&[("a", 7)]));
        let transfer = [Some("a"), Some("a"), None];
        assert_eq!(
            sync_set_of(&transfer, &[1.into(), 2.into(), 10.into()]).unwrap(),
            set(&[("a", 1), ("a", 2)])
        );
        let none: [Option<&str>; 2] = [None, None];
        assert!(sync_set_of(&none, &[1.into(), 2.into()]).unwrap().is_empty());
        assert_eq!(
            sync_set_of(&withdraw, &[1.into()]).unwrap_err(),
            ArityMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn same_value_twice_collapses() {
        let transfer = [Some("a"), Some("a"), None];
        assert_eq!(sync_set_of(&transfer, &[3.into(), 3.into(), 1.into()]).unwrap(), set(&[("a", 3)]));
    }

    #[test]
    fn lock_union_examples() {
        assert_eq!(lock_union([&set(&[("a", 1)]), &set(&[("a", 2)])]), set(&[("a", 1), ("a", 2)]));
        assert!(lock_union([&LockSet::new(), &LockSet::new()]).is_empty());
    }

    #[test]
    fn empty_queue_is_undefined() {
        let q: Vec<LockSet> = vec![];
        assert_eq!(select(&q, &set(&[("l", 1)]), |_| true), None);
    }

    #[test]
    fn unsupported_message_blocks_followers_only_in_literal_mode() {
        // head: unsupported, second conflicts with the head's set.
        let q = vec![set(&[("a", 1)]), set(&[("a", 1)])];
        let mut first = true;
        let mut sup = |_: &LockSet| !std::mem::replace(&mut first, false);
        assert_eq!(select_with(&q, &LockSet::new(), &mut sup, SkipMode::Literal), None);
        let mut first = true;
        let sup = |_: &LockSet| !std::mem::replace(&mut first, false);
        assert_eq!(select_with(&q, &LockSet::new(), sup, SkipMode::IgnoreUnsupported), Some(1));
    }

    #[test]
    fn hash_set_view_agrees() {
        let q = vec![set(&[("a", 1)]), set(&[("a", 2)])];
        let held: HashSet<SyncEntry> = [SyncEntry::new("a", 1)].into_iter().collect();
        assert_eq!(select(&q, &held, |_| true), Some(1));
    }
}
