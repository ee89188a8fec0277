//! Mutual exclusion and ordering checks over a runtime event log.

use std::collections::{BTreeMap, HashMap};

use mac_core::SyncEntry;
use mac_runtime::{EventKind, LogRecord};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// Distinct `(actor, entry)` keys seen.
    pub keys: usize,
    pub messages: usize,
    /// Two messages sharing an entry ran at overlapping times.
    pub overlaps: usize,
    /// Two messages sharing an entry started out of priority order.
    pub misordered: usize,
    /// A message was enqueued but never completed.
    pub unfinished: usize,
    pub first_problem: Option<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.overlaps == 0 && self.misordered == 0 && self.unfinished == 0
    }
}

#[derive(Default, Clone)]
struct Life {
    sync: Vec<SyncEntry>,
    enqueued: bool,
    start: Option<u64>,
    end: Option<u64>,
}

pub fn audit(records: &[LogRecord]) -> AuditReport {
    let mut lives: HashMap<(u64, u64), Life> = HashMap::new();
    for r in records {
        let life = lives.entry((r.actor, r.priority)).or_default();
        if life.sync.is_empty() {
            life.sync = r.sync.clone();
        }
        match r.event {
            EventKind::Enqueue => life.enqueued = true,
            EventKind::Start => life.start = Some(r.t_ns),
            EventKind::Complete => life.end = Some(r.t_ns),
            EventKind::Dispatch => {}
        }
    }

    let mut report = AuditReport { messages: lives.len(), ..Default::default() };
    let note = |report: &mut AuditReport, msg: String| {
        if report.first_problem.is_none() {
            report.first_problem = Some(msg);
        }
    };

    // Per key, (priority, start, end) sorted by priority.
    let mut by_key: BTreeMap<(u64, &SyncEntry), Vec<(u64, u64, u64)>> = BTreeMap::new();
    for (&(actor, priority), life) in &lives {
        let (Some(start), Some(end), true) = (life.start, life.end, life.enqueued) else {
            report.unfinished += 1;
            note(&mut report, format!("message #{priority} of actor {actor} did not complete"));
            continue;
        };
        for e in &life.sync {
            by_key.entry((actor, e)).or_default().push((priority, start, end));
        }
    }
    report.keys = by_key.len();
    for ((actor, entry), mut runs) in by_key {
        runs.sort_unstable();
        for w in runs.windows(2) {
            let ((p0, s0, e0), (p1, s1, _)) = (w[0], w[1]);
            if s1 < s0 {
                report.misordered += 1;
                note(&mut report, format!("actor {actor} {entry:?}: #{p1} started before #{p0}"));
            }
            if s1 < e0 {
                report.overlaps += 1;
                note(&mut report, format!("actor {actor} {entry:?}: #{p1} started before #{p0} completed"));
            }
        }
    }
    report
}
