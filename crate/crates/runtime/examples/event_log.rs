//! Writes the runtime's event log as JSONL to stdout.

use mac_core::{LockSet, SyncEntry};
use mac_runtime::{ActorConfig, EventLog, MacActor};

fn main() {
    let log = EventLog::memory();
    let actor = MacActor::with_config(|| 0i64, 2, ActorConfig { log: Some(log.clone()) }).unwrap();
    let key: LockSet = [SyncEntry::new("a", 1), SyncEntry::new("a", 2)].into_iter().collect();
    let xs: Vec<_> = (0..3).map(|i| actor.try_submit_as(Some("bump"), key.clone(), move |n: &mut i64| Ok(*n + i))).collect();
    for x in xs {
        x.get().unwrap();
    }
    actor.shutdown(true);
    log.write_jsonl(std::io::stdout().lock()).unwrap();
}
