//! Starts with one worker, adds more while messages wait, and watches the
//! dispatcher state through snapshots.

use std::sync::{Arc, Barrier};

use mac_core::{LockSet, SyncEntry};
use mac_runtime::MacActor;

fn running(actor: &MacActor<()>, n: usize) -> mac_runtime::Snapshot {
    loop {
        let s = actor.snapshot();
        if s.running.len() == n {
            return s;
        }
        std::thread::yield_now();
    }
}

fn main() {
    let gate = Arc::new(Barrier::new(4));
    let actor = MacActor::new(|| (), 1).unwrap();
    let futures: Vec<_> = (0..3)
        .map(|i| {
            let gate = gate.clone();
            let key: LockSet = [SyncEntry::new("job", i)].into_iter().collect();
            actor.submit(key, move |_: &mut ()| {
                gate.wait();
                i
            })
        })
        .collect();
    println!("one worker: {:?}", running(&actor, 1));
    for k in 2..=3 {
        let n = actor.add_worker(()).unwrap();
        println!("added worker {n}: {:?}", running(&actor, k));
    }
    // All three messages now run at once and can meet at the barrier.
    gate.wait();
    let done: Vec<_> = futures.iter().map(|f| f.get().unwrap()).collect();
    println!("done {done:?}, max running {}", actor.stats().max_running);
    actor.shutdown(true);
}
