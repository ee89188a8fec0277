//! Four workers share one queue. Messages on different keys run in
//! parallel; messages on the same key run one at a time, in send order.

use std::thread::sleep;
use std::time::{Duration, Instant};

use mac_core::{LockSet, SyncEntry};
use mac_runtime::MacActor;

fn key(k: i64) -> LockSet {
    [SyncEntry::new("k", k)].into_iter().collect()
}

fn main() {
    let actor = MacActor::new(Vec::<i64>::new, 4).unwrap();
    let t = Instant::now();
    let futures: Vec<_> = (0..16)
        .map(|i| {
            actor.submit(key(i % 4), move |seen: &mut Vec<i64>| {
                sleep(Duration::from_millis(20));
                seen.push(i);
                (i, seen.len())
            })
        })
        .collect();
    for f in futures {
        let (i, n) = f.get().unwrap();
        println!("message {i:>2} on key {} was this worker's message #{n}", i % 4);
    }
    // 16 sleeps of 20ms on 4 keys: about 80ms, not 320ms.
    println!("elapsed {:.0?}", t.elapsed());
    println!("{:?}", actor.stats());
    actor.shutdown(true);
}
