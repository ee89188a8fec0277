//! Calls by method name on a behavior that implements `ActiveObject`, and
//! what the futures report for errors, panics, and shutdown.

use mac_core::{LockSet, SyncEntry, Value};
use mac_runtime::{ActiveObject, FutureError, MacActor};

struct Counter {
    total: i64,
}

impl ActiveObject for Counter {
    fn call(&mut self, method: &str, args: &[Value]) -> Result<Value, String> {
        match (method, args) {
            ("add", [Value::Int(n)]) => {
                self.total += n;
                Ok(Value::Int(self.total))
            }
            ("boom", _) => panic!("boom"),
            _ => Err(format!("no method {method}/{}", args.len())),
        }
    }
}

fn main() {
    // One counter per worker; the shared key makes the two calls ordered.
    let actor = MacActor::new(|| Counter { total: 0 }, 1).unwrap();
    let key: LockSet = [SyncEntry::new("c", 0)].into_iter().collect();
    let a = actor.send("add", vec![Value::Int(2)], key.clone());
    let b = actor.send("add", vec![Value::Int(3)], key);
    println!("add 2 -> {:?}, add 3 -> {:?}", a.get(), b.get());
    println!("bad call -> {:?}", actor.send("sub", vec![], LockSet::new()).get());
    // The worker survives; keep the default hook's backtrace out of the output.
    std::panic::set_hook(Box::new(|_| {}));
    println!("panic -> {:?}", actor.send("boom", vec![], LockSet::new()).get());

    let report = actor.shutdown(true);
    println!("{report:?}");
    let late = actor.send("add", vec![Value::Int(1)], LockSet::new());
    assert_eq!(late.get(), Err(FutureError::Rejected));
    println!("after shutdown -> {:?}", late.get());
}
