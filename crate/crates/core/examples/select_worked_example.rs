//! The m1..m5 queue: which message an idle object takes while others run.

use mac_core::{lock_union, select, sync_set_of, LockSet, Value};
use mac_core::scheduler::{select_with, SkipMode};

fn main() {
    let one = |x| sync_set_of(&[Some("l")], &[Value::Int(x)]).unwrap();
    let m1 = one(1);
    let m2 = sync_set_of(&[Some("lp")], &[Value::Int(1)]).unwrap();
    let m3 = sync_set_of(&[Some("l"), Some("l")], &[Value::Int(1), Value::Int(2)]).unwrap();
    let (m4, m5) = (one(2), one(3));
    let all = |_: &LockSet| true;

    let queue = [m2.clone(), m3.clone(), m4.clone(), m5.clone()];
    println!("m1 running: pick {:?} (m2)", select(&queue, &m1, all));
    let held = lock_union([&m1, &m2]);
    let queue = [m3.clone(), m4, m5];
    println!("m1, m2 running: pick {:?} (m5; m3 waits on l=1, m4 behind m3 on l=2)", select(&queue, &held, all));
    println!("m2 running: pick {:?} (m3)", select(&queue, &m2, all));

    // An unsupported message still blocks its entries in literal mode.
    let skip_m3 = |m: &LockSet| !std::ptr::eq(m, &queue[0]);
    println!(
        "m3 unsupported: literal {:?}, ignoring unsupported {:?}",
        select_with(&queue, &LockSet::new(), skip_m3, SkipMode::Literal),
        select_with(&queue, &LockSet::new(), skip_m3, SkipMode::IgnoreUnsupported),
    );
}
