//! The bank from the client side: open accounts, hire an employee, move
//! money, and read balances through futures.

use std::time::Duration;

use mac_bench::Bank;
use mac_core::Value;
use mac_runtime::ActorConfig;

fn main() {
    let bank = Bank::new(8, 2, Duration::ZERO, ActorConfig::default()).unwrap();
    let a = bank.create_account(100).get().unwrap();
    let b = bank.create_account(100).get().unwrap();
    bank.add_employee().unwrap();

    let w = bank.withdraw(a, 50);
    let t = bank.transfer(a, b, 80);
    let d = bank.deposit(b, 5);
    let c = bank.check(a);
    println!("withdraw 50 -> {:?}", w.get());
    println!("transfer 80 -> {:?} (only 50 left)", t.get());
    println!("deposit 5   -> {:?}", d.get());
    println!("check a     -> {:?}", c.get());
    println!("transfer locks {:?}", bank.sync_for("transfer", &[Value::Int(a), Value::Int(b), Value::Int(80)]));

    bank.shutdown();
    println!("balances {:?}, overlaps {}", bank.accounts().balances(), bank.accounts().overlaps());
}
