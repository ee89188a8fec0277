//! The bank service: employees are workers of one actor and share the
//! account table. Account numbers start at 1.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use mac_core::{parse_program, sync_set_of, LockSet, Value};
use mac_runtime::{ActiveObject, ActorConfig, ActorError, Future, MacActor};

struct Account {
    // Relaxed atomics: exclusive access comes from the actor's locks, the
    // atomics only make the sharing expressible. A lock bug shows up as
    // a wrong balance or a tripped canary, never as undefined behavior.
    balance: AtomicI64,
    in_use: AtomicBool,
}

/// Fixed-capacity account table shared by all employees.
pub struct Accounts {
    slots: Box<[Account]>,
    opened: AtomicUsize,
    overlaps: AtomicU64,
}

impl Accounts {
    pub fn new(capacity: usize) -> Self {
        let slots = (0..capacity).map(|_| Account { balance: AtomicI64::new(0), in_use: AtomicBool::new(false) }).collect();
        Accounts { slots, opened: AtomicUsize::new(0), overlaps: AtomicU64::new(0) }
    }

    pub fn len(&self) -> usize {
        self.opened.load(Ordering::SeqCst).min(self.slots.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Times two messages were inside the same account at once.
    pub fn overlaps(&self) -> u64 {
        self.overlaps.load(Ordering::SeqCst)
    }

    /// Current balances, account 1 first.
    pub fn balances(&self) -> Vec<i64> {
        self.slots[..self.len()].iter().map(|a| a.balance.load(Ordering::SeqCst)).collect()
    }

    fn get(&self, acc: i64) -> Result<&Account, String> {
        usize::try_from(acc)
            .ok()
            .filter(|&n| n >= 1 && n <= self.len())
            .map(|n| &self.slots[n - 1])
            .ok_or_else(|| format!("no account {acc}"))
    }
}

/// Marks accounts as in use for the duration of a method.
struct Canary<'a> {
    held: Vec<&'a Account>,
}

impl<'a> Canary<'a> {
    fn enter(accounts: &'a Accounts, accs: &[&'a Account]) -> Self {
        let mut held: Vec<&'a Account> = Vec::new();
        for a in accs {
            if held.iter().any(|h| std::ptr::eq(*h, *a)) {
                continue;
            }
            if a.in_use.swap(true, Ordering::SeqCst) {
                accounts.overlaps.fetch_add(1, Ordering::SeqCst);
            }
            held.push(*a);
        }
        Canary { held }
    }
}

impl Drop for Canary<'_> {
    fn drop(&mut self) {
        for a in &self.held {
            a.in_use.store(false, Ordering::SeqCst);
        }
    }
}

fn spin(work: Duration) {
    if work.is_zero() {
        return;
    }
    let t = Instant::now();
    while t.elapsed() < work {
        std::hint::spin_loop();
    }
}

/// One employee.
#[derive(Clone)]
pub struct BankBehavior {
    accounts: Arc<Accounts>,
    /// Busy-spin per request, standing in for real processing.
    work: Duration,
}

impl BankBehavior {
    pub fn new(accounts: Arc<Accounts>, work: Duration) -> Self {
        BankBehavior { accounts, work }
    }

    pub fn create_account(&mut self, initial: i64) -> Result<i64, String> {
        let n = self.accounts.opened.fetch_add(1, Ordering::SeqCst);
        let Some(slot) = self.accounts.slots.get(n) else {
            self.accounts.opened.fetch_sub(1, Ordering::SeqCst);
            return Err("account table is full".into());
        };
        slot.balance.store(initial, Ordering::SeqCst);
        Ok(n as i64 + 1)
    }

    /// Fails without touching the balance when funds are short.
    pub fn withdraw(&mut self, acc: i64, amount: i64) -> Result<bool, String> {
        let a = self.accounts.get(acc)?;
        let _c = Canary::enter(&self.accounts, &[a]);
        spin(self.work);
        Ok(take(a, amount))
    }

    pub fn deposit(&mut self, acc: i64, amount: i64) -> Result<bool, String> {
        let a = self.accounts.get(acc)?;
        let _c = Canary::enter(&self.accounts, &[a]);
        spin(self.work);
        put(a, amount);
        Ok(true)
    }

    pub fn transfer(&mut self, from: i64, to: i64, amount: i64) -> Result<bool, String> {
        let (src, dst) = (self.accounts.get(from)?, self.accounts.get(to)?);
        let _c = Canary::enter(&self.accounts, &[src, dst]);
        spin(self.work);
        let ok = take(src, amount);
        if ok {
            put(dst, amount);
        }
        Ok(ok)
    }

    pub fn check(&mut self, acc: i64) -> Result<i64, String> {
        let a = self.accounts.get(acc)?;
        let _c = Canary::enter(&self.accounts, &[a]);
        spin(self.work);
        Ok(a.balance.load(Ordering::Relaxed))
    }
}

fn take(a: &Account, amount: i64) -> bool {
    let b = a.balance.load(Ordering::Relaxed);
    if amount <= b {
        a.balance.store(b - amount, Ordering::Relaxed);
        true
    } else {
        false
    }
}

fn put(a: &Account, amount: i64) {
    let b = a.balance.load(Ordering::Relaxed);
    a.balance.store(b + amount, Ordering::Relaxed);
}

fn int(args: &[Value], i: usize) -> Result<i64, String> {
    args.get(i).and_then(Value::as_int).ok_or_else(|| format!("argument {i} is not an integer"))
}

impl ActiveObject for BankBehavior {
    fn call(&mut self, method: &str, args: &[Value]) -> Result<Value, String> {
        match method {
            "createAcc" => self.create_account(int(args, 0)?).map(Value::Int),
            "withdraw" => self.withdraw(int(args, 0)?, int(args, 1)?).map(Value::Bool),
            "deposit" => self.deposit(int(args, 0)?, int(args, 1)?).map(Value::Bool),
            "transfer" => self.transfer(int(args, 0)?, int(args, 1)?, int(args, 2)?).map(Value::Bool),
            "check" => self.check(int(args, 0)?).map(Value::Int),
            _ => Err(format!("unknown method {method}")),
        }
    }
}

/// Sync labels of the employee interface, read from the bank listing.
pub fn employee_signatures() -> HashMap<String, Vec<Option<String>>> {
    let p = parse_program(mac_core::programs::BANK).expect("bank listing parses");
    let iface = p.interface("IEmployee").expect("employee interface");
    iface
        .sigs
        .iter()
        .map(|s| (s.name.clone(), s.sync_labels().into_iter().map(|l| l.map(str::to_string)).collect()))
        .collect()
}

/// Typed front end of the bank actor. Every call derives its lock set
/// from the `sync<a>` annotations of the employee interface.
pub struct Bank {
    actor: MacActor<BankBehavior>,
    accounts: Arc<Accounts>,
    signatures: HashMap<String, Vec<Option<String>>>,
    work: Duration,
}

impl Bank {
    pub fn new(capacity: usize, employees: usize, work: Duration, config: ActorConfig) -> Result<Self, ActorError> {
        let accounts = Arc::new(Accounts::new(capacity));
        let proto = BankBehavior::new(accounts.clone(), work);
        let actor = MacActor::with_config(|| proto.clone(), employees, config)?;
        Ok(Bank { actor, accounts, signatures: employee_signatures(), work })
    }

    pub fn actor(&self) -> &MacActor<BankBehavior> {
        &self.actor
    }

    pub fn accounts(&self) -> &Accounts {
        &self.accounts
    }

    /// Lock set of `method(args)`.
    pub fn sync_for(&self, method: &str, args: &[Value]) -> LockSet {
        let labels = self.signatures.get(method).unwrap_or_else(|| panic!("no signature for {method}"));
        sync_set_of(labels, args).unwrap_or_else(|e| panic!("{method}: {e}"))
    }

    /// `addEmp`: one more worker sharing the accounts.
    pub fn add_employee(&self) -> Result<usize, ActorError> {
        self.actor.add_worker(BankBehavior::new(self.accounts.clone(), self.work))
    }

    fn call<R, F>(&self, method: &str, args: &[i64], f: F) -> Future<R>
    where
        R: Send + 'static,
        F: FnOnce(&mut BankBehavior) -> Result<R, String> + Send + 'static,
    {
        let values: Vec<Value> = args.iter().map(|&a| Value::Int(a)).collect();
        self.actor.try_submit_as(Some(method), self.sync_for(method, &values), f)
    }

    pub fn create_account(&self, initial: i64) -> Future<i64> {
        self.call("createAcc", &[initial], move |b| b.create_account(initial))
    }

    pub fn withdraw(&self, acc: i64, amount: i64) -> Future<bool> {
        self.call("withdraw", &[acc, amount], move |b| b.withdraw(acc, amount))
    }

    pub fn deposit(&self, acc: i64, amount: i64) -> Future<bool> {
        self.call("deposit", &[acc, amount], move |b| b.deposit(acc, amount))
    }

    pub fn transfer(&self, from: i64, to: i64, amount: i64) -> Future<bool> {
        self.call("transfer", &[from, to, amount], move |b| b.transfer(from, to, amount))
    }

    pub fn check(&self, acc: i64) -> Future<i64> {
        self.call("check", &[acc], move |b| b.check(acc))
    }

    pub fn shutdown(&self) -> mac_runtime::ShutdownReport {
        self.actor.shutdown(true)
    }
}
