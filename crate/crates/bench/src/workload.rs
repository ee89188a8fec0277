use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Relative weights of the request kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mix {
    pub withdraw: u32,
    pub deposit: u32,
    pub transfer: u32,
    pub check: u32,
}

impl Default for Mix {
    fn default() -> Self {
        Mix { withdraw: 40, deposit: 40, transfer: 10, check: 10 }
    }
}

impl Mix {
    /// Only transfers, which keep the total balance constant.
    pub fn transfers_only() -> Self {
        Mix { withdraw: 0, deposit: 0, transfer: 1, check: 0 }
    }

    fn total(&self) -> u32 {
        self.withdraw + self.deposit + self.transfer + self.check
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Request {
    Withdraw { acc: i64, amount: i64 },
    Deposit { acc: i64, amount: i64 },
    Transfer { from: i64, to: i64, amount: i64 },
    Check { acc: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    pub accounts: usize,
    pub requests: usize,
    /// Consecutive requests sent to one account before moving on.
    pub batch: usize,
    pub mix: Mix,
    pub seed: u64,
    pub initial_balance: i64,
}

impl Workload {
    pub fn new(accounts: usize, requests: usize, seed: u64) -> Self {
        Workload { accounts, requests, batch: 10, mix: Mix::default(), seed, initial_balance: 1000 }
    }

    /// The request stream: accounts in turn, `batch` requests each, until
    /// `requests` are issued. Amounts are 1 to 100.
    pub fn generate(&self) -> Vec<Request> {
        assert!(self.accounts > 0 && self.batch > 0 && self.mix.total() > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.requests);
        let n = self.accounts as i64;
        'outer: loop {
            for acc in 1..=n {
                for _ in 0..self.batch {
                    if out.len() == self.requests {
                        break 'outer;
                    }
                    out.push(self.one(&mut rng, acc, n));
                }
            }
        }
        out
    }

    fn one(&self, rng: &mut ChaCha8Rng, acc: i64, n: i64) -> Request {
        let amount = rng.gen_range(1..=100);
        let mut pick = rng.gen_range(0..self.mix.total());
        if pick < self.mix.withdraw {
            return Request::Withdraw { acc, amount };
        }
        pick -= self.mix.withdraw;
        if pick < self.mix.deposit {
            return Request::Deposit { acc, amount };
        }
        pick -= self.mix.deposit;
        if pick < self.mix.transfer {
            let to = if n == 1 { acc } else { (acc - 1 + rng.gen_range(1..n)) % n + 1 };
            return Request::Transfer { from: acc, to, amount };
        }
        Request::Check { acc }
    }
}

/// Final balances from running the requests one after another.
pub fn replay_oracle(w: &Workload) -> Vec<i64> {
    replay(w.accounts, w.initial_balance, &w.generate())
}

/// What a request returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reply {
    Done(bool),
    Balance(i64),
}

pub fn replay(accounts: usize, initial: i64, requests: &[Request]) -> Vec<i64> {
    let mut bal = vec![initial; accounts];
    for r in requests {
        step(&mut bal, r);
    }
    bal
}

/// Replies of the requests when run one after another.
pub fn replay_replies(accounts: usize, initial: i64, requests: &[Request]) -> Vec<Reply> {
    let mut bal = vec![initial; accounts];
    requests.iter().map(|r| step(&mut bal, r)).collect()
}

fn step(bal: &mut [i64], r: &Request) -> Reply {
    let ix = |a: i64| (a - 1) as usize;
    match *r {
        Request::Withdraw { acc, amount } => {
            let ok = amount <= bal[ix(acc)];
            if ok {
                bal[ix(acc)] -= amount;
            }
            Reply::Done(ok)
        }
        Request::Deposit { acc, amount } => {
            bal[ix(acc)] += amount;
            Reply::Done(true)
        }
        Request::Transfer { from, to, amount } => {
            let ok = amount <= bal[ix(from)];
            if ok {
                bal[ix(from)] -= amount;
                bal[ix(to)] += amount;
            }
            Reply::Done(ok)
        }
        Request::Check { acc } => Reply::Balance(bal[ix(acc)]),
    }
}
