//! Test support, enabled by the `testing` feature: a literal transcription
//! of the selection rule over bitmask lock sets, an enumerator of small
//! scheduling situations, and a generator of syntactically valid programs.

use proptest::prelude::*;

use crate::ast::*;
use crate::parse::KEYWORDS;
use crate::scheduler::{LockSet, SyncEntry};

pub const LABELS: [&str; 3] = ["l", "k", "m"];
pub const VALUES: i64 = 4;
/// Number of distinct entries, `LABELS.len() * VALUES`.
pub const UNIVERSE: usize = 12;

/// The entry with index `i`.
pub fn entry(i: usize) -> SyncEntry {
    SyncEntry::new(LABELS[i / VALUES as usize], (i as i64) % VALUES)
}

pub fn lockset(mask: u16) -> LockSet {
    (0..UNIVERSE).filter(|i| mask & (1 << i) != 0).map(entry).collect()
}

/// One queued message in oracle form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Msg {
    pub sync: u16,
    pub supported: bool,
}

/// `select(I, L, m.q)`: `m` if its set misses `L` and its method is in
/// `I`, otherwise `select(I, L ∪ sync(m), q)`; nothing for the empty queue.
pub fn select_oracle(held: u16, queue: &[Msg]) -> Option<usize> {
    fn go(pos: usize, held: u16, queue: &[Msg]) -> Option<usize> {
        match queue.split_first() {
            None => None,
            Some((m, rest)) => {
                if held & m.sync == 0 && m.supported {
                    Some(pos)
                } else {
                    go(pos + 1, held | m.sync, rest)
                }
            }
        }
    }
    go(0, held, queue)
}

/// Calls `f(held, queue)` for one representative of every situation with
/// `|held| <= max_held`, `|queue| <= max_len` and per-message sets of at
/// most `max_set` entries, up to renaming of entries.
///
/// The held set is `{0, .., k-1}`; queue entries are introduced in order
/// of first use within the held and unheld classes.
pub fn for_each_canonical(max_len: usize, max_held: usize, max_set: usize, mut f: impl FnMut(u16, &[u16])) {
    struct Ctx<'a, F> {
        k: usize,
        max_len: usize,
        max_set: usize,
        queue: Vec<u16>,
        f: &'a mut F,
    }

    fn fill<F: FnMut(u16, &[u16])>(cx: &mut Ctx<'_, F>, held_used: usize, free_used: usize) {
        let held = (1u16 << cx.k) - 1;
        (cx.f)(held, &cx.queue);
        if cx.queue.len() == cx.max_len {
            return;
        }
        pick(cx, held_used, free_used, 0, 0, None);
    }

    // Choose the next message's entries in increasing (class, index) order.
    fn pick<F: FnMut(u16, &[u16])>(
        cx: &mut Ctx<'_, F>,
        held_used: usize,
        free_used: usize,
        chosen: usize,
        mask: u16,
        last: Option<usize>,
    ) {
        cx.queue.push(mask);
        fill(cx, held_used, free_used);
        cx.queue.pop();
        if chosen == cx.max_set {
            return;
        }
        let k = cx.k;
        let held_cands = (0..(held_used + 1).min(k)).map(|h| (h, h));
        let free_cands = (0..(free_used + 1).min(UNIVERSE - k)).map(move |j| (k + j, j));
        for (idx, local) in held_cands.chain(free_cands) {
            if last.is_some_and(|l| idx <= l) {
                continue;
            }
            let (hu, fu) =
                if idx < k { (held_used.max(local + 1), free_used) } else { (held_used, free_used.max(local + 1)) };
            pick(cx, hu, fu, chosen + 1, mask | (1 << idx), Some(idx));
        }
    }

    for k in 0..=max_held.min(UNIVERSE) {
        let mut cx = Ctx { k, max_len, max_set, queue: Vec::new(), f: &mut f };
        fill(&mut cx, 0, 0);
    }
}

fn ident_with(first: &'static str) -> impl Strategy<Value = String> {
    prop::string::string_regex(&format!("{first}[a-z0-9]{{0,3}}"))
        .expect("valid pattern")
        .prop_filter("keyword", |s| !KEYWORDS.contains(&s.as_str()) && s != "get")
}

/// Lower-case names for variables, methods and labels.
pub fn arb_ident() -> impl Strategy<Value = String> {
    ident_with("[a-z]")
}

/// Capitalized names for interfaces and classes.
pub fn arb_type_name() -> impl Strategy<Value = String> {
    ident_with("[A-Z]")
}

pub fn arb_type() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![
        Just(Type::Bool),
        Just(Type::Int),
        arb_type_name().prop_map(Type::Interface),
        arb_type_name().prop_map(Type::Actor),
    ];
    leaf.prop_recursive(2, 4, 1, |inner| inner.prop_map(|t| Type::Fut(Box::new(t))))
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let ops = [
        BinOp::And,
        BinOp::Or,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Add,
        BinOp::Sub,
    ];
    let leaf = prop_oneof![
        Just(Expr::Null),
        Just(Expr::This),
        any::<bool>().prop_map(Expr::Bool),
        (-50i64..1000).prop_map(Expr::Int),
        arb_ident().prop_map(Expr::Var),
    ];
    leaf.prop_recursive(3, 16, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Unary(UnOp::Not, Box::new(e))),
            inner.clone().prop_map(|e| Expr::Unary(UnOp::Neg, Box::new(e))),
            inner.clone().prop_map(|e| Expr::Resolved(Box::new(e))),
            (prop::sample::select(ops.to_vec()), inner.clone(), inner).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        ]
    })
}

fn arb_args() -> impl Strategy<Value = Vec<Expr>> {
    prop::collection::vec(arb_expr(), 0..3)
}

pub fn arb_rhs() -> impl Strategy<Value = Rhs> {
    prop_oneof![
        3 => arb_expr().prop_map(Rhs::Expr),
        1 => (arb_type_name(), arb_args()).prop_map(|(class, args)| Rhs::New { class, args }),
        1 => (arb_type_name(), arb_args()).prop_map(|(class, args)| Rhs::NewActor { class, args }),
        1 => (arb_expr(), arb_ident(), arb_args()).prop_map(|(target, method, args)| Rhs::SyncCall { target, method, args }),
        1 => (arb_expr(), arb_ident(), arb_args()).prop_map(|(target, method, args)| Rhs::AsyncCall { target, method, args }),
        1 => arb_expr().prop_map(Rhs::Get),
    ]
}

/// Statements without `return`.
pub fn arb_stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        4 => (arb_ident(), arb_rhs()).prop_map(|(target, value)| Stmt::Assign { target, value }),
        1 => arb_expr().prop_map(Stmt::Get),
    ];
    leaf.prop_recursive(2, 12, 3, |inner| {
        let block = prop::collection::vec(inner, 0..3);
        prop_oneof![
            (arb_expr(), block.clone(), block.clone()).prop_map(|(cond, then, els)| Stmt::If { cond, then, els }),
            (arb_expr(), block).prop_map(|(cond, body)| Stmt::While { cond, body }),
        ]
    })
}

fn arb_vars() -> impl Strategy<Value = Vec<VarDecl>> {
    prop::collection::vec((arb_type(), arb_ident()).prop_map(|(ty, name)| VarDecl { ty, name }), 0..3)
}

pub fn arb_sig() -> impl Strategy<Value = MethodSig> {
    let param = (prop::option::weighted(0.4, arb_ident()), arb_type(), arb_ident())
        .prop_map(|(sync, ty, name)| Param { sync, ty, name });
    (prop::option::weighted(0.2, arb_ident()), arb_type(), arb_ident(), prop::collection::vec(param, 0..3)).prop_map(
        |(ret_sync, ret, name, params)| MethodSig { ret_sync, ret, name, params, span: Span::default() },
    )
}

pub fn arb_method() -> impl Strategy<Value = MethodDef> {
    (arb_sig(), arb_vars(), prop::collection::vec(arb_stmt(), 0..4), arb_expr()).prop_map(|(sig, vars, mut stmts, ret)| {
        stmts.push(Stmt::Return(ret));
        MethodDef { sig, body: Block { vars, stmts } }
    })
}

pub fn arb_interface() -> impl Strategy<Value = InterfaceDecl> {
    (arb_type_name(), prop::collection::vec(arb_sig(), 0..3))
        .prop_map(|(name, sigs)| InterfaceDecl { name, sigs, span: Span::default() })
}

pub fn arb_class() -> impl Strategy<Value = ClassDecl> {
    (
        arb_type_name(),
        arb_vars(),
        prop::collection::vec(arb_type_name(), 1..3),
        arb_vars(),
        prop::collection::vec(arb_method(), 0..3),
    )
        .prop_map(|(name, params, implements, fields, methods)| ClassDecl {
            name,
            params,
            implements,
            fields,
            methods,
            span: Span::default(),
        })
}

/// Syntactically valid programs; names are not resolved.
pub fn arb_program() -> impl Strategy<Value = Program> {
    (
        prop::collection::vec(arb_interface(), 0..3),
        prop::collection::vec(arb_class(), 0..3),
        arb_vars(),
        prop::collection::vec(arb_stmt(), 0..5),
    )
        .prop_map(|(interfaces, classes, vars, stmts)| Program { interfaces, classes, main: Block { vars, stmts } })
}

pub use crate::programs::{BANK, LOOP, TWO_ACTORS, WORKED};

/// Opens two accounts of 100, adds a second employee, then queues five
/// requests. Account 1 ends at 50 and the final check reads 50.
pub const BANK_FIVE_REQUESTS: &str = "{
    Actor<IEmployee> bank = new actor Employee(null, null, 0);
    Fut<Int> f = bank!createAcc(100);
    Int a1 = f.get;
    f = bank!createAcc(100);
    Int a2 = f.get;
    Fut<Bool> g = bank!addEmp();
    Bool added = g.get;
    Fut<Bool> w1 = bank!withdraw(a1, 30);
    Fut<Bool> d2 = bank!deposit(a2, 10);
    Fut<Bool> t = bank!transfer(a1, a2, 20);
    Fut<Bool> w2 = bank!withdraw(a1, 60);
    Fut<Int> c = bank!check(a1);
}
";

/// The bank program's classes with a different `main` block.
pub fn bank_with_main(main: &str) -> String {
    let at = BANK.find("// main\n").expect("marker before main");
    format!("{}{}", &BANK[..at], main)
}

pub fn interpreter(source: &str) -> crate::Interpreter {
    let program = crate::parse_program(source).unwrap_or_else(|e| panic!("{}", e.render("<test>")));
    crate::Interpreter::new(&program)
}

/// Whether the `main` closure has run to its end.
pub fn main_finished(c: &crate::Configuration) -> bool {
    let anon = crate::ObjId::ANONYMOUS;
    c.actors[&anon].processes[&anon].first().is_some_and(|m| m.is_finished())
}

/// Runs until `main` finishes, moving `main` whenever it can and the
/// lowest other process otherwise. Returns `None` on quiescence first.
pub fn run_main(interp: &crate::Interpreter, mut c: crate::Configuration) -> Option<crate::Configuration> {
    while !main_finished(&c) {
        let mut succ = interp.successors(&c);
        if succ.is_empty() {
            return None;
        }
        let pick = succ.iter().position(|(l, _)| l.actor.is_anonymous()).unwrap_or(0);
        c = succ.swap_remove(pick).1;
    }
    Some(c)
}

/// Outcome of comparing the library selection against the oracle.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct SelectComparison {
    pub cases: u64,
    pub mismatches: u64,
    /// First disagreeing case: held mask, queue masks, support bits.
    pub first_mismatch: Option<(u16, Vec<u16>, u8)>,
}

/// Runs [`crate::select`] and [`select_oracle`] on every canonical
/// situation. With `support_patterns`, every subset of the queue is also
/// tried as the set of messages the idle object supports.
pub fn compare_select(max_len: usize, max_held: usize, max_set: usize, support_patterns: bool) -> SelectComparison {
    struct Item<'a> {
        sync: &'a LockSet,
        supported: bool,
    }
    impl crate::scheduler::Pending for Item<'_> {
        fn sync_set(&self) -> &LockSet {
            self.sync
        }
    }

    let sets: Vec<LockSet> = (0..1u32 << UNIVERSE).map(|m| lockset(m as u16)).collect();
    let mut out = SelectComparison::default();
    let mut oracle_q = Vec::with_capacity(max_len);
    for_each_canonical(max_len, max_held, max_set, |held, queue| {
        let patterns: u32 = if support_patterns { 1 << queue.len() } else { 1 };
        for bits in 0..patterns {
            let supported = |i: usize| !support_patterns || bits & (1 << i) != 0;
            oracle_q.clear();
            oracle_q.extend(queue.iter().enumerate().map(|(i, &sync)| Msg { sync, supported: supported(i) }));
            let items: Vec<Item<'_>> = queue
                .iter()
                .enumerate()
                .map(|(i, &m)| Item { sync: &sets[m as usize], supported: supported(i) })
                .collect();
            let got = crate::select(&items, &sets[held as usize], |m: &Item<'_>| m.supported);
            out.cases += 1;
            if got != select_oracle(held, &oracle_q) {
                out.mismatches += 1;
                if out.first_mismatch.is_none() {
                    out.first_mismatch = Some((held, queue.to_vec(), bits as u8));
                }
            }
        }
    });
    out
}
