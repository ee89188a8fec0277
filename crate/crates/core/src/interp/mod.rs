//! Small-step interpreter over resolved programs.
//!
//! A [`Configuration`] is an immutable snapshot; [`Interpreter::step`]
//! rewrites it by one rule instance. Every process contributes at most one
//! enabled step at a time, so nondeterminism is exactly the choice of which
//! process moves.

mod code;
mod config;
mod run;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ast::{BinOp, Expr, Program, Rhs, UnOp, VarDecl};
use crate::scheduler::{self, LockSet};
use crate::{FutId, ObjId, Value};
use code::{Code, ProgramCode};

pub use config::{ActorState, Closure, Configuration, Event, Fault, ObjectState, Thread};
pub(crate) use config::Segment;
pub use run::{run, Outcome, Policy, Run};

/// Names of the transition rules. The first twelve act on a single
/// process; the last four lift a process step to the actor and system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    AssignLocal,
    AssignField,
    CondTrue,
    CondFalse,
    SyncCall,
    SyncReturn,
    ReadFut,
    NewActob,
    NewActor,
    AsyncCall,
    AsyncReturn,
    SchedMsg,
    ProcessUpdate,
    ProcessCreate,
    ActorUpdate,
    ActorCreate,
    /// The statement could not be evaluated; the step enters a fault state.
    Fault,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::AssignLocal => "ASSIGN-LOCAL",
            Rule::AssignField => "ASSIGN-FIELD",
            Rule::CondTrue => "COND-TRUE",
            Rule::CondFalse => "COND-FALSE",
            Rule::SyncCall => "SYNC-CALL",
            Rule::SyncReturn => "SYNC-RETURN",
            Rule::ReadFut => "READ-FUT",
            Rule::NewActob => "NEW-ACTOB",
            Rule::NewActor => "NEW-ACTOR",
            Rule::AsyncCall => "ASYNC-CALL",
            Rule::AsyncReturn => "ASYNC-RETURN",
            Rule::SchedMsg => "SCHED-MSG",
            Rule::ProcessUpdate => "PROCESS-UPDATE",
            Rule::ProcessCreate => "PROCESS-CREATE",
            Rule::ActorUpdate => "ACTOR-UPDATE",
            Rule::ActorCreate => "ACTOR-CREATE",
            Rule::Fault => "FAULT",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        ALL_RULES.iter().copied().find(|r| r.name() == name)
    }
}

const ALL_RULES: [Rule; 17] = [
    Rule::AssignLocal,
    Rule::AssignField,
    Rule::CondTrue,
    Rule::CondFalse,
    Rule::SyncCall,
    Rule::SyncReturn,
    Rule::ReadFut,
    Rule::NewActob,
    Rule::NewActor,
    Rule::AsyncCall,
    Rule::AsyncReturn,
    Rule::SchedMsg,
    Rule::ProcessUpdate,
    Rule::ProcessCreate,
    Rule::ActorUpdate,
    Rule::ActorCreate,
    Rule::Fault,
];

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Identity of one step: the process-level rule, the moving process, and
/// the message involved, if any.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StepLabel {
    pub rule: Rule,
    pub actor: ObjId,
    pub object: ObjId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub priority: Option<u64>,
}

impl StepLabel {
    /// The actor-level and system-level rules lifting this step.
    pub fn lifting(&self) -> (Rule, Rule) {
        match self.rule {
            Rule::NewActob => (Rule::ProcessCreate, Rule::ActorUpdate),
            Rule::NewActor => (Rule::ProcessUpdate, Rule::ActorCreate),
            _ => (Rule::ProcessUpdate, Rule::ActorUpdate),
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}/{}]", self.rule, self.actor, self.object)?;
        if let Some(m) = &self.message {
            write!(f, " {m}")?;
        }
        if let Some(p) = self.priority {
            write!(f, " #{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("step {0} is not enabled")]
    NotEnabled(StepLabel),
}

/// Chooses a message for an idle object: queue, held entries, and a
/// predicate telling whether the object supports an event's signature.
pub type SelectFn = fn(&[Event], &LockSet, &dyn Fn(&Event) -> bool) -> Option<usize>;

fn literal_select(q: &[Event], held: &LockSet, supported: &dyn Fn(&Event) -> bool) -> Option<usize> {
    scheduler::select(q, held, supported)
}

#[derive(Clone)]
pub struct Interpreter {
    code: Arc<ProgramCode>,
    selector: SelectFn,
}

type StepResult = Result<(Rule, Option<String>, Option<u64>), String>;

impl Interpreter {
    pub fn new(program: &Program) -> Self {
        Interpreter { code: Arc::new(ProgramCode::new(program)), selector: literal_select }
    }

    /// Replaces the selection function. Used to inject faulty schedulers.
    pub fn with_selector(mut self, selector: SelectFn) -> Self {
        self.selector = selector;
        self
    }

    /// The anonymous actor with a single process running `main`.
    pub fn initial_config(&self) -> Configuration {
        let anon = ObjId::ANONYMOUS;
        let mut heap = BTreeMap::new();
        heap.insert(anon, ObjectState { class: None, myactor: anon, lock: LockSet::new(), fields: BTreeMap::new() });
        let main = Closure {
            this: anon,
            dest: None,
            env: defaults(&self.code.main_vars),
            cont: segment(&self.code.main),
            awaiting: None,
        };
        let mut processes = BTreeMap::new();
        processes.insert(anon, vec![main]);
        let mut actors = BTreeMap::new();
        actors.insert(anon, ActorState { processes });
        Configuration {
            heap,
            queues: BTreeMap::new(),
            futures: BTreeMap::new(),
            actors,
            fault: None,
            next_obj: 1,
            next_fut: 0,
            next_priority: 0,
        }
    }

    /// Every rule instance whose premises hold, ordered by actor, then object.
    pub fn enabled_steps(&self, c: &Configuration) -> Vec<StepLabel> {
        self.successors(c).into_iter().map(|(l, _)| l).collect()
    }

    pub fn step(&self, c: &Configuration, label: &StepLabel) -> Result<Configuration, StepError> {
        if c.fault.is_none() {
            if let Some(thread) = c.actors.get(&label.actor).and_then(|a| a.processes.get(&label.object)) {
                if let Some((l, next)) = self.process_step(c, label.actor, label.object, thread) {
                    if l == *label {
                        return Ok(next);
                    }
                }
            }
        }
        Err(StepError::NotEnabled(label.clone()))
    }

    /// All enabled steps paired with their successor configurations.
    pub fn successors(&self, c: &Configuration) -> Vec<(StepLabel, Configuration)> {
        if c.fault.is_some() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (actor, state) in &c.actors {
            for (obj, thread) in &state.processes {
                if let Some(s) = self.process_step(c, *actor, *obj, thread) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// The event an idle object would take, if any.
    pub fn selectable<'c>(&self, c: &'c Configuration, obj: ObjId) -> Option<&'c Event> {
        let actor = c.heap.get(&obj)?.myactor;
        let idx = self.select_index(c, actor, obj)?;
        c.queues.get(&actor)?.get(idx)
    }

    fn select_index(&self, c: &Configuration, actor: ObjId, obj: ObjId) -> Option<usize> {
        if actor.is_anonymous() {
            return None;
        }
        let queue = c.queues.get(&actor)?;
        let class = self.code.classes.get(c.heap.get(&obj)?.class.as_deref()?)?;
        let held = scheduler::lock_union(c.locks_of(actor).map(|(_, l)| l));
        let supported = |e: &Event| class.implements.iter().any(|i| *i == e.interface);
        (self.selector)(queue, &held, &supported)
    }

    fn process_step(
        &self,
        c: &Configuration,
        actor: ObjId,
        obj: ObjId,
        thread: &Thread,
    ) -> Option<(StepLabel, Configuration)> {
        let label = |rule, message, priority| StepLabel { rule, actor, object: obj, message, priority };
        if thread.is_empty() {
            let idx = self.select_index(c, actor, obj)?;
            let mut next = c.clone();
            let ev = next.queues.get_mut(&actor).expect("queue exists").remove(idx);
            let class = c.heap[&obj].class.as_deref().expect("actor objects have classes");
            let method = &self.code.classes[class].methods[&ev.method];
            let mut env = defaults(&method.locals);
            for (p, v) in method.sig.params.iter().zip(&ev.args) {
                env.insert(p.name.clone(), v.clone());
            }
            let closure = Closure { this: obj, dest: Some(ev.dest), env, cont: segment(&method.body), awaiting: None };
            next.heap.get_mut(&obj).expect("object exists").lock = ev.sync.clone();
            next.actors.get_mut(&actor).unwrap().processes.insert(obj, vec![closure]);
            return Some((label(Rule::SchedMsg, Some(ev.method), Some(ev.priority)), next));
        }
        let top = thread.last().expect("non-empty");
        let stmt = top.cont.last()?.current();
        // Blocked reads are simply not enabled.
        if let Code::Get(e) | Code::Assign { value: Rhs::Get(e), .. } = stmt {
            if let Ok(Value::Fut(f)) = eval(c, top, e) {
                if c.future(f).is_none() {
                    return None;
                }
            }
        }
        let mut next = c.clone();
        let mut thread = next.actors.get_mut(&actor).unwrap().processes.remove(&obj).unwrap();
        let result = self.exec(&mut next, actor, obj, &mut thread);
        next.actors.get_mut(&actor).unwrap().processes.insert(obj, thread);
        match result {
            Ok((rule, message, priority)) => Some((label(rule, message, priority), next)),
            Err(message) => {
                next.fault = Some(Fault { object: obj, message });
                Some((label(Rule::Fault, None, None), next))
            }
        }
    }

    /// Executes the top statement of a non-idle thread.
    fn exec(&self, c: &mut Configuration, actor: ObjId, obj: ObjId, thread: &mut Thread) -> StepResult {
        let depth = thread.len();
        let top = thread.last_mut().expect("non-empty");
        let seg = top.cont.last().expect("has statement");
        let (code, pc) = (seg.code.clone(), seg.pc);
        match &code[pc] {
            Code::Assign { target, value } => {
                let target = target.clone();
                match value {
                    Rhs::Expr(e) => {
                        let v = eval(c, top, e)?;
                        advance(top);
                        Ok((assign(c, top, &target, v)?, None, None))
                    }
                    Rhs::Get(e) => {
                        let v = self.read_future(c, top, e)?;
                        advance(top);
                        assign(c, top, &target, v)?;
                        Ok((Rule::ReadFut, None, None))
                    }
                    Rhs::New { class, args } => {
                        let args = eval_all(c, top, args)?;
                        let myactor = c.heap[&top.this].myactor;
                        let o = fresh_obj(c);
                        let state = self.init_act(class, args, myactor)?;
                        c.heap.insert(o, state);
                        advance(top);
                        assign(c, top, &target, Value::Obj(o))?;
                        // The new idle process joins the creating actor.
                        c.actors.get_mut(&actor).unwrap().processes.insert(o, Vec::new());
                        Ok((Rule::NewActob, Some(class.clone()), None))
                    }
                    Rhs::NewActor { class, args } => {
                        let args = eval_all(c, top, args)?;
                        let o = fresh_obj(c);
                        let state = self.init_act(class, args, o)?;
                        c.heap.insert(o, state);
                        c.queues.insert(o, Vec::new());
                        let mut processes = BTreeMap::new();
                        processes.insert(o, Vec::new());
                        c.actors.insert(o, ActorState { processes });
                        advance(top);
                        assign(c, top, &target, Value::Actor(o))?;
                        Ok((Rule::NewActor, Some(class.clone()), None))
                    }
                    Rhs::SyncCall { target: callee, method, args } => {
                        let callee = match eval(c, top, callee)? {
                            Value::Obj(o) => o,
                            v => return Err(format!("synchronous call `{method}` on {}", v.kind())),
                        };
                        let args = eval_all(c, top, args)?;
                        let callee_state = c.heap.get(&callee).ok_or("dangling object reference")?;
                        if callee_state.myactor != actor {
                            return Err(format!(
                                "synchronous call `{method}` on {callee}, which belongs to another actor"
                            ));
                        }
                        let class = callee_state.class.as_deref().ok_or("call on the anonymous object")?;
                        let m = self.code.classes[class]
                            .methods
                            .get(method)
                            .ok_or_else(|| format!("class `{class}` has no method `{method}`"))?;
                        if m.sig.params.len() != args.len() {
                            return Err(format!("`{class}.{method}` expects {} argument(s)", m.sig.params.len()));
                        }
                        let mut env = defaults(&m.locals);
                        for (p, v) in m.sig.params.iter().zip(args) {
                            env.insert(p.name.clone(), v);
                        }
                        advance(top);
                        top.awaiting = Some(target);
                        thread.push(Closure { this: callee, dest: None, env, cont: segment(&m.body), awaiting: None });
                        Ok((Rule::SyncCall, Some(method.clone()), None))
                    }
                    Rhs::AsyncCall { target: callee, method, args } => {
                        let callee = match eval(c, top, callee)? {
                            Value::Actor(a) if !a.is_anonymous() && c.queues.contains_key(&a) => a,
                            v => return Err(format!("asynchronous call `{method}` on {}", v.kind())),
                        };
                        let args = eval_all(c, top, args)?;
                        let class = c.heap[&callee].class.as_deref().expect("actors have classes");
                        let (iface, sig) = self.code.classes[class]
                            .implements
                            .iter()
                            .find_map(|i| self.code.interfaces[i].sig(method).map(|s| (i.clone(), s)))
                            .ok_or_else(|| format!("actor {callee} does not support `{method}`"))?;
                        let sync = scheduler::sync_set_of(&sig.sync_labels(), &args)
                            .map_err(|e| format!("`{method}`: {e}"))?;
                        let f = FutId(c.next_fut);
                        c.next_fut += 1;
                        let priority = c.next_priority;
                        c.next_priority += 1;
                        c.futures.insert(f, None);
                        c.queues.get_mut(&callee).unwrap().push(Event {
                            method: method.clone(),
                            args,
                            dest: f,
                            interface: iface,
                            sync,
                            priority,
                        });
                        advance(top);
                        assign(c, top, &target, Value::Fut(f))?;
                        Ok((Rule::AsyncCall, Some(method.clone()), Some(priority)))
                    }
                }
            }
            Code::Get(e) => {
                self.read_future(c, top, e)?;
                advance(top);
                Ok((Rule::ReadFut, None, None))
            }
            Code::If { cond, then, els } => {
                let b = eval(c, top, cond)?.as_bool().ok_or("`if` condition is not a Bool")?;
                let branch = if b { then.clone() } else { els.clone() };
                advance(top);
                if !branch.is_empty() {
                    top.cont.push(Segment { code: branch, pc: 0 });
                }
                Ok((if b { Rule::CondTrue } else { Rule::CondFalse }, None, None))
            }
            Code::While { cond, body } => {
                let b = eval(c, top, cond)?.as_bool().ok_or("`while` condition is not a Bool")?;
                if b {
                    // `while b {s}` unfolds to `s; while b {s}`.
                    if !body.is_empty() {
                        let body = body.clone();
                        top.cont.push(Segment { code: body, pc: 0 });
                    }
                    Ok((Rule::CondTrue, None, None))
                } else {
                    advance(top);
                    Ok((Rule::CondFalse, None, None))
                }
            }
            Code::Return(e) => {
                let v = eval(c, top, e)?;
                if depth > 1 {
                    thread.pop();
                    let caller = thread.last_mut().expect("caller below callee");
                    let target = caller.awaiting.take().ok_or("return without a waiting caller")?;
                    assign(c, caller, &target, v)?;
                    Ok((Rule::SyncReturn, None, None))
                } else {
                    let f = top.dest.ok_or("`return` outside of a method")?;
                    let slot = c.futures.get_mut(&f).ok_or("dangling future")?;
                    if slot.is_some() {
                        return Err(format!("future {f} resolved twice"));
                    }
                    *slot = Some(v);
                    c.heap.get_mut(&obj).expect("object exists").lock = LockSet::new();
                    thread.clear();
                    Ok((Rule::AsyncReturn, None, None))
                }
            }
        }
    }

    fn read_future(&self, c: &Configuration, clo: &Closure, e: &Expr) -> Result<Value, String> {
        match eval(c, clo, e)? {
            Value::Fut(f) => c.future(f).cloned().ok_or_else(|| "read of an unresolved future".into()),
            v => Err(format!("`get` on {}", v.kind())),
        }
    }

    fn init_act(&self, class: &str, args: Vec<Value>, myactor: ObjId) -> Result<ObjectState, String> {
        let cls = self.code.classes.get(class).ok_or_else(|| format!("undeclared class `{class}`"))?;
        if cls.params.len() != args.len() {
            return Err(format!("class `{class}` takes {} argument(s)", cls.params.len()));
        }
        let mut fields = defaults(&cls.attributes);
        for (p, v) in cls.params.iter().zip(args) {
            fields.insert(p.name.clone(), v);
        }
        Ok(ObjectState { class: Some(class.to_string()), myactor, lock: LockSet::new(), fields })
    }
}

fn defaults(vars: &[VarDecl]) -> BTreeMap<String, Value> {
    vars.iter().map(|v| (v.name.clone(), v.ty.default_value())).collect()
}

fn segment(code: &Arc<[Code]>) -> Vec<Segment> {
    if code.is_empty() {
        Vec::new()
    } else {
        vec![Segment { code: code.clone(), pc: 0 }]
    }
}

fn fresh_obj(c: &mut Configuration) -> ObjId {
    let o = ObjId(c.next_obj);
    c.next_obj += 1;
    o
}

/// Moves past the current statement, dropping exhausted segments.
fn advance(clo: &mut Closure) {
    if let Some(seg) = clo.cont.last_mut() {
        seg.pc += 1;
    }
    while clo.cont.last().is_some_and(|s| s.pc >= s.code.len()) {
        clo.cont.pop();
    }
}

/// Locals shadow fields of `this`.
fn assign(c: &mut Configuration, clo: &mut Closure, target: &str, v: Value) -> Result<Rule, String> {
    if let Some(slot) = clo.env.get_mut(target) {
        *slot = v;
        return Ok(Rule::AssignLocal);
    }
    let fields = &mut c.heap.get_mut(&clo.this).ok_or("dangling this")?.fields;
    match fields.get_mut(target) {
        Some(slot) => {
            *slot = v;
            Ok(Rule::AssignField)
        }
        None => Err(format!("assignment to undeclared variable `{target}`")),
    }
}

fn eval_all(c: &Configuration, clo: &Closure, es: &[Expr]) -> Result<Vec<Value>, String> {
    es.iter().map(|e| eval(c, clo, e)).collect()
}

/// Side-effect-free evaluation.
pub(crate) fn eval(c: &Configuration, clo: &Closure, e: &Expr) -> Result<Value, String> {
    Ok(match e {
        Expr::Null => Value::Null,
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Int(i) => Value::Int(*i),
        Expr::This => Value::Obj(clo.this),
        Expr::Var(name) => match clo.env.get(name) {
            Some(v) => v.clone(),
            None => c
                .heap
                .get(&clo.this)
                .and_then(|s| s.fields.get(name))
                .cloned()
                .ok_or_else(|| format!("undeclared variable `{name}`"))?,
        },
        Expr::Resolved(e) => match eval(c, clo, e)? {
            Value::Fut(f) => Value::Bool(c.future(f).is_some()),
            v => return Err(format!("`?` on {}", v.kind())),
        },
        Expr::Unary(UnOp::Not, e) => Value::Bool(!eval(c, clo, e)?.as_bool().ok_or("`!` on a non-Bool")?),
        Expr::Unary(UnOp::Neg, e) => {
            let i = eval(c, clo, e)?.as_int().ok_or("`-` on a non-Int")?;
            Value::Int(i.checked_neg().ok_or("integer overflow")?)
        }
        Expr::Binary(op, l, r) => {
            let l = eval(c, clo, l)?;
            // `&&` and `||` short-circuit.
            match (op, &l) {
                (BinOp::And, Value::Bool(false)) => return Ok(Value::Bool(false)),
                (BinOp::Or, Value::Bool(true)) => return Ok(Value::Bool(true)),
                _ => {}
            }
            let r = eval(c, clo, r)?;
            binary(*op, l, r)?
        }
    })
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, String> {
    let ints = |l: &Value, r: &Value| match (l, r) {
        (Value::Int(a), Value::Int(b)) => Ok((*a, *b)),
        _ => Err(format!("`{}` on {} and {}", op.symbol(), l.kind(), r.kind())),
    };
    Ok(match op {
        BinOp::And | BinOp::Or => match (l, r) {
            (Value::Bool(_), Value::Bool(b)) => Value::Bool(b),
            (l, r) => return Err(format!("`{}` on {} and {}", op.symbol(), l.kind(), r.kind())),
        },
        BinOp::Eq => Value::Bool(l == r),
        BinOp::Ne => Value::Bool(l != r),
        BinOp::Lt => ints(&l, &r).map(|(a, b)| Value::Bool(a < b))?,
        BinOp::Le => ints(&l, &r).map(|(a, b)| Value::Bool(a <= b))?,
        BinOp::Gt => ints(&l, &r).map(|(a, b)| Value::Bool(a > b))?,
        BinOp::Ge => ints(&l, &r).map(|(a, b)| Value::Bool(a >= b))?,
        BinOp::Add => Value::Int(ints(&l, &r).map(|(a, b)| a.checked_add(b))?.ok_or("integer overflow")?),
        BinOp::Sub => Value::Int(ints(&l, &r).map(|(a, b)| a.checked_sub(b))?.ok_or("integer overflow")?),
    })
}
