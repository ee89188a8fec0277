use std::collections::{HashMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{channel, Sender};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;

use mac_core::{LockSet, SyncEntry, Value};
use thiserror::Error;

use crate::future::{promise, Future, FutureError};
use crate::log::{EventKind, EventLog, LogRecord};
use crate::queue::DispatchQueue;

/// Behavior invoked by method name, for dynamically dispatched sends.
pub trait ActiveObject: Send + 'static {
    fn call(&mut self, method: &str, args: &[Value]) -> Result<Value, String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActorError {
    #[error("an actor needs at least one worker")]
    NoWorkers,
    #[error("actor is shut down")]
    ShutDown,
}

#[derive(Debug, Clone, Default)]
pub struct ActorConfig {
    pub log: Option<EventLog>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShutdownReport {
    /// Messages whose method returned normally.
    pub completed: u64,
    /// Messages whose method panicked or returned an error.
    pub failed: u64,
    /// Pending messages dropped by a non-draining shutdown.
    pub cancelled: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActorStats {
    pub sent: u64,
    pub dispatched: u64,
    pub completed: u64,
    pub failed: u64,
    pub cancelled: u64,
    /// Times the dispatcher woke up and ran the selection.
    pub dispatcher_iterations: u64,
    /// Most messages running at once.
    pub max_running: usize,
}

/// A consistent view of the scheduling state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub busy_data: LockSet,
    /// `(worker, priority, lock set)` of every running message.
    pub running: Vec<(usize, u64, LockSet)>,
    pub available: Vec<usize>,
    pub pending: usize,
    pub locked: usize,
}

impl Snapshot {
    /// Running lock sets are pairwise disjoint and their union is the
    /// busy set.
    pub fn is_consistent(&self) -> bool {
        let mut seen = HashSet::new();
        for (_, _, s) in &self.running {
            for e in s.iter() {
                if !seen.insert(e) {
                    return false;
                }
            }
        }
        seen.len() == self.busy_data.len() && self.busy_data.iter().all(|e| seen.contains(e))
    }
}

type Job<B> = Box<dyn FnOnce(&mut B) -> bool + Send>;
type Fail = Box<dyn FnOnce(FutureError) + Send>;

struct Message<B> {
    method: Option<Arc<str>>,
    job: Job<B>,
    fail: Fail,
}

struct Assignment<B> {
    priority: u64,
    sync: LockSet,
    msg: Message<B>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Running,
    Draining,
    Stopping,
}

struct State<B> {
    queue: DispatchQueue<Message<B>>,
    available: VecDeque<usize>,
    running: HashMap<usize, (u64, LockSet)>,
    busy_data: HashSet<SyncEntry>,
    workers: Vec<Sender<Assignment<B>>>,
    joins: Vec<JoinHandle<()>>,
    next_priority: u64,
    mode: Mode,
    /// Something changed since the dispatcher last looked.
    dirty: bool,
    stats: ActorStats,
}

struct Shared<B> {
    id: u64,
    state: Mutex<State<B>>,
    wake: Condvar,
    log: Option<EventLog>,
}

struct Owner<B> {
    shared: Arc<Shared<B>>,
    dispatcher: Mutex<Option<JoinHandle<()>>>,
    report: Mutex<Option<ShutdownReport>>,
}

impl<B> Drop for Owner<B> {
    // The last handle going away lets queued work finish in the background.
    fn drop(&mut self) {
        if let Ok(mut st) = self.shared.state.lock() {
            if st.mode == Mode::Running {
                st.mode = Mode::Draining;
                st.dirty = true;
                self.shared.wake.notify_all();
            }
        }
    }
}

/// A multi-threaded actor: a pool of workers, each owning one behavior
/// instance, serving one shared queue. A message runs only when no
/// running or earlier pending message shares a sync entry with it.
///
/// Handles are cheap to clone and can be used from any thread.
pub struct MacActor<B> {
    shared: Arc<Shared<B>>,
    owner: Arc<Owner<B>>,
}

impl<B> Clone for MacActor<B> {
    fn clone(&self) -> Self {
        MacActor { shared: self.shared.clone(), owner: self.owner.clone() }
    }
}

static NEXT_ACTOR: AtomicU64 = AtomicU64::new(1);

impl<B: Send + 'static> MacActor<B> {
    pub fn new(factory: impl FnMut() -> B, workers: usize) -> Result<Self, ActorError> {
        Self::with_config(factory, workers, ActorConfig::default())
    }

    pub fn with_config(mut factory: impl FnMut() -> B, workers: usize, config: ActorConfig) -> Result<Self, ActorError> {
        if workers == 0 {
            return Err(ActorError::NoWorkers);
        }
        let shared = Arc::new(Shared {
            id: NEXT_ACTOR.fetch_add(1, Ordering::Relaxed),
            state: Mutex::new(State {
                queue: DispatchQueue::new(),
                available: VecDeque::new(),
                running: HashMap::new(),
                busy_data: HashSet::new(),
                workers: Vec::new(),
                joins: Vec::new(),
                next_priority: 0,
                mode: Mode::Running,
                dirty: false,
                stats: ActorStats::default(),
            }),
            wake: Condvar::new(),
            log: config.log,
        });
        {
            let mut st = shared.state.lock().unwrap();
            for _ in 0..workers {
                spawn_worker(&shared, &mut st, factory());
            }
        }
        let s = shared.clone();
        let dispatcher = std::thread::Builder::new()
            .name(format!("mac-{}-dispatch", shared.id))
            .spawn(move || dispatch_loop(&s))
            .expect("spawn dispatcher");
        let owner =
            Arc::new(Owner { shared: shared.clone(), dispatcher: Mutex::new(Some(dispatcher)), report: Mutex::new(None) });
        Ok(MacActor { shared, owner })
    }

    pub fn id(&self) -> u64 {
        self.shared.id
    }

    pub fn worker_count(&self) -> usize {
        self.lock().workers.len()
    }

    /// Adds an idle worker and re-examines pending messages.
    pub fn add_worker(&self, behavior: B) -> Result<usize, ActorError> {
        let mut st = self.lock();
        if st.mode != Mode::Running {
            return Err(ActorError::ShutDown);
        }
        let id = spawn_worker(&self.shared, &mut st, behavior);
        st.dirty = true;
        self.shared.wake.notify_one();
        Ok(id)
    }

    /// Queues `f` to run on some worker once no running or earlier pending
    /// message holds an entry of `sync`.
    pub fn submit<R, F>(&self, sync: LockSet, f: F) -> Future<R>
    where
        R: Send + 'static,
        F: FnOnce(&mut B) -> R + Send + 'static,
    {
        self.try_submit_as(None, sync, move |b| Ok(f(b)))
    }

    /// Like [`MacActor::submit`]; an `Err` fails the future.
    pub fn try_submit<R, F>(&self, sync: LockSet, f: F) -> Future<R>
    where
        R: Send + 'static,
        F: FnOnce(&mut B) -> Result<R, String> + Send + 'static,
    {
        self.try_submit_as(None, sync, f)
    }

    /// [`MacActor::try_submit`] with a method name for the event log.
    pub fn try_submit_as<R, F>(&self, method: Option<&str>, sync: LockSet, f: F) -> Future<R>
    where
        R: Send + 'static,
        F: FnOnce(&mut B) -> Result<R, String> + Send + 'static,
    {
        let (p, fut) = promise();
        let on_fail = p.clone();
        let msg = Message {
            method: method.map(Arc::from),
            job: Box::new(move |b: &mut B| match f(b) {
                Ok(v) => {
                    p.complete(Ok(v));
                    true
                }
                Err(e) => {
                    p.complete(Err(FutureError::Failed(e)));
                    false
                }
            }),
            fail: Box::new(move |e| {
                on_fail.complete(Err(e));
            }),
        };
        if self.enqueue(sync, msg).is_err() {
            return Future::ready(Err(FutureError::Rejected));
        }
        fut
    }

    fn enqueue(&self, sync: LockSet, msg: Message<B>) -> Result<(), ActorError> {
        let mut st = self.lock();
        if st.mode != Mode::Running {
            return Err(ActorError::ShutDown);
        }
        let priority = st.next_priority;
        st.next_priority += 1;
        st.stats.sent += 1;
        if let Some(log) = &self.shared.log {
            log.record(record(EventKind::Enqueue, self.shared.id, priority, None, msg.method.as_deref(), &sync));
        }
        st.queue.push(priority, sync, msg);
        st.dirty = true;
        self.shared.wake.notify_one();
        Ok(())
    }

    pub fn stats(&self) -> ActorStats {
        self.lock().stats.clone()
    }

    pub fn snapshot(&self) -> Snapshot {
        let st = self.lock();
        let mut running: Vec<_> = st.running.iter().map(|(w, (p, s))| (*w, *p, s.clone())).collect();
        running.sort_by_key(|r| r.1);
        Snapshot {
            busy_data: st.busy_data.iter().cloned().collect(),
            running,
            available: st.available.iter().copied().collect(),
            pending: st.queue.len(),
            locked: st.queue.locked_len(),
        }
    }

    /// Stops the actor. With `drain`, every queued message runs first;
    /// otherwise queued messages fail with [`FutureError::Shutdown`].
    /// Running messages always finish. Later calls return the same report.
    pub fn shutdown(&self, drain: bool) -> ShutdownReport {
        let mut report = self.owner.report.lock().unwrap();
        if let Some(r) = *report {
            return r;
        }
        {
            let mut st = self.lock();
            if !drain {
                let dropped: Vec<_> = st.queue.drain().collect();
                st.stats.cancelled += dropped.len() as u64;
                for m in dropped {
                    (m.payload.fail)(FutureError::Shutdown);
                }
                st.mode = Mode::Stopping;
            } else if st.mode == Mode::Running {
                st.mode = Mode::Draining;
            }
            st.dirty = true;
            self.shared.wake.notify_all();
        }
        if let Some(h) = self.owner.dispatcher.lock().unwrap().take() {
            h.join().expect("dispatcher panicked");
        }
        if let Some(log) = &self.shared.log {
            let _ = log.flush();
        }
        let st = self.lock();
        let r = ShutdownReport { completed: st.stats.completed, failed: st.stats.failed, cancelled: st.stats.cancelled };
        *report = Some(r);
        r
    }

    fn lock(&self) -> MutexGuard<'_, State<B>> {
        self.shared.state.lock().unwrap()
    }
}

impl<B: ActiveObject> MacActor<B> {
    /// Asynchronous call `method(args)` locking `sync`.
    pub fn send(&self, method: &str, args: Vec<Value>, sync: LockSet) -> Future<Value> {
        let name: Arc<str> = Arc::from(method);
        let m = name.clone();
        self.try_submit_as(Some(&name), sync, move |b: &mut B| b.call(&m, &args))
    }
}

fn record(event: EventKind, actor: u64, priority: u64, worker: Option<usize>, method: Option<&str>, sync: &LockSet) -> LogRecord {
    LogRecord {
        event,
        actor,
        priority,
        t_ns: 0,
        worker,
        method: method.map(str::to_string),
        sync: sync.iter().cloned().collect(),
    }
}

fn spawn_worker<B: Send + 'static>(shared: &Arc<Shared<B>>, st: &mut State<B>, mut behavior: B) -> usize {
    let id = st.workers.len();
    let (tx, rx) = channel::<Assignment<B>>();
    let s = shared.clone();
    let join = std::thread::Builder::new()
        .name(format!("mac-{}-worker-{id}", shared.id))
        .spawn(move || {
            for a in rx {
                let Assignment { priority, sync, msg } = a;
                let Message { method, job, fail } = msg;
                if let Some(log) = &s.log {
                    log.record(record(EventKind::Start, s.id, priority, Some(id), method.as_deref(), &sync));
                }
                let ok = match catch_unwind(AssertUnwindSafe(|| job(&mut behavior))) {
                    Ok(ok) => ok,
                    Err(panic) => {
                        fail(FutureError::Failed(panic_message(&*panic)));
                        false
                    }
                };
                if let Some(log) = &s.log {
                    log.record(record(EventKind::Complete, s.id, priority, Some(id), method.as_deref(), &sync));
                }
                free_worker(&s, id, priority, ok);
            }
        })
        .expect("spawn worker");
    st.workers.push(tx);
    st.joins.push(join);
    st.available.push_back(id);
    id
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "panic".to_string()
    }
}

/// Called by a worker after its message's future is resolved.
fn free_worker<B>(shared: &Shared<B>, worker: usize, priority: u64, ok: bool) {
    let mut st = shared.state.lock().unwrap();
    let (p, sync) = st.running.remove(&worker).expect("worker freed twice");
    assert_eq!(p, priority, "worker freed for a message it was not running");
    for e in sync.iter() {
        let held = st.busy_data.remove(e);
        debug_assert!(held, "released an entry that was not busy");
    }
    if !sync.is_empty() {
        st.queue.flush();
    }
    st.available.push_back(worker);
    if ok {
        st.stats.completed += 1;
    } else {
        st.stats.failed += 1;
    }
    st.dirty = true;
    shared.wake.notify_one();
}

fn dispatch_loop<B>(shared: &Shared<B>) {
    let mut st = shared.state.lock().unwrap();
    loop {
        while !st.dirty {
            st = shared.wake.wait(st).unwrap();
        }
        st.dirty = false;
        st.stats.dispatcher_iterations += 1;
        dispatch_cycle(shared, &mut st);
        if st.mode != Mode::Running && st.queue.is_empty() && st.running.is_empty() {
            break;
        }
    }
    let workers = std::mem::take(&mut st.workers);
    let joins = std::mem::take(&mut st.joins);
    drop(st);
    drop(workers);
    for j in joins {
        let _ = j.join();
    }
}

/// Hands selectable messages to idle workers, oldest worker first.
fn dispatch_cycle<B>(shared: &Shared<B>, st: &mut State<B>) {
    while !st.available.is_empty() {
        let Some(m) = st.queue.take_next(&st.busy_data) else { break };
        let worker = st.available.pop_front().expect("checked non-empty");
        st.busy_data.extend(m.sync.iter().cloned());
        st.running.insert(worker, (m.priority, m.sync.clone()));
        st.stats.dispatched += 1;
        st.stats.max_running = st.stats.max_running.max(st.running.len());
        if let Some(log) = &shared.log {
            log.record(record(EventKind::Dispatch, shared.id, m.priority, Some(worker), m.payload.method.as_deref(), &m.sync));
        }
        let a = Assignment { priority: m.priority, sync: m.sync, msg: m.payload };
        st.workers[worker].send(a).expect("worker thread alive");
    }
}
