//! Optional JSONL record of message life cycles.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use mac_core::SyncEntry;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Enqueue,
    Dispatch,
    /// The worker is about to run the method.
    Start,
    /// The method returned; its future is resolved.
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub event: EventKind,
    pub actor: u64,
    pub priority: u64,
    /// Nanoseconds since the log was created.
    pub t_ns: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worker: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sync: Vec<SyncEntry>,
}

enum Sink {
    Memory(Vec<LogRecord>),
    Writer(BufWriter<Box<dyn Write + Send>>),
}

struct Inner {
    origin: Instant,
    sink: Mutex<Sink>,
}

/// Shared event sink. Clones write to the same log and clock.
#[derive(Clone)]
pub struct EventLog {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for EventLog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("EventLog")
    }
}

impl EventLog {
    fn with(sink: Sink) -> Self {
        EventLog { inner: Arc::new(Inner { origin: Instant::now(), sink: Mutex::new(sink) }) }
    }

    /// Keeps records in memory; read them with [`EventLog::records`].
    pub fn memory() -> Self {
        Self::with(Sink::Memory(Vec::new()))
    }

    pub fn to_writer(w: impl Write + Send + 'static) -> Self {
        Self::with(Sink::Writer(BufWriter::new(Box::new(w))))
    }

    pub fn to_file(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::to_writer(File::create(path)?))
    }

    pub fn now_ns(&self) -> u64 {
        self.inner.origin.elapsed().as_nanos() as u64
    }

    pub(crate) fn record(&self, mut rec: LogRecord) {
        let mut sink = self.inner.sink.lock().unwrap();
        // Stamped under the sink lock so the file is in time order.
        rec.t_ns = self.now_ns();
        match &mut *sink {
            Sink::Memory(v) => v.push(rec),
            Sink::Writer(w) => {
                // A failing log must not take the actor down.
                let _ = serde_json::to_writer(&mut *w, &rec);
                let _ = w.write_all(b"\n");
            }
        }
    }

    /// Records kept so far; empty for writer-backed logs.
    pub fn records(&self) -> Vec<LogRecord> {
        match &*self.inner.sink.lock().unwrap() {
            Sink::Memory(v) => v.clone(),
            Sink::Writer(_) => Vec::new(),
        }
    }

    pub fn flush(&self) -> io::Result<()> {
        match &mut *self.inner.sink.lock().unwrap() {
            Sink::Memory(_) => Ok(()),
            Sink::Writer(w) => w.flush(),
        }
    }

    /// Writes the in-memory records as JSONL.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for r in self.records() {
            serde_json::to_writer(&mut out, &r)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

/// Parses a JSONL log.
pub fn read_jsonl(r: impl io::Read) -> io::Result<Vec<LogRecord>> {
    BufReader::new(r)
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?).map_err(io::Error::from))
        .collect()
}
