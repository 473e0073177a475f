use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex};

use chrono::{DateTime, SecondsFormat, Utc};

use crate::value::{Record, Value};

/// Maximum characters kept per argument value in a log snapshot.
pub const SNAPSHOT_LIMIT: usize = 256;

/// What a guarded info function does after logging a failure.
#[derive(Clone, Debug, Default)]
pub enum Policy {
    #[default]
    Reraise,
    /// Return this value instead. It must satisfy the return contract.
    Swallow(Value),
}

/// One captured failure.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRecord {
    pub timestamp: DateTime<Utc>,
    pub function: String,
    pub kind: String,
    pub message: String,
    /// `name=value` pairs, each value truncated to [`SNAPSHOT_LIMIT`] chars.
    pub args: String,
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn truncate(s: &str) -> String {
    if s.chars().count() <= SNAPSHOT_LIMIT {
        s.to_owned()
    } else {
        let mut out: String = s.chars().take(SNAPSHOT_LIMIT - 3).collect();
        out.push_str("...");
        out
    }
}

impl LogRecord {
    pub(crate) fn capture(function: &str, kind: &str, message: &str, args: &Record) -> Self {
        let args = args
            .iter()
            .map(|(k, v)| format!("{k}={}", truncate(&v.to_string())))
            .collect::<Vec<_>>()
            .join(", ");
        LogRecord {
            timestamp: Utc::now(),
            function: function.to_owned(),
            kind: kind.to_owned(),
            message: message.to_owned(),
            args,
        }
    }

    /// Tab-separated line: timestamp, function, kind, message, arguments.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.timestamp.to_rfc3339_opts(SecondsFormat::Micros, true),
            clean(&self.function),
            clean(&self.kind),
            clean(&self.message),
            clean(&self.args)
        )
    }
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Consumer of log records. Must tolerate concurrent delivery.
pub trait LogSink: Send + Sync {
    fn deliver(&self, record: LogRecord);
}

impl<F> LogSink for F
where
    F: Fn(LogRecord) + Send + Sync,
{
    fn deliver(&self, record: LogRecord) {
        self(record)
    }
}

/// Keeps records in memory.
#[derive(Clone, Default)]
pub struct MemorySink(Arc<Mutex<Vec<LogRecord>>>);

impl MemorySink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> Vec<LogRecord> {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn len(&self) -> usize {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl LogSink for MemorySink {
    fn deliver(&self, record: LogRecord) {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).push(record);
    }
}

/// Writes one line per record to a writer (a file, stderr, ...).
pub struct WriterSink<W: Write + Send>(Mutex<W>);

impl<W: Write + Send> WriterSink<W> {
    pub fn new(w: W) -> Self {
        WriterSink(Mutex::new(w))
    }

    pub fn into_inner(self) -> W {
        self.0.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}

impl<W: Write + Send> LogSink for WriterSink<W> {
    fn deliver(&self, record: LogRecord) {
        let mut w = self.0.lock().unwrap_or_else(|e| e.into_inner());
        // a failing log writer must not turn into a second error
        let _ = writeln!(w, "{}", record.to_line());
    }
}
