//! In-place case testing with per-call timing.
//!
//! [`run_cases`] executes declared cases against any [`Target`] and reports
//! the outcome and the monotonic-clock duration of each call. [`Sandbox`]
//! runs them where the target is defined, and is a no-op unless enabled by
//! the `INFOFN_TEST` environment variable or an explicit override.
//!
//! ```
//! use infofn::testkit::{Case, Sandbox};
//! use infofn::{InfoFn, Record, Value};
//!
//! let double = Sandbox::new().enabled(true).apply(
//!     InfoFn::new("double", |a| Ok(Value::Int(a.data().as_int().unwrap_or(0) * 2))),
//!     &[Case::returns(Record::new().with("data", 4), 8)],
//! )
//! .unwrap();
//! assert_eq!(double.call_data(1).unwrap(), Value::Int(2));
//! ```

use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use crate::contract::{Callable, InfoFn, DATA};
use crate::error::{Error, Result};
use crate::pipeline::{ArgNamespace, Pipe, Unit};
use crate::value::{Record, Value};

/// Environment variable that switches sandboxes on.
pub const ENV_TOGGLE: &str = "INFOFN_TEST";

/// Anything that can be called with a keyword record.
pub trait Target {
    fn invoke(&self, args: &Record) -> Result<Value>;
}

impl Target for InfoFn {
    fn invoke(&self, args: &Record) -> Result<Value> {
        self.call(args.clone())
    }
}

impl Target for Unit {
    fn invoke(&self, args: &Record) -> Result<Value> {
        self.call(args.clone())
    }
}

/// Arguments are spelled as keywords.
impl Target for Callable {
    fn invoke(&self, args: &Record) -> Result<Value> {
        self.call(Vec::new(), args.clone())
    }
}

/// `data` is the pipe input; every other key is a namespaced argument.
impl Target for Pipe {
    fn invoke(&self, args: &Record) -> Result<Value> {
        let mut args = args.clone();
        let data = args.remove(DATA).unwrap_or(Value::None);
        let ns: ArgNamespace = args.into_iter().collect();
        self.call(data, &ns)
    }
}

impl<F> Target for F
where
    F: Fn(&Record) -> Result<Value>,
{
    fn invoke(&self, args: &Record) -> Result<Value> {
        self(args)
    }
}

pub type Comparator = Arc<dyn Fn(&Value, &Value) -> bool + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub enum Expectation {
    Returns(Value),
    /// Error kind as reported by [`Error::kind`].
    Raises(String),
    NoRaise,
}

/// One declared test case.
#[derive(Clone)]
pub struct Case {
    pub args: Record,
    pub expect: Expectation,
    comparator: Option<Comparator>,
}

impl fmt::Debug for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Case")
            .field("args", &self.args)
            .field("expect", &self.expect)
            .field("custom_comparator", &self.comparator.is_some())
            .finish()
    }
}

impl Case {
    pub fn returns(args: Record, expected: impl Into<Value>) -> Self {
        Case {
            args,
            expect: Expectation::Returns(expected.into()),
            comparator: None,
        }
    }

    pub fn raises(args: Record, kind: &str) -> Self {
        Case {
            args,
            expect: Expectation::Raises(kind.to_owned()),
            comparator: None,
        }
    }

    pub fn no_raise(args: Record) -> Self {
        Case {
            args,
            expect: Expectation::NoRaise,
            comparator: None,
        }
    }

    /// Replaces exact structural equality with `cmp(expected, observed)`.
    pub fn with_comparator(mut self, cmp: Comparator) -> Self {
        self.comparator = Some(cmp);
        self
    }

    /// Numbers compare within `tol`, recursively through lists and tuples.
    pub fn with_tolerance(self, tol: f64) -> Self {
        self.with_comparator(Arc::new(move |a, b| approx_eq(a, b, tol)))
    }
}

fn approx_eq(a: &Value, b: &Value, tol: f64) -> bool {
    match (a, b) {
        (Value::List(x), Value::List(y)) | (Value::Tuple(x), Value::Tuple(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| approx_eq(p, q, tol))
        }
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => (x - y).abs() <= tol,
            _ => a == b,
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observed {
    Value(Value),
    /// Error kind.
    Error(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub case_index: usize,
    pub passed: bool,
    /// Seconds on the monotonic clock for the whole call.
    pub duration_s: f64,
    pub observed: Observed,
    pub message: String,
}

impl CaseReport {
    /// `index<TAB>PASS|FAIL<TAB>duration_s<TAB>message`, six decimals.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{:.6}\t{}",
            self.case_index,
            if self.passed { "PASS" } else { "FAIL" },
            self.duration_s,
            self.message.replace(['\t', '\n'], " ")
        )
    }
}

fn judge(case: &Case, outcome: &Result<Value>) -> (bool, String) {
    match (&case.expect, outcome) {
        (Expectation::Returns(want), Ok(got)) => {
            let same = match &case.comparator {
                Some(cmp) => cmp(want, got),
                None => want == got,
            };
            if same {
                (true, "ok".into())
            } else {
                (false, format!("expected {want}, got {got}"))
            }
        }
        (Expectation::Returns(want), Err(e)) => (false, format!("expected {want}, raised {}: {e}", e.kind())),
        (Expectation::Raises(kind), Ok(got)) => (false, format!("expected {kind}, returned {got}")),
        (Expectation::Raises(kind), Err(e)) if e.kind() == kind => (true, format!("raised {kind}")),
        (Expectation::Raises(kind), Err(e)) => (false, format!("expected {kind}, raised {}: {e}", e.kind())),
        (Expectation::NoRaise, Ok(_)) => (true, "ok".into()),
        (Expectation::NoRaise, Err(e)) => (false, format!("raised {}: {e}", e.kind())),
    }
}

fn run_one<T: Target + ?Sized>(target: &T, index: usize, case: &Case) -> CaseReport {
    let start = Instant::now();
    let outcome = target.invoke(&case.args);
    let duration_s = start.elapsed().as_secs_f64();
    let (passed, message) = judge(case, &outcome);
    CaseReport {
        case_index: index,
        passed,
        duration_s,
        observed: match outcome {
            Ok(v) => Observed::Value(v),
            Err(e) => Observed::Error(e.kind().to_owned()),
        },
        message,
    }
}

/// Runs every case in order. Failures are reported, never raised.
pub fn run_cases<T: Target + ?Sized>(target: &T, cases: &[Case]) -> Vec<CaseReport> {
    cases.iter().enumerate().map(|(i, c)| run_one(target, i, c)).collect()
}

/// Receives one report at a time. Must tolerate concurrent use.
pub trait Reporter: Send + Sync {
    fn report(&self, report: &CaseReport);
}

impl<F> Reporter for F
where
    F: Fn(&CaseReport) + Send + Sync,
{
    fn report(&self, report: &CaseReport) {
        self(report)
    }
}

/// Writes report lines to standard error.
pub struct StderrReporter;

impl Reporter for StderrReporter {
    fn report(&self, report: &CaseReport) {
        let _ = writeln!(std::io::stderr().lock(), "{}", report.to_line());
    }
}

/// Collects reports in memory.
#[derive(Clone, Default)]
pub struct MemoryReporter(Arc<Mutex<Vec<CaseReport>>>);

impl MemoryReporter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reports(&self) -> Vec<CaseReport> {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

impl Reporter for MemoryReporter {
    fn report(&self, report: &CaseReport) {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).push(report.clone());
    }
}

/// True when `INFOFN_TEST` is set to `1`, `true`, `yes` or `on`.
pub fn env_enabled() -> bool {
    std::env::var(ENV_TOGGLE)
        .map(|v| matches!(v.to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "on"))
        .unwrap_or(false)
}

/// Definition-site test runner.
pub struct Sandbox {
    enabled: Option<bool>,
    fail_fast: bool,
    reporter: Arc<dyn Reporter>,
}

impl Default for Sandbox {
    fn default() -> Self {
        Sandbox {
            enabled: None,
            fail_fast: false,
            reporter: Arc::new(StderrReporter),
        }
    }
}

impl Sandbox {
    pub fn new() -> Self {
        Self::default()
    }

    /// Overrides the environment toggle.
    pub fn enabled(mut self, on: bool) -> Self {
        self.enabled = Some(on);
        self
    }

    /// Stop at the first failing case and return [`Error::SandboxFailure`].
    pub fn fail_fast(mut self, on: bool) -> Self {
        self.fail_fast = on;
        self
    }

    pub fn reporter(mut self, r: Arc<dyn Reporter>) -> Self {
        self.reporter = r;
        self
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled.unwrap_or_else(env_enabled)
    }

    /// Runs `cases` against `target` when enabled, then hands `target` back
    /// untouched.
    pub fn apply<T: Target>(&self, target: T, cases: &[Case]) -> Result<T> {
        if !self.is_enabled() {
            return Ok(target);
        }
        for (i, case) in cases.iter().enumerate() {
            let report = run_one(&target, i, case);
            self.reporter.report(&report);
            if self.fail_fast && !report.passed {
                return Err(Error::SandboxFailure { failed: vec![i] });
            }
        }
        Ok(target)
    }
}

/// [`Sandbox::apply`] with the given enablement and default settings.
pub fn sandbox<T: Target>(target: T, cases: &[Case], enabled: bool) -> T {
    Sandbox::new()
        .enabled(enabled)
        .apply(target, cases)
        .expect("fail-fast is off")
}
