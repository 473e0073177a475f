//! Decoration-overhead benchmark.
//!
//! Four subjects share one body (pause, then return a small record): the raw
//! callable, and info functions carrying a flow contract, argument
//! constraints, or both. Each is called with the same legal record and timed
//! with a monotonic clock.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use statrs::statistics::{Data, Distribution, Max, Median, Min};

use crate::contract::{ArgSpec, Callable, InfoFn, ParamSpec, DATA};
use crate::error::{Error, Result};
use crate::predicates;
use crate::testkit::Target;
use crate::typeexpr::TypeExpr;
use crate::value::{Record, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Config {
    NoDeco,
    FlowConf,
    ArgConf,
    FlowArgConf,
}

impl Config {
    pub const ALL: [Config; 4] = [Config::NoDeco, Config::FlowConf, Config::ArgConf, Config::FlowArgConf];

    pub fn label(self) -> &'static str {
        match self {
            Config::NoDeco => "NoDeco",
            Config::FlowConf => "FlowConf",
            Config::ArgConf => "ArgConf",
            Config::FlowArgConf => "FlowConf+ArgConf",
        }
    }

    fn has_flow(self) -> bool {
        matches!(self, Config::FlowConf | Config::FlowArgConf)
    }

    fn has_args(self) -> bool {
        matches!(self, Config::ArgConf | Config::FlowArgConf)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Config::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown benchmark config `{s}`")))
    }
}

/// Parses a comma-separated list such as `NoDeco,FlowConf+ArgConf`.
pub fn parse_configs(list: &str) -> Result<Vec<Config>> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let c: Config = part.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// A benchmark subject: the raw callable or a decorated info function.
#[derive(Clone, Debug)]
pub enum Subject {
    Raw(Callable),
    Info(InfoFn),
}

impl Target for Subject {
    fn invoke(&self, args: &Record) -> Result<Value> {
        match self {
            Subject::Raw(c) => c.call(Vec::new(), args.clone()),
            Subject::Info(f) => f.call(args.clone()),
        }
    }
}

/// The record every timed call receives.
///
/// `data` is a list of strings; `arg1` is a (real, integer) pair and `arg2`
/// a coefficient in [0, 1].
pub fn legal_record() -> Record {
    Record::new()
        .with(DATA, Value::list(["alpha", "beta", "gamma"]))
        .with("arg1", Value::tuple([Value::Real(3.5), Value::Int(2)]))
        .with("arg2", 0.5)
}

/// A record that the decorations of `config` must reject.
fn probe_record(config: Config) -> Record {
    let r = legal_record();
    if config.has_flow() {
        r.with(DATA, Value::tuple(["alpha", "beta"]))
    } else {
        r.with("arg2", 1.5)
    }
}

fn sleeper(sleep_s: f64) -> Callable {
    let pause = Duration::from_secs_f64(sleep_s.max(0.0));
    Callable::new("sleeper", vec![ParamSpec::var_keyword("kwargs")], move |_| {
        if !pause.is_zero() {
            std::thread::sleep(pause);
        }
        Ok(Value::map([("status", "done")]))
    })
    .expect("static signature")
}

/// Builds the subject for one configuration.
pub fn build_subject(config: Config, sleep_s: f64) -> Subject {
    let raw = sleeper(sleep_s);
    if config == Config::NoDeco {
        return Subject::Raw(raw);
    }
    let params = raw.signature().params().to_vec();
    let mut info = crate::contract::normalize(raw, &params).expect("signature agrees with itself");
    if config.has_flow() {
        let entry = TypeExpr::union(vec![TypeExpr::text(), TypeExpr::seq(TypeExpr::text())]).expect("distinct");
        info = info.attach_flow(entry, TypeExpr::map(TypeExpr::text(), TypeExpr::text()));
    }
    if config.has_args() {
        let pair = TypeExpr::fixed_seq(vec![TypeExpr::real(), TypeExpr::integer()]).expect("non-empty");
        info = info
            .configure_args([
                (
                    "arg1",
                    ArgSpec::new(pair).with_default(Value::tuple([Value::Real(1.0), Value::Int(1)])),
                ),
                ("arg2", ArgSpec::new(predicates::unit_interval()).with_default(0.5)),
            ])
            .expect("defaults satisfy their constraints");
    }
    Subject::Info(info)
}

/// All four subjects, in [`Config::ALL`] order.
pub fn build_subjects(sleep_s: f64) -> Vec<(Config, Subject)> {
    Config::ALL
        .into_iter()
        .map(|c| (c, build_subject(c, sleep_s)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub trials: usize,
    pub sleep_s: f64,
    pub configs: Vec<Config>,
    pub warmup: usize,
    /// CSV destination; `None` keeps results in memory only.
    pub output_path: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            trials: 30,
            sleep_s: 0.1,
            configs: Config::ALL.to_vec(),
            warmup: 3,
            output_path: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.sleep_s >= 0.0 && self.sleep_s.is_finite()) {
            return Err(Error::Config("sleep_s must be a finite number >= 0".into()));
        }
        if self.configs.is_empty() {
            return Err(Error::Config("at least one config is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub config: Config,
    pub trial: usize,
    pub duration_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub config: Config,
    pub mean_s: f64,
    pub median_s: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub stdev_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

impl BenchOutcome {
    pub fn row(&self, config: Config) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.config == config)
    }

    /// Raw trials as CSV with header `config,trial,duration_s`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["config", "trial", "duration_s"]).map_err(csv_err)?;
        for r in &self.records {
            w.write_record([
                r.config.label().to_string(),
                r.trial.to_string(),
                format!("{:.9}", r.duration_s),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Fixed-width summary table, seconds to six decimals.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{:<18} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
            "config", "mean_s", "median_s", "stdev_s", "min_s", "max_s"
        );
        for r in &self.summary {
            let _ = writeln!(
                out,
                "{:<18} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
                r.config.label(),
                r.mean_s,
                r.median_s,
                r.stdev_s,
                r.min_s,
                r.max_s
            );
        }
        out
    }
}

pub fn summarize(config: Config, durations: &[f64]) -> SummaryRow {
    let data = Data::new(durations.to_vec());
    let stdev = if durations.len() > 1 {
        data.std_dev().unwrap_or(0.0)
    } else {
        0.0
    };
    SummaryRow {
        config,
        mean_s: data.mean().unwrap_or(f64::NAN),
        median_s: data.median(),
        stdev_s: stdev,
        min_s: data.min(),
        max_s: data.max(),
    }
}

/// Checks that the decorated subject of `config` actually validates.
pub fn check_liveness(config: Config, subject: &Subject) -> Result<()> {
    if config == Config::NoDeco {
        return Ok(());
    }
    match subject.invoke(&probe_record(config)) {
        Err(Error::Inflow(_)) if config.has_flow() => Ok(()),
        Err(Error::ArgumentViolation { .. }) if !config.has_flow() => Ok(()),
        other => Err(Error::Config(format!(
            "{config} subject accepted a violating probe ({other:?}); decoration is not live"
        ))),
    }
}

/// Runs every configuration in turn: warmup calls first, then timed trials.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchOutcome> {
    cfg.validate()?;
    let args = legal_record();
    let mut records = Vec::with_capacity(cfg.trials * cfg.configs.len());
    let mut summary = Vec::with_capacity(cfg.configs.len());
    for &config in &cfg.configs {
        let subject = build_subject(config, cfg.sleep_s);
        check_liveness(config, &subject)?;
        for _ in 0..cfg.warmup {
            subject.invoke(&args)?;
        }
        let mut durations = Vec::with_capacity(cfg.trials);
        for trial in 0..cfg.trials {
            let start = Instant::now();
            let out = subject.invoke(&args);
            let d = start.elapsed().as_secs_f64();
            out.map_err(|e| Error::Config(format!("{config} trial {trial} failed: {e}")))?;
            durations.push(d);
            records.push(BenchRecord {
                config,
                trial,
                duration_s: d,
            });
        }
        summary.push(summarize(config, &durations));
    }
    let outcome = BenchOutcome { records, summary };
    if let Some(path) = &cfg.output_path {
        std::fs::write(path, outcome.to_csv()?)?;
    }
    Ok(outcome)
}
