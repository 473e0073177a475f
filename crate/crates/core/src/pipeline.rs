//! Units, pipes and data-free composition.
//!
//! A [`Unit`] names an [`InfoFn`]; a [`Pipe`] is an ordered, non-empty list of
//! units or nested pipes. Adjacent steps are checked when the pipe is built,
//! using [`subsumes`] on the declared contracts only: no step body runs during
//! composition.
//!
//! Per-step arguments live in an [`ArgNamespace`] keyed by
//! `"<step>.<param>"`. Nested pipes keep their own name as a prefix, so the
//! `crop` step of a nested `processing` pipe is addressed as
//! `processing.crop.box`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::time::{Duration, Instant};

use crate::contract::{InfoFn, ParamKind, DATA};
use crate::error::{Error, Result};
use crate::typeexpr::{subsumes, TypeExpr};
use crate::value::{Record, Value};

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains('.') {
        Err(Error::BadName(name.to_owned()))
    } else {
        Ok(())
    }
}

/// A named pipeline step.
#[derive(Clone, Debug)]
pub struct Unit {
    name: String,
    info: InfoFn,
}

/// Wraps `info` as a step called `name`.
pub fn make_unit(info: InfoFn, name: &str) -> Result<Unit> {
    Unit::new(name, info)
}

impl Unit {
    pub fn new(name: &str, info: InfoFn) -> Result<Self> {
        check_name(name)?;
        Ok(Unit {
            name: name.to_owned(),
            info,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn info(&self) -> &InfoFn {
        &self.info
    }

    pub fn call(&self, record: Record) -> Result<Value> {
        self.info.call(record)
    }
}

/// Either a unit or a nested pipe.
#[derive(Clone, Debug)]
pub enum Step {
    Unit(Unit),
    Pipe(Pipe),
}

impl Step {
    pub fn name(&self) -> &str {
        match self {
            Step::Unit(u) => &u.name,
            Step::Pipe(p) => &p.name,
        }
    }

    pub fn entry_tp(&self) -> &TypeExpr {
        match self {
            Step::Unit(u) => u.info.entry_tp(),
            Step::Pipe(p) => p.entry_tp(),
        }
    }

    pub fn return_tp(&self) -> &TypeExpr {
        match self {
            Step::Unit(u) => u.info.return_tp(),
            Step::Pipe(p) => p.return_tp(),
        }
    }
}

impl From<Unit> for Step {
    fn from(u: Unit) -> Self {
        Step::Unit(u)
    }
}

impl From<Pipe> for Step {
    fn from(p: Pipe) -> Self {
        Step::Pipe(p)
    }
}

/// A validated composition of steps.
#[derive(Clone, Debug)]
pub struct Pipe {
    name: String,
    steps: Vec<Step>,
    /// `asserted[i]`: the junction into step `i` was accepted unproven.
    asserted: Vec<bool>,
}

/// A step of the flattened pipe.
#[derive(Clone, Copy, Debug)]
pub struct FlatStep<'a> {
    pub info: &'a InfoFn,
    /// The junction into this step was accepted by assertion.
    pub asserted: bool,
}

/// Composes `steps` into a pipe called `name`.
pub fn compose(name: &str, steps: Vec<Step>) -> Result<Pipe> {
    let n = steps.len();
    Pipe::build(name, steps, vec![false; n])
}

impl Pipe {
    pub fn builder(name: &str) -> PipeBuilder {
        PipeBuilder {
            name: name.to_owned(),
            steps: Vec::new(),
            asserted: Vec::new(),
        }
    }

    fn build(name: &str, steps: Vec<Step>, asserted: Vec<bool>) -> Result<Pipe> {
        check_name(name)?;
        if steps.is_empty() {
            return Err(Error::Config(format!("pipe `{name}` has no steps")));
        }
        for (i, pair) in steps.windows(2).enumerate() {
            let (prev, next) = (&pair[0], &pair[1]);
            if !asserted[i + 1] && !subsumes(next.entry_tp(), prev.return_tp()) {
                return Err(Error::IncompatibleSteps {
                    junction: i,
                    returns: prev.return_tp().render(),
                    expects: next.entry_tp().render(),
                });
            }
        }
        let pipe = Pipe {
            name: name.to_owned(),
            steps,
            asserted,
        };
        let mut seen = std::collections::BTreeSet::new();
        for s in &pipe.steps {
            if !seen.insert(s.name().to_owned()) {
                return Err(Error::DuplicateStepName(s.name().to_owned()));
            }
        }
        let mut flat = std::collections::BTreeSet::new();
        for (q, _) in pipe.flatten() {
            if !flat.insert(q.clone()) {
                return Err(Error::DuplicateStepName(q));
            }
        }
        Ok(pipe)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn entry_tp(&self) -> &TypeExpr {
        self.steps[0].entry_tp()
    }

    pub fn return_tp(&self) -> &TypeExpr {
        self.steps[self.steps.len() - 1].return_tp()
    }

    /// Units in execution order with their qualified names.
    pub fn flatten(&self) -> Vec<(String, FlatStep<'_>)> {
        let mut out = Vec::new();
        self.flatten_into("", &mut out);
        out
    }

    fn flatten_into<'a>(&'a self, prefix: &str, out: &mut Vec<(String, FlatStep<'a>)>) {
        for (step, &asserted) in self.steps.iter().zip(&self.asserted) {
            match step {
                Step::Unit(u) => out.push((
                    format!("{prefix}{}", u.name),
                    FlatStep {
                        info: &u.info,
                        asserted,
                    },
                )),
                Step::Pipe(p) => {
                    let first = out.len();
                    p.flatten_into(&format!("{prefix}{}.", p.name), out);
                    if asserted {
                        out[first].1.asserted = true;
                    }
                }
            }
        }
    }

    /// Runs the pipe on `data`; see [`run`].
    pub fn call(&self, data: impl Into<Value>, args: &ArgNamespace) -> Result<Value> {
        run(self, data.into(), args)
    }

    /// Data-free rendering of the pipe; see [`describe`].
    pub fn describe(&self) -> String {
        describe(self)
    }

    /// Writes a line-oriented manifest: a header line, then one line per step.
    pub fn write_manifest<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# pipe {}", self.name)?;
        w.write_all(self.describe().as_bytes())
    }
}

/// Incremental pipe construction.
#[derive(Clone, Debug)]
pub struct PipeBuilder {
    name: String,
    steps: Vec<Step>,
    asserted: Vec<bool>,
}

impl PipeBuilder {
    pub fn then(mut self, step: impl Into<Step>) -> Self {
        self.steps.push(step.into());
        self.asserted.push(false);
        self
    }

    /// Appends `step` and accepts its incoming junction without proof. The
    /// override is shown by [`describe`].
    pub fn then_asserted(mut self, step: impl Into<Step>) -> Self {
        self.steps.push(step.into());
        self.asserted.push(true);
        self
    }

    pub fn build(self) -> Result<Pipe> {
        Pipe::build(&self.name, self.steps, self.asserted)
    }
}

/// Arguments for a whole pipe, keyed by `"<qualified step>.<param>"`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArgNamespace(BTreeMap<String, Value>);

impl ArgNamespace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.0.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    /// Re-keys every entry with `prefix` prepended.
    pub fn prefixed(&self, prefix: &str) -> ArgNamespace {
        ArgNamespace(
            self.0
                .iter()
                .map(|(k, v)| (format!("{prefix}.{k}"), v.clone()))
                .collect(),
        )
    }
}

impl<K: Into<String>, V: Into<Value>> FromIterator<(K, V)> for ArgNamespace {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        ArgNamespace(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergeMode {
    /// Keys of both; equal values for shared keys are required.
    Union,
    /// Keys present in both with equal values.
    Intersect,
    /// `a`, with `b` winning on shared keys.
    Override,
}

pub fn merge_args(a: &ArgNamespace, b: &ArgNamespace, mode: MergeMode) -> Result<ArgNamespace> {
    match mode {
        MergeMode::Union => {
            let mut out = a.clone();
            for (k, v) in &b.0 {
                match out.0.get(k) {
                    Some(existing) if existing != v => return Err(Error::Conflict(k.clone())),
                    _ => {
                        out.0.insert(k.clone(), v.clone());
                    }
                }
            }
            Ok(out)
        }
        MergeMode::Intersect => Ok(ArgNamespace(
            a.0.iter()
                .filter(|(k, v)| b.0.get(*k) == Some(*v))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )),
        MergeMode::Override => {
            let mut out = a.clone();
            out.0.extend(b.0.iter().map(|(k, v)| (k.clone(), v.clone())));
            Ok(out)
        }
    }
}

/// Per-run switches. Everything is off by default.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Time each step with a monotonic clock.
    pub timing: bool,
    /// Keep every step's output in the trace.
    pub keep_outputs: bool,
}

#[derive(Clone, Debug)]
pub struct StepTrace {
    pub name: String,
    pub duration: Option<Duration>,
    pub output: Option<Value>,
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    pub output: Value,
    pub steps: Vec<StepTrace>,
}

impl RunTrace {
    pub fn output_of(&self, step: &str) -> Option<&Value> {
        self.steps
            .iter()
            .find(|s| s.name == step)
            .and_then(|s| s.output.as_ref())
    }
}

/// Threads `data` through the pipe.
pub fn run(pipe: &Pipe, data: Value, args: &ArgNamespace) -> Result<Value> {
    run_with(pipe, data, args, RunOptions::default()).map(|t| t.output)
}

/// Like [`run`], optionally collecting timings and intermediate outputs.
///
/// Every argument key is resolved before the first step runs.
pub fn run_with(pipe: &Pipe, data: Value, args: &ArgNamespace, opts: RunOptions) -> Result<RunTrace> {
    let flat = pipe.flatten();
    let mut per_step: Vec<Record> = vec![Record::new(); flat.len()];
    for (key, value) in &args.0 {
        let (step, param) = key.rsplit_once('.').ok_or_else(|| Error::UnresolvedArg(key.clone()))?;
        let idx = flat
            .iter()
            .position(|(q, _)| q == step)
            .ok_or_else(|| Error::UnresolvedArg(key.clone()))?;
        let contract = flat[idx].1.info.contract();
        let declared = contract.param(param).is_some_and(|p| p.kind != ParamKind::VarKeyword);
        if param == DATA || !(declared || contract.open_keywords()) {
            return Err(Error::UnresolvedArg(key.clone()));
        }
        per_step[idx].insert(param, value.clone());
    }

    let mut data = data;
    let mut steps = Vec::new();
    for ((name, flat_step), mut record) in flat.into_iter().zip(per_step) {
        record.insert(DATA, data);
        let start = opts.timing.then(Instant::now);
        let out = flat_step.info.call(record).map_err(|e| Error::Step {
            step: name.clone(),
            source: Box::new(e),
        })?;
        if opts.timing || opts.keep_outputs {
            steps.push(StepTrace {
                name,
                duration: start.map(|s| s.elapsed()),
                output: opts.keep_outputs.then(|| out.clone()),
            });
        }
        data = out;
    }
    Ok(RunTrace { output: data, steps })
}

fn describe_params(info: &InfoFn) -> String {
    let parts: Vec<String> = info
        .contract()
        .params
        .iter()
        .map(|p| {
            let mut s = match p.kind {
                ParamKind::VarPositional => format!("*{}", p.name),
                ParamKind::VarKeyword => format!("**{}", p.name),
                _ => p.name.clone(),
            };
            if let Some(c) = &p.constraint {
                let _ = write!(s, ": {}", c.expr.render());
                if let Some(rel) = &c.relation {
                    let _ = write!(s, " & rel:{}", rel.name());
                }
            }
            if let Some(d) = &p.default {
                let _ = write!(s, " = {d}");
            }
            s
        })
        .collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(", ")
    }
}

/// One line per flattened step:
/// `name<TAB>entry -> return<TAB>params`, plus a trailing `<TAB>[asserted]`
/// on steps whose incoming junction was accepted without proof.
pub fn describe(pipe: &Pipe) -> String {
    let mut out = String::new();
    for (name, step) in pipe.flatten() {
        let c = step.info.contract();
        let _ = write!(
            out,
            "{name}\t{} -> {}\t{}",
            c.entry_tp.render(),
            c.return_tp.render(),
            describe_params(step.info)
        );
        if step.asserted {
            out.push_str("\t[asserted]");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract::{ArgSpec, ParamSpec};
    use crate::predicates;

    fn add(name: &str) -> Unit {
        let info = InfoFn::new(name, |a| {
            let k = a.get("k").and_then(Value::as_int).unwrap_or(1);
            Ok(Value::Int(a.data().as_int().unwrap_or(0) + k))
        })
        .attach_flow(TypeExpr::integer(), TypeExpr::integer());
        Unit::new(name, info).unwrap()
    }

    fn strict(name: &str) -> Unit {
        let info = InfoFn::with_params(
            name,
            vec![ParamSpec::positional("data"), ParamSpec::optional("k", 0)],
            |a| {
                Ok(Value::Int(
                    a.data().as_int().unwrap_or(0) * 10 + a.require("k")?.as_int().unwrap_or(0),
                ))
            },
        )
        .unwrap()
        .attach_flow(TypeExpr::integer(), TypeExpr::integer());
        Unit::new(name, info).unwrap()
    }

    #[test]
    fn bad_names() {
        let info = InfoFn::new("f", |_| Ok(Value::None));
        assert!(matches!(make_unit(info.clone(), ""), Err(Error::BadName(_))));
        assert!(matches!(make_unit(info.clone(), "a.b"), Err(Error::BadName(_))));
        assert_eq!(make_unit(info, "crop").unwrap().name(), "crop");
    }

    #[test]
    fn incompatible_junction() {
        let m = Unit::new(
            "m",
            InfoFn::new("m", |_| Ok(Value::None)).attach_flow(TypeExpr::any(), predicates::matrix().into()),
        )
        .unwrap();
        let t = Unit::new(
            "t",
            InfoFn::new("t", |_| Ok(Value::None)).attach_flow(TypeExpr::text(), TypeExpr::any()),
        )
        .unwrap();
        let e = compose("p", vec![m.clone().into(), t.clone().into()]).unwrap_err();
        match e {
            Error::IncompatibleSteps {
                junction,
                returns,
                expects,
            } => {
                assert_eq!(junction, 0);
                assert_eq!(returns, "pred:matrix");
                assert_eq!(expects, "text");
            }
            e => panic!("{e:?}"),
        }
        let p = Pipe::builder("p").then(m).then_asserted(t).build().unwrap();
        assert!(p.describe().lines().nth(1).unwrap().ends_with("[asserted]"));
    }

    #[test]
    fn duplicate_names() {
        let e = compose("p", vec![add("a").into(), add("a").into()]).unwrap_err();
        assert!(matches!(e, Error::DuplicateStepName(n) if n == "a"));
    }

    #[test]
    fn empty_pipe_is_rejected() {
        assert!(compose("p", vec![]).is_err());
    }

    #[test]
    fn run_threads_data_and_args() {
        let p = compose("p", vec![add("a").into(), strict("b").into()]).unwrap();
        let args = ArgNamespace::new().with("a.k", 4).with("b.k", 2);
        assert_eq!(p.call(1, &args).unwrap(), Value::Int((1 + 4) * 10 + 2));
    }

    #[test]
    fn unresolved_keys_fail_before_running() {
        let p = compose("p", vec![strict("b").into()]).unwrap();
        for key in ["nosuch.k", "b.zz", "b.data", "b"] {
            let args = ArgNamespace::new().with(key, 1);
            assert!(
                matches!(p.call(1, &args), Err(Error::UnresolvedArg(k)) if k == key),
                "{key}"
            );
        }
    }

    #[test]
    fn step_errors_are_annotated() {
        let p = compose("p", vec![add("a").into()]).unwrap();
        let e = p.call("nope", &ArgNamespace::new()).unwrap_err();
        assert!(matches!(&e, Error::Step { step, .. } if step == "a"));
        assert_eq!(e.kind(), "InflowViolation");
    }

    #[test]
    fn nested_pipes_are_qualified() {
        let inner = compose("q", vec![add("u1").into(), add("u2").into()]).unwrap();
        let outer = compose("p", vec![inner.into(), strict("u3").into()]).unwrap();
        let names: Vec<_> = outer.flatten().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, ["q.u1", "q.u2", "u3"]);
        let args = ArgNamespace::new().with("q.u1.k", 5);
        assert_eq!(outer.call(0, &args).unwrap(), Value::Int((5 + 1) * 10));
    }

    #[test]
    fn trace_records_outputs_and_timing() {
        let p = compose("p", vec![add("a").into(), add("b").into()]).unwrap();
        let t = run_with(
            &p,
            0.into(),
            &ArgNamespace::new(),
            RunOptions {
                timing: true,
                keep_outputs: true,
            },
        )
        .unwrap();
        assert_eq!(t.output_of("a"), Some(&Value::Int(1)));
        assert!(t.steps.iter().all(|s| s.duration.is_some()));
        let t = run_with(&p, 0.into(), &ArgNamespace::new(), RunOptions::default()).unwrap();
        assert!(t.steps.is_empty());
    }

    #[test]
    fn describe_format() {
        let info = InfoFn::new("s", |a| Ok(a.data().clone()))
            .configure_args([("scale", ArgSpec::new(predicates::positive()).with_default(2.0))])
            .unwrap();
        let p = compose("p", vec![Unit::new("s", info).unwrap().into()]).unwrap();
        assert_eq!(p.describe(), "s\tAny -> Any\tscale: pred:positive = 2.0, **kwargs\n");
        let mut buf = Vec::new();
        p.write_manifest(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("# pipe p\ns\t"));
    }

    #[test]
    fn merge_modes() {
        let a = ArgNamespace::new().with("x.a", 1);
        let b = ArgNamespace::new().with("y.b", 2);
        let u = merge_args(&a, &b, MergeMode::Union).unwrap();
        assert_eq!(u, ArgNamespace::new().with("x.a", 1).with("y.b", 2));
        let c = ArgNamespace::new().with("x.a", 2);
        assert!(matches!(merge_args(&a, &c, MergeMode::Union), Err(Error::Conflict(k)) if k == "x.a"));
        assert_eq!(merge_args(&a, &a, MergeMode::Union).unwrap(), a);
        let i = merge_args(&u, &a, MergeMode::Intersect).unwrap();
        assert_eq!(i, a);
        assert!(merge_args(&a, &c, MergeMode::Intersect).unwrap().is_empty());
        assert_eq!(merge_args(&a, &c, MergeMode::Override).unwrap(), c);
    }
}
