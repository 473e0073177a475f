use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use super::guard::{LogRecord, LogSink, Policy};
use super::{BoundArgs, Callable, ParamKind, ParamSpec};
use crate::error::{Error, Result};
use crate::typeexpr::{validate, TypeExpr, ValidationResult};
use crate::value::{Record, Value};

/// Reserved record key holding the value being processed.
pub const DATA: &str = "data";

type RelationFn = dyn Fn(&Value, &Value) -> Result<bool, String> + Send + Sync;

/// Named constraint relating an argument to the incoming `data`, e.g. "the
/// crop box lies inside the image".
#[derive(Clone)]
pub struct Relation {
    name: Arc<str>,
    check: Arc<RelationFn>,
}

impl Relation {
    /// `check(argument, data)`; an `Err` counts as a violation.
    pub fn new<F>(name: &str, check: F) -> Self
    where
        F: Fn(&Value, &Value) -> Result<bool, String> + Send + Sync + 'static,
    {
        Relation {
            name: name.into(),
            check: Arc::new(check),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation({})", self.name)
    }
}

/// Constraint on one controlling argument.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub expr: TypeExpr,
    pub relation: Option<Relation>,
}

impl Constraint {
    fn check(&self, name: &str, value: &Value, data: &Value) -> Result<()> {
        let r = validate(value, &self.expr)?;
        if !r.ok {
            return Err(Error::ArgumentViolation {
                name: name.to_owned(),
                result: Box::new(r),
            });
        }
        self.check_relation(name, value, data)
    }

    fn check_relation(&self, name: &str, value: &Value, data: &Value) -> Result<()> {
        let Some(rel) = &self.relation else {
            return Ok(());
        };
        let actual = match catch_unwind(AssertUnwindSafe(|| (rel.check)(value, data))) {
            Ok(Ok(true)) => return Ok(()),
            Ok(Ok(false)) => value.to_string(),
            Ok(Err(msg)) => msg,
            Err(_) => "relation check panicked".to_owned(),
        };
        Err(Error::ArgumentViolation {
            name: name.to_owned(),
            result: Box::new(ValidationResult::fail(vec![], format!("rel:{}", rel.name), actual)),
        })
    }
}

impl<T: Into<TypeExpr>> From<T> for Constraint {
    fn from(e: T) -> Self {
        Constraint {
            expr: e.into(),
            relation: None,
        }
    }
}

/// Configuration for one controlling argument.
#[derive(Clone, Debug)]
pub struct ArgSpec {
    pub constraint: Constraint,
    pub default: Option<Value>,
}

impl ArgSpec {
    /// Accepts a [`TypeExpr`] or a [`Predicate`](crate::typeexpr::Predicate).
    pub fn new(constraint: impl Into<TypeExpr>) -> Self {
        ArgSpec {
            constraint: Constraint::from(constraint.into()),
            default: None,
        }
    }

    pub fn with_default(mut self, v: impl Into<Value>) -> Self {
        self.default = Some(v.into());
        self
    }

    pub fn with_relation(mut self, rel: Relation) -> Self {
        self.constraint.relation = Some(rel);
        self
    }
}

/// Zero-argument supplier for dynamic defaults, evaluated per call.
pub type Supplier = Arc<dyn Fn() -> Value + Send + Sync>;

/// Everything declared about an info function.
#[derive(Clone, Debug)]
pub struct FnContract {
    pub entry_tp: TypeExpr,
    pub return_tp: TypeExpr,
    /// Controlling arguments; never contains `data`.
    pub params: Vec<ParamSpec>,
    pub attributes: BTreeMap<String, String>,
}

impl FnContract {
    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    /// True when the underlying callable takes a var-keyword parameter, so
    /// any argument name is accepted.
    pub fn open_keywords(&self) -> bool {
        self.params.iter().any(|p| p.kind == ParamKind::VarKeyword)
    }
}

struct Guard {
    sink: Arc<dyn LogSink>,
    policy: Policy,
}

/// A callable normalized to take one keyword record and return one value,
/// with its contract attached.
///
/// Layers always run in the same order regardless of how they were attached:
/// dynamic defaults, inflow check, argument checks, body under the exception
/// guard, outflow check.
#[derive(Clone)]
pub struct InfoFn {
    name: String,
    callable: Arc<Callable>,
    contract: FnContract,
    dynamic: Vec<(String, Supplier)>,
    guard: Option<Arc<Guard>>,
}

impl fmt::Debug for InfoFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InfoFn")
            .field("name", &self.name)
            .field("entry_tp", &self.contract.entry_tp)
            .field("return_tp", &self.contract.return_tp)
            .field("params", &self.contract.params)
            .field("attributes", &self.contract.attributes)
            .finish_non_exhaustive()
    }
}

/// Wraps `callable` as an info function. `declared` must agree with the
/// callable's signature on names and kinds.
pub fn normalize(callable: Callable, declared: &[ParamSpec]) -> Result<InfoFn> {
    let actual = callable.signature().params();
    let mismatch = |detail: String| Error::SignatureMismatch {
        function: callable.name().to_owned(),
        detail,
    };
    if actual.len() != declared.len() {
        return Err(mismatch(format!(
            "declared {} parameters, callable has {}",
            declared.len(),
            actual.len()
        )));
    }
    for (a, d) in actual.iter().zip(declared) {
        if a.name != d.name || a.kind != d.kind {
            return Err(mismatch(format!(
                "declared `{}` ({}), callable has `{}` ({})",
                d.name, d.kind, a.name, a.kind
            )));
        }
    }
    let params = actual.iter().filter(|p| p.name != DATA).cloned().collect();
    let info = InfoFn {
        name: callable.name().to_owned(),
        callable: Arc::new(callable),
        contract: FnContract {
            entry_tp: TypeExpr::any(),
            return_tp: TypeExpr::any(),
            params,
            attributes: BTreeMap::new(),
        },
        dynamic: Vec::new(),
        guard: None,
    };
    let constrained: Vec<_> = declared
        .iter()
        .filter(|d| d.name != DATA)
        .filter_map(|d| {
            d.constraint.clone().map(|c| {
                let spec = ArgSpec {
                    constraint: c,
                    default: None,
                };
                (d.name.clone(), spec)
            })
        })
        .collect();
    if constrained.is_empty() {
        Ok(info)
    } else {
        info.configure_args(constrained)
    }
}

impl InfoFn {
    /// Info function over a pure var-keyword body: `data` and every
    /// controlling argument arrive as keyword entries.
    pub fn new<F>(name: &str, body: F) -> Self
    where
        F: Fn(&BoundArgs) -> Result<Value> + Send + Sync + 'static,
    {
        let params = vec![ParamSpec::var_keyword("kwargs")];
        let callable = Callable::new(name, params.clone(), body).expect("valid signature");
        normalize(callable, &params).expect("signature agrees with itself")
    }

    /// Builds the callable and normalizes it in one step.
    pub fn with_params<F>(name: &str, params: Vec<ParamSpec>, body: F) -> Result<Self>
    where
        F: Fn(&BoundArgs) -> Result<Value> + Send + Sync + 'static,
    {
        let callable = Callable::new(name, params.clone(), body)?;
        normalize(callable, &params)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contract(&self) -> &FnContract {
        &self.contract
    }

    pub fn entry_tp(&self) -> &TypeExpr {
        &self.contract.entry_tp
    }

    pub fn return_tp(&self) -> &TypeExpr {
        &self.contract.return_tp
    }

    pub fn callable(&self) -> &Callable {
        &self.callable
    }

    pub fn attribute(&self, key: &str) -> Option<&str> {
        self.contract.attributes.get(key).map(String::as_str)
    }

    /// Replaces the flow contract.
    pub fn attach_flow(mut self, entry_tp: TypeExpr, return_tp: TypeExpr) -> Self {
        self.contract.entry_tp = entry_tp;
        self.contract.return_tp = return_tp;
        self
    }

    /// Merges metadata; later keys win.
    pub fn attach_attributes<I, K, V>(mut self, attrs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        self.contract
            .attributes
            .extend(attrs.into_iter().map(|(k, v)| (k.into(), v.into())));
        self
    }

    /// Copies every attribute of `carrier` onto this function.
    pub fn attributes_from(self, carrier: &InfoFn) -> Self {
        let attrs = carrier.contract.attributes.clone();
        self.attach_attributes(attrs)
    }

    /// Attaches argument constraints and defaults.
    ///
    /// Names not declared by the callable may be added when it takes a
    /// var-keyword parameter, provided a default is given. Every default is
    /// checked against its constraint here, once.
    pub fn configure_args<I, K>(mut self, specs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, ArgSpec)>,
        K: Into<String>,
    {
        for (name, spec) in specs {
            let name = name.into();
            if name == DATA {
                return Err(Error::Config(
                    "`data` is the flow slot; constrain it with attach_flow".into(),
                ));
            }
            let open = self.contract.open_keywords();
            let idx = match self.contract.params.iter().position(|p| p.name == name) {
                Some(i) => i,
                None if open => {
                    if spec.default.is_none() {
                        return Err(Error::Config(format!(
                            "`{name}` is not declared; adding it needs a default"
                        )));
                    }
                    let at = self
                        .contract
                        .params
                        .iter()
                        .position(|p| p.kind == ParamKind::VarKeyword)
                        .unwrap_or(self.contract.params.len());
                    self.contract.params.insert(
                        at,
                        ParamSpec {
                            name: name.clone(),
                            kind: ParamKind::Optional,
                            default: None,
                            constraint: None,
                        },
                    );
                    at
                }
                None => return Err(Error::Config(format!("`{}` has no parameter `{name}`", self.name))),
            };
            let p = &mut self.contract.params[idx];
            if let Some(d) = spec.default {
                if matches!(p.kind, ParamKind::VarPositional | ParamKind::VarKeyword) {
                    return Err(Error::Config(format!("`{name}` ({}) cannot take a default", p.kind)));
                }
                p.kind = ParamKind::Optional;
                p.default = Some(d);
            }
            if let Some(d) = &p.default {
                let r = validate(d, &spec.constraint.expr)?;
                if !r.ok {
                    return Err(Error::Config(format!(
                        "default for `{name}` violates its constraint: {r}"
                    )));
                }
            }
            p.constraint = Some(spec.constraint);
        }
        Ok(self)
    }

    /// Registers per-call default suppliers for absent arguments.
    pub fn default_param<I, K>(mut self, defaults: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Supplier)>,
        K: Into<String>,
    {
        for (name, supplier) in defaults {
            let name = name.into();
            if self.contract.param(&name).is_none() {
                return Err(Error::Config(format!("`{}` has no parameter `{name}`", self.name)));
            }
            self.dynamic.retain(|(n, _)| *n != name);
            self.dynamic.push((name, supplier));
        }
        Ok(self)
    }

    /// Captures body failures and outflow violations into `sink`.
    pub fn guard_exceptions(mut self, sink: Arc<dyn LogSink>, policy: Policy) -> Result<Self> {
        if let Policy::Swallow(fallback) = &policy {
            let r = validate(fallback, &self.contract.return_tp)?;
            if !r.ok {
                return Err(Error::Outflow(Box::new(r)));
            }
        }
        self.guard = Some(Arc::new(Guard { sink, policy }));
        Ok(self)
    }

    /// Convenience for a call whose record holds only `data`.
    pub fn call_data(&self, data: impl Into<Value>) -> Result<Value> {
        self.call(Record::new().with(DATA, data))
    }

    /// Calls the info function with one keyword record.
    pub fn call(&self, mut record: Record) -> Result<Value> {
        for (name, supplier) in &self.dynamic {
            if !record.contains(name) {
                record.insert(name.clone(), supplier());
            }
        }

        let missing_data = Value::None;
        let data = record.get(DATA).unwrap_or(&missing_data);
        if !self.contract.entry_tp.is_any() {
            let r = validate(data, &self.contract.entry_tp)?;
            if !r.ok {
                return Err(Error::Inflow(Box::new(r)));
            }
        }

        let mut fill = Vec::new();
        for p in &self.contract.params {
            match (record.get(&p.name), &p.constraint) {
                (Some(v), Some(c)) => c.check(&p.name, v, data)?,
                (Some(_), None) => {}
                (None, c) => {
                    if let Some(d) = &p.default {
                        if let Some(c) = c {
                            c.check_relation(&p.name, d, data)?;
                        }
                        fill.push((p.name.clone(), d.clone()));
                    }
                }
            }
        }
        for (k, v) in fill {
            record.insert(k, v);
        }

        let snapshot = self.guard.as_ref().map(|_| record.clone());
        let bound = self.callable.bind_record(record)?;

        let Some(guard) = &self.guard else {
            return self.run_body(&bound);
        };
        let outcome = match catch_unwind(AssertUnwindSafe(|| self.run_body(&bound))) {
            Ok(r) => r,
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "unknown panic".into());
                Err(Error::body("Panic", msg))
            }
        };
        match outcome {
            Ok(v) => Ok(v),
            Err(e) => {
                let snapshot = snapshot.unwrap_or_default();
                guard
                    .sink
                    .deliver(LogRecord::capture(&self.name, e.kind(), &e.to_string(), &snapshot));
                match &guard.policy {
                    Policy::Reraise => Err(e),
                    Policy::Swallow(fallback) => {
                        self.check_outflow(fallback)?;
                        Ok(fallback.clone())
                    }
                }
            }
        }
    }

    fn run_body(&self, bound: &BoundArgs) -> Result<Value> {
        let out = self.callable.invoke(bound)?;
        self.check_outflow(&out)?;
        Ok(out)
    }

    fn check_outflow(&self, out: &Value) -> Result<()> {
        if self.contract.return_tp.is_any() {
            return Ok(());
        }
        let r = validate(out, &self.contract.return_tp)?;
        if r.ok {
            Ok(())
        } else {
            Err(Error::Outflow(Box::new(r)))
        }
    }
}
