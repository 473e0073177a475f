//! Callables, signatures and the info-function suite.
//!
//! A [`Callable`] is a body with an ordinary signature: positional,
//! optional-with-default, var-positional and var-keyword parameters, in that
//! priority order. It can be called the conventional way, with positional
//! values followed by keywords ([`Callable::call`]).
//!
//! [`normalize`] turns a callable into an [`InfoFn`]: a function of exactly
//! one keyword record whose `data` entry is the value being processed. Flow
//! contracts, argument constraints, dynamic defaults, exception capture and
//! metadata are then attached to the info function without touching the body.

mod guard;
mod info;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::value::{Record, Value};

pub use guard::{LogRecord, LogSink, MemorySink, Policy, WriterSink, SNAPSHOT_LIMIT};
pub use info::{normalize, ArgSpec, Constraint, FnContract, InfoFn, Relation, Supplier, DATA};

/// Parameter kinds, in their required declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKind {
    Positional,
    Optional,
    VarPositional,
    VarKeyword,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamKind::Positional => "positional",
            ParamKind::Optional => "optional",
            ParamKind::VarPositional => "var-positional",
            ParamKind::VarKeyword => "var-keyword",
        })
    }
}

/// One declared parameter.
#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    /// Present iff `kind` is [`ParamKind::Optional`].
    pub default: Option<Value>,
    pub constraint: Option<Constraint>,
}

impl ParamSpec {
    pub fn positional(name: &str) -> Self {
        Self::of_kind(name, ParamKind::Positional, None)
    }

    pub fn optional(name: &str, default: impl Into<Value>) -> Self {
        Self::of_kind(name, ParamKind::Optional, Some(default.into()))
    }

    pub fn var_positional(name: &str) -> Self {
        Self::of_kind(name, ParamKind::VarPositional, None)
    }

    pub fn var_keyword(name: &str) -> Self {
        Self::of_kind(name, ParamKind::VarKeyword, None)
    }

    fn of_kind(name: &str, kind: ParamKind, default: Option<Value>) -> Self {
        ParamSpec {
            name: name.to_owned(),
            kind,
            default,
            constraint: None,
        }
    }
}

/// Validated parameter list.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    params: Vec<ParamSpec>,
}

impl Signature {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        for (i, p) in params.iter().enumerate() {
            if params[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::Config(format!("duplicate parameter `{}`", p.name)));
            }
            if let Some(prev) = i.checked_sub(1).map(|j| &params[j]) {
                let repeated_var =
                    prev.kind == p.kind && matches!(p.kind, ParamKind::VarPositional | ParamKind::VarKeyword);
                if prev.kind > p.kind || repeated_var {
                    return Err(Error::Config(format!(
                        "parameter `{}` ({}) cannot follow `{}` ({})",
                        p.name, p.kind, prev.name, prev.kind
                    )));
                }
            }
            if (p.kind == ParamKind::Optional) != p.default.is_some() {
                return Err(Error::Config(format!(
                    "parameter `{}`: a default is required for optional parameters only",
                    p.name
                )));
            }
        }
        Ok(Signature { params })
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    pub fn find(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    fn of_kind(&self, kind: ParamKind) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.kind == kind)
    }

    pub fn var_positional(&self) -> Option<&ParamSpec> {
        self.of_kind(ParamKind::VarPositional)
    }

    pub fn var_keyword(&self) -> Option<&ParamSpec> {
        self.of_kind(ParamKind::VarKeyword)
    }
}

/// Arguments as the body sees them after binding.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundArgs {
    named: BTreeMap<String, Value>,
    varargs: Vec<Value>,
    varkw: Record,
}

impl BoundArgs {
    /// Looks a name up among named parameters, then among var-keyword entries.
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.named.get(name).or_else(|| self.varkw.get(name))
    }

    /// Like [`get`](Self::get) but a missing name is an error.
    pub fn require(&self, name: &str) -> Result<&Value> {
        self.get(name).ok_or_else(|| Error::MissingArgument(name.to_owned()))
    }

    /// The `data` entry, or `None` when absent.
    pub fn data(&self) -> &Value {
        static NONE: Value = Value::None;
        self.get(DATA).unwrap_or(&NONE)
    }

    pub fn named(&self) -> &BTreeMap<String, Value> {
        &self.named
    }

    pub fn varargs(&self) -> &[Value] {
        &self.varargs
    }

    pub fn varkw(&self) -> &Record {
        &self.varkw
    }
}

/// Body of a callable.
pub type Body = Arc<dyn Fn(&BoundArgs) -> Result<Value> + Send + Sync>;

/// A named body with an ordinary signature.
#[derive(Clone)]
pub struct Callable {
    name: String,
    signature: Signature,
    body: Body,
}

impl fmt::Debug for Callable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Callable")
            .field("name", &self.name)
            .field("signature", &self.signature)
            .finish_non_exhaustive()
    }
}

impl Callable {
    pub fn new<F>(name: &str, params: Vec<ParamSpec>, body: F) -> Result<Self>
    where
        F: Fn(&BoundArgs) -> Result<Value> + Send + Sync + 'static,
    {
        Ok(Callable {
            name: name.to_owned(),
            signature: Signature::new(params)?,
            body: Arc::new(body),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Conventional call: positional values fill positional then optional
    /// parameters, the excess goes to the var-positional parameter; keywords
    /// bind by name and the rest go to the var-keyword parameter.
    pub fn call(&self, positional: Vec<Value>, keywords: Record) -> Result<Value> {
        let bound = self.bind_call(positional, keywords)?;
        self.invoke(&bound)
    }

    pub(crate) fn invoke(&self, bound: &BoundArgs) -> Result<Value> {
        (self.body)(bound)
    }

    fn bind_call(&self, positional: Vec<Value>, mut keywords: Record) -> Result<BoundArgs> {
        let mut bound = BoundArgs::default();
        let mut pos = positional.into_iter();
        for p in &self.signature.params {
            match p.kind {
                ParamKind::Positional | ParamKind::Optional => {
                    if let Some(v) = pos.next() {
                        if keywords.contains(&p.name) {
                            return Err(Error::BadCall(format!(
                                "{}() got multiple values for argument `{}`",
                                self.name, p.name
                            )));
                        }
                        bound.named.insert(p.name.clone(), v);
                    } else if let Some(v) = keywords.remove(&p.name) {
                        bound.named.insert(p.name.clone(), v);
                    } else if let Some(d) = &p.default {
                        bound.named.insert(p.name.clone(), d.clone());
                    } else {
                        return Err(Error::MissingArgument(p.name.clone()));
                    }
                }
                ParamKind::VarPositional => bound.varargs.extend(pos.by_ref()),
                ParamKind::VarKeyword => {}
            }
        }
        if pos.next().is_some() {
            return Err(Error::BadCall(format!(
                "{}() got too many positional arguments",
                self.name
            )));
        }
        self.route_rest(&mut bound, keywords)?;
        Ok(bound)
    }

    /// Binds a keyword record by name; the var-positional entry, if any, must
    /// be a list or tuple and is spread.
    pub(crate) fn bind_record(&self, mut record: Record) -> Result<BoundArgs> {
        let mut bound = BoundArgs::default();
        for p in &self.signature.params {
            match p.kind {
                ParamKind::Positional => {
                    let v = record
                        .remove(&p.name)
                        .ok_or_else(|| Error::MissingArgument(p.name.clone()))?;
                    bound.named.insert(p.name.clone(), v);
                }
                ParamKind::Optional => {
                    let v = record
                        .remove(&p.name)
                        .or_else(|| p.default.clone())
                        .unwrap_or(Value::None);
                    bound.named.insert(p.name.clone(), v);
                }
                ParamKind::VarPositional => match record.remove(&p.name) {
                    Some(Value::List(items) | Value::Tuple(items)) => bound.varargs = items,
                    Some(other) => {
                        return Err(Error::BadCall(format!(
                            "var-positional `{}` expects a list or tuple, got {}",
                            p.name,
                            other.category()
                        )))
                    }
                    None => {}
                },
                ParamKind::VarKeyword => {}
            }
        }
        self.route_rest(&mut bound, record)?;
        Ok(bound)
    }

    fn route_rest(&self, bound: &mut BoundArgs, rest: Record) -> Result<()> {
        if self.signature.var_keyword().is_some() {
            bound.varkw = rest;
            Ok(())
        } else if let Some(k) = rest.keys().next() {
            Err(Error::UnexpectedArgument(k.clone()))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo(params: Vec<ParamSpec>) -> Callable {
        Callable::new("echo", params, |b| {
            let mut out: Vec<(Value, Value)> = b
                .named()
                .iter()
                .map(|(k, v)| (Value::from(k.as_str()), v.clone()))
                .collect();
            out.push(("*".into(), Value::Tuple(b.varargs().to_vec())));
            out.push((
                "**".into(),
                Value::map(b.varkw().iter().map(|(k, v)| (k.as_str(), v.clone()))),
            ));
            Ok(Value::Map(out))
        })
        .unwrap()
    }

    fn full() -> Vec<ParamSpec> {
        vec![
            ParamSpec::positional("a"),
            ParamSpec::optional("b", 2),
            ParamSpec::var_positional("args"),
            ParamSpec::var_keyword("kwargs"),
        ]
    }

    #[test]
    fn signature_enforces_priority_order() {
        assert!(Signature::new(full()).is_ok());
        let bad = vec![ParamSpec::optional("b", 1), ParamSpec::positional("a")];
        assert!(matches!(Signature::new(bad), Err(Error::Config(_))));
        let two_var = vec![ParamSpec::var_positional("x"), ParamSpec::var_positional("y")];
        assert!(Signature::new(two_var).is_err());
        let dup = vec![ParamSpec::positional("a"), ParamSpec::optional("a", 1)];
        assert!(Signature::new(dup).is_err());
    }

    #[test]
    fn positional_overflow_packs_into_varargs() {
        let f = echo(full());
        let r = f
            .call(vec![1.into(), 5.into(), 7.into(), 8.into()], Record::new().with("z", 0))
            .unwrap();
        assert_eq!(r.get("a"), Some(&Value::Int(1)));
        assert_eq!(r.get("b"), Some(&Value::Int(5)));
        assert_eq!(r.get("*"), Some(&Value::tuple([7, 8])));
        assert_eq!(r.get("**"), Some(&Value::map([("z", 0)])));
    }

    #[test]
    fn conventional_call_errors() {
        let f = echo(vec![ParamSpec::positional("a")]);
        assert!(matches!(f.call(vec![], Record::new()), Err(Error::MissingArgument(_))));
        assert!(matches!(
            f.call(vec![1.into(), 2.into()], Record::new()),
            Err(Error::BadCall(_))
        ));
        assert!(matches!(
            f.call(vec![1.into()], Record::new().with("a", 2)),
            Err(Error::BadCall(_))
        ));
        assert!(matches!(
            f.call(vec![1.into()], Record::new().with("q", 2)),
            Err(Error::UnexpectedArgument(_))
        ));
    }

    #[test]
    fn record_binding_spreads_varargs() {
        let f = echo(full());
        let rec = Record::new()
            .with("a", 1)
            .with("args", Value::list([3, 4]))
            .with("k", "v");
        let b = f.bind_record(rec).unwrap();
        assert_eq!(b.varargs(), &[Value::Int(3), Value::Int(4)]);
        assert_eq!(b.get("b"), Some(&Value::Int(2)));
        assert_eq!(b.get("k"), Some(&Value::from("v")));

        let rec = Record::new().with("a", 1).with("args", 3);
        assert!(matches!(f.bind_record(rec), Err(Error::BadCall(_))));
    }
}
