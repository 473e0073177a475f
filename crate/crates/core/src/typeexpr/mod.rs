//! Type expressions and the recursive structural validator.
//!
//! A [`TypeExpr`] describes the set of acceptable values for a flow slot or a
//! controlling argument. Expressions are immutable trees, cheap to clone and
//! safe to share between threads.
//!
//! Matching rules worth knowing:
//!
//! * no numeric coercion: `Int(2)` does not match `real`;
//! * `seq[e]` matches lists, `tuple[..]` forms match tuples only;
//! * unions are tried left to right and the first match wins;
//! * streams are never consumed, so they only match `Any` or a predicate;
//! * [`Shared`](crate::value::Shared) cells are transparent, and a cell that
//!   contains itself is reported as [`CyclicValueError`].

mod render;
mod subsume;

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use crate::value::Value;

pub use render::{parse, ParseError, PredicateRegistry};
pub use subsume::subsumes;

/// Scalar or structural category matched by an atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    Text,
    Integer,
    Real,
    Boolean,
    Bytes,
    None,
    Array,
    /// Library object category, e.g. `image`.
    Named(Arc<str>),
}

const RESERVED: &[&str] = &["Any", "seq", "tuple", "map", "pred"];

impl AtomKind {
    /// Canonical kind for a name; built-in names map to built-in kinds.
    pub fn from_name(name: &str) -> AtomKind {
        match name {
            "text" => AtomKind::Text,
            "integer" => AtomKind::Integer,
            "real" => AtomKind::Real,
            "boolean" => AtomKind::Boolean,
            "bytes" => AtomKind::Bytes,
            "none" => AtomKind::None,
            "array" => AtomKind::Array,
            other => AtomKind::Named(other.into()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            AtomKind::Text => "text",
            AtomKind::Integer => "integer",
            AtomKind::Real => "real",
            AtomKind::Boolean => "boolean",
            AtomKind::Bytes => "bytes",
            AtomKind::None => "none",
            AtomKind::Array => "array",
            AtomKind::Named(n) => n,
        }
    }

    fn matches(&self, v: &Value) -> bool {
        match (self, v) {
            (AtomKind::Text, Value::Text(_))
            | (AtomKind::Integer, Value::Int(_))
            | (AtomKind::Real, Value::Real(_))
            | (AtomKind::Boolean, Value::Bool(_))
            | (AtomKind::Bytes, Value::Bytes(_))
            | (AtomKind::None, Value::None)
            | (AtomKind::Array, Value::Array(_)) => true,
            (AtomKind::Named(n), Value::Object(o)) => o.kind() == &**n,
            _ => false,
        }
    }
}

type CheckFn = dyn Fn(&Value) -> Result<bool, String> + Send + Sync;

struct PredicateInner {
    name: String,
    description: String,
    check: Box<CheckFn>,
}

/// Named boolean constraint over a candidate value.
///
/// Two predicates are equal only when they are the same predicate (clones of
/// one handle); behavioural equivalence is never inferred.
#[derive(Clone)]
pub struct Predicate(Arc<PredicateInner>);

impl Predicate {
    /// Builds a predicate from a fallible check. An `Err` counts as a
    /// non-match and its message is reported as the offending value.
    pub fn new<F>(name: &str, description: &str, check: F) -> Self
    where
        F: Fn(&Value) -> Result<bool, String> + Send + Sync + 'static,
    {
        assert!(render::is_ident(name), "predicate name {name:?} is not an identifier");
        Predicate(Arc::new(PredicateInner {
            name: name.to_owned(),
            description: description.to_owned(),
            check: Box::new(check),
        }))
    }

    /// Builds a predicate from an infallible check.
    pub fn from_fn<F>(name: &str, description: &str, check: F) -> Self
    where
        F: Fn(&Value) -> bool + Send + Sync + 'static,
    {
        Self::new(name, description, move |v| Ok(check(v)))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn description(&self) -> &str {
        &self.0.description
    }

    /// Runs the check. Errors and panics inside it are returned as `Err`.
    pub fn test(&self, v: &Value) -> Result<bool, String> {
        match catch_unwind(AssertUnwindSafe(|| (self.0.check)(v))) {
            Ok(r) => r,
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "unknown panic".into());
                Err(format!("panic: {msg}"))
            }
        }
    }

    pub fn ptr_eq(&self, other: &Predicate) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predicate({})", self.0.name)
    }
}

/// Shape of one type-expression node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Atom(AtomKind),
    Union(Vec<TypeExpr>),
    Seq(TypeExpr),
    FixedSeq(Vec<TypeExpr>),
    VarSeq(TypeExpr),
    Map(TypeExpr, TypeExpr),
    Any,
    Pred(Predicate),
}

/// Immutable type expression. Build with the associated constructors.
#[derive(Clone, PartialEq)]
pub struct TypeExpr(Arc<Node>);

/// Rejected construction of a type expression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeExprError {
    #[error("union needs at least two alternatives")]
    UnionTooSmall,
    #[error("duplicate union alternative `{0}`")]
    DuplicateAlternative(String),
    #[error("fixed tuple needs at least one element")]
    EmptyFixedSeq,
}

impl TypeExpr {
    fn from_node(n: Node) -> Self {
        TypeExpr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn any() -> Self {
        Self::from_node(Node::Any)
    }

    pub fn atom(kind: AtomKind) -> Self {
        Self::from_node(Node::Atom(kind))
    }

    pub fn text() -> Self {
        Self::atom(AtomKind::Text)
    }

    pub fn integer() -> Self {
        Self::atom(AtomKind::Integer)
    }

    pub fn real() -> Self {
        Self::atom(AtomKind::Real)
    }

    pub fn boolean() -> Self {
        Self::atom(AtomKind::Boolean)
    }

    pub fn bytes() -> Self {
        Self::atom(AtomKind::Bytes)
    }

    pub fn none() -> Self {
        Self::atom(AtomKind::None)
    }

    pub fn array() -> Self {
        Self::atom(AtomKind::Array)
    }

    /// Atom for a library object category.
    ///
    /// Panics if `kind` is not an identifier or is a reserved word.
    pub fn object(kind: &str) -> Self {
        assert!(
            render::is_ident(kind) && !RESERVED.contains(&kind),
            "invalid object kind {kind:?}"
        );
        Self::atom(AtomKind::from_name(kind))
    }

    pub fn union(alternatives: Vec<TypeExpr>) -> Result<Self, TypeExprError> {
        if alternatives.len() < 2 {
            return Err(TypeExprError::UnionTooSmall);
        }
        for (i, a) in alternatives.iter().enumerate() {
            if alternatives[..i].contains(a) {
                return Err(TypeExprError::DuplicateAlternative(a.render()));
            }
        }
        Ok(Self::from_node(Node::Union(alternatives)))
    }

    pub fn seq(element: TypeExpr) -> Self {
        Self::from_node(Node::Seq(element))
    }

    pub fn fixed_seq(elements: Vec<TypeExpr>) -> Result<Self, TypeExprError> {
        if elements.is_empty() {
            return Err(TypeExprError::EmptyFixedSeq);
        }
        Ok(Self::from_node(Node::FixedSeq(elements)))
    }

    pub fn var_seq(element: TypeExpr) -> Self {
        Self::from_node(Node::VarSeq(element))
    }

    pub fn map(key: TypeExpr, value: TypeExpr) -> Self {
        Self::from_node(Node::Map(key, value))
    }

    pub fn pred(p: Predicate) -> Self {
        Self::from_node(Node::Pred(p))
    }

    pub fn is_any(&self) -> bool {
        matches!(self.node(), Node::Any)
    }

    /// Canonical text form, e.g. `text | seq[text]`.
    pub fn render(&self) -> String {
        render::render(self)
    }

    /// Structural check of `value`; see [`validate`].
    pub fn validate(&self, value: &Value) -> Result<ValidationResult, CyclicValueError> {
        validate(value, self)
    }
}

impl fmt::Debug for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeExpr({})", self.render())
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Predicate> for TypeExpr {
    fn from(p: Predicate) -> Self {
        TypeExpr::pred(p)
    }
}

/// One step of a location trail into a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathSeg {
    Index(usize),
    Key(String),
}

impl fmt::Display for PathSeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSeg::Index(i) => write!(f, "[{i}]"),
            PathSeg::Key(k) => write!(f, "[{k}]"),
        }
    }
}

/// Outcome of a structural check.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationResult {
    pub ok: bool,
    /// Location of the offending element; empty at the root.
    pub path: Vec<PathSeg>,
    /// Rendering of the type-expression node that failed.
    pub expected: String,
    /// Category of the offending value (or a predicate's error text).
    pub actual: String,
    /// Every alternative's failure when a union fails.
    pub alternatives_tried: Vec<ValidationResult>,
}

impl ValidationResult {
    pub fn pass() -> Self {
        ValidationResult {
            ok: true,
            ..Default::default()
        }
    }

    pub fn fail(path: Vec<PathSeg>, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        ValidationResult {
            ok: false,
            path,
            expected: expected.into(),
            actual: actual.into(),
            alternatives_tried: Vec::new(),
        }
    }

    pub fn path_string(&self) -> String {
        self.path.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for ValidationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        if !self.path.is_empty() {
            write!(f, "at {}: ", self.path_string())?;
        }
        write!(f, "expected {}, got {}", self.expected, self.actual)
    }
}

/// A self-referential container was reached during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cyclic value")]
pub struct CyclicValueError;

impl From<CyclicValueError> for crate::Error {
    fn from(_: CyclicValueError) -> Self {
        crate::Error::CyclicValue
    }
}

/// Checks `value` against `expr`, recursing into container elements.
///
/// Mismatches are reported through the returned [`ValidationResult`]; the only
/// error is a cycle through a shared cell.
pub fn validate(value: &Value, expr: &TypeExpr) -> Result<ValidationResult, CyclicValueError> {
    let mut path = Vec::new();
    let mut trail = Vec::new();
    walk(value, expr, &mut path, &mut trail)
}

/// Evaluates a single predicate against `value`.
pub fn check_predicate(value: &Value, pred: &Predicate) -> ValidationResult {
    check_pred_at(value, pred, &[])
}

fn check_pred_at(value: &Value, pred: &Predicate, path: &[PathSeg]) -> ValidationResult {
    match pred.test(value) {
        Ok(true) => ValidationResult::pass(),
        Ok(false) => ValidationResult::fail(path.to_vec(), format!("pred:{}", pred.name()), value.category()),
        Err(msg) => ValidationResult::fail(path.to_vec(), format!("pred:{}", pred.name()), msg),
    }
}

fn walk(
    value: &Value,
    expr: &TypeExpr,
    path: &mut Vec<PathSeg>,
    trail: &mut Vec<usize>,
) -> Result<ValidationResult, CyclicValueError> {
    match expr.node() {
        Node::Any => return Ok(ValidationResult::pass()),
        Node::Pred(p) => return Ok(check_pred_at(value, p, path)),
        _ => {}
    }

    if let Value::Shared(cell) = value {
        let id = cell.id();
        if trail.contains(&id) {
            return Err(CyclicValueError);
        }
        trail.push(id);
        let inner = cell.lock();
        let r = walk(&inner, expr, path, trail);
        drop(inner);
        trail.pop();
        return r;
    }

    let fail = |path: &Vec<PathSeg>, actual: String| Ok(ValidationResult::fail(path.clone(), expr.render(), actual));

    match expr.node() {
        Node::Any | Node::Pred(_) => unreachable!(),
        Node::Atom(kind) => {
            if kind.matches(value) {
                Ok(ValidationResult::pass())
            } else {
                fail(path, value.category())
            }
        }
        Node::Union(alts) => {
            let mut tried = Vec::with_capacity(alts.len());
            for alt in alts {
                let r = walk(value, alt, path, trail)?;
                if r.ok {
                    return Ok(r);
                }
                tried.push(r);
            }
            // Report the failure that got furthest into the value; when no
            // alternative got past the root, report the union itself.
            let (deepest, _) =
                tried.iter().enumerate().fold(
                    (0, 0),
                    |(bi, bl), (i, r)| {
                        if r.path.len() > bl {
                            (i, r.path.len())
                        } else {
                            (bi, bl)
                        }
                    },
                );
            let mut out = if tried[deepest].path.len() > path.len() {
                let mut r = tried[deepest].clone();
                r.alternatives_tried.clear();
                r
            } else {
                ValidationResult::fail(path.clone(), expr.render(), value.category())
            };
            out.alternatives_tried = tried;
            Ok(out)
        }
        Node::Seq(elem) => match value {
            Value::List(items) => walk_items(items, elem, path, trail),
            other => fail(path, other.category()),
        },
        Node::VarSeq(elem) => match value {
            Value::Tuple(items) => walk_items(items, elem, path, trail),
            other => fail(path, other.category()),
        },
        Node::FixedSeq(elems) => match value {
            Value::Tuple(items) if items.len() == elems.len() => {
                for (i, (item, e)) in items.iter().zip(elems).enumerate() {
                    path.push(PathSeg::Index(i));
                    let r = walk(item, e, path, trail)?;
                    path.pop();
                    if !r.ok {
                        return Ok(r);
                    }
                }
                Ok(ValidationResult::pass())
            }
            Value::Tuple(items) => fail(path, format!("tuple of length {}", items.len())),
            other => fail(path, other.category()),
        },
        Node::Map(kexpr, vexpr) => match value {
            Value::Map(pairs) => {
                for (k, v) in pairs {
                    path.push(PathSeg::Key(k.to_string()));
                    let mut r = walk(k, kexpr, path, trail)?;
                    if r.ok {
                        r = walk(v, vexpr, path, trail)?;
                    }
                    path.pop();
                    if !r.ok {
                        return Ok(r);
                    }
                }
                Ok(ValidationResult::pass())
            }
            other => fail(path, other.category()),
        },
    }
}

fn walk_items(
    items: &[Value],
    elem: &TypeExpr,
    path: &mut Vec<PathSeg>,
    trail: &mut Vec<usize>,
) -> Result<ValidationResult, CyclicValueError> {
    for (i, item) in items.iter().enumerate() {
        path.push(PathSeg::Index(i));
        let r = walk(item, elem, path, trail)?;
        path.pop();
        if !r.ok {
            return Ok(r);
        }
    }
    Ok(ValidationResult::pass())
}
