//! Dynamic runtime values flowing through info functions.
//!
//! [`Value`] is the universal currency of the framework: every `data` slot,
//! every controlling argument and every return value is a `Value`. Owned
//! containers (`List`, `Tuple`, `Map`) are acyclic by construction; the
//! [`Shared`] cell is the one way to build aliasing or self-referential
//! structures, and validation detects cycles through it.

use std::any::Any;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

/// A runtime value.
#[derive(Clone, Debug)]
pub enum Value {
    None,
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
    Bytes(Vec<u8>),
    /// Homogeneous-by-convention ordered collection of any length.
    List(Vec<Value>),
    /// Fixed or variadic tuple.
    Tuple(Vec<Value>),
    /// Insertion-ordered key/value pairs with unique keys.
    Map(Vec<(Value, Value)>),
    /// Dense real n-d array.
    Array(NdArray),
    /// Domain object supplied by a library (images, handles, ...).
    Object(Object),
    /// Mutable shared cell; the only source of aliasing and cycles.
    Shared(Shared),
    /// Lazily produced, possibly unbounded sequence.
    Stream(Stream),
}

impl Value {
    /// Short name of the value's category, used in diagnostics.
    pub fn category(&self) -> String {
        match self {
            Value::None => "none".into(),
            Value::Bool(_) => "boolean".into(),
            Value::Int(_) => "integer".into(),
            Value::Real(_) => "real".into(),
            Value::Text(_) => "text".into(),
            Value::Bytes(_) => "bytes".into(),
            Value::List(_) => "list".into(),
            Value::Tuple(_) => "tuple".into(),
            Value::Map(_) => "map".into(),
            Value::Array(_) => "array".into(),
            Value::Object(o) => o.kind().into(),
            Value::Shared(_) => "shared".into(),
            Value::Stream(_) => "stream".into(),
        }
    }

    pub fn list<I, V>(items: I) -> Value
    where
        I: IntoIterator<Item = V>,
        V: Into<Value>,
    {
        Value::List(items.into_iter().map(Into::into).collect())
    }

    pub fn tuple<I, V>(items: I) -> Value
    where
        I: IntoIterator<Item = V>,
        V: Into<Value>,
    {
        Value::Tuple(items.into_iter().map(Into::into).collect())
    }

    /// Builds a map; later duplicates of a key replace earlier ones.
    pub fn map<I, K, V>(pairs: I) -> Value
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<Value>,
        V: Into<Value>,
    {
        let mut out: Vec<(Value, Value)> = Vec::new();
        for (k, v) in pairs {
            let (k, v) = (k.into(), v.into());
            match out.iter_mut().find(|(ek, _)| *ek == k) {
                Some(slot) => slot.1 = v,
                None => out.push((k, v)),
            }
        }
        Value::Map(out)
    }

    pub fn object<T: ObjectValue>(obj: T) -> Value {
        Value::Object(Object::new(obj))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Numeric view: integers and reals, no other coercion.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Elements of a list or tuple.
    pub fn as_items(&self) -> Option<&[Value]> {
        match self {
            Value::List(v) | Value::Tuple(v) => Some(v),
            _ => None,
        }
    }

    pub fn downcast_ref<T: ObjectValue>(&self) -> Option<&T> {
        match self {
            Value::Object(o) => o.downcast_ref(),
            _ => None,
        }
    }

    /// Looks up a map entry by text key.
    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Map(pairs) => pairs.iter().find(|(k, _)| k.as_text() == Some(key)).map(|(_, v)| v),
            _ => None,
        }
    }
}

impl PartialEq for Value {
    /// Structural equality with exact numeric comparison. `Int(1)` and
    /// `Real(1.0)` are different values. Shared cells and streams compare by
    /// identity.
    fn eq(&self, other: &Self) -> bool {
        use Value::*;
        match (self, other) {
            (None, None) => true,
            (Bool(a), Bool(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Real(a), Real(b)) => a == b,
            (Text(a), Text(b)) => a == b,
            (Bytes(a), Bytes(b)) => a == b,
            (List(a), List(b)) | (Tuple(a), Tuple(b)) => a == b,
            (Map(a), Map(b)) => {
                a.len() == b.len() && a.iter().all(|(k, v)| b.iter().any(|(bk, bv)| bk == k && bv == v))
            }
            (Array(a), Array(b)) => a == b,
            (Object(a), Object(b)) => a.dyn_eq(b),
            (Shared(a), Shared(b)) => a.ptr_eq(b),
            (Stream(a), Stream(b)) => a.ptr_eq(b),
            _ => false,
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v as i64)
    }
}
impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}
impl From<Vec<Value>> for Value {
    fn from(v: Vec<Value>) -> Self {
        Value::List(v)
    }
}
impl From<NdArray> for Value {
    fn from(v: NdArray) -> Self {
        Value::Array(v)
    }
}
impl From<()> for Value {
    fn from(_: ()) -> Self {
        Value::None
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut trail = Vec::new();
        write_value(self, f, &mut trail)
    }
}

fn write_seq(items: &[Value], f: &mut fmt::Formatter<'_>, trail: &mut Vec<usize>) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_value(item, f, trail)?;
    }
    Ok(())
}

fn write_value(v: &Value, f: &mut fmt::Formatter<'_>, trail: &mut Vec<usize>) -> fmt::Result {
    match v {
        Value::None => f.write_str("None"),
        Value::Bool(b) => write!(f, "{b}"),
        Value::Int(i) => write!(f, "{i}"),
        Value::Real(r) => write!(f, "{r:?}"),
        Value::Text(s) => write!(f, "{s:?}"),
        Value::Bytes(b) => write!(f, "b<{} bytes>", b.len()),
        Value::List(items) => {
            f.write_str("[")?;
            write_seq(items, f, trail)?;
            f.write_str("]")
        }
        Value::Tuple(items) => {
            f.write_str("(")?;
            write_seq(items, f, trail)?;
            if items.len() == 1 {
                f.write_str(",")?;
            }
            f.write_str(")")
        }
        Value::Map(pairs) => {
            f.write_str("{")?;
            for (i, (k, val)) in pairs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_value(k, f, trail)?;
                f.write_str(": ")?;
                write_value(val, f, trail)?;
            }
            f.write_str("}")
        }
        Value::Array(a) => write!(f, "array{:?}", a.shape()),
        Value::Object(o) => write!(f, "<{}>", o.summary()),
        Value::Shared(s) => {
            let id = s.id();
            if trail.contains(&id) {
                return f.write_str("<...>");
            }
            trail.push(id);
            let r = write_value(&s.lock(), f, trail);
            trail.pop();
            r
        }
        Value::Stream(s) => write!(f, "<stream {}>", s.label()),
    }
}

/// Dense row-major real array with an explicit shape.
#[derive(Clone, Debug, PartialEq)]
pub struct NdArray {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl NdArray {
    /// Returns `None` when the shape does not cover `data` exactly.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Option<Self> {
        (shape.iter().product::<usize>() == data.len()).then_some(Self { shape, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return None;
        }
        Self::new(vec![rows.len(), ncols], rows.concat())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Behaviour required from library-defined objects stored in a [`Value`].
pub trait ObjectValue: Any + fmt::Debug + Send + Sync {
    /// Category name; this is what an atom type expression matches on.
    fn kind(&self) -> &str;

    fn as_any(&self) -> &dyn Any;

    fn dyn_eq(&self, other: &dyn ObjectValue) -> bool;

    /// One-line description for logs.
    fn summary(&self) -> String {
        self.kind().to_owned()
    }
}

/// Reference-counted handle to an [`ObjectValue`].
#[derive(Clone, Debug)]
pub struct Object(Arc<dyn ObjectValue>);

impl Object {
    pub fn new<T: ObjectValue>(obj: T) -> Self {
        Object(Arc::new(obj))
    }

    pub fn kind(&self) -> &str {
        self.0.kind()
    }

    pub fn summary(&self) -> String {
        self.0.summary()
    }

    pub fn downcast_ref<T: ObjectValue>(&self) -> Option<&T> {
        self.0.as_any().downcast_ref()
    }

    fn dyn_eq(&self, other: &Object) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.dyn_eq(other.0.as_ref())
    }
}

/// A shared, interior-mutable cell. Cloning shares the cell.
#[derive(Clone, Debug)]
pub struct Shared(Arc<Mutex<Value>>);

impl Shared {
    pub fn new(v: Value) -> Self {
        Shared(Arc::new(Mutex::new(v)))
    }

    pub fn lock(&self) -> MutexGuard<'_, Value> {
        self.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn set(&self, v: Value) {
        *self.lock() = v;
    }

    /// Identity of the cell, stable for its lifetime.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    pub fn ptr_eq(&self, other: &Shared) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

type BoxedIter = Box<dyn Iterator<Item = Value> + Send>;

/// Lazily evaluated sequence. Validation never pulls from a stream.
#[derive(Clone)]
pub struct Stream {
    label: Arc<str>,
    inner: Arc<Mutex<BoxedIter>>,
}

impl Stream {
    pub fn new<I>(label: &str, iter: I) -> Self
    where
        I: Iterator<Item = Value> + Send + 'static,
    {
        Stream {
            label: label.into(),
            inner: Arc::new(Mutex::new(Box::new(iter))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn next_value(&self) -> Option<Value> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).next()
    }

    pub fn ptr_eq(&self, other: &Stream) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

impl fmt::Debug for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stream").field("label", &self.label).finish()
    }
}

/// Keyword record: the single argument of every info function call.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record(BTreeMap<String, Value>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insert.
    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<Value>) -> Option<Value> {
        self.0.insert(key.into(), value.into())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
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

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }
}

impl IntoIterator for Record {
    type Item = (String, Value);
    type IntoIter = std::collections::btree_map::IntoIter<String, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<K: Into<String>, V: Into<Value>> FromIterator<(K, V)> for Record {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        Record(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}
