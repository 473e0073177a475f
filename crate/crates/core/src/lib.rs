//! Info functions: normalized single-record callables with runtime flow
//! contracts, argument constraints, in-place testing and data-free pipeline
//! composition.
//!
//! ```
//! use infofn::{ArgSpec, InfoFn, Record, TypeExpr, Value};
//! use infofn::predicates;
//!
//! let entry = TypeExpr::union(vec![TypeExpr::text(), TypeExpr::seq(TypeExpr::text())]).unwrap();
//! let count = InfoFn::new("count", |a| Ok(Value::Int(a.data().as_items().map_or(1, |i| i.len() as i64))))
//!     .attach_flow(entry, TypeExpr::integer())
//!     .configure_args([("ratio", ArgSpec::new(predicates::unit_interval()).with_default(0.5))])
//!     .unwrap();
//!
//! assert_eq!(count.call(Record::new().with("data", Value::list(["a", "b"]))).unwrap(), Value::Int(2));
//! assert!(count.call(Record::new().with("data", Value::list([Value::from("a"), Value::Int(3)]))).is_err());
//! assert!(count.call(Record::new().with("data", "a").with("ratio", 1.5)).is_err());
//! ```

pub mod bench;
pub mod contract;
pub mod demo;
pub mod error;
pub mod imaging;
pub mod pipeline;
pub mod predicates;
pub mod testkit;
pub mod typeexpr;
pub mod value;

pub use contract::{normalize, ArgSpec, Callable, InfoFn, ParamSpec};
pub use error::{Error, Result};
pub use typeexpr::{subsumes, validate, Predicate, TypeExpr, ValidationResult};
pub use value::{Record, Value};
