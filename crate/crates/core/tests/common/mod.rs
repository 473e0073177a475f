#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use infofn::contract::{BoundArgs, ParamKind};
use infofn::{Callable, ParamSpec, Record, Value};
use rand::seq::SliceRandom;
use rand::Rng;

/// Body that echoes its binding, so two call paths can be compared exactly.
pub fn echo(a: &BoundArgs) -> infofn::Result<Value> {
    let named: Vec<(Value, Value)> = a
        .named()
        .iter()
        .map(|(k, v)| (Value::from(k.as_str()), v.clone()))
        .collect();
    let varkw: Vec<(Value, Value)> = a
        .varkw()
        .iter()
        .map(|(k, v)| (Value::from(k.as_str()), v.clone()))
        .collect();
    Ok(Value::map([
        ("named", Value::map(named)),
        ("varargs", Value::tuple(a.varargs().to_vec())),
        ("varkw", Value::map(varkw)),
    ]))
}

/// A random legal call: the conventional form and the single-record form.
#[derive(Debug)]
pub struct CallPair {
    pub params: Vec<ParamSpec>,
    pub positional: Vec<Value>,
    pub keywords: Record,
    pub record: Record,
    /// What the body must see, built independently of both binders.
    pub expected: Value,
}

fn random_value(rng: &mut impl Rng) -> Value {
    match rng.gen_range(0..5) {
        0 => Value::Int(rng.gen_range(-50..50)),
        1 => Value::Real(rng.gen_range(-5.0..5.0)),
        2 => Value::from(format!("s{}", rng.gen_range(0..1000))),
        3 => Value::Bool(rng.gen()),
        _ => Value::list([Value::Int(rng.gen_range(0..9)), Value::from("x")]),
    }
}

pub fn random_call(rng: &mut impl Rng) -> CallPair {
    let n_pos = rng.gen_range(0..=3);
    let n_opt = rng.gen_range(0..=3);
    let has_varpos = rng.gen_bool(0.5);
    let has_varkw = rng.gen_bool(0.5);

    let mut params = Vec::new();
    for i in 0..n_pos {
        params.push(ParamSpec::positional(&format!("p{i}")));
    }
    for i in 0..n_opt {
        params.push(ParamSpec::optional(&format!("o{i}"), random_value(rng)));
    }
    if has_varpos {
        params.push(ParamSpec::var_positional("args"));
    }
    if has_varkw {
        params.push(ParamSpec::var_keyword("kwargs"));
    }

    let named: Vec<&ParamSpec> = params
        .iter()
        .filter(|p| matches!(p.kind, ParamKind::Positional | ParamKind::Optional))
        .collect();
    let mut expected_named = Vec::new();
    let mut positional = Vec::new();
    let mut keywords = Record::new();
    let mut record = Record::new();

    // a prefix of named parameters goes by position; extras only if var-positional exists
    let n_by_pos = rng.gen_range(0..=named.len());
    let mut extras = Vec::new();
    for (i, p) in named.iter().enumerate() {
        let supply = i < n_by_pos || p.kind == ParamKind::Positional || rng.gen_bool(0.5);
        if supply {
            let v = random_value(rng);
            if i < n_by_pos {
                positional.push(v.clone());
            } else {
                keywords.insert(p.name.clone(), v.clone());
            }
            record.insert(p.name.clone(), v.clone());
            expected_named.push((p.name.clone(), v));
        } else {
            expected_named.push((p.name.clone(), p.default.clone().expect("optional has default")));
        }
    }
    if has_varpos && n_by_pos == named.len() {
        for _ in 0..rng.gen_range(0..=3) {
            extras.push(random_value(rng));
        }
        positional.extend(extras.iter().cloned());
        record.insert("args", Value::tuple(extras.clone()));
    }
    let mut expected_kw = Vec::new();
    if has_varkw {
        let mut names: Vec<String> = (0..rng.gen_range(0..=3)).map(|i| format!("k{i}")).collect();
        names.shuffle(rng);
        for n in names {
            let v = random_value(rng);
            keywords.insert(n.clone(), v.clone());
            record.insert(n.clone(), v.clone());
            expected_kw.push((Value::from(n), v));
        }
    }
    let expected = Value::map([
        (
            "named",
            Value::map(
                expected_named
                    .into_iter()
                    .map(|(k, v)| (Value::from(k), v))
                    .collect::<Vec<_>>(),
            ),
        ),
        ("varargs", Value::tuple(extras)),
        ("varkw", Value::map(expected_kw)),
    ]);
    CallPair {
        params,
        positional,
        keywords,
        record,
        expected,
    }
}

pub fn echo_callable(params: Vec<ParamSpec>) -> Callable {
    Callable::new("echo", params, echo).expect("generated signature is valid")
}

/// Eigenvalues of [[a, b], [c, d]] from the characteristic polynomial
/// λ² − (a+d)λ + (ad − bc) = 0; `None` when complex.
pub fn eig2(m: [[f64; 2]; 2]) -> Option<(f64, f64)> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some(((tr - r) / 2.0, (tr + r) / 2.0))
}

pub struct Eig2Verdict {
    pub sym: bool,
    pub pos: bool,
    pub semi_pos: bool,
}

pub fn eig2_verdict(m: [[f64; 2]; 2]) -> Eig2Verdict {
    let sym = m[0][1] == m[1][0];
    let eig = eig2(m);
    let tol = 1e-12;
    Eig2Verdict {
        sym,
        pos: sym && eig.is_some_and(|(lo, _)| lo > tol),
        semi_pos: sym && eig.is_some_and(|(lo, _)| lo >= -tol),
    }
}

pub fn matrix_value(m: [[f64; 2]; 2]) -> Value {
    Value::list(m.iter().map(|row| Value::list(row.iter().map(|&x| Value::Real(x)))))
}

/// Counter shared with a body, for proving that composition runs nothing.
#[derive(Clone, Default)]
pub struct Counter(Arc<AtomicUsize>);

impl Counter {
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::SeqCst);
    }

    pub fn get(&self) -> usize {
        self.0.load(Ordering::SeqCst)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn assets_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets")
}

/// SHA-256 of the frozen golden files written by `assets/reference_walk.py`.
pub const GOLDEN_SHA256: [(&str, &str); 5] = [
    (
        "synthetic64.pgm",
        "115e2ddee052587c841f76ee237ba3b1cb45aea61e97edd5350ebeca6166c0a6",
    ),
    (
        "golden/default_processed.pgm",
        "9c999b5486d482bf98beb3d88f847adc43e7456c40e0837ade6b23490d9378eb",
    ),
    (
        "golden/default_final.pgm",
        "db2ba77ffcb9473cafa949444ba684265d7a1e7b3d85d5707eccecdeb9479f09",
    ),
    (
        "golden/mean_laplacian_processed.pgm",
        "598a23e3ad0840b6b99692818b957244a3abc8f3cc5338f63e67dddd26ba8eac",
    ),
    (
        "golden/mean_laplacian_final.pgm",
        "321f0d937c279842c4f2b66d6eaaa1fc0b756854403b11242a16ab8bfab1b80c",
    ),
];
