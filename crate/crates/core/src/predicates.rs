//! Reusable predicate constraints.
//!
//! Each function returns a clone of one process-wide predicate, so every
//! contract built from, say, [`sym`] shares its identity and junctions between
//! them are provable.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::typeexpr::{Predicate, PredicateRegistry};
use crate::value::{NdArray, Value};

/// Converts a 2-D array, or nested lists/tuples of numbers with equal row
/// lengths, into a 2-D array. Anything else is `None`.
pub fn to_matrix(v: &Value) -> Option<NdArray> {
    match v {
        Value::Array(a) if a.ndim() == 2 => Some(a.clone()),
        Value::Shared(cell) => to_matrix(&cell.lock()),
        _ => {
            let rows = v.as_items()?;
            if rows.is_empty() {
                return None;
            }
            let rows: Option<Vec<Vec<f64>>> = rows
                .iter()
                .map(|r| r.as_items()?.iter().map(Value::as_f64).collect())
                .collect();
            let rows = rows?;
            if rows[0].is_empty() {
                return None;
            }
            NdArray::from_rows(&rows)
        }
    }
}

fn square(v: &Value) -> Result<DMatrix<f64>, String> {
    let m = to_matrix(v).ok_or_else(|| format!("{} is not a 2-D numeric array", v.category()))?;
    let (r, c) = (m.shape()[0], m.shape()[1]);
    if r != c {
        return Err(format!("matrix is {r}x{c}, not square"));
    }
    Ok(DMatrix::from_row_slice(r, c, m.data()))
}

// numpy.allclose defaults
fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 + 1e-5 * b.abs()
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| close(m[(i, j)], m[(j, i)])))
}

/// Eigenvalues of a symmetric matrix.
fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}

fn eig_tolerance(m: &DMatrix<f64>) -> f64 {
    1e-10 * m.amax().max(1.0)
}

macro_rules! shared_predicate {
    ($fn_name:ident, $name:literal, $desc:literal, $check:expr) => {
        #[doc = $desc]
        pub fn $fn_name() -> Predicate {
            static CELL: OnceLock<Predicate> = OnceLock::new();
            CELL.get_or_init(|| Predicate::new($name, $desc, $check)).clone()
        }
    };
}

shared_predicate!(
    matrix,
    "matrix",
    "Value behaves as a 2-D numeric matrix.",
    |v: &Value| { Ok(to_matrix(v).is_some()) }
);

shared_predicate!(sym, "_sym", "Square matrix equal to its transpose.", |v: &Value| {
    Ok(is_symmetric(&square(v)?))
});

shared_predicate!(pos, "_pos", "Symmetric positive-definite matrix.", |v: &Value| {
    let m = square(v)?;
    if !is_symmetric(&m) {
        return Ok(false);
    }
    let tol = eig_tolerance(&m);
    Ok(eigenvalues(m).into_iter().all(|l| l > tol))
});

shared_predicate!(
    semi_pos,
    "_semi_pos",
    "Symmetric positive semi-definite matrix.",
    |v: &Value| {
        let m = square(v)?;
        if !is_symmetric(&m) {
            return Ok(false);
        }
        let tol = eig_tolerance(&m);
        Ok(eigenvalues(m).into_iter().all(|l| l >= -tol))
    }
);

shared_predicate!(
    unit_interval,
    "unit_interval",
    "Number between 0 and 1 inclusive.",
    |v: &Value| {
        v.as_f64()
            .map(|x| (0.0..=1.0).contains(&x))
            .ok_or_else(|| format!("{} is not a number", v.category()))
    }
);

shared_predicate!(positive, "positive", "Number strictly greater than 0.", |v: &Value| {
    v.as_f64()
        .map(|x| x > 0.0)
        .ok_or_else(|| format!("{} is not a number", v.category()))
});

/// Registry holding every predicate in this module.
pub fn standard_registry() -> PredicateRegistry {
    let mut r = PredicateRegistry::new();
    for p in [matrix(), sym(), pos(), semi_pos(), unit_interval(), positive()] {
        r.register(p);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typeexpr::check_predicate;

    fn m(rows: &[&[f64]]) -> Value {
        Value::list(rows.iter().map(|r| Value::list(r.iter().copied())))
    }

    #[test]
    fn identity_is_symmetric_and_definite() {
        let i = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(check_predicate(&i, &sym()).ok);
        assert!(check_predicate(&i, &pos()).ok);
        assert!(check_predicate(&i, &semi_pos()).ok);
    }

    #[test]
    fn zero_matrix_is_only_semi_definite() {
        let z = m(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert!(!check_predicate(&z, &pos()).ok);
        assert!(check_predicate(&z, &semi_pos()).ok);
    }

    #[test]
    fn asymmetric_matrix() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(!check_predicate(&a, &sym()).ok);
        assert!(check_predicate(&a, &matrix()).ok);
    }

    #[test]
    fn indefinite_matrix() {
        // eigenvalues 3 and -1
        let a = m(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(check_predicate(&a, &sym()).ok);
        assert!(!check_predicate(&a, &pos()).ok);
        assert!(!check_predicate(&a, &semi_pos()).ok);
    }

    #[test]
    fn matrix_concept_accepts_containers_and_arrays() {
        let ints = Value::list([Value::list([1, 2]), Value::list([3, 4])]);
        assert!(check_predicate(&ints, &matrix()).ok);
        let tup = Value::tuple([Value::tuple([1.0]), Value::tuple([2.0])]);
        assert!(check_predicate(&tup, &matrix()).ok);
        let arr = Value::Array(NdArray::new(vec![2, 3], vec![0.0; 6]).unwrap());
        assert!(check_predicate(&arr, &matrix()).ok);
        let vec1 = Value::Array(NdArray::new(vec![3], vec![0.0; 3]).unwrap());
        assert!(!check_predicate(&vec1, &matrix()).ok);
        assert!(!check_predicate(&Value::list([1, 2]), &matrix()).ok);
        assert!(!check_predicate(&Value::from("ab"), &matrix()).ok);
        let ragged = Value::list([Value::list([1, 2]), Value::list([3])]);
        assert!(!check_predicate(&ragged, &matrix()).ok);
    }

    #[test]
    fn non_matrix_input_reports_reason() {
        let r = check_predicate(&Value::from("x"), &sym());
        assert!(!r.ok);
        assert!(r.actual.contains("not a 2-D"));
        let r = check_predicate(&m(&[&[1.0, 2.0]]), &sym());
        assert!(r.actual.contains("not square"));
    }

    #[test]
    fn shared_identity() {
        assert!(sym().ptr_eq(&sym()));
        assert!(standard_registry().get("_semi_pos").unwrap().ptr_eq(&semi_pos()));
    }

    #[test]
    fn scalar_ranges() {
        assert!(check_predicate(&Value::Real(0.5), &unit_interval()).ok);
        assert!(check_predicate(&Value::Int(1), &unit_interval()).ok);
        assert!(!check_predicate(&Value::Real(1.5), &unit_interval()).ok);
        assert!(!check_predicate(&Value::Real(0.0), &positive()).ok);
        assert!(check_predicate(&Value::Real(2.0), &positive()).ok);
    }
}
