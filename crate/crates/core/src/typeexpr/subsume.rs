use super::{Node, TypeExpr};

/// Conservative, data-free subsumption: `true` only when every value that
/// matches `specific` provably matches `general`.
///
/// `false` means "not provable", not "incompatible".
pub fn subsumes(general: &TypeExpr, specific: &TypeExpr) -> bool {
    if general.is_any() || general == specific {
        return true;
    }
    // A specific union must be covered branch by branch; this is checked
    // before splitting the general union so that `a | b` covers `a | b`.
    if let Node::Union(spec_alts) = specific.node() {
        return spec_alts.iter().all(|s| subsumes(general, s));
    }
    if let Node::Union(gen_alts) = general.node() {
        return gen_alts.iter().any(|g| subsumes(g, specific));
    }
    match (general.node(), specific.node()) {
        (Node::Atom(a), Node::Atom(b)) => a == b,
        (Node::Seq(g), Node::Seq(s)) => subsumes(g, s),
        (Node::VarSeq(g), Node::VarSeq(s)) => subsumes(g, s),
        (Node::VarSeq(g), Node::FixedSeq(ss)) => ss.iter().all(|s| subsumes(g, s)),
        (Node::FixedSeq(gs), Node::FixedSeq(ss)) => {
            gs.len() == ss.len() && gs.iter().zip(ss).all(|(g, s)| subsumes(g, s))
        }
        (Node::Map(gk, gv), Node::Map(sk, sv)) => subsumes(gk, sk) && subsumes(gv, sv),
        (Node::Pred(g), Node::Pred(s)) => g.ptr_eq(s),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typeexpr::{validate, Predicate};
    use crate::value::Value;

    fn universe() -> Vec<Value> {
        let scalars = vec![
            Value::Real(0.0),
            Value::Real(-1.5),
            Value::Int(0),
            Value::Int(3),
            Value::from("a"),
            Value::None,
        ];
        let mut out = scalars.clone();
        out.push(Value::Tuple(vec![]));
        for a in &scalars {
            out.push(Value::tuple([a.clone()]));
            out.push(Value::list([a.clone()]));
            for b in &scalars {
                out.push(Value::tuple([a.clone(), b.clone()]));
                for c in &scalars[..3] {
                    out.push(Value::tuple([a.clone(), b.clone(), c.clone()]));
                }
            }
        }
        out
    }

    #[test]
    fn union_general_covers_member() {
        let g = TypeExpr::union(vec![TypeExpr::text(), TypeExpr::seq(TypeExpr::text())]).unwrap();
        assert!(subsumes(&g, &TypeExpr::text()));
        assert!(subsumes(&g, &g));
    }

    #[test]
    fn union_specific_needs_every_branch() {
        let s = TypeExpr::union(vec![TypeExpr::text(), TypeExpr::integer()]).unwrap();
        assert!(!subsumes(&TypeExpr::text(), &s));
        let g = TypeExpr::union(vec![TypeExpr::integer(), TypeExpr::real(), TypeExpr::text()]).unwrap();
        assert!(subsumes(&g, &s));
    }

    #[test]
    fn var_seq_covers_fixed_seq_exhaustively() {
        let g = TypeExpr::var_seq(TypeExpr::real());
        let s = TypeExpr::fixed_seq(vec![TypeExpr::real(), TypeExpr::real()]).unwrap();
        // enumerate first: every value admitted by the specific expression
        // must be admitted by the general one
        let u = universe();
        let admitted: Vec<_> = u.iter().filter(|v| validate(v, &s).unwrap().ok).collect();
        assert_eq!(admitted.len(), 4);
        assert!(admitted.iter().all(|v| validate(v, &g).unwrap().ok));
        assert!(subsumes(&g, &s));
    }

    #[test]
    fn no_cross_container_subsumption() {
        assert!(!subsumes(
            &TypeExpr::seq(TypeExpr::real()),
            &TypeExpr::var_seq(TypeExpr::real())
        ));
        assert!(!subsumes(
            &TypeExpr::fixed_seq(vec![TypeExpr::real()]).unwrap(),
            &TypeExpr::var_seq(TypeExpr::real())
        ));
        assert!(!subsumes(&TypeExpr::real(), &TypeExpr::integer()));
        assert!(!subsumes(&TypeExpr::text(), &TypeExpr::any()));
    }

    #[test]
    fn predicates_need_identity() {
        let p = Predicate::from_fn("p", "", |_| true);
        let q = Predicate::from_fn("p", "", |_| true);
        assert!(subsumes(&TypeExpr::pred(p.clone()), &TypeExpr::pred(p.clone())));
        assert!(!subsumes(&TypeExpr::pred(p.clone()), &TypeExpr::pred(q)));
        assert!(!subsumes(&TypeExpr::pred(p), &TypeExpr::text()));
    }
}
