use infofn::pipeline::{merge_args, ArgNamespace, MergeMode};
use infofn::predicates::{self, standard_registry};
use infofn::typeexpr::parse;
use infofn::{subsumes, validate, TypeExpr, Value};
use proptest::prelude::*;

fn union_of(alts: Vec<TypeExpr>) -> TypeExpr {
    let mut uniq: Vec<TypeExpr> = Vec::new();
    for a in alts {
        if !uniq.contains(&a) {
            uniq.push(a);
        }
    }
    if uniq.len() == 1 {
        uniq.pop().unwrap()
    } else {
        TypeExpr::union(uniq).unwrap()
    }
}

fn leaf() -> impl Strategy<Value = TypeExpr> {
    prop_oneof![
        Just(TypeExpr::text()),
        Just(TypeExpr::integer()),
        Just(TypeExpr::real()),
        Just(TypeExpr::boolean()),
        Just(TypeExpr::none()),
        Just(TypeExpr::any()),
        Just(TypeExpr::pred(predicates::positive())),
        Just(TypeExpr::pred(predicates::matrix())),
    ]
}

fn type_expr() -> impl Strategy<Value = TypeExpr> {
    leaf().prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(TypeExpr::seq),
            inner.clone().prop_map(TypeExpr::var_seq),
            prop::collection::vec(inner.clone(), 1..4).prop_map(|v| TypeExpr::fixed_seq(v).unwrap()),
            (inner.clone(), inner.clone()).prop_map(|(k, v)| TypeExpr::map(k, v)),
            prop::collection::vec(inner, 2..4).prop_map(union_of),
        ]
    })
}

fn value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::None),
        any::<bool>().prop_map(Value::Bool),
        (-3i64..4).prop_map(Value::Int),
        (-2.0f64..2.0).prop_map(Value::Real),
        "[ab]{0,2}".prop_map(Value::from),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::List),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Tuple),
            prop::collection::vec((inner.clone(), inner), 0..3).prop_map(Value::map),
        ]
    })
}

/// A type expression at least as general as `e`.
fn widen(e: TypeExpr, other: TypeExpr, how: u8) -> TypeExpr {
    match how % 4 {
        0 => TypeExpr::any(),
        1 => union_of(vec![other, e]),
        2 => union_of(vec![e, other]),
        _ => e,
    }
}

fn accepts(v: &Value, e: &TypeExpr) -> bool {
    validate(v, e).unwrap().ok
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn subsumption_is_sound(g in type_expr(), s in type_expr(), vs in prop::collection::vec(value(), 8)) {
        if subsumes(&g, &s) {
            for v in &vs {
                prop_assert!(!accepts(v, &s) || accepts(v, &g), "{} ⊇ {} but {} rejected", g, s, v);
            }
        }
    }

    #[test]
    fn widened_expressions_subsume(s in type_expr(), other in type_expr(), how in any::<u8>(), v in value()) {
        let g = widen(s.clone(), other, how);
        prop_assert!(subsumes(&g, &s), "{} should subsume {}", g, s);
        prop_assert!(!accepts(&v, &s) || accepts(&v, &g));
        let gs = TypeExpr::seq(g.clone());
        prop_assert!(subsumes(&gs, &TypeExpr::seq(s.clone())));
        prop_assert!(subsumes(&TypeExpr::var_seq(g), &TypeExpr::fixed_seq(vec![s.clone(), s]).unwrap()));
    }

    #[test]
    fn subsumption_is_reflexive(e in type_expr()) {
        prop_assert!(subsumes(&e, &e));
        prop_assert!(subsumes(&TypeExpr::any(), &e));
    }

    #[test]
    fn union_acceptance_ignores_order(alts in prop::collection::vec(type_expr(), 2..5), v in value(), rot in 0usize..5) {
        let fwd = union_of(alts.clone());
        let mut r = alts.clone();
        r.reverse();
        let len = r.len();
        r.rotate_left(rot % len);
        let other = union_of(r);
        prop_assert_eq!(accepts(&v, &fwd), accepts(&v, &other));
        prop_assert_eq!(accepts(&v, &fwd), alts.iter().any(|a| accepts(&v, a)));
    }

    #[test]
    fn render_parse_round_trip(e in type_expr()) {
        let text = e.render();
        let back = parse(&text, &standard_registry()).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn merges_commute(
        a in prop::collection::btree_map("[a-c]\\.[xy]", 0i64..3, 0..5),
        b in prop::collection::btree_map("[a-c]\\.[xy]", 0i64..3, 0..5),
    ) {
        let na: ArgNamespace = a.into_iter().map(|(k, v)| (k, Value::Int(v))).collect();
        let nb: ArgNamespace = b.into_iter().map(|(k, v)| (k, Value::Int(v))).collect();
        for mode in [MergeMode::Union, MergeMode::Intersect] {
            let ab = merge_args(&na, &nb, mode).map_err(|e| e.kind().to_owned());
            let ba = merge_args(&nb, &na, mode).map_err(|e| e.kind().to_owned());
            prop_assert_eq!(ab, ba);
        }
        let over = merge_args(&na, &nb, MergeMode::Override).unwrap();
        for (k, v) in nb.iter() {
            prop_assert_eq!(over.get(k), Some(v));
        }
    }
}
