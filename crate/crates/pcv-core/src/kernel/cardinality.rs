//! Cardinality handler: `N = |S|` constraints.
//!
//! Three groups: inequality propagation across meet/union/restriction,
//! the defined-set rule translating to the `length` built-in, and the
//! labeling-phase `cardinal` checks that known members of an undefined
//! set stay within an integer upper bound. Membership constraints on a
//! set with a cardinality record the member into the set's open tail so
//! the final count can see it.

use crate::engine::dsl::*;
use crate::engine::rule::ChrRule;
use crate::engine::{FunctorDecl, HandlerPack};

pub fn build_cardinality_pack() -> HandlerPack {
    let mut rules: Vec<ChrRule> = Vec::new();

    rules.push(simpagation(
        "card_identity",
        vec![head("card", vec![v("N1"), v("L")])],
        vec![head("card", vec![v("N2"), v("L")])],
        vec![],
        vec![unify(v("N1"), v("N2"))],
    ));

    // group 1: inequalities across set relations
    for (name, side, rel) in [
        ("card_meet_a", "A", "meet"),
        ("card_meet_b", "B", "meet"),
        ("card_join_a", "A", "union"),
        ("card_join_b", "B", "union"),
    ] {
        let (lo, hi) = if rel == "meet" { ("NC", "NS") } else { ("NS", "NC") };
        rules.push(propagation(
            name,
            vec![
                head("card", vec![v("NC"), v("C")]),
                head("card", vec![v("NS"), v(side)]),
                head(rel, vec![v("C"), v("A"), v("B")]),
            ],
            vec![],
            vec![add("leq", vec![v(lo), v(hi)])],
        ));
    }
    rules.push(propagation(
        "card_restrict",
        vec![
            head("card", vec![v("NA"), v("A")]),
            head("card", vec![v("NC"), v("C")]),
            head("restr", vec![v("C"), v("A"), v("R")]),
        ],
        vec![],
        vec![add("leq", vec![v("NC"), v("NA")])],
    ));
    rules.push(propagation(
        "card_negative",
        vec![head("card", vec![v("N"), v("A")])],
        vec![g_integer(v("N")), g_lt(v("N"), i(0))],
        fail_body(),
    ));

    // group 2: defined sets have a known length
    rules.push(propagation(
        "card_defined",
        vec![head("card", vec![v("N"), v("L")])],
        vec![g_is_list(v("L"))],
        vec![builtin("length", vec![v("L"), v("N")])],
    ));

    // group 3: undefined sets — record members, then check at labeling
    rules.push(propagation(
        "card_insert",
        vec![head("in", vec![v("X"), v("L")]), head("card", vec![v("N"), v("L")])],
        vec![g_not_list(v("L"))],
        vec![builtin("member", vec![v("X"), v("L")])],
    ));
    rules.push(propagation(
        "card_eq_label",
        vec![head("labeling", vec![]), head("card", vec![v("N"), v("L")])],
        vec![g_not_list(v("L")), g_integer(v("N")), g_ge(v("N"), i(0))],
        vec![builtin("cardinal", vec![v("L"), v("N")])],
    ));
    rules.push(propagation(
        "card_lesser_label",
        vec![
            head("labeling", vec![]),
            head("card", vec![v("N"), v("L")]),
            head("lt", vec![v("N"), v("N1")]),
        ],
        vec![g_not_list(v("L")), g_integer(v("N1")), g_gt(v("N1"), i(0))],
        vec![builtin("cardinal", vec![v("L"), v("N1")])],
    ));
    rules.push(propagation(
        "card_lesseq_label",
        vec![
            head("labeling", vec![]),
            head("card", vec![v("N"), v("L")]),
            head("leq", vec![v("N"), v("N1")]),
        ],
        vec![g_not_list(v("L")), g_integer(v("N1")), g_ge(v("N1"), i(0))],
        vec![builtin("cardinal", vec![v("L"), v("N1")])],
    ));

    HandlerPack {
        name: "cardinality".to_string(),
        rules,
        declared: vec![FunctorDecl::new("card", 2)],
    }
}
