//! Logical constraint handler: `∧`, `∨`, `xor`, `¬` over constraint terms.
//!
//! Conjunction and disjunction translate to their built-in counterparts
//! (disjunction waits for labeling since it opens a choice point);
//! negations push inward through De Morgan until they reach kernel
//! comparisons, where reduction rules flip them (`¬(A<B)` becomes `B≤A`).

use crate::engine::dsl::*;
use crate::engine::rule::ChrRule;
use crate::engine::{FunctorDecl, HandlerPack};

pub fn build_logic_pack() -> HandlerPack {
    let mut rules: Vec<ChrRule> = Vec::new();

    for f in ["and", "or", "xor"] {
        rules.push(simpagation(
            &format!("{f}_commutativity"),
            vec![head(f, vec![v("A"), v("B")])],
            vec![head(f, vec![v("B"), v("A")])],
            vec![],
            vec![],
        ));
    }

    rules.push(simpagation(
        "or_definition",
        vec![head("labeling", vec![])],
        vec![head("or", vec![v("A"), v("B")])],
        vec![g_ne(v("A"), v("B"))],
        vec![disj(vec![branch(vec![call(v("A"))]), branch(vec![call(v("B"))])])],
    ));
    rules.push(simplification(
        "and_definition",
        vec![head("and", vec![v("A"), v("B")])],
        vec![g_ne(v("A"), v("B"))],
        vec![call(v("A")), call(v("B"))],
    ));
    rules.push(simplification(
        "xor_definition",
        vec![head("xor", vec![v("A"), v("B")])],
        vec![g_ne(v("A"), v("B"))],
        vec![add(
            "or",
            vec![
                t("and", vec![v("A"), t("not", vec![v("B")])]),
                t("and", vec![t("not", vec![v("A")]), v("B")]),
            ],
        )],
    ));

    rules.push(simplification("and_identity", vec![head("and", vec![v("A"), v("A")])], vec![], vec![call(v("A"))]));
    rules.push(simplification("or_identity", vec![head("or", vec![v("A"), v("A")])], vec![], vec![call(v("A"))]));
    rules.push(simplification("xor_irreflexivity", vec![head("xor", vec![v("A"), v("A")])], vec![], fail_body()));

    rules.push(simplification("not_true", vec![head("not", vec![a("true")])], vec![], fail_body()));
    rules.push(simplification("not_fail", vec![head("not", vec![a("fail")])], vec![], vec![]));
    rules.push(simplification(
        "not_not",
        vec![head("not", vec![t("not", vec![v("A")])])],
        vec![],
        vec![call(v("A"))],
    ));
    rules.push(simplification(
        "de_morgan_and",
        vec![head("not", vec![t("and", vec![v("A"), v("B")])])],
        vec![],
        vec![add("or", vec![t("not", vec![v("A")]), t("not", vec![v("B")])])],
    ));
    rules.push(simplification(
        "de_morgan_or",
        vec![head("not", vec![t("or", vec![v("A"), v("B")])])],
        vec![],
        vec![add("not", vec![v("A")]), add("not", vec![v("B")])],
    ));
    rules.push(simplification(
        "not_xor",
        vec![head("not", vec![t("xor", vec![v("A"), v("B")])])],
        vec![],
        vec![add(
            "or",
            vec![
                t("and", vec![v("A"), v("B")]),
                t("and", vec![t("not", vec![v("A")]), t("not", vec![v("B")])]),
            ],
        )],
    ));

    // reductions: negation of a kernel comparison flips it, timeless and @T
    let reductions: [(&str, &str, bool); 8] = [
        ("lt", "leq", true),    // ¬(A < B)  ⇔ B ≤ A
        ("leq", "lt", true),    // ¬(A ≤ B) ⇔ B < A
        ("gt", "leq", false),   // ¬(A > B)  ⇔ A ≤ B
        ("geq", "lt", false),   // ¬(A ≥ B) ⇔ A < B
        ("eq", "neq", false),
        ("neq", "eq", false),
        ("in", "notin", false),
        ("notin", "in", false),
    ];
    for (from, to, swap) in reductions {
        let args = |sw: bool| {
            if sw {
                vec![v("B"), v("A")]
            } else {
                vec![v("A"), v("B")]
            }
        };
        // timeless: ¬(eq(A,B)) must post built-in equality, not user eq
        let body_item = if to == "eq" {
            unify(v("A"), v("B"))
        } else {
            add(to, args(swap))
        };
        rules.push(simplification(
            &format!("reduce_not_{from}"),
            vec![head("not", vec![t(from, vec![v("A"), v("B")])])],
            vec![],
            vec![body_item],
        ));
        rules.push(simplification(
            &format!("reduce_not_{from}_timed"),
            vec![head("not", vec![t("@", vec![t(from, vec![v("A"), v("B")]), v("T")])])],
            vec![],
            vec![add_at(to, args(swap), v("T"))],
        ));
    }

    HandlerPack {
        name: "logic".to_string(),
        rules,
        declared: vec![
            FunctorDecl::new("and", 2),
            FunctorDecl::new("or", 2),
            FunctorDecl::new("xor", 2),
            FunctorDecl::new("not", 1),
        ],
    }
}
