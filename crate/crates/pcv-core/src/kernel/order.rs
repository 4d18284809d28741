//! Order and equality handler: `<`, `≤`, `>`, `≥`, `=`, `≠`, timeless and
//! timed.
//!
//! Ground constraints discharge to built-in checks first. The classic
//! antisymmetry pair over `≤`/`≥` fires before `≥`/`>` normalize to their
//! mirrored forms, so a goal like `{A ≤ B, B ≥ A}` binds `A = B`. Timed
//! variants of every propagation/simplification rule come from the
//! template expansion; timed equality needs its own rules because timeless
//! equality is solved by the built-in solver and has no timeless rule to
//! expand.

use super::timed::{expand_optional_times, with_timed_variants};
use crate::engine::dsl::*;
use crate::engine::rule::ChrRule;
use crate::engine::{FunctorDecl, HandlerPack};

pub fn build_order_equality_pack() -> HandlerPack {
    let mut rules: Vec<ChrRule> = Vec::new();

    // ground discharge: decided directly once both sides are known
    for f in ["lt", "leq", "gt", "geq", "neq"] {
        rules.extend(with_timed_variants(simplification(
            &format!("{f}_ground"),
            vec![head(f, vec![v("X"), v("Y")])],
            vec![g_ground(v("X")), g_ground(v("Y"))],
            vec![builtin(f, vec![v("X"), v("Y")])],
        )));
    }

    // the classic order-pair simplification, before normalization
    rules.extend(with_timed_variants(simplification(
        "antisymmetry",
        vec![head("leq", vec![v("A"), v("B")]), head("geq", vec![v("B"), v("A")])],
        vec![],
        vec![unify(v("A"), v("B"))],
    )));

    // >, ≥ normalize to their mirrored < , ≤
    rules.extend(with_timed_variants(simplification(
        "geq_mirror",
        vec![head("geq", vec![v("X"), v("Y")])],
        vec![],
        vec![add("leq", vec![v("Y"), v("X")])],
    )));
    rules.extend(with_timed_variants(simplification(
        "gt_mirror",
        vec![head("gt", vec![v("X"), v("Y")])],
        vec![],
        vec![add("lt", vec![v("Y"), v("X")])],
    )));

    rules.extend(with_timed_variants(simplification(
        "leq_reflexivity",
        vec![head("leq", vec![v("X"), v("X")])],
        vec![],
        vec![],
    )));
    rules.extend(with_timed_variants(simplification(
        "leq_antisymmetry",
        vec![head("leq", vec![v("X"), v("Y")]), head("leq", vec![v("Y"), v("X")])],
        vec![],
        vec![unify(v("X"), v("Y"))],
    )));
    rules.extend(with_timed_variants(simplification(
        "lt_irreflexivity",
        vec![head("lt", vec![v("X"), v("X")])],
        vec![],
        fail_body(),
    )));
    rules.extend(with_timed_variants(simplification(
        "lt_asymmetry",
        vec![head("lt", vec![v("X"), v("Y")]), head("lt", vec![v("Y"), v("X")])],
        vec![],
        fail_body(),
    )));
    rules.extend(with_timed_variants(simplification(
        "lt_leq_conflict",
        vec![head("leq", vec![v("X"), v("Y")]), head("lt", vec![v("Y"), v("X")])],
        vec![],
        fail_body(),
    )));
    rules.extend(with_timed_variants(simplification(
        "neq_irreflexivity",
        vec![head("neq", vec![v("X"), v("X")])],
        vec![],
        fail_body(),
    )));

    // redundancy-removing simpagations; timed forms by optional expansion
    rules.extend(expand_optional_times(
        simpagation(
            "lt_leq_subsumption",
            vec![head("lt", vec![v("X"), v("Y")])],
            vec![head("leq", vec![v("X"), v("Y")])],
            vec![],
            vec![],
        ),
        &[0, 1],
    ));
    rules.extend(expand_optional_times(
        simpagation(
            "neq_commutativity",
            vec![head("neq", vec![v("X"), v("Y")])],
            vec![head("neq", vec![v("Y"), v("X")])],
            vec![],
            vec![],
        ),
        &[0, 1],
    ));
    for (name, args) in [("lt_neq_subsumption", (v("X"), v("Y"))), ("lt_neq_subsumption_conv", (v("Y"), v("X")))] {
        rules.extend(expand_optional_times(
            simpagation(
                name,
                vec![head("lt", vec![v("X"), v("Y")])],
                vec![head("neq", vec![args.0.clone(), args.1.clone()])],
                vec![],
                vec![],
            ),
            &[0, 1],
        ));
    }

    // transitivity propagations
    for (name, f1, f2, fout) in [
        ("leq_transitivity", "leq", "leq", "leq"),
        ("lt_transitivity", "lt", "lt", "lt"),
        ("lt_leq_transitivity", "lt", "leq", "lt"),
        ("leq_lt_transitivity", "leq", "lt", "lt"),
    ] {
        rules.extend(with_timed_variants(propagation(
            name,
            vec![head(f1, vec![v("X"), v("Y")]), head(f2, vec![v("Y"), v("Z")])],
            vec![g_ne(v("X"), v("Y")), g_ne(v("Y"), v("Z"))],
            vec![add(fout, vec![v("X"), v("Z")])],
        )));
    }

    rules.extend(timed_equality_rules());

    HandlerPack {
        name: "order-equality".to_string(),
        rules,
        declared: vec![
            FunctorDecl::new("lt", 2).timed(),
            FunctorDecl::new("leq", 2).timed(),
            FunctorDecl::new("gt", 2).timed(),
            FunctorDecl::new("geq", 2).timed(),
            FunctorDecl::new("neq", 2).timed(),
            FunctorDecl::new("eq", 2).timed(),
        ],
    }
}

/// Rules for the timed equality constraint `X = Y @ T`. Partner order
/// constraints are optionally timed (sharing the same instant).
fn timed_equality_rules() -> Vec<ChrRule> {
    let mut rules = Vec::new();
    let t = v("T");

    rules.push(simplification(
        "eq_builtin",
        vec![head_at("eq", vec![v("X"), v("Y")], t.clone())],
        vec![g_ground(v("X")), g_ground(v("Y"))],
        vec![unify(v("X"), v("Y"))],
    ));
    rules.push(simplification(
        "eq_reflexivity",
        vec![head_at("eq", vec![v("X"), v("X")], t.clone())],
        vec![],
        vec![],
    ));
    rules.push(simpagation(
        "eq_commutativity",
        vec![head_at("eq", vec![v("X"), v("Y")], t.clone())],
        vec![head_at("eq", vec![v("Y"), v("X")], t.clone())],
        vec![],
        vec![],
    ));

    for (name, leq_args) in [("eq_subsumption", (v("Y"), v("X"))), ("eq_subsumption_conv", (v("X"), v("Y")))] {
        rules.extend(expand_optional_times(
            simpagation(
                name,
                vec![head_at("eq", vec![v("X"), v("Y")], t.clone())],
                vec![head("leq", vec![leq_args.0.clone(), leq_args.1.clone()])],
                vec![g_ne(v("X"), v("Y"))],
                vec![],
            ),
            &[1],
        ));
    }
    for (name, lt_args) in [("eq_irreflexivity", (v("Y"), v("X"))), ("eq_irreflexivity_conv", (v("X"), v("Y")))] {
        rules.extend(expand_optional_times(
            simplification(
                name,
                vec![
                    head_at("eq", vec![v("X"), v("Y")], t.clone()),
                    head("lt", vec![lt_args.0.clone(), lt_args.1.clone()]),
                ],
                vec![],
                fail_body(),
            ),
            &[1],
        ));
    }
    for (name, neq_args) in [("eq_tautology", (v("Y"), v("X"))), ("eq_tautology_conv", (v("X"), v("Y")))] {
        rules.extend(expand_optional_times(
            simplification(
                name,
                vec![
                    head_at("eq", vec![v("X"), v("Y")], t.clone()),
                    head("neq", vec![neq_args.0.clone(), neq_args.1.clone()]),
                ],
                vec![],
                fail_body(),
            ),
            &[1],
        ));
    }

    // transitivity with self: eq@T pairs sharing a variable
    let ni3 = || vec![g_ne(v("X"), v("Y")), g_ne(v("X"), v("Z")), g_ne(v("Y"), v("Z"))];
    for (name, second, out) in [
        ("eq_trans_self_a", (v("X"), v("Z")), (v("Y"), v("Z"))),
        ("eq_trans_self_b", (v("Y"), v("Z")), (v("X"), v("Z"))),
        ("eq_trans_self_c", (v("Z"), v("X")), (v("Y"), v("Z"))),
        ("eq_trans_self_d", (v("Z"), v("Y")), (v("X"), v("Z"))),
    ] {
        rules.push(propagation(
            name,
            vec![
                head_at("eq", vec![v("X"), v("Y")], t.clone()),
                head_at("eq", vec![second.0.clone(), second.1.clone()], t.clone()),
            ],
            ni3(),
            vec![add_at("eq", vec![out.0.clone(), out.1.clone()], t.clone())],
        ));
    }

    // transitivity with ≤ (optionally timed partner)
    for (name, second, out) in [
        ("eq_trans_leq_a", (v("X"), v("Z")), (v("Y"), v("Z"))),
        ("eq_trans_leq_b", (v("Y"), v("Z")), (v("X"), v("Z"))),
        ("eq_trans_leq_c", (v("Z"), v("X")), (v("Z"), v("Y"))),
        ("eq_trans_leq_d", (v("Z"), v("Y")), (v("Z"), v("X"))),
    ] {
        rules.extend(expand_optional_times(
            propagation(
                name,
                vec![
                    head_at("eq", vec![v("X"), v("Y")], t.clone()),
                    head("leq", vec![second.0.clone(), second.1.clone()]),
                ],
                ni3(),
                vec![add_at("leq", vec![out.0.clone(), out.1.clone()], t.clone())],
            ),
            &[1],
        ));
    }
    rules
}
