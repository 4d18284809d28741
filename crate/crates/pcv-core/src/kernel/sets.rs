//! Membership, meet, union and restriction handler.
//!
//! Set constraints are not solved directly: they derive membership
//! constraints, which are. A defined set is a literal element list
//! (`is_list` holds); an undefined set is an unbound variable whose known
//! members accumulate as membership constraints. Disjunctive rules wait
//! for the labeling phase. Union rules are the meet rules' duals (the
//! cardinality handler presupposes union constraints exist in stores).
//!
//! Restriction predicates come from a closed vocabulary: `rcall(R, X)`
//! applies predicate `R` to `X` and `rcall_not(R, X)` applies its
//! negation; whoever compiles the vocabulary supplies rules for both.

use super::timed::with_timed_variants;
use crate::engine::dsl::*;
use crate::engine::rule::ChrRule;
use crate::engine::{FunctorDecl, HandlerPack};

pub fn build_set_pack() -> HandlerPack {
    let mut rules: Vec<ChrRule> = Vec::new();

    // x ∈ G with x ∉ G is a plain contradiction
    rules.extend(with_timed_variants(propagation(
        "in_notin_tautology",
        vec![head("in", vec![v("X"), v("G")]), head("notin", vec![v("X"), v("G")])],
        vec![],
        fail_body(),
    )));

    // ground membership in a defined set is decidable immediately
    rules.extend(with_timed_variants(simplification(
        "in_defined_ground",
        vec![head("in", vec![v("X"), v("S")])],
        vec![g_is_list(v("S")), g_ground(v("X"))],
        vec![builtin("member", vec![v("X"), v("S")])],
    )));
    rules.extend(with_timed_variants(simplification(
        "notin_defined_ground",
        vec![head("notin", vec![v("X"), v("S")])],
        vec![g_is_list(v("S")), g_ground(v("X"))],
        vec![builtin("not_member", vec![v("X"), v("S")])],
    )));

    // meet
    rules.push(simplification(
        "meet_identity",
        vec![head("meet", vec![v("C"), v("A"), v("A")])],
        vec![],
        vec![unify(v("C"), v("A"))],
    ));
    rules.push(simpagation(
        "meet_commutativity",
        vec![head("meet", vec![v("C"), v("A"), v("B")])],
        vec![head("meet", vec![v("C"), v("B"), v("A")])],
        vec![],
        vec![],
    ));
    rules.push(propagation(
        "distributivity",
        vec![head("in", vec![v("X"), v("C")]), head("meet", vec![v("C"), v("A"), v("B")])],
        vec![g_ne(v("A"), v("B"))],
        vec![add("in", vec![v("X"), v("A")]), add("in", vec![v("X"), v("B")])],
    ));
    rules.push(propagation(
        "rev_dist",
        vec![
            head("in", vec![v("X"), v("A")]),
            head("in", vec![v("X"), v("B")]),
            head("meet", vec![v("C"), v("A"), v("B")]),
        ],
        vec![g_ne(v("A"), v("B"))],
        vec![add("in", vec![v("X"), v("C")])],
    ));
    for (name, side) in [("rev_not_dist_a", "A"), ("rev_not_dist_b", "B")] {
        rules.push(propagation(
            name,
            vec![head("notin", vec![v("X"), v(side)]), head("meet", vec![v("C"), v("A"), v("B")])],
            vec![],
            vec![add("notin", vec![v("X"), v("C")])],
        ));
    }
    for (name, inside, out) in [("not_distrib_a", "A", "B"), ("not_distrib_b", "B", "A")] {
        rules.push(propagation(
            name,
            vec![
                head("notin", vec![v("X"), v("C")]),
                head("in", vec![v("X"), v(inside)]),
                head("meet", vec![v("C"), v("A"), v("B")]),
            ],
            vec![],
            vec![add("notin", vec![v("X"), v(out)])],
        ));
    }

    // union: dual forms of the meet rules
    rules.push(simplification(
        "union_identity",
        vec![head("union", vec![v("C"), v("A"), v("A")])],
        vec![],
        vec![unify(v("C"), v("A"))],
    ));
    rules.push(simpagation(
        "union_commutativity",
        vec![head("union", vec![v("C"), v("A"), v("B")])],
        vec![head("union", vec![v("C"), v("B"), v("A")])],
        vec![],
        vec![],
    ));
    rules.push(propagation(
        "union_not_distributivity",
        vec![head("notin", vec![v("X"), v("C")]), head("union", vec![v("C"), v("A"), v("B")])],
        vec![g_ne(v("A"), v("B"))],
        vec![add("notin", vec![v("X"), v("A")]), add("notin", vec![v("X"), v("B")])],
    ));
    rules.push(propagation(
        "union_rev_not_dist",
        vec![
            head("notin", vec![v("X"), v("A")]),
            head("notin", vec![v("X"), v("B")]),
            head("union", vec![v("C"), v("A"), v("B")]),
        ],
        vec![g_ne(v("A"), v("B"))],
        vec![add("notin", vec![v("X"), v("C")])],
    ));
    for (name, side) in [("union_up_a", "A"), ("union_up_b", "B")] {
        rules.push(propagation(
            name,
            vec![head("in", vec![v("X"), v(side)]), head("union", vec![v("C"), v("A"), v("B")])],
            vec![],
            vec![add("in", vec![v("X"), v("C")])],
        ));
    }
    for (name, notinside, out) in [("union_pick_a", "A", "B"), ("union_pick_b", "B", "A")] {
        rules.push(propagation(
            name,
            vec![
                head("in", vec![v("X"), v("C")]),
                head("notin", vec![v("X"), v(notinside)]),
                head("union", vec![v("C"), v("A"), v("B")]),
            ],
            vec![],
            vec![add("in", vec![v("X"), v(out)])],
        ));
    }

    // restriction: C = A : R
    rules.push(simpagation(
        "restr_idempotent",
        vec![head("restr", vec![v("C"), v("A"), v("R")])],
        vec![head("restr", vec![v("D"), v("A"), v("R")])],
        vec![],
        vec![unify(v("C"), v("D"))],
    ));
    rules.push(propagation(
        "restriction",
        vec![head("in", vec![v("X"), v("C")]), head("restr", vec![v("C"), v("A"), v("R")])],
        vec![],
        vec![add("rcall", vec![v("R"), v("X")]), add("in", vec![v("X"), v("A")])],
    ));

    // labeling-delayed rules
    rules.push(simpagation(
        "label_in_defined",
        vec![head("labeling", vec![])],
        vec![head("in", vec![v("X"), v("S")])],
        vec![g_is_list(v("S"))],
        vec![builtin("member", vec![v("X"), v("S")])],
    ));
    rules.push(simpagation(
        "label_notin_defined",
        vec![head("labeling", vec![])],
        vec![head("notin", vec![v("X"), v("S")])],
        vec![g_is_list(v("S"))],
        vec![builtin("not_member", vec![v("X"), v("S")])],
    ));
    for (name, inside, other) in [("rev_dist_label_a", "A", "B"), ("rev_dist_label_b", "B", "A")] {
        rules.push(propagation(
            name,
            vec![
                head("labeling", vec![]),
                head("in", vec![v("X"), v(inside)]),
                head("meet", vec![v("C"), v("A"), v("B")]),
            ],
            vec![g_ne(v("A"), v("B"))],
            vec![disj(vec![
                branch(vec![add("notin", vec![v("X"), v(other)]), add("notin", vec![v("X"), v("C")])]),
                branch(vec![add("in", vec![v("X"), v("C")]), add("in", vec![v("X"), v(other)])]),
            ])],
        ));
    }
    rules.push(propagation(
        "not_distrib_label",
        vec![
            head("labeling", vec![]),
            head("notin", vec![v("X"), v("C")]),
            head("meet", vec![v("C"), v("A"), v("B")]),
        ],
        vec![g_ne(v("A"), v("B"))],
        vec![disj(vec![
            branch(vec![add("notin", vec![v("X"), v("A")])]),
            branch(vec![add("notin", vec![v("X"), v("B")])]),
        ])],
    ));
    for (name, notinside, other) in [("union_label_a", "A", "B"), ("union_label_b", "B", "A")] {
        rules.push(propagation(
            name,
            vec![
                head("labeling", vec![]),
                head("notin", vec![v("X"), v(notinside)]),
                head("union", vec![v("C"), v("A"), v("B")]),
            ],
            vec![g_ne(v("A"), v("B"))],
            vec![disj(vec![
                branch(vec![add("in", vec![v("X"), v(other)]), add("in", vec![v("X"), v("C")])]),
                branch(vec![add("notin", vec![v("X"), v("C")]), add("notin", vec![v("X"), v(other)])]),
            ])],
        ));
    }
    rules.push(propagation(
        "union_pick_label",
        vec![
            head("labeling", vec![]),
            head("in", vec![v("X"), v("C")]),
            head("union", vec![v("C"), v("A"), v("B")]),
        ],
        vec![g_ne(v("A"), v("B"))],
        vec![disj(vec![
            branch(vec![add("in", vec![v("X"), v("A")])]),
            branch(vec![add("in", vec![v("X"), v("B")])]),
        ])],
    ));
    rules.push(propagation(
        "rev_restric",
        vec![
            head("labeling", vec![]),
            head("in", vec![v("X"), v("A")]),
            head("restr", vec![v("C"), v("A"), v("R")]),
        ],
        vec![],
        vec![disj(vec![
            branch(vec![add("rcall", vec![v("R"), v("X")]), add("in", vec![v("X"), v("C")])]),
            branch(vec![add("notin", vec![v("X"), v("C")]), add("rcall_not", vec![v("R"), v("X")])]),
        ])],
    ));

    HandlerPack {
        name: "sets".to_string(),
        rules,
        declared: vec![
            FunctorDecl::new("in", 2).timed(),
            FunctorDecl::new("notin", 2).timed(),
            FunctorDecl::new("meet", 3),
            FunctorDecl::new("union", 3),
            FunctorDecl::new("restr", 3),
            FunctorDecl::new("rcall", 2),
            FunctorDecl::new("rcall_not", 2),
        ],
    }
}
