//! Tri-valued rule algebra handler.
//!
//! Rule outcomes are `r(D, A)` terms pairing an applicability domain with
//! an acceptability expression. `andr(R1, R2, R)` constrains `R` to the
//! tri-logical conjunction of `R1` and `R2`; special cases (unit, absorber,
//! defaults) fire before the general definition. Disjunction rules are the
//! De Morgan duals of the conjunction rules. Quantifiers unfold to chains
//! of conjunctions or disjunctions: eagerly over defined sets, and
//! membership-driven with a used-members accumulator over undefined sets,
//! closing to the quantifier unit at labeling.

use crate::engine::dsl::*;
use crate::engine::rule::ChrRule;
use crate::engine::{FunctorDecl, HandlerPack};

#[allow(clippy::vec_init_then_push)] // one push per rule reads like the rule listing
pub fn build_trilogic_pack() -> HandlerPack {
    let mut rules: Vec<ChrRule> = Vec::new();

    rules.push(simplification(
        "notr_definition",
        vec![head("notr", vec![t("r", vec![v("D"), v("A")]), v("R")])],
        vec![],
        vec![unify(v("R"), t("r", vec![v("D"), t("not", vec![v("A")])]))],
    ));

    // conjunction
    rules.push(simpagation(
        "andr_commutativity",
        vec![head("andr", vec![v("R1"), v("R2"), v("R3")])],
        vec![head("andr", vec![v("R2"), v("R1"), v("R4")])],
        vec![],
        vec![unify(v("R4"), v("R3"))],
    ));
    rules.push(simplification(
        "andr_identity",
        vec![head("andr", vec![v("R1"), v("R1"), v("R3")])],
        vec![],
        vec![unify(v("R3"), v("R1"))],
    ));
    rules.push(simplification(
        "andr_neutral_l",
        vec![head("andr", vec![t("r", vec![a("fail"), v("X")]), v("R2"), v("R3")])],
        vec![],
        vec![unify(v("R3"), v("R2"))],
    ));
    rules.push(simplification(
        "andr_neutral_r",
        vec![head("andr", vec![v("R1"), t("r", vec![a("fail"), v("X")]), v("R3")])],
        vec![],
        vec![unify(v("R3"), v("R1"))],
    ));
    rules.push(simplification(
        "andr_absorb_l",
        vec![head("andr", vec![t("r", vec![a("true"), a("fail")]), v("R2"), v("R3")])],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), a("fail")]))],
    ));
    rules.push(simplification(
        "andr_absorb_r",
        vec![head("andr", vec![v("R1"), t("r", vec![a("true"), a("fail")]), v("R3")])],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), a("fail")]))],
    ));
    rules.push(simplification(
        "andr_default_l",
        vec![head(
            "andr",
            vec![t("r", vec![a("true"), a("true")]), t("r", vec![v("D2"), v("A2")]), v("R3")],
        )],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), t("or", vec![t("not", vec![v("D2")]), v("A2")])]))],
    ));
    rules.push(simplification(
        "andr_default_r",
        vec![head(
            "andr",
            vec![t("r", vec![v("D1"), v("A1")]), t("r", vec![a("true"), a("true")]), v("R3")],
        )],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), t("or", vec![t("not", vec![v("D1")]), v("A1")])]))],
    ));
    rules.push(simplification(
        "andr_definition",
        vec![head(
            "andr",
            vec![t("r", vec![v("D1"), v("A1")]), t("r", vec![v("D2"), v("A2")]), v("R3")],
        )],
        vec![],
        vec![unify(
            v("R3"),
            t(
                "r",
                vec![
                    t("or", vec![v("D1"), v("D2")]),
                    t(
                        "and",
                        vec![
                            t("or", vec![t("not", vec![v("D1")]), v("A1")]),
                            t("or", vec![t("not", vec![v("D2")]), v("A2")]),
                        ],
                    ),
                ],
            ),
        )],
    ));

    // disjunction: De Morgan dual of the conjunction rules
    rules.push(simpagation(
        "orr_commutativity",
        vec![head("orr", vec![v("R1"), v("R2"), v("R3")])],
        vec![head("orr", vec![v("R2"), v("R1"), v("R4")])],
        vec![],
        vec![unify(v("R4"), v("R3"))],
    ));
    rules.push(simplification(
        "orr_identity",
        vec![head("orr", vec![v("R1"), v("R1"), v("R3")])],
        vec![],
        vec![unify(v("R3"), v("R1"))],
    ));
    rules.push(simplification(
        "orr_neutral_l",
        vec![head("orr", vec![t("r", vec![a("fail"), v("X")]), v("R2"), v("R3")])],
        vec![],
        vec![unify(v("R3"), v("R2"))],
    ));
    rules.push(simplification(
        "orr_neutral_r",
        vec![head("orr", vec![v("R1"), t("r", vec![a("fail"), v("X")]), v("R3")])],
        vec![],
        vec![unify(v("R3"), v("R1"))],
    ));
    rules.push(simplification(
        "orr_absorb_l",
        vec![head("orr", vec![t("r", vec![a("true"), a("true")]), v("R2"), v("R3")])],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), a("true")]))],
    ));
    rules.push(simplification(
        "orr_absorb_r",
        vec![head("orr", vec![v("R1"), t("r", vec![a("true"), a("true")]), v("R3")])],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), a("true")]))],
    ));
    rules.push(simplification(
        "orr_default_l",
        vec![head(
            "orr",
            vec![t("r", vec![a("true"), a("fail")]), t("r", vec![v("D2"), v("A2")]), v("R3")],
        )],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), t("and", vec![v("D2"), v("A2")])]))],
    ));
    rules.push(simplification(
        "orr_default_r",
        vec![head(
            "orr",
            vec![t("r", vec![v("D1"), v("A1")]), t("r", vec![a("true"), a("fail")]), v("R3")],
        )],
        vec![],
        vec![unify(v("R3"), t("r", vec![a("true"), t("and", vec![v("D1"), v("A1")])]))],
    ));
    rules.push(simplification(
        "orr_definition",
        vec![head(
            "orr",
            vec![t("r", vec![v("D1"), v("A1")]), t("r", vec![v("D2"), v("A2")]), v("R3")],
        )],
        vec![],
        vec![unify(
            v("R3"),
            t(
                "r",
                vec![
                    t("or", vec![v("D1"), v("D2")]),
                    t(
                        "or",
                        vec![t("and", vec![v("D1"), v("A1")]), t("and", vec![v("D2"), v("A2")])],
                    ),
                ],
            ),
        )],
    ));

    // quantifiers, timeless and timed
    rules.extend(quantifier_rules("forallr", "forallr_acc", "andr"));
    rules.extend(quantifier_rules("existsr", "existsr_acc", "orr"));

    HandlerPack {
        name: "trilogic".to_string(),
        rules,
        declared: vec![
            FunctorDecl::new("notr", 2),
            FunctorDecl::new("andr", 3),
            FunctorDecl::new("orr", 3),
            FunctorDecl::new("forallr", 3).timed(),
            FunctorDecl::new("forallr_acc", 4).timed(),
            FunctorDecl::new("existsr", 3).timed(),
            FunctorDecl::new("existsr_acc", 4).timed(),
        ],
    }
}

/// The universal/existential unfolding rules; `combine` is `andr` for
/// FORALL and `orr` for EXIST. The empty quantification is `r(fail, true)`.
fn quantifier_rules(q: &str, acc: &str, combine: &str) -> Vec<ChrRule> {
    let mut rules = Vec::new();
    let unit = || t("r", vec![a("fail"), a("true")]);

    // timeless / timed pairs for empty, forEach, convert, no_more
    for timed in [false, true] {
        let suffix = if timed { "_t" } else { "" };
        let qhead = |args: Vec<crate::engine::Term>| {
            if timed {
                head_at(q, args, v("T"))
            } else {
                head(q, args)
            }
        };
        let ahead = |args: Vec<crate::engine::Term>| {
            if timed {
                head_at(acc, args, v("T"))
            } else {
                head(acc, args)
            }
        };
        let aadd = |args: Vec<crate::engine::Term>| {
            if timed {
                add_at(acc, args, v("T"))
            } else {
                add(acc, args)
            }
        };
        let qadd = |args: Vec<crate::engine::Term>| {
            if timed {
                add_at(q, args, v("T"))
            } else {
                add(q, args)
            }
        };

        rules.push(simplification(
            &format!("{q}_empty{suffix}"),
            vec![qhead(vec![v("S"), v("Tr"), v("R")])],
            vec![g_is_list(v("S")), g_match(v("S"), nil())],
            vec![unify(v("R"), unit())],
        ));
        rules.push(simplification(
            &format!("{q}_foreach{suffix}"),
            vec![qhead(vec![v("S"), v("Tr"), v("R")])],
            vec![g_is_list(v("S")), g_match(v("S"), cons(v("X"), v("Tail")))],
            vec![
                apply(v("Tr"), vec![v("X"), v("R1")]),
                add(combine, vec![v("R1"), v("R2"), v("R")]),
                qadd(vec![v("Tail"), v("Tr"), v("R2")]),
            ],
        ));
        rules.push(simplification(
            &format!("{q}_convert{suffix}"),
            vec![qhead(vec![v("S"), v("Tr"), v("R")])],
            vec![g_not_list(v("S"))],
            vec![aadd(vec![v("S"), v("Tr"), v("R"), nil()])],
        ));
        rules.push(simpagation(
            &format!("{q}_no_more{suffix}"),
            vec![head("labeling", vec![])],
            vec![ahead(vec![v("S"), v("Tr"), v("R"), v("U")])],
            vec![],
            vec![unify(v("R"), unit())],
        ));

        // membership-driven unfolding over undefined sets
        if timed {
            // a membership at the same instant, or a timeless one
            for (iname, in_head) in [
                ("tt", head_at("in", vec![v("X"), v("S")], v("T"))),
                ("tl", head("in", vec![v("X"), v("S")])),
            ] {
                rules.push(simpagation(
                    &format!("{q}_insert_{iname}"),
                    vec![in_head],
                    vec![head_at(acc, vec![v("S"), v("Tr"), v("R"), v("U")], v("T"))],
                    vec![g_not_member(v("X"), v("U"))],
                    vec![
                        apply(v("Tr"), vec![v("X"), v("R1")]),
                        add(combine, vec![v("R1"), v("R2"), v("R")]),
                        add_at(acc, vec![v("S"), v("Tr"), v("R2"), cons(v("X"), v("U"))], v("T")),
                    ],
                ));
            }
        } else {
            rules.push(simpagation(
                &format!("{q}_insert"),
                vec![head("in", vec![v("X"), v("S")])],
                vec![head(acc, vec![v("S"), v("Tr"), v("R"), v("U")])],
                vec![g_not_member(v("X"), v("U"))],
                vec![
                    apply(v("Tr"), vec![v("X"), v("R1")]),
                    add(combine, vec![v("R1"), v("R2"), v("R")]),
                    add(acc, vec![v("S"), v("Tr"), v("R2"), cons(v("X"), v("U"))]),
                ],
            ));
        }
    }
    rules
}
