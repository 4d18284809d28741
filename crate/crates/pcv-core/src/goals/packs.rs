//! Goal-level handler packs: the open/close bridge, the difference
//! operator, and the probe constraints the self-consistency goals post.

use crate::engine::dsl::*;
use crate::engine::{FunctorDecl, HandlerPack};

/// `close R` demands the event be allowed; `open R` demands it be allowed
/// or outside the rule's domain. The bridge between the tri-valued rule
/// logic and binary workflow constraints.
pub fn build_open_close_pack() -> HandlerPack {
    HandlerPack {
        name: "open-close".to_string(),
        rules: vec![
            simplification(
                "close_definition",
                vec![head("close", vec![t("r", vec![v("D"), v("A")])])],
                vec![],
                vec![add("and", vec![v("D"), v("A")])],
            ),
            simplification(
                "open_definition",
                vec![head("open", vec![t("r", vec![v("D"), v("A")])])],
                vec![],
                vec![add(
                    "or",
                    vec![t("not", vec![v("D")]), t("and", vec![v("D"), v("A")])],
                )],
            ),
        ],
        declared: vec![FunctorDecl::new("close", 1), FunctorDecl::new("open", 1)],
    }
}

/// `R1 ⋄ R2` constrains two rule terms to differ: on some reading of the
/// store, either their domains disagree or their allow-verdicts do.
pub fn build_diff_pack() -> HandlerPack {
    HandlerPack {
        name: "diff".to_string(),
        rules: vec![
            simpagation(
                "diff_commutativity",
                vec![head("diff", vec![v("R1"), v("R2")])],
                vec![head("diff", vec![v("R2"), v("R1")])],
                vec![],
                vec![],
            ),
            simplification(
                "diff_identity",
                vec![head("diff", vec![v("R"), v("R")])],
                vec![],
                fail_body(),
            ),
            simplification(
                "diff_definition",
                vec![head(
                    "diff",
                    vec![t("r", vec![v("D1"), v("A1")]), t("r", vec![v("D2"), v("A2")])],
                )],
                vec![],
                vec![add(
                    "or",
                    vec![
                        t("xor", vec![v("D1"), v("D2")]),
                        t(
                            "xor",
                            vec![t("and", vec![v("D1"), v("A1")]), t("and", vec![v("D2"), v("A2")])],
                        ),
                    ],
                )],
            ),
        ],
        declared: vec![FunctorDecl::new("diff", 2)],
    }
}

/// Probes that open a compiled rule term for the self-consistency goals,
/// plus the inert `trace_event` marker that keeps witness events visible
/// in the residual store.
pub fn build_goal_support_pack() -> HandlerPack {
    HandlerPack {
        name: "goal-support".to_string(),
        rules: vec![
            simplification(
                "domain_holds_definition",
                vec![head("domain_holds", vec![t("r", vec![v("D"), v("A")])])],
                vec![],
                vec![call(v("D"))],
            ),
            simplification(
                "not_denied_definition",
                vec![head("not_denied", vec![t("r", vec![v("D"), v("A")])])],
                vec![],
                vec![add("or", vec![t("not", vec![v("D")]), v("A")])],
            ),
            simplification(
                "not_allowed_definition",
                vec![head("not_allowed", vec![t("r", vec![v("D"), v("A")])])],
                vec![],
                vec![add("or", vec![t("not", vec![v("D")]), t("not", vec![v("A")])])],
            ),
        ],
        declared: vec![
            FunctorDecl::new("domain_holds", 1),
            FunctorDecl::new("not_denied", 1),
            FunctorDecl::new("not_allowed", 1),
            FunctorDecl::new("trace_event", 1),
        ],
    }
}
