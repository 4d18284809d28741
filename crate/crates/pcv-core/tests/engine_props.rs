//! Property tests for store invariants.

use pcv_core::engine::dsl::{head, simplification, v};
use pcv_core::engine::{Constraint, FunctorDecl, HandlerPack, RuleProgram, SearchState, Term, Var};
use proptest::prelude::*;

/// A program with no firing rules, so the store only sees adds.
fn inert_program() -> RuleProgram {
    let pack = HandlerPack {
        name: "inert".to_string(),
        rules: vec![simplification("never", vec![head("never", vec![v("X")])], vec![], vec![])],
        declared: vec![
            FunctorDecl::new("never", 1),
            FunctorDecl::new("p", 2),
            FunctorDecl::new("q", 1),
        ],
    };
    RuleProgram::compose(&[&pack]).unwrap()
}

#[derive(Clone, Debug)]
enum Step {
    AddP(u8, u8),
    AddQ(u8),
}

fn steps() -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec(
        prop_oneof![
            (0u8..4, 0u8..4).prop_map(|(a, b)| Step::AddP(a, b)),
            (0u8..4).prop_map(Step::AddQ),
        ],
        1..40,
    )
}

proptest! {
    /// With the already-in-store option on, no sequence of adds produces
    /// two syntactically identical live constraints.
    #[test]
    fn already_in_store_never_duplicates(steps in steps()) {
        let program = inert_program();
        let mut st = SearchState::new(&program, 100_000);
        // a shared pool of variables so adds can collide through bindings
        let vars: Vec<Term> = (0..4).map(|k| Term::Var(Var::fresh(format!("v{k}")))).collect();
        for step in steps {
            let c = match step {
                Step::AddP(a, b) => Constraint::user("p", vec![vars[a as usize].clone(), vars[b as usize].clone()]),
                Step::AddQ(a) => Constraint::user("q", vec![Term::Int(a as i64)]),
            };
            st.post(&c).unwrap();
            let resolved: Vec<String> = st.residual().iter().map(|c| c.to_string()).collect();
            let mut dedup = resolved.clone();
            dedup.sort();
            dedup.dedup();
            prop_assert_eq!(resolved.len(), dedup.len(), "duplicate live constraints");
        }
    }

    /// Unification either makes both terms resolve identically or leaves
    /// no trace, and a snapshot restores the pre-unification bindings.
    #[test]
    fn unify_binds_or_leaves_no_trace(xa in 0u8..3, xb in 0u8..3, ga in -2i64..2, gb in -2i64..2) {
        let program = inert_program();
        let mut st = SearchState::new(&program, 1000);
        let vars: Vec<Term> = (0..3).map(|k| Term::Var(Var::fresh(format!("u{k}")))).collect();
        let lhs = Term::compound("f", vec![vars[xa as usize].clone(), Term::Int(ga)]);
        let rhs = Term::compound("f", vec![Term::Int(gb), vars[xb as usize].clone()]);
        let mark = st.snapshot();
        st.post(&Constraint::builtin("=", vec![lhs.clone(), rhs.clone()])).unwrap();
        let failed = st.store().status() == pcv_core::engine::StoreStatus::Failed;
        if !failed {
            prop_assert_eq!(st.resolve(&lhs), st.resolve(&rhs));
        }
        st.backtrack(&mark).unwrap();
        prop_assert_eq!(st.resolve(&vars[xa as usize]), vars[xa as usize].clone());
        prop_assert_eq!(st.resolve(&vars[xb as usize]), vars[xb as usize].clone());
    }
}
