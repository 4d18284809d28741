//! Engine operation tests against a miniature order program.

use super::dsl::*;
use super::*;

/// leq/geq with the antisymmetry simplification and leq transitivity.
fn mini_order_program() -> RuleProgram {
    let pack = HandlerPack {
        name: "mini-order".to_string(),
        rules: vec![
            simplification(
                "antisymmetry",
                vec![head("leq", vec![v("A"), v("B")]), head("geq", vec![v("B"), v("A")])],
                vec![],
                vec![unify(v("A"), v("B"))],
            ),
            propagation(
                "transitivity",
                vec![head("leq", vec![v("A"), v("B")]), head("leq", vec![v("B"), v("C")])],
                vec![g_ne(v("A"), v("B")), g_ne(v("B"), v("C"))],
                vec![add("leq", vec![v("A"), v("C")])],
            ),
            simplification("fail_now", vec![head("boom", vec![])], vec![], fail_body()),
            simplification(
                "pick",
                vec![head("pick", vec![v("X")])],
                vec![],
                vec![disj(vec![
                    branch(vec![unify(v("X"), a("first"))]),
                    branch(vec![unify(v("X"), a("second"))]),
                ])],
            ),
            simplification(
                "guarded",
                vec![head("gtest", vec![v("X"), v("Y")])],
                vec![g_ground(v("X")), g_ground(v("Y"))],
                vec![],
            ),
        ],
        declared: vec![
            FunctorDecl::new("leq", 2),
            FunctorDecl::new("geq", 2),
            FunctorDecl::new("boom", 0),
            FunctorDecl::new("pick", 1),
            FunctorDecl::new("gtest", 2),
        ],
    };
    RuleProgram::compose(&[&pack]).unwrap()
}

fn user(functor: &str, args: Vec<Term>) -> Constraint {
    Constraint::user(functor, args)
}

#[test]
fn match_heads_finds_the_order_pair() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    let x = Term::Var(Var::fresh("x"));
    let y = Term::Var(Var::fresh("y"));
    st.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    st.post(&user("geq", vec![y.clone(), x.clone()])).unwrap();

    let matches = st.match_heads(0);
    assert_eq!(matches.len(), 1);
    let m = &matches[0];
    assert_eq!(st.resolve(m.env.get("A").unwrap()), x);
    assert_eq!(st.resolve(m.env.get("B").unwrap()), y);
}

#[test]
fn match_heads_empty_store() {
    let program = mini_order_program();
    let st = SearchState::new(&program, 1000);
    assert!(st.match_heads(0).is_empty());
}

#[test]
fn match_heads_excludes_propagation_history() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    let (x, y, z) = (Term::Var(Var::fresh("x")), Term::Var(Var::fresh("y")), Term::Var(Var::fresh("z")));
    st.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    st.post(&user("leq", vec![y.clone(), z.clone()])).unwrap();

    let before = st.match_heads(1);
    assert_eq!(before.len(), 1);
    st.fire(1, &before[0]).unwrap();
    let after = st.match_heads(1);
    // the fired pair is excluded; the freshly added leq(x, z) may produce
    // new combinations with the originals
    assert!(after.iter().all(|m| m.ids != before[0].ids));
}

#[test]
fn check_guard_ground_and_identity() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    // guarded: gtest(X, Y) <=> ground(X), ground(Y) | true.
    st.post(&user("gtest", vec![i(3), i(4)])).unwrap();
    let rule = &program.rules()[4];
    let ms = st.match_heads(4);
    assert_eq!(ms.len(), 1);
    assert!(st.check_guard(rule, &ms[0]).is_some());

    // unbound argument: the rule waits
    let mut st2 = SearchState::new(&program, 1000);
    st2.post(&user("gtest", vec![Term::Var(Var::fresh("X")), i(4)])).unwrap();
    let ms2 = st2.match_heads(4);
    assert!(st2.check_guard(rule, &ms2[0]).is_none());
}

#[test]
fn guard_not_identical_rejects_same_atom() {
    let program = mini_order_program();
    let st = SearchState::new(&program, 1000);
    let mut env = Env::new();
    env.insert("A".to_string(), a("a"));
    env.insert("B".to_string(), a("a"));
    let m = Match { env, ids: vec![] };
    let probe = ChrRule {
        name: "probe".to_string(),
        kept: vec![],
        removed: vec![head("leq", vec![v("A"), v("B")])],
        guard: vec![g_ne(v("A"), v("B"))],
        body: vec![],
    };
    assert!(st.check_guard(&probe, &m).is_none());
}

#[test]
fn fire_simplification_removes_and_binds() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    let x = Term::Var(Var::fresh("x"));
    let y = Term::Var(Var::fresh("y"));
    st.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    st.post(&user("geq", vec![y.clone(), x.clone()])).unwrap();
    let ms = st.match_heads(0);
    st.fire(0, &ms[0]).unwrap();
    assert_eq!(st.store().live_count(), 0);
    assert_eq!(st.resolve(&x), st.resolve(&y));
}

#[test]
fn fire_propagation_keeps_heads() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    let (x, y, z) = (a("x"), a("y"), a("z"));
    st.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    st.post(&user("leq", vec![y.clone(), z.clone()])).unwrap();
    let ms = st.match_heads(1);
    st.fire(1, &ms[0]).unwrap();
    assert_eq!(st.store().live_count(), 3);
    let resolved = st.residual();
    assert!(resolved.iter().any(|c| c.functor == "leq" && c.args == vec![x.clone(), z.clone()]));
}

#[test]
fn fire_fail_body_fails_store() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    st.post(&user("boom", vec![])).unwrap();
    let ms = st.match_heads(2);
    st.fire(2, &ms[0]).unwrap();
    assert_eq!(st.store().status(), StoreStatus::Failed);
}

#[test]
fn solve_empty_goal_is_satisfiable() {
    let program = mini_order_program();
    let r = solve(&program, &[], SolveOptions::default()).unwrap();
    assert!(r.is_satisfiable());
}

#[test]
fn solve_disjunction_commits_to_first_branch() {
    let program = mini_order_program();
    let x = Term::Var(Var::fresh("X"));
    let r = solve(&program, &[user("pick", vec![x.clone()])], SolveOptions::default()).unwrap();
    match r {
        SolveResult::Satisfiable(sol) => assert_eq!(sol.resolve(&x), a("first")),
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn solve_backtracks_into_second_branch() {
    let program = mini_order_program();
    let x = Term::Var(Var::fresh("X"));
    // first branch binds X=first, then X=second clashes, forcing backtrack
    let goal = vec![
        user("pick", vec![x.clone()]),
        Constraint::builtin("=", vec![x.clone(), a("second")]),
    ];
    let r = solve(&program, &goal, SolveOptions::default()).unwrap();
    match r {
        SolveResult::Satisfiable(sol) => assert_eq!(sol.resolve(&x), a("second")),
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn solve_exhausts_branches_to_unsatisfiable() {
    let program = mini_order_program();
    let x = Term::Var(Var::fresh("X"));
    let goal = vec![
        user("pick", vec![x.clone()]),
        Constraint::builtin("=", vec![x, a("third")]),
    ];
    let r = solve(&program, &goal, SolveOptions::default()).unwrap();
    assert!(r.is_unsatisfiable());
}

#[test]
fn budget_exhaustion_is_reported() {
    let program = mini_order_program();
    // transitive closure over a chain wants several firings; budget 1 stops it
    let atoms: Vec<Term> = (0..5).map(|k| a(&format!("a{k}"))).collect();
    let goal: Vec<Constraint> = atoms
        .windows(2)
        .map(|w| user("leq", vec![w[0].clone(), w[1].clone()]))
        .collect();
    let r = solve(&program, &goal, SolveOptions { budget: 1 }).unwrap();
    assert!(matches!(r, SolveResult::BudgetExhausted(_)));
}

#[test]
fn budget_increase_resolves_exhaustion_without_flipping() {
    let program = mini_order_program();
    let atoms: Vec<Term> = (0..5).map(|k| a(&format!("a{k}"))).collect();
    let goal: Vec<Constraint> = atoms
        .windows(2)
        .map(|w| user("leq", vec![w[0].clone(), w[1].clone()]))
        .collect();
    let mut verdicts = Vec::new();
    for budget in [1u64, 2, 4, 8, 1024] {
        let r = solve(&program, &goal, SolveOptions { budget }).unwrap();
        verdicts.push(match r {
            SolveResult::Satisfiable(_) => "sat",
            SolveResult::Unsatisfiable(_) => "unsat",
            SolveResult::BudgetExhausted(_) => "budget",
        });
    }
    // once decided, the verdict never changes as the budget grows
    let decided: Vec<&&str> = verdicts.iter().filter(|v| **v != "budget").collect();
    assert!(!decided.is_empty());
    assert!(decided.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn snapshot_backtrack_restores_exactly() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    st.post(&user("leq", vec![a("p"), a("q")])).unwrap();
    let before = st.canonical_residual();
    let mark = st.snapshot();
    for k in 0..5 {
        st.post(&user("leq", vec![a(&format!("x{k}")), a(&format!("y{k}"))])).unwrap();
    }
    assert_eq!(st.store().live_count(), 6);
    st.backtrack(&mark).unwrap();
    assert_eq!(st.canonical_residual(), before);
}

#[test]
fn nested_snapshots_unwind_lifo() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    let m1 = st.snapshot();
    st.post(&user("leq", vec![a("a"), a("b")])).unwrap();
    let m2 = st.snapshot();
    st.post(&user("leq", vec![a("c"), a("d")])).unwrap();
    st.backtrack(&m2).unwrap();
    assert_eq!(st.store().live_count(), 1);
    st.backtrack(&m1).unwrap();
    assert_eq!(st.store().live_count(), 0);
    // m2 is stale now
    assert!(st.backtrack(&m2).is_err());
}

#[test]
fn backtrack_removes_bindings_like_a_fresh_run() {
    let program = mini_order_program();
    // oracle route: run the prefix goal from scratch
    let x = Term::Var(Var::fresh("x"));
    let y = Term::Var(Var::fresh("y"));
    let mut fresh = SearchState::new(&program, 1000);
    fresh.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    let expected = fresh.canonical_residual();

    // snapshot route: extend with the antisymmetry partner, then rewind
    let mut st = SearchState::new(&program, 1000);
    st.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    let mark = st.snapshot();
    st.post(&user("geq", vec![y.clone(), x.clone()])).unwrap();
    st.run().unwrap();
    assert_eq!(st.resolve(&x), st.resolve(&y)); // antisymmetry bound them
    st.backtrack(&mark).unwrap();
    assert_eq!(st.canonical_residual(), expected);
    assert_ne!(st.resolve(&x), st.resolve(&y));
}

#[test]
fn committed_choice_removed_ids_never_rematch() {
    let program = mini_order_program();
    let mut st = SearchState::new(&program, 1000);
    let x = Term::Var(Var::fresh("x"));
    let y = Term::Var(Var::fresh("y"));
    st.post(&user("leq", vec![x.clone(), y.clone()])).unwrap();
    st.post(&user("geq", vec![y.clone(), x.clone()])).unwrap();
    let ms = st.match_heads(0);
    let removed_ids = ms[0].ids.clone();
    st.fire(0, &ms[0]).unwrap();
    for m in st.match_heads(0) {
        assert!(m.ids.iter().all(|id| !removed_ids.contains(id)));
    }
}

#[test]
fn dump_is_deterministic_and_shaped() {
    let program = mini_order_program();
    let d1 = program.dump();
    let d2 = program.dump();
    assert_eq!(d1, d2);
    assert!(d1.contains("antisymmetry @ A ≤ B, B ≥ A <=> A = B."));
    assert!(d1.contains("transitivity @ A ≤ B, B ≤ C ==> A ≠ B, B ≠ C | A ≤ C."));
}

#[test]
fn programs_are_shareable_across_threads() {
    fn assert_share<T: Send + Sync>() {}
    assert_share::<RuleProgram>();

    // two states over one shared program, run concurrently
    let program = std::sync::Arc::new(mini_order_program());
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let program = std::sync::Arc::clone(&program);
            std::thread::spawn(move || {
                let x = Term::Var(Var::fresh("X"));
                let goal = vec![user("pick", vec![x.clone()])];
                let r = solve(&program, &goal, SolveOptions::default()).unwrap();
                assert!(r.is_satisfiable());
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
}
