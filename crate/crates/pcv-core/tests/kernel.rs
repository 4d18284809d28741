//! Kernel handler tests: the classic order/set examples, oracle
//! cross-checks, termination.

use pcv_core::engine::dsl::*;
use pcv_core::engine::{
    solve, BodyItem, Constraint, Kind, RuleProgram, SolveOptions, SolveResult, Term, Var,
};
use pcv_core::kernel::{
    build_cardinality_pack, build_order_equality_pack, build_set_pack, kernel_packs,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn kernel_program() -> RuleProgram {
    let packs = kernel_packs();
    let refs: Vec<&_> = packs.iter().collect();
    RuleProgram::compose(&refs).unwrap()
}

fn var(name: &str) -> Term {
    Term::Var(Var::fresh(name))
}

fn user(functor: &str, args: Vec<Term>) -> Constraint {
    Constraint::user(functor, args)
}

fn user_at(functor: &str, args: Vec<Term>, t: Term) -> Constraint {
    Constraint::user_at(functor, args, t)
}

fn run(program: &RuleProgram, goal: Vec<Constraint>) -> SolveResult<'_> {
    solve(program, &goal, SolveOptions::default()).unwrap()
}

// --- canonical kernel checks -----------------------------------------------

#[test]
fn leq_geq_pair_binds_equality() {
    let program = kernel_program();
    let (x, y) = (var("A"), var("B"));
    let goal = vec![user("leq", vec![x.clone(), y.clone()]), user("geq", vec![y.clone(), x.clone()])];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => {
            assert_eq!(sol.resolve(&x), sol.resolve(&y), "A and B must be bound together");
        }
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn leq_chain_derives_transitive_constraint() {
    let program = kernel_program();
    let (x, y, z) = (var("A"), var("B"), var("C"));
    let goal = vec![user("leq", vec![x.clone(), y.clone()]), user("leq", vec![y.clone(), z.clone()])];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => {
            let xr = sol.resolve(&x);
            let zr = sol.resolve(&z);
            assert!(
                sol.residual().iter().any(|c| c.functor == "leq" && c.args == vec![xr.clone(), zr.clone()]),
                "residual must contain A ≤ C: {:?}",
                sol.canonical_residual()
            );
        }
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn meet_membership_contradiction_fails() {
    let program = kernel_program();
    let (a, b, c, x) = (var("a"), var("b"), var("c"), var("x"));
    let goal = vec![
        user("meet", vec![c.clone(), a.clone(), b.clone()]),
        user("in", vec![x.clone(), c.clone()]),
        user("notin", vec![x, b]),
    ];
    assert!(run(&program, goal).is_unsatisfiable());
}

#[test]
fn meet_identity_binds_sets() {
    let program = kernel_program();
    let (a, c) = (var("a"), var("c"));
    let goal = vec![user("meet", vec![c.clone(), a.clone(), a.clone()])];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => assert_eq!(sol.resolve(&a), sol.resolve(&c)),
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn timed_equality_conflicts_with_strict_order() {
    let program = kernel_program();
    let (x, y, t) = (var("x"), var("y"), var("t"));
    let goal = vec![
        user_at("eq", vec![x.clone(), y.clone()], t.clone()),
        user_at("lt", vec![y, x], t),
    ];
    assert!(run(&program, goal).is_unsatisfiable());
}

#[test]
fn timed_equality_transitivity_propagates() {
    let program = kernel_program();
    let (x, y, z, t) = (var("x"), var("y"), var("z"), var("t"));
    let goal = vec![
        user_at("eq", vec![x.clone(), y.clone()], t.clone()),
        user_at("eq", vec![x.clone(), z.clone()], t.clone()),
    ];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => {
            let (yr, zr) = (sol.resolve(&y), sol.resolve(&z));
            let has = sol.residual().iter().any(|c| {
                c.functor == "eq"
                    && c.time.is_some()
                    && (c.args == vec![yr.clone(), zr.clone()] || c.args == vec![zr.clone(), yr.clone()])
            });
            assert!(has, "expected y = z @ t in {:?}", sol.canonical_residual());
        }
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn restriction_derives_predicate_and_membership() {
    let program = kernel_program();
    let (asrt, c, x) = (var("a"), var("c"), var("x"));
    let goal = vec![
        user("in", vec![x.clone(), c.clone()]),
        user("restr", vec![c.clone(), asrt.clone(), a("positive")]),
    ];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => {
            let (ar, xr) = (sol.resolve(&asrt), sol.resolve(&x));
            let res = sol.residual();
            assert!(res.iter().any(|cst| cst.functor == "rcall" && cst.args[1] == xr));
            assert!(res.iter().any(|cst| cst.functor == "in" && cst.args == vec![xr.clone(), ar.clone()]));
        }
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn cardinality_meet_bounds_propagate() {
    let program = kernel_program();
    let (a, b, c, na, nc) = (var("a"), var("b"), var("c"), var("na"), var("nc"));
    let goal = vec![
        user("card", vec![nc.clone(), c.clone()]),
        user("card", vec![na.clone(), a.clone()]),
        user("meet", vec![c, a, b]),
    ];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => {
            let (nar, ncr) = (sol.resolve(&na), sol.resolve(&nc));
            assert!(
                sol.residual().iter().any(|cst| cst.functor == "leq" && cst.args == vec![ncr.clone(), nar.clone()]),
                "expected |C| ≤ |A| in {:?}",
                sol.canonical_residual()
            );
        }
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn negative_cardinality_fails() {
    let program = kernel_program();
    let (s, n) = (var("s"), var("n"));
    let goal = vec![
        user("card", vec![n.clone(), s]),
        Constraint::builtin("=", vec![n, Term::Int(-1)]),
    ];
    assert!(run(&program, goal).is_unsatisfiable());
}

#[test]
fn cardinality_bound_rejects_two_distinct_members() {
    // brute-force justification: over any universe, no set of size ≤ 1
    // holds two distinct members
    let universe = ["v1", "v2"];
    let mut oracle_sat = false;
    for mask in 0u8..4 {
        let s: Vec<&str> = universe.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| *e).collect();
        if s.len() > 1 {
            continue;
        }
        for x in universe {
            for y in universe {
                if x != y && s.contains(&x) && s.contains(&y) {
                    oracle_sat = true;
                }
            }
        }
    }
    assert!(!oracle_sat);

    let program = kernel_program();
    let (s, n, x, y) = (var("s"), var("n"), var("x"), var("y"));
    let goal = vec![
        user("card", vec![n.clone(), s.clone()]),
        user("leq", vec![n, Term::Int(1)]),
        user("in", vec![x.clone(), s.clone()]),
        user("in", vec![y.clone(), s]),
        user("neq", vec![x, y]),
    ];
    assert!(run(&program, goal).is_unsatisfiable());
}

#[test]
fn defined_set_cardinality_uses_length() {
    let program = kernel_program();
    let n = var("n");
    let goal = vec![user("card", vec![n.clone(), list(vec![a("p"), a("q")])])];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => assert_eq!(sol.resolve(&n), Term::Int(2)),
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

#[test]
fn defined_set_membership_enumerates_at_labeling() {
    let program = kernel_program();
    let x = var("x");
    let s = list(vec![a("p"), a("q")]);
    let goal = vec![user("in", vec![x.clone(), s]), user("neq", vec![x.clone(), a("p")])];
    match run(&program, goal) {
        SolveResult::Satisfiable(sol) => assert_eq!(sol.resolve(&x), a("q")),
        other => panic!("expected satisfiable, got {other:?}"),
    }
}

// --- structural lint -------------------------------------------------------

#[test]
fn set_rules_never_add_set_relation_constraints() {
    fn scan(items: &[BodyItem]) {
        for item in items {
            match item {
                BodyItem::Add(c) if c.kind == Kind::UserDefined => {
                    assert!(
                        !matches!(c.functor.as_str(), "meet" | "union" | "restr"),
                        "rule body adds set-relation constraint {}",
                        c.functor
                    );
                }
                BodyItem::Disjunction(branches) => branches.iter().for_each(|b| scan(b)),
                _ => {}
            }
        }
    }
    for pack in [build_set_pack(), build_cardinality_pack()] {
        for rule in &pack.rules {
            scan(&rule.body);
        }
    }
}

// --- oracle cross-checks ---------------------------------------------------

#[derive(Clone, Copy, Debug)]
enum GroundOp {
    Lt,
    Leq,
    Gt,
    Geq,
    Neq,
}

#[test]
fn ground_order_goals_match_direct_evaluation() {
    let program = kernel_program();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let mut goal = Vec::new();
        let mut expected = true;
        for _ in 0..n {
            let a = rng.gen_range(-3i64..=3);
            let b = rng.gen_range(-3i64..=3);
            let op = match rng.gen_range(0..5) {
                0 => GroundOp::Lt,
                1 => GroundOp::Leq,
                2 => GroundOp::Gt,
                3 => GroundOp::Geq,
                _ => GroundOp::Neq,
            };
            expected &= match op {
                GroundOp::Lt => a < b,
                GroundOp::Leq => a <= b,
                GroundOp::Gt => a > b,
                GroundOp::Geq => a >= b,
                GroundOp::Neq => a != b,
            };
            let f = match op {
                GroundOp::Lt => "lt",
                GroundOp::Leq => "leq",
                GroundOp::Gt => "gt",
                GroundOp::Geq => "geq",
                GroundOp::Neq => "neq",
            };
            goal.push(user(f, vec![Term::Int(a), Term::Int(b)]));
        }
        let verdict = run(&program, goal).is_satisfiable();
        assert_eq!(verdict, expected, "ground goal disagreed with direct evaluation");
    }
}

/// A random set-constraint goal over 3 set variables and 4 elements.
#[derive(Clone, Debug)]
enum SetConstraint {
    In(usize, usize),
    NotIn(usize, usize),
    Meet(usize, usize, usize),
    Union(usize, usize, usize),
}

#[test]
fn set_goals_match_subset_enumeration() {
    const ELEMS: [&str; 4] = ["e0", "e1", "e2", "e3"];
    let program = kernel_program();
    let mut rng = ChaCha8Rng::seed_from_u64(23);

    for _ in 0..150 {
        let n = rng.gen_range(1..=6);
        let mut cs = Vec::new();
        for _ in 0..n {
            cs.push(match rng.gen_range(0..4) {
                0 => SetConstraint::In(rng.gen_range(0..4), rng.gen_range(0..3)),
                1 => SetConstraint::NotIn(rng.gen_range(0..4), rng.gen_range(0..3)),
                2 => SetConstraint::Meet(rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3)),
                _ => SetConstraint::Union(rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3)),
            });
        }

        // brute force over all subset assignments of the three sets
        let mut oracle_sat = false;
        'assignments: for m0 in 0u16..16 {
            for m1 in 0u16..16 {
                for m2 in 0u16..16 {
                    let masks = [m0, m1, m2];
                    let holds = cs.iter().all(|c| match *c {
                        SetConstraint::In(e, s) => masks[s] & (1 << e) != 0,
                        SetConstraint::NotIn(e, s) => masks[s] & (1 << e) == 0,
                        SetConstraint::Meet(c, a, b) => masks[c] == masks[a] & masks[b],
                        SetConstraint::Union(c, a, b) => masks[c] == masks[a] | masks[b],
                    });
                    if holds {
                        oracle_sat = true;
                        break 'assignments;
                    }
                }
            }
        }

        let sets: Vec<Term> = (0..3).map(|k| var(&format!("s{k}"))).collect();
        let goal: Vec<Constraint> = cs
            .iter()
            .map(|c| match *c {
                SetConstraint::In(e, s) => user("in", vec![a(ELEMS[e]), sets[s].clone()]),
                SetConstraint::NotIn(e, s) => user("notin", vec![a(ELEMS[e]), sets[s].clone()]),
                SetConstraint::Meet(c, x, y) => {
                    user("meet", vec![sets[c].clone(), sets[x].clone(), sets[y].clone()])
                }
                SetConstraint::Union(c, x, y) => {
                    user("union", vec![sets[c].clone(), sets[x].clone(), sets[y].clone()])
                }
            })
            .collect();
        let verdict = run(&program, goal).is_satisfiable();
        assert_eq!(verdict, oracle_sat, "set goal disagreed with enumeration: {cs:?}");
    }
}

// --- termination and coherence ----------------------------------------------

#[test]
fn randomized_kernel_goals_terminate_within_budget() {
    let program = kernel_program();
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut max_firings = 0u64;
    for _ in 0..1000 {
        let nvars = rng.gen_range(2..=12);
        let vars: Vec<Term> = (0..nvars).map(|k| var(&format!("x{k}"))).collect();
        let sets: Vec<Term> = (0..3).map(|k| var(&format!("s{k}"))).collect();
        let n = rng.gen_range(1..=10);
        let mut goal = Vec::new();
        for _ in 0..n {
            let pick = rng.gen_range(0..8);
            let x = vars[rng.gen_range(0..vars.len())].clone();
            let y = if rng.gen_bool(0.7) {
                vars[rng.gen_range(0..vars.len())].clone()
            } else {
                Term::Int(rng.gen_range(-2..=2))
            };
            let s = sets[rng.gen_range(0..sets.len())].clone();
            goal.push(match pick {
                0 => user("lt", vec![x, y]),
                1 => user("leq", vec![x, y]),
                2 => user("geq", vec![x, y]),
                3 => user("neq", vec![x, y]),
                4 => user("in", vec![x, s]),
                5 => user("notin", vec![x, s]),
                6 => user(
                    "meet",
                    vec![s, sets[rng.gen_range(0..sets.len())].clone(), sets[rng.gen_range(0..sets.len())].clone()],
                ),
                _ => user("card", vec![x, s]),
            });
        }
        let result = run(&program, goal);
        let stats = result.stats();
        assert!(
            !matches!(result, SolveResult::BudgetExhausted(_)),
            "kernel goal exhausted the budget"
        );
        max_firings = max_firings.max(stats.firings);
    }
    // cubic-scale cap for 12 variables, with generous constant
    assert!(max_firings <= 50_000, "firings {max_firings} above the v³-scale cap");
}

#[test]
fn timeless_goals_unaffected_by_timed_rules() {
    let full = kernel_program();
    let stripped_packs: Vec<_> = kernel_packs()
        .into_iter()
        .map(|mut p| {
            p.rules.retain(|r| r.all_heads().all(|h| h.time.is_none()));
            p
        })
        .collect();
    let refs: Vec<&_> = stripped_packs.iter().collect();
    let stripped = RuleProgram::compose(&refs).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for _ in 0..200 {
        let nvars = rng.gen_range(2..=6);
        let vars: Vec<Term> = (0..nvars).map(|k| var(&format!("x{k}"))).collect();
        let n = rng.gen_range(1..=6);
        let goal: Vec<Constraint> = (0..n)
            .map(|_| {
                let x = vars[rng.gen_range(0..vars.len())].clone();
                let y = if rng.gen_bool(0.6) {
                    vars[rng.gen_range(0..vars.len())].clone()
                } else {
                    Term::Int(rng.gen_range(-2..=2))
                };
                let f = ["lt", "leq", "geq", "gt", "neq"][rng.gen_range(0..5)];
                user(f, vec![x, y])
            })
            .collect();
        let v1 = run(&full, goal.clone()).is_satisfiable();
        let v2 = run(&stripped, goal).is_satisfiable();
        assert_eq!(v1, v2, "timed rules changed a timeless verdict");
    }
}

#[test]
fn order_goal_permutations_agree() {
    let program = kernel_program();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let vars: Vec<Term> = (0..4).map(|k| var(&format!("x{k}"))).collect();
        let n = rng.gen_range(2..=8);
        let base: Vec<Constraint> = (0..n)
            .map(|_| {
                let x = vars[rng.gen_range(0..vars.len())].clone();
                let y = vars[rng.gen_range(0..vars.len())].clone();
                let f = ["lt", "leq", "geq", "neq"][rng.gen_range(0..4)];
                user(f, vec![x, y])
            })
            .collect();
        let reference = run(&program, base.clone()).is_satisfiable();
        for _ in 0..10 {
            let mut shuffled = base.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(
                run(&program, shuffled).is_satisfiable(),
                reference,
                "verdict depends on goal order"
            );
        }
    }
}

#[test]
fn repeated_solves_are_alpha_equivalent() {
    let program = kernel_program();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let make_goal = |ids: &mut Vec<Term>, rng: &mut ChaCha8Rng| {
            // rebuild the same shape with fresh variables each run
            let n = ids.len();
            let mut goal = Vec::new();
            let mut r2 = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..n {
                let x = ids[r2.gen_range(0..n)].clone();
                let y = ids[r2.gen_range(0..n)].clone();
                let f = ["lt", "leq", "neq"][rng.gen_range(0..3)];
                goal.push(user(f, vec![x, y]));
            }
            goal
        };
        let shape_seed: u64 = rng.gen();
        let run_once = || {
            let mut r = ChaCha8Rng::seed_from_u64(shape_seed);
            let mut ids: Vec<Term> = (0..4).map(|k| var(&format!("x{k}"))).collect();
            let goal = make_goal(&mut ids, &mut r);
            match run(&program, goal) {
                SolveResult::Satisfiable(sol) => Some(sol.canonical_residual()),
                SolveResult::Unsatisfiable(_) => None,
                SolveResult::BudgetExhausted(_) => panic!("budget"),
            }
        };
        assert_eq!(run_once(), run_once(), "two identical solves diverged");
    }
}

#[test]
fn order_pack_dump_contains_the_classic_rules() {
    let pack = build_order_equality_pack();
    let program = RuleProgram::compose(&[&pack]).unwrap();
    let dump = program.dump();
    assert!(dump.contains("antisymmetry @ A ≤ B, B ≥ A <=> A = B."));
    assert!(dump.contains("leq_transitivity @ X ≤ Y, Y ≤ Z ==> X ≠ Y, Y ≠ Z | X ≤ Z."));
    assert!(dump.lines().count() > 80, "timed expansion should multiply the rule count");
}
