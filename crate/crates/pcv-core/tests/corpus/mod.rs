//! Randomized but seed-deterministic test corpus: policies, domains and
//! workflows small enough for the exhaustive oracle.

use pcv_model::domain::DomainSpec;
use pcv_model::spl::{BoolExpr, CmpOp, EventProp, ParamSort, SplParam, SplPolicyModel, SplRuleExpr, ValExpr};
use pcv_model::value::Value;
use pcv_model::verdict::RuleTarget;
use pcv_model::wpdl::{
    Activity, ActivityKind, CondCmp, DataObject, JoinKind, Participant, ParticipantKind, SplitKind,
    Transition, WorkflowModel,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn gen_policy_case(rng: &mut ChaCha8Rng) -> (SplPolicyModel, DomainSpec) {
    let actors: Vec<Value> = (0..rng.gen_range(2..=4)).map(|i| Value::atom(format!("u{i}"))).collect();
    let actions: Vec<Value> = (0..rng.gen_range(2..=3)).map(|i| Value::str(format!("act{i}"))).collect();
    let targets: Vec<Value> = (0..rng.gen_range(2..=3)).map(|i| Value::atom(format!("t{i}"))).collect();
    let par_slots: Vec<Vec<Value>> = if rng.gen_bool(0.5) { vec![actors.clone()] } else { vec![] };
    let horizon = rng.gen_range(2..=3);

    let n_user_sets = rng.gen_range(1..=2);
    let n_object_sets = rng.gen_range(0..=1);
    let mut params = Vec::new();
    let mut sets = Vec::new();
    for i in 0..n_user_sets {
        let name = format!("Users{i}");
        params.push(SplParam { name: name.clone(), sort: ParamSort::UserSet });
        sets.push((name, random_subset(rng, &actors)));
    }
    for i in 0..n_object_sets {
        let name = format!("Objs{i}");
        params.push(SplParam { name: name.clone(), sort: ParamSort::ObjectSet });
        sets.push((name, random_subset(rng, &targets)));
    }

    let set_names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    let has_par = !par_slots.is_empty();
    let mut gen = ExprGen { rng, actors: &actors, actions: &actions, targets: &targets, set_names: &set_names, has_par, horizon };

    let n_named = gen.rng.gen_range(0..=2);
    let mut rules: Vec<(String, SplRuleExpr)> = Vec::new();
    for i in 0..n_named {
        let expr = gen.rule_expr(1, &[]);
        rules.push((format!("r{i}"), expr));
    }
    let named: Vec<String> = rules.iter().map(|(n, _)| n.clone()).collect();
    let query = gen.rule_expr(2, &named);
    rules.push(("main".to_string(), query));

    let model = SplPolicyModel {
        name: format!("Gen{}", gen.rng.gen_range(0..100000)),
        params,
        internal_sets: vec![],
        global_sets: vec![],
        rules,
        query_rule: "main".to_string(),
    };
    let domain = DomainSpec {
        name: "corpus".to_string(),
        actors,
        actions,
        targets,
        par_slots,
        horizon,
        sets,
        vals: vec![],
    };
    (model, domain)
}

/// Picks an addressable redundancy target of the policy.
pub fn pick_redundancy_target(rng: &mut ChaCha8Rng, model: &SplPolicyModel) -> RuleTarget {
    let named: Vec<&str> =
        model.rules.iter().map(|(n, _)| n.as_str()).filter(|n| *n != model.query_rule).collect();
    if !named.is_empty() && rng.gen_bool(0.5) {
        return RuleTarget::parse(named[rng.gen_range(0..named.len())]).unwrap();
    }
    match model.query() {
        SplRuleExpr::And(..) | SplRuleExpr::Or(..) => {
            RuleTarget::parse(if rng.gen_bool(0.5) { "query.left" } else { "query.right" }).unwrap()
        }
        SplRuleExpr::Not(..) | SplRuleExpr::ForAll { .. } | SplRuleExpr::Exists { .. } => {
            RuleTarget::parse("query.body").unwrap()
        }
        _ => RuleTarget::parse("query").unwrap(),
    }
}

fn random_subset(rng: &mut ChaCha8Rng, universe: &[Value]) -> Vec<Value> {
    let mut out: Vec<Value> = universe.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if out.is_empty() && rng.gen_bool(0.7) {
        out.push(universe[rng.gen_range(0..universe.len())].clone());
    }
    out
}

struct ExprGen<'a> {
    rng: &'a mut ChaCha8Rng,
    actors: &'a [Value],
    actions: &'a [Value],
    targets: &'a [Value],
    set_names: &'a [String],
    has_par: bool,
    horizon: i64,
}

impl<'a> ExprGen<'a> {
    fn rule_expr(&mut self, depth: usize, named: &[String]) -> SplRuleExpr {
        let composite = depth > 0 && self.rng.gen_bool(0.6);
        if !composite {
            return SplRuleExpr::Simple { domain: self.bool_expr(1, &[]), accept: self.bool_expr(1, &[]) };
        }
        match self.rng.gen_range(0..6) {
            0 => SplRuleExpr::And(
                Box::new(self.rule_expr(depth - 1, named)),
                Box::new(self.rule_expr(depth - 1, named)),
            ),
            1 => SplRuleExpr::Or(
                Box::new(self.rule_expr(depth - 1, named)),
                Box::new(self.rule_expr(depth - 1, named)),
            ),
            2 => SplRuleExpr::Not(Box::new(self.rule_expr(depth - 1, named))),
            3 if !self.set_names.is_empty() => {
                let set = self.set_names[self.rng.gen_range(0..self.set_names.len())].clone();
                let var = format!("v{depth}");
                let body = SplRuleExpr::Simple {
                    domain: self.bool_expr(1, std::slice::from_ref(&var)),
                    accept: self.bool_expr(1, std::slice::from_ref(&var)),
                };
                if self.rng.gen_bool(0.5) {
                    SplRuleExpr::ForAll { var, set, body: Box::new(body) }
                } else {
                    SplRuleExpr::Exists { var, set, body: Box::new(body) }
                }
            }
            4 if !named.is_empty() => {
                SplRuleExpr::Ref(named[self.rng.gen_range(0..named.len())].clone())
            }
            _ => SplRuleExpr::Simple { domain: self.bool_expr(1, &[]), accept: self.bool_expr(1, &[]) },
        }
    }

    fn bool_expr(&mut self, depth: usize, scope: &[String]) -> BoolExpr {
        if depth > 0 && self.rng.gen_bool(0.4) {
            return match self.rng.gen_range(0..3) {
                0 => BoolExpr::And(
                    Box::new(self.bool_expr(depth - 1, scope)),
                    Box::new(self.bool_expr(depth - 1, scope)),
                ),
                1 => BoolExpr::Or(
                    Box::new(self.bool_expr(depth - 1, scope)),
                    Box::new(self.bool_expr(depth - 1, scope)),
                ),
                _ => BoolExpr::Not(Box::new(self.bool_expr(depth - 1, scope))),
            };
        }
        match self.rng.gen_range(0..7) {
            0 => BoolExpr::Const(self.rng.gen_bool(0.7)),
            1 => BoolExpr::Cmp {
                op: CmpOp::Eq,
                lhs: ValExpr::Prop(EventProp::Action),
                rhs: ValExpr::Lit(self.actions[self.rng.gen_range(0..self.actions.len())].clone()),
            },
            2 => BoolExpr::Cmp {
                op: if self.rng.gen_bool(0.5) { CmpOp::Eq } else { CmpOp::Ne },
                lhs: ValExpr::Prop(EventProp::Target),
                rhs: ValExpr::Lit(self.targets[self.rng.gen_range(0..self.targets.len())].clone()),
            },
            3 => BoolExpr::Cmp {
                op: [CmpOp::Le, CmpOp::Lt, CmpOp::Ge][self.rng.gen_range(0..3)],
                lhs: ValExpr::Prop(EventProp::Time),
                rhs: ValExpr::Lit(Value::Int(self.rng.gen_range(1..=self.horizon))),
            },
            4 if !self.set_names.is_empty() => {
                let set = self.set_names[self.rng.gen_range(0..self.set_names.len())].clone();
                let elem = if !scope.is_empty() && self.rng.gen_bool(0.5) {
                    ValExpr::Name(scope[self.rng.gen_range(0..scope.len())].clone())
                } else if self.has_par && self.rng.gen_bool(0.4) {
                    ValExpr::Prop(EventProp::Par(1))
                } else {
                    ValExpr::Prop(EventProp::Author)
                };
                BoolExpr::In { elem, set }
            }
            5 if !scope.is_empty() => BoolExpr::Cmp {
                op: CmpOp::Eq,
                lhs: ValExpr::Name(scope[self.rng.gen_range(0..scope.len())].clone()),
                rhs: ValExpr::Prop(EventProp::Author),
            },
            _ => BoolExpr::Cmp {
                op: CmpOp::Eq,
                lhs: ValExpr::Prop(EventProp::Author),
                rhs: ValExpr::Lit(self.actors[self.rng.gen_range(0..self.actors.len())].clone()),
            },
        }
    }
}

// --- workflow cases ----------------------------------------------------------

pub fn gen_workflow_case(rng: &mut ChaCha8Rng) -> (SplPolicyModel, WorkflowModel, DomainSpec) {
    let actors: Vec<Value> = (0..rng.gen_range(2..=3)).map(|i| Value::atom(format!("u{i}"))).collect();
    let shape = rng.gen_range(0..3);
    let actions = ["start", "middle", "finish", "side"];

    let participant = |name: &str| Participant { name: name.to_string(), kind: ParticipantKind::Role };
    let atomic = |name: &str, performer: &str, action: &str, split: SplitKind| Activity {
        name: name.to_string(),
        kind: ActivityKind::Atomic {
            performer: performer.to_string(),
            action: Value::str(action),
            target: "obj".to_string(),
        },
        join: JoinKind::Xor,
        split,
    };
    let transition = |name: &str, from: &str, to: &str, cond: Option<Vec<CondCmp>>| Transition {
        name: name.to_string(),
        from: from.to_string(),
        to: to.to_string(),
        condition: cond,
    };

    let threshold = rng.gen_range(1..=3) * 100;
    let workflow = match shape {
        // plain chain
        0 => WorkflowModel {
            name: "Chain".to_string(),
            participants: vec![participant("P"), participant("Q")],
            objects: vec![],
            activities: vec![
                atomic("w0", "P", actions[0], SplitKind::And),
                atomic("w1", "Q", actions[1], SplitKind::And),
                atomic("w2", "P", actions[2], SplitKind::And),
            ],
            transitions: vec![transition("t0", "w0", "w1", None), transition("t1", "w1", "w2", None)],
            start: "w0".to_string(),
            ends: vec!["w2".to_string()],
        },
        // XOR split with a data condition and priority
        1 => WorkflowModel {
            name: "Branch".to_string(),
            participants: vec![participant("P"), participant("Q")],
            objects: vec![DataObject { name: "obj".to_string(), functor: "data".to_string(), fields: vec!["Amount".to_string()] }],
            activities: vec![
                atomic("w0", "P", actions[0], SplitKind::Xor(vec!["t0".to_string(), "t1".to_string()])),
                atomic("w1", "P", actions[1], SplitKind::And),
                atomic("w2", "Q", actions[2], SplitKind::And),
            ],
            transitions: vec![
                transition(
                    "t0",
                    "w0",
                    "w1",
                    Some(vec![CondCmp { field: "Amount".to_string(), op: CmpOp::Lt, value: threshold }]),
                ),
                transition("t1", "w0", "w2", None),
            ],
            start: "w0".to_string(),
            ends: vec!["w1".to_string(), "w2".to_string()],
        },
        // AND-join diamond
        _ => WorkflowModel {
            name: "Diamond".to_string(),
            participants: vec![participant("P"), participant("Q")],
            objects: vec![],
            activities: vec![
                atomic("w0", "P", actions[0], SplitKind::And),
                atomic("w1", "P", actions[1], SplitKind::And),
                atomic("w2", "Q", actions[3], SplitKind::And),
                Activity {
                    join: JoinKind::And,
                    ..atomic("w3", "P", actions[2], SplitKind::And)
                },
            ],
            transitions: vec![
                transition("t0", "w0", "w1", None),
                transition("t1", "w0", "w2", None),
                transition("t2", "w1", "w3", None),
                transition("t3", "w2", "w3", None),
            ],
            start: "w0".to_string(),
            ends: vec!["w3".to_string()],
        },
    };

    // participant sets: random non-empty actor subsets
    let mut sets = Vec::new();
    for p in &workflow.participants {
        let mut members = random_subset(rng, &actors);
        if members.is_empty() {
            members.push(actors[0].clone());
        }
        sets.push((p.name.clone(), members));
    }

    let horizon = match shape {
        2 => 4,
        _ => 3,
    };
    let used_actions: Vec<Value> =
        actions.iter().take(if shape == 2 { 4 } else { 3 }).map(|a| Value::str(*a)).collect();
    let domain = DomainSpec {
        name: "wf-corpus".to_string(),
        actors: actors.clone(),
        actions: used_actions.clone(),
        targets: vec![Value::atom("obj")],
        par_slots: vec![],
        horizon,
        sets,
        vals: vec![],
    };

    // a small policy: permissive, deny-one-action, or author-restricted
    let policy = match rng.gen_range(0..4) {
        0 => SplPolicyModel {
            name: "AllowAll".to_string(),
            params: vec![],
            internal_sets: vec![],
            global_sets: vec![],
            rules: vec![("q".to_string(), SplRuleExpr::Simple { domain: BoolExpr::Const(true), accept: BoolExpr::Const(true) })],
            query_rule: "q".to_string(),
        },
        1 => {
            let denied = used_actions[rng.gen_range(0..used_actions.len())].clone();
            SplPolicyModel {
                name: "DenyOne".to_string(),
                params: vec![],
                internal_sets: vec![],
                global_sets: vec![],
                rules: vec![(
                    "q".to_string(),
                    SplRuleExpr::Simple {
                        domain: BoolExpr::Cmp {
                            op: CmpOp::Eq,
                            lhs: ValExpr::Prop(EventProp::Action),
                            rhs: ValExpr::Lit(denied),
                        },
                        accept: BoolExpr::Const(false),
                    },
                )],
                query_rule: "q".to_string(),
            }
        }
        2 => {
            // only members of Insiders may act
            SplPolicyModel {
                name: "InsidersOnly".to_string(),
                params: vec![SplParam { name: "Insiders".to_string(), sort: ParamSort::UserSet }],
                internal_sets: vec![],
                global_sets: vec![],
                rules: vec![(
                    "q".to_string(),
                    SplRuleExpr::Simple {
                        domain: BoolExpr::Const(true),
                        accept: BoolExpr::In { elem: ValExpr::Prop(EventProp::Author), set: "Insiders".to_string() },
                    },
                )],
                query_rule: "q".to_string(),
            }
        }
        _ => {
            // everything must happen strictly before the horizon's end
            SplPolicyModel {
                name: "EarlyBird".to_string(),
                params: vec![],
                internal_sets: vec![],
                global_sets: vec![],
                rules: vec![(
                    "q".to_string(),
                    SplRuleExpr::Simple {
                        domain: BoolExpr::Const(true),
                        accept: BoolExpr::Cmp {
                            op: CmpOp::Le,
                            lhs: ValExpr::Prop(EventProp::Time),
                            rhs: ValExpr::Lit(Value::Int(rng.gen_range(1..=horizon))),
                        },
                    },
                )],
                query_rule: "q".to_string(),
            }
        }
    };

    let mut domain = domain;
    if policy.name == "InsidersOnly" {
        domain.sets.push(("Insiders".to_string(), random_subset(rng, &actors)));
    }
    (policy, workflow, domain)
}
