//! Compiling workflow models into rewrite rules.
//!
//! Each atomic activity becomes one simplification rule constraining its
//! enacting event: incoming-transition constraints, membership in the
//! event universe, actor in the performer set, action and target
//! equalities. Each transition becomes a pair of rules: `t_test` holds
//! the activation condition, `t` combines the test with the from-activity
//! on a fresh prior event ordered strictly earlier in time. In an
//! XOR-split priority list, a transition's test also negates the tests
//! ranked above it, via bridge rules that push the negation into the
//! condition. Dummy activities route their incoming constraints with no
//! event of their own; transitions leaving a dummy pass the current event
//! through instead of introducing a fresh one.

use crate::engine::dsl as d;
use crate::engine::rule::BodyItem;
use crate::engine::{FunctorDecl, HandlerPack, Term};
use pcv_model::spl::CmpOp;
use pcv_model::wpdl::{ActivityKind, JoinKind, Transition, WorkflowModel};

#[derive(Debug, Clone, Default)]
pub struct WfCompileOptions {
    /// When set, every atomic activity's rule also posts
    /// `<hook>(Event, Globals)`; the cross-consistency goal uses this to
    /// attach the policy check to every event the unrolling introduces.
    pub event_hook: Option<String>,
}

/// A compiled workflow: its rules plus the globals calling convention.
#[derive(Debug)]
pub struct CompiledWorkflow {
    pub pack: HandlerPack,
    pub globals_functor: String,
    /// Participant sets inside the globals wrapper, after `AllEvents`.
    pub participant_names: Vec<String>,
    /// Data object slots inside the globals wrapper, after participants.
    pub object_names: Vec<String>,
    /// Rules excluding the hook plumbing: activities + 2 × transitions +
    /// one negation bridge per non-final member of each priority list.
    pub expected_rule_count: usize,
}

pub fn compile_workflow(model: &WorkflowModel, opts: &WfCompileOptions) -> CompiledWorkflow {
    let globals_functor = format!("{}_globals", model.name);
    let cc = Compiler { model, opts, globals_functor: globals_functor.clone() };

    let mut rules = Vec::new();
    let mut declared = Vec::new();

    for activity in &model.activities {
        let mut body: Vec<BodyItem> = Vec::new();
        // incoming transitions, per the join discipline
        let incoming = model.incoming(&activity.name);
        match (&activity.join, incoming.len()) {
            (_, 0) => {}
            (JoinKind::And, _) => {
                for t in &incoming {
                    body.push(d::add(&t.name, vec![d::v("E#"), d::v("G#")]));
                }
            }
            (JoinKind::Xor, 1) => {
                body.push(d::add(&incoming[0].name, vec![d::v("E#"), d::v("G#")]));
            }
            (JoinKind::Xor, _) => {
                let branches: Vec<Vec<BodyItem>> = incoming
                    .iter()
                    .map(|t| vec![d::add(&t.name, vec![d::v("E#"), d::v("G#")])])
                    .collect();
                body.push(d::disj(branches));
            }
        }

        if let ActivityKind::Atomic { performer, action, target } = &activity.kind {
            body.push(cc.globals_destructure());
            body.push(d::unify(
                d::v("E#"),
                d::t(
                    "event",
                    vec![d::v("Actor#"), d::v("Action#"), d::v("Target#"), d::v("Pars#"), d::v("Time#")],
                ),
            ));
            body.push(d::add("in", vec![d::v("E#"), d::v("AE#")]));
            body.push(d::add("in", vec![d::v("Actor#"), d::v(&format!("p#{performer}"))]));
            body.push(d::unify(d::v("Action#"), crate::spl::value_term(action)));
            body.push(d::unify(d::v("Target#"), d::a(target)));
            if let Some(hook) = &opts.event_hook {
                body.push(d::add(hook, vec![d::v("E#"), d::v("G#")]));
            }
        }

        rules.push(d::simplification(
            &activity.name,
            vec![d::head(&activity.name, vec![d::v("E#"), d::v("G#")])],
            vec![],
            body,
        ));
        declared.push(FunctorDecl::new(activity.name.clone(), 2));
    }

    for transition in &model.transitions {
        let test_name = format!("{}_test", transition.name);

        // test rule: negations of higher-priority siblings, then the condition
        let mut test_body = vec![cc.globals_destructure()];
        test_body.extend(cc.data_destructures(transition));
        for prior in model.higher_priority_siblings(&transition.name) {
            test_body.push(d::add(
                "not",
                vec![d::t(&format!("{prior}_test"), vec![d::v("E#"), d::v("G#")])],
            ));
        }
        test_body.push(BodyItem::Call(cc.condition_term(transition)));
        rules.push(d::simplification(
            &test_name,
            vec![d::head(&test_name, vec![d::v("E#"), d::v("G#")])],
            vec![],
            test_body,
        ));
        declared.push(FunctorDecl::new(test_name.clone(), 2));

        // main rule: test + from-activity on an earlier event
        let mut main_body = vec![
            d::add(&test_name, vec![d::v("E#"), d::v("G#")]),
            cc.globals_destructure(),
        ];
        let from_is_dummy = matches!(
            model.activity(&transition.from).map(|a| &a.kind),
            Some(ActivityKind::Dummy)
        );
        if from_is_dummy {
            // routing only: the same event flows through
            main_body.push(d::add(&transition.from, vec![d::v("E#"), d::v("G#")]));
        } else {
            main_body.push(d::add(&transition.from, vec![d::v("PrevE#"), d::v("G#")]));
            main_body.push(d::unify(
                d::v("E#"),
                d::t("event", vec![d::v("W1#"), d::v("W2#"), d::v("W3#"), d::v("W4#"), d::v("T#")]),
            ));
            main_body.push(d::add("in", vec![d::v("E#"), d::v("AE#")]));
            main_body.push(d::unify(
                d::v("PrevE#"),
                d::t("event", vec![d::v("V1#"), d::v("V2#"), d::v("V3#"), d::v("V4#"), d::v("PrevT#")]),
            ));
            main_body.push(d::add("lt", vec![d::v("PrevT#"), d::v("T#")]));
        }
        rules.push(d::simplification(
            &transition.name,
            vec![d::head(&transition.name, vec![d::v("E#"), d::v("G#")])],
            vec![],
            main_body,
        ));
        declared.push(FunctorDecl::new(transition.name.clone(), 2));
    }

    // negation bridges for every test referenced under ¬
    let mut negated: Vec<&str> = Vec::new();
    for transition in &model.transitions {
        for prior in model.higher_priority_siblings(&transition.name) {
            if !negated.contains(&prior) {
                negated.push(prior);
            }
        }
    }
    let bridge_count = negated.len();
    for test in negated {
        let transition = model.transition(test).expect("priority lists reference transitions");
        let mut body = vec![cc.globals_destructure()];
        body.extend(cc.data_destructures(transition));
        body.push(d::add("not", vec![cc.condition_term(transition)]));
        rules.push(d::simplification(
            &format!("{test}_test_neg"),
            vec![d::head(
                "not",
                vec![d::t(&format!("{test}_test"), vec![d::v("E#"), d::v("G#")])],
            )],
            vec![],
            body,
        ));
    }

    let expected_rule_count = model.activities.len() + 2 * model.transitions.len() + bridge_count;
    CompiledWorkflow {
        pack: HandlerPack { name: format!("workflow:{}", model.name), rules, declared },
        globals_functor,
        participant_names: model.participants.iter().map(|p| p.name.clone()).collect(),
        object_names: model.objects.iter().map(|o| o.name.clone()).collect(),
        expected_rule_count,
    }
}

struct Compiler<'m> {
    model: &'m WorkflowModel,
    #[allow(dead_code)]
    opts: &'m WfCompileOptions,
    globals_functor: String,
}

impl<'m> Compiler<'m> {
    /// `G = globals(name_globals(AllEvents, participants…, objects…))`.
    fn globals_destructure(&self) -> BodyItem {
        let mut slots = vec![d::v("AE#")];
        slots.extend(self.model.participants.iter().map(|p| d::v(&format!("p#{}", p.name))));
        slots.extend(self.model.objects.iter().map(|o| d::v(&format!("o#{}", o.name))));
        d::unify(d::v("G#"), d::t("globals", vec![d::t(&self.globals_functor, slots)]))
    }

    /// Unifies each data object the condition mentions with its pattern,
    /// exposing the field variables.
    fn data_destructures(&self, transition: &Transition) -> Vec<BodyItem> {
        let mut items = Vec::new();
        let mut seen: Vec<&str> = Vec::new();
        if let Some(cond) = &transition.condition {
            for cmp in cond {
                let obj = self.model.field_object(&cmp.field).expect("validated");
                if !seen.contains(&obj.name.as_str()) {
                    seen.push(&obj.name);
                    let fields: Vec<Term> = obj.fields.iter().map(|f| d::v(&format!("f#{f}"))).collect();
                    items.push(d::unify(d::v(&format!("o#{}", obj.name)), d::t(&obj.functor, fields)));
                }
            }
        }
        items
    }

    /// The condition as a formula term (`true` when unconditional).
    fn condition_term(&self, transition: &Transition) -> Term {
        let Some(cond) = &transition.condition else {
            return d::a("true");
        };
        let mut terms: Vec<Term> = cond
            .iter()
            .map(|cmp| {
                let f = match cmp.op {
                    CmpOp::Eq => "eq",
                    CmpOp::Ne => "neq",
                    CmpOp::Lt => "lt",
                    CmpOp::Le => "leq",
                    CmpOp::Gt => "gt",
                    CmpOp::Ge => "geq",
                };
                d::t(f, vec![d::v(&format!("f#{}", cmp.field)), d::i(cmp.value)])
            })
            .collect();
        let mut out = terms.pop().expect("non-empty condition");
        while let Some(t) = terms.pop() {
            out = d::t("and", vec![t, out]);
        }
        out
    }
}
