//! Compiling parsed policies into rewrite rules.
//!
//! Each policy becomes one simplification rule whose head is
//! `name(Event, params…, Locals, Globals, R)`: the body destructures the
//! event, unpacks the locals/globals wrappers, and equates `R` with the
//! `r(D, A)` term compiled from the query rule. Composed rules chain
//! through `andr`/`orr`/`notr` constraints; quantifiers emit
//! `forallr`/`existsr` constraints over auxiliary rules (one per
//! quantifier site). An existential whose body's applicability domain
//! does not mention the quantified variable is Skolemized instead: a
//! fresh per-firing variable constrained into the set plus the
//! instantiated body.

use crate::engine::dsl as d;
use crate::engine::rule::{BodyItem, ChrRule};
use crate::engine::{FunctorDecl, HandlerPack, Term};
use pcv_model::spl::{BoolExpr, CmpOp, EventProp, ParamSort, SplPolicyModel, SplRuleExpr, ValExpr};
use pcv_model::value::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("policy `{policy}` references unknown rule `{rule}`")]
    UnknownRule { policy: String, rule: String },
}

#[derive(Debug, Clone)]
pub struct CompileOptions {
    /// Skolemize eligible existential quantifiers (non-empty set, domain
    /// independent of the variable). On by default; turn off to force the
    /// disjunctive unfolding everywhere.
    pub skolemize: bool,
    /// Set names known to be non-empty. `None` trusts every set (the
    /// caller vouches for the precondition); `Some` limits Skolemization
    /// to the listed sets — an empty set would make the Skolem membership
    /// fail where the unfolding yields the quantifier unit.
    pub nonempty_sets: Option<std::collections::HashSet<String>>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { skolemize: true, nonempty_sets: None }
    }
}

/// A compiled policy: its rules plus the head calling convention.
#[derive(Debug)]
pub struct CompiledPolicy {
    pub pack: HandlerPack,
    pub head_functor: String,
    /// Explicit parameters, in head order (between the event and Locals).
    pub param_names: Vec<String>,
    pub internal_set_names: Vec<String>,
    pub global_set_names: Vec<String>,
    pub locals_functor: String,
    pub globals_functor: String,
}

impl CompiledPolicy {
    pub fn head_arity(&self) -> usize {
        1 + self.param_names.len() + 3
    }
}

pub fn value_term(v: &Value) -> Term {
    match v {
        Value::Atom(a) => Term::atom(a.clone()),
        Value::Str(s) => Term::Str(s.clone()),
        Value::Int(n) => Term::Int(*n),
    }
}

pub fn compile_policy(model: &SplPolicyModel, opts: CompileOptions) -> Result<CompiledPolicy, CompileError> {
    let mut cc = Compiler {
        model,
        opts,
        aux_rules: Vec::new(),
        aux_decls: Vec::new(),
        counter: 0,
        max_par: max_par_index(model),
    };

    let (query_term, side_items) = cc.compile_rule_expr(model.query(), &[])?;

    let mut body = cc.event_prelude();
    body.push(d::unify(
        d::v("L#"),
        d::t("locals", vec![d::t(&cc.locals_functor(), cc.internal_set_vars())]),
    ));
    body.push(d::unify(
        d::v("G#"),
        d::t("globals", vec![d::t(&cc.globals_functor(), cc.global_set_vars())]),
    ));
    body.extend(side_items);
    body.push(d::unify(d::v("R#"), query_term));

    let mut head_args = vec![d::v("E#")];
    head_args.extend(model.params.iter().map(|p| d::v(&format!("p#{}", p.name))));
    head_args.push(d::v("L#"));
    head_args.push(d::v("G#"));
    head_args.push(d::v("R#"));

    let main = d::simplification(&model.name, vec![d::head(&model.name, head_args)], vec![], body);

    let mut rules = vec![main];
    rules.extend(cc.aux_rules);

    let mut declared = vec![FunctorDecl::new(model.name.clone(), 1 + model.params.len() + 3)];
    declared.extend(cc.aux_decls);

    Ok(CompiledPolicy {
        pack: HandlerPack { name: format!("policy:{}", model.name), rules, declared },
        head_functor: model.name.clone(),
        param_names: model.params.iter().map(|p| p.name.clone()).collect(),
        internal_set_names: model.internal_sets.iter().map(|(n, _)| n.clone()).collect(),
        global_set_names: model.global_sets.clone(),
        locals_functor: format!("{}_vars", model.name),
        globals_functor: format!("{}_globals", model.name),
    })
}

fn max_par_index(model: &SplPolicyModel) -> usize {
    fn walk_rule(e: &SplRuleExpr, max: &mut usize) {
        match e {
            SplRuleExpr::Simple { domain, accept } => {
                walk_bool(domain, max);
                walk_bool(accept, max);
            }
            SplRuleExpr::And(l, r) | SplRuleExpr::Or(l, r) => {
                walk_rule(l, max);
                walk_rule(r, max);
            }
            SplRuleExpr::Not(b) => walk_rule(b, max),
            SplRuleExpr::ForAll { body, .. } | SplRuleExpr::Exists { body, .. } => walk_rule(body, max),
            SplRuleExpr::Ref(_) => {}
        }
    }
    fn walk_bool(e: &BoolExpr, max: &mut usize) {
        match e {
            BoolExpr::Const(_) => {}
            BoolExpr::Not(b) => walk_bool(b, max),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                walk_bool(l, max);
                walk_bool(r, max);
            }
            BoolExpr::Cmp { lhs, rhs, .. } => {
                walk_val(lhs, max);
                walk_val(rhs, max);
            }
            BoolExpr::In { elem, .. } => walk_val(elem, max),
        }
    }
    fn walk_val(e: &ValExpr, max: &mut usize) {
        if let ValExpr::Prop(EventProp::Par(i)) = e {
            *max = (*max).max(*i);
        }
    }
    let mut max = 0;
    for (_, e) in &model.rules {
        walk_rule(e, &mut max);
    }
    max
}

struct Compiler<'m> {
    model: &'m SplPolicyModel,
    opts: CompileOptions,
    aux_rules: Vec<ChrRule>,
    aux_decls: Vec<FunctorDecl>,
    counter: usize,
    max_par: usize,
}

impl<'m> Compiler<'m> {
    fn locals_functor(&self) -> String {
        format!("{}_vars", self.model.name)
    }

    fn globals_functor(&self) -> String {
        format!("{}_globals", self.model.name)
    }

    fn internal_set_vars(&self) -> Vec<Term> {
        self.model.internal_sets.iter().map(|(n, _)| d::v(&format!("s#{n}"))).collect()
    }

    fn global_set_vars(&self) -> Vec<Term> {
        self.model.global_sets.iter().map(|n| d::v(&format!("g#{n}"))).collect()
    }

    /// Destructures the event term and extracts the used parameter slots.
    fn event_prelude(&self) -> Vec<BodyItem> {
        let mut items = vec![d::unify(
            d::v("E#"),
            d::t(
                "event",
                vec![d::v("Actor#"), d::v("Action#"), d::v("Target#"), d::v("Pars#"), d::v("Time#")],
            ),
        )];
        if self.max_par > 0 {
            let mut pat = d::v("ParsTail#");
            for i in (1..=self.max_par).rev() {
                pat = d::cons(d::v(&format!("par#{i}")), pat);
            }
            items.push(d::unify(d::v("Pars#"), pat));
        }
        items
    }

    /// The capture tuple every auxiliary rule receives: the event, all
    /// parameters, all set variables, plus the enclosing quantifier
    /// variables.
    fn capture_vars(&self, scope: &[(String, String)]) -> Vec<Term> {
        let mut caps = vec![d::v("E#")];
        caps.extend(self.model.params.iter().map(|p| d::v(&format!("p#{}", p.name))));
        caps.extend(self.internal_set_vars());
        caps.extend(self.global_set_vars());
        caps.extend(scope.iter().map(|(_, pv)| d::v(pv)));
        caps
    }

    fn compile_rule_expr(
        &mut self,
        expr: &SplRuleExpr,
        scope: &[(String, String)],
    ) -> Result<(Term, Vec<BodyItem>), CompileError> {
        match expr {
            SplRuleExpr::Simple { domain, accept } => {
                let dt = self.compile_bool(domain, scope);
                let at = self.compile_bool(accept, scope);
                Ok((d::t("r", vec![dt, at]), vec![]))
            }
            SplRuleExpr::And(l, r) | SplRuleExpr::Or(l, r) => {
                let combine = if matches!(expr, SplRuleExpr::And(..)) { "andr" } else { "orr" };
                let (tl, mut items) = self.compile_rule_expr(l, scope)?;
                let (tr, ir) = self.compile_rule_expr(r, scope)?;
                items.extend(ir);
                self.counter += 1;
                let rv = d::v(&format!("rr#{}", self.counter));
                items.push(d::add(combine, vec![tl, tr, rv.clone()]));
                Ok((rv, items))
            }
            SplRuleExpr::Not(b) => {
                let (tb, mut items) = self.compile_rule_expr(b, scope)?;
                self.counter += 1;
                let rv = d::v(&format!("rr#{}", self.counter));
                items.push(d::add("notr", vec![tb, rv.clone()]));
                Ok((rv, items))
            }
            SplRuleExpr::Ref(name) => {
                let target = self.model.rule(name).ok_or_else(|| CompileError::UnknownRule {
                    policy: self.model.name.clone(),
                    rule: name.clone(),
                })?;
                self.compile_rule_expr(target, scope)
            }
            SplRuleExpr::ForAll { var, set, body } => self.compile_quantifier("forallr", var, set, body, scope),
            SplRuleExpr::Exists { var, set, body } => {
                if self.opts.skolemize && self.set_nonempty(set) && !self.domain_mentions(body, var) {
                    self.compile_skolemized(var, set, body, scope)
                } else {
                    self.compile_quantifier("existsr", var, set, body, scope)
                }
            }
        }
    }

    fn compile_quantifier(
        &mut self,
        q: &str,
        var: &str,
        set: &str,
        body: &SplRuleExpr,
        scope: &[(String, String)],
    ) -> Result<(Term, Vec<BodyItem>), CompileError> {
        self.counter += 1;
        let n = self.counter;
        let aux_functor = format!("{}_q{n}", self.model.name);
        let qvar_name = format!("q#{var}#{n}");

        let mut inner_scope = scope.to_vec();
        inner_scope.push((var.to_string(), qvar_name.clone()));
        let (body_term, body_items) = self.compile_rule_expr(body, &inner_scope)?;

        // aux rule: aux(captures…, X, R) <=> destructure, body, R = term
        let mut head_args = self.capture_vars(scope);
        head_args.push(d::v(&qvar_name));
        head_args.push(d::v("Rq#"));
        let arity = head_args.len();
        let mut aux_body = self.event_prelude();
        aux_body.extend(body_items);
        aux_body.push(d::unify(d::v("Rq#"), body_term));
        self.aux_rules.push(d::simplification(&aux_functor, vec![d::head(&aux_functor, head_args)], vec![], aux_body));
        self.aux_decls.push(FunctorDecl::new(aux_functor.clone(), arity));

        let mut closure_args = vec![d::a(&aux_functor)];
        closure_args.extend(self.capture_vars(scope));
        let closure = d::t("closure", closure_args);
        let rv = d::v(&format!("rr#{n}"));
        let item = d::add(q, vec![self.set_term(set, scope), closure, rv.clone()]);
        Ok((rv, vec![item]))
    }

    /// `EXIST x IN S { body }` with `x` absent from the body's domain
    /// expressions: a fresh per-firing variable `c` with `c ∈ S` plus the
    /// body instantiated at `c`.
    fn compile_skolemized(
        &mut self,
        var: &str,
        set: &str,
        body: &SplRuleExpr,
        scope: &[(String, String)],
    ) -> Result<(Term, Vec<BodyItem>), CompileError> {
        self.counter += 1;
        let skolem = format!("sk#{var}#{}", self.counter);
        let mut inner_scope = scope.to_vec();
        inner_scope.push((var.to_string(), skolem.clone()));
        let (body_term, body_items) = self.compile_rule_expr(body, &inner_scope)?;
        let mut items = vec![d::add("in", vec![d::v(&skolem), self.set_term(set, scope)])];
        items.extend(body_items);
        Ok((body_term, items))
    }

    /// Whether the rule's applicability domain mentions the variable.
    fn domain_mentions(&self, expr: &SplRuleExpr, var: &str) -> bool {
        match expr {
            SplRuleExpr::Simple { domain, .. } => bool_mentions(domain, var),
            SplRuleExpr::And(l, r) | SplRuleExpr::Or(l, r) => {
                self.domain_mentions(l, var) || self.domain_mentions(r, var)
            }
            SplRuleExpr::Not(b) => self.domain_mentions(b, var),
            SplRuleExpr::ForAll { var: inner, body, .. } | SplRuleExpr::Exists { var: inner, body, .. } => {
                inner != var && self.domain_mentions(body, var)
            }
            SplRuleExpr::Ref(name) => {
                self.model.rule(name).map(|e| self.domain_mentions(e, var)).unwrap_or(false)
            }
        }
    }

    fn set_nonempty(&self, set: &str) -> bool {
        match &self.opts.nonempty_sets {
            None => true,
            Some(known) => known.contains(set),
        }
    }

    fn set_term(&self, set: &str, scope: &[(String, String)]) -> Term {
        // scope variables never name sets; resolution is by declaration kind
        let _ = scope;
        if self.model.params.iter().any(|p| p.name == set && p.sort != ParamSort::Value) {
            d::v(&format!("p#{set}"))
        } else if self.model.internal_sets.iter().any(|(n, _)| n == set) {
            d::v(&format!("s#{set}"))
        } else {
            d::v(&format!("g#{set}"))
        }
    }

    fn compile_bool(&self, expr: &BoolExpr, scope: &[(String, String)]) -> Term {
        match expr {
            BoolExpr::Const(true) => d::a("true"),
            BoolExpr::Const(false) => d::a("fail"),
            BoolExpr::Not(b) => d::t("not", vec![self.compile_bool(b, scope)]),
            BoolExpr::And(l, r) => {
                d::t("and", vec![self.compile_bool(l, scope), self.compile_bool(r, scope)])
            }
            BoolExpr::Or(l, r) => {
                d::t("or", vec![self.compile_bool(l, scope), self.compile_bool(r, scope)])
            }
            BoolExpr::Cmp { op, lhs, rhs } => {
                let f = match op {
                    CmpOp::Eq => "eq",
                    CmpOp::Ne => "neq",
                    CmpOp::Lt => "lt",
                    CmpOp::Le => "leq",
                    CmpOp::Gt => "gt",
                    CmpOp::Ge => "geq",
                };
                d::t(f, vec![self.compile_val(lhs, scope), self.compile_val(rhs, scope)])
            }
            BoolExpr::In { elem, set } => {
                d::t("in", vec![self.compile_val(elem, scope), self.set_term(set, scope)])
            }
        }
    }

    fn compile_val(&self, expr: &ValExpr, scope: &[(String, String)]) -> Term {
        match expr {
            ValExpr::Lit(value) => value_term(value),
            ValExpr::Prop(p) => match p {
                EventProp::Author => d::v("Actor#"),
                EventProp::Action => d::v("Action#"),
                EventProp::Target => d::v("Target#"),
                EventProp::Time => d::v("Time#"),
                EventProp::Par(i) => d::v(&format!("par#{i}")),
            },
            ValExpr::Name(n) => {
                if let Some((_, pv)) = scope.iter().rev().find(|(name, _)| name == n) {
                    d::v(pv)
                } else {
                    d::v(&format!("p#{n}"))
                }
            }
        }
    }
}

fn bool_mentions(expr: &BoolExpr, var: &str) -> bool {
    match expr {
        BoolExpr::Const(_) => false,
        BoolExpr::Not(b) => bool_mentions(b, var),
        BoolExpr::And(l, r) | BoolExpr::Or(l, r) => bool_mentions(l, var) || bool_mentions(r, var),
        BoolExpr::Cmp { lhs, rhs, .. } => val_mentions(lhs, var) || val_mentions(rhs, var),
        BoolExpr::In { elem, .. } => val_mentions(elem, var),
    }
}

fn val_mentions(expr: &ValExpr, var: &str) -> bool {
    matches!(expr, ValExpr::Name(n) if n == var)
}
