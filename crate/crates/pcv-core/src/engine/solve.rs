//! Two-phase committed-choice solving: saturation, then labeling, with
//! chronological backtracking over body disjunctions.
//!
//! Rules are tried in textual program order. The active constraint is the
//! oldest pending one; a firing that keeps the active constraint alive
//! re-queues it behind the constraints its body produced, so propagation
//! runs ahead of further rewriting of the same constraint. When the queue
//! drains the first time, the distinguished `labeling` constraint is added
//! and solving resumes, enabling the delayed disjunctive rules.

use super::constraint::{Constraint, Kind};
use super::rule::{BodyItem, ChrRule, GuardAtom, GuardTest, HeadPat, RuleProgram, LABELING};
use super::store::{ConstraintId, ConstraintStore, StoreStatus, UnifyOutcome};
use super::term::{Term, Var};
use super::EngineError;
use pcv_model::verdict::RunStats;
use std::collections::{HashMap, VecDeque};

pub type Env = HashMap<String, Term>;

/// One injective assignment of live constraints to a rule's heads.
#[derive(Clone, Debug)]
pub struct Match {
    pub env: Env,
    /// Matched constraint ids in head order (kept heads first).
    pub ids: Vec<ConstraintId>,
}

#[derive(Debug)]
struct ChoiceFrame {
    trail_mark: usize,
    pending: VecDeque<ConstraintId>,
    labeling: bool,
    env: Env,
    alternatives: Vec<Vec<BodyItem>>,
    continuation: Vec<BodyItem>,
}

/// Outcome of running a state to completion.
#[derive(Debug, PartialEq, Eq, Clone, Copy)]
pub enum RunOutcome {
    Satisfiable,
    Unsatisfiable,
    BudgetExhausted,
}

#[derive(Debug, PartialEq, Eq, Clone, Copy)]
pub enum FireOutcome {
    Fired,
    BudgetExhausted,
}

/// A snapshot of the search state; see [`SearchState::snapshot`].
#[derive(Debug, Clone)]
pub struct Mark {
    trail: usize,
    pending: VecDeque<ConstraintId>,
    labeling: bool,
    frames: usize,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A single-threaded solving state over a shared immutable program.
#[derive(Debug)]
pub struct SearchState<'p> {
    program: &'p RuleProgram,
    store: ConstraintStore,
    pending: VecDeque<ConstraintId>,
    frames: Vec<ChoiceFrame>,
    watchers: HashMap<u64, Vec<ConstraintId>>,
    budget_left: u64,
    labeling_added: bool,
    stats: RunStats,
}

impl<'p> SearchState<'p> {
    pub fn new(program: &'p RuleProgram, budget: u64) -> Self {
        SearchState {
            program,
            store: ConstraintStore::new(),
            pending: VecDeque::new(),
            frames: Vec::new(),
            watchers: HashMap::new(),
            budget_left: budget,
            labeling_added: false,
            stats: RunStats::default(),
        }
    }

    pub fn store(&self) -> &ConstraintStore {
        &self.store
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    pub fn labeling_active(&self) -> bool {
        self.labeling_added
    }

    /// Posts one goal constraint. Built-ins execute immediately;
    /// user-defined constraints enter the store and the pending queue.
    pub fn post(&mut self, c: &Constraint) -> Result<(), EngineError> {
        let mut env = Env::new();
        self.exec_items(vec![BodyItem::Add(c.clone())], &mut env)
    }

    /// Runs to a verdict: saturate, label, backtrack through choice points.
    pub fn run(&mut self) -> Result<RunOutcome, EngineError> {
        loop {
            if self.store.status() == StoreStatus::Failed {
                if !self.recover()? {
                    return Ok(RunOutcome::Unsatisfiable);
                }
                continue;
            }
            if let Some(cid) = self.pending.pop_front() {
                if !self.store.is_live(cid) {
                    continue;
                }
                if self.activate(cid)? == FireOutcome::BudgetExhausted {
                    return Ok(RunOutcome::BudgetExhausted);
                }
            } else if !self.labeling_added {
                self.labeling_added = true;
                let mut env = Env::new();
                self.exec_items(vec![BodyItem::Add(Constraint::user(LABELING, vec![]))], &mut env)?;
            } else {
                return Ok(RunOutcome::Satisfiable);
            }
        }
    }

    // --- public operations on rules ------------------------------------

    /// All injective head matches of `rules[rule_idx]` against the live
    /// store (one-way matching: rule variables bind, store terms do not).
    /// Propagation matches already in the history are excluded. Guards are
    /// not evaluated here.
    pub fn match_heads(&self, rule_idx: usize) -> Vec<Match> {
        let mut out = Vec::new();
        self.enumerate_matches(rule_idx, None, false, &mut |env, ids| {
            out.push(Match { env, ids });
            false // keep enumerating
        });
        out
    }

    /// Checks a rule's guard under a head match. `Some(env)` extends the
    /// match environment with guard-introduced bindings.
    pub fn check_guard(&self, rule: &ChrRule, m: &Match) -> Option<Env> {
        let mut env = m.env.clone();
        for atom in &rule.guard {
            if !self.eval_guard_atom(atom, &mut env) {
                return None;
            }
        }
        Some(env)
    }

    /// Fires a rule on a guard-passed match: removes the removed heads,
    /// records propagation history, executes the body.
    pub fn fire(&mut self, rule_idx: usize, m: &Match) -> Result<FireOutcome, EngineError> {
        let env = self
            .check_guard(self.program.rule(rule_idx), m)
            .ok_or_else(|| EngineError::program("fire: guard not entailed"))?;
        self.fire_at(rule_idx, env, &m.ids)
    }

    // --- snapshots ---------------------------------------------------------

    /// Captures the current search position. Backtracking to the mark
    /// restores constraints, bindings and propagation history exactly.
    pub fn snapshot(&self) -> Mark {
        Mark {
            trail: self.store.trail_mark(),
            pending: self.pending.clone(),
            labeling: self.labeling_added,
            frames: self.frames.len(),
        }
    }

    /// Rewinds to a snapshot. Marks are LIFO: a mark taken earlier on this
    /// state's lineage stays valid until backtracked past.
    pub fn backtrack(&mut self, mark: &Mark) -> Result<(), EngineError> {
        if mark.trail > self.store.trail_mark() || mark.frames > self.frames.len() {
            return Err(EngineError::program("stale snapshot: already backtracked past it"));
        }
        self.store.undo_to(mark.trail);
        self.frames.truncate(mark.frames);
        self.pending = mark.pending.clone();
        self.labeling_added = mark.labeling;
        Ok(())
    }

    // --- resolution helpers ----------------------------------------------

    pub fn resolve(&self, t: &Term) -> Term {
        self.store.resolve(t)
    }

    /// Live constraints, oldest first, fully resolved.
    pub fn residual(&self) -> Vec<Constraint> {
        self.store.live().map(|(_, c)| self.store.resolve_constraint(c)).collect()
    }

    /// Deterministic residual rendering: variables renumbered in order of
    /// first appearance, one line per constraint.
    pub fn canonical_residual(&self) -> Vec<String> {
        let mut names: HashMap<u64, usize> = HashMap::new();
        self.residual()
            .into_iter()
            .map(|c| {
                let c = Constraint {
                    kind: c.kind,
                    functor: c.functor.clone(),
                    args: c.args.iter().map(|a| canonicalize(a, &mut names)).collect(),
                    time: c.time.as_ref().map(|t| canonicalize(t, &mut names)),
                };
                c.to_string()
            })
            .collect()
    }

    // --- internals -------------------------------------------------------

    fn recover(&mut self) -> Result<bool, EngineError> {
        while let Some(mut frame) = self.frames.pop() {
            self.store.undo_to(frame.trail_mark);
            self.pending = frame.pending.clone();
            self.labeling_added = frame.labeling;
            if frame.alternatives.is_empty() {
                continue;
            }
            let branch = frame.alternatives.remove(0);
            let mut items = branch;
            items.extend(frame.continuation.iter().cloned());
            let mut env = frame.env.clone();
            if !frame.alternatives.is_empty() {
                self.frames.push(frame);
            }
            self.exec_items(items, &mut env)?;
            return Ok(true);
        }
        Ok(false)
    }

    fn activate(&mut self, cid: ConstraintId) -> Result<FireOutcome, EngineError> {
        let (functor, arity) = {
            let c = self.store.get(cid);
            (c.functor.clone(), c.args.len())
        };
        let occs = self.program.occurrences(&functor, arity);
        for occ in occs {
            if !self.store.is_live(cid) || self.store.status() == StoreStatus::Failed {
                return Ok(FireOutcome::Fired);
            }
            let mut found: Option<(Env, Vec<ConstraintId>)> = None;
            self.enumerate_matches(occ.rule_idx, Some((occ.pos, cid)), true, &mut |env, ids| {
                found = Some((env, ids));
                true // stop at first guarded match
            });
            if let Some((env, ids)) = found {
                // Re-queue the active constraint before firing: if it
                // survives, it is retried after the body's constraints
                // propagate, and choice frames snapshotted mid-body keep
                // it pending across backtracking. A dead entry is skipped
                // by the liveness check.
                self.pending.push_back(cid);
                match self.fire_at(occ.rule_idx, env, &ids)? {
                    FireOutcome::BudgetExhausted => return Ok(FireOutcome::BudgetExhausted),
                    FireOutcome::Fired => return Ok(FireOutcome::Fired),
                }
            }
        }
        Ok(FireOutcome::Fired)
    }

    /// Enumerates injective head matches of a rule, optionally pinning one
    /// head position to a specific constraint. `with_guard` additionally
    /// requires the guard to be entailed (the yielded env includes guard
    /// bindings). The callback returns `true` to stop.
    fn enumerate_matches(
        &self,
        rule_idx: usize,
        pinned: Option<(usize, ConstraintId)>,
        with_guard: bool,
        yield_fn: &mut dyn FnMut(Env, Vec<ConstraintId>) -> bool,
    ) {
        let rule = self.program.rule(rule_idx);
        let heads: Vec<&HeadPat> = rule.all_heads().collect();
        let mut ids: Vec<ConstraintId> = Vec::with_capacity(heads.len());
        let env = Env::new();
        self.match_position(rule_idx, rule, &heads, 0, pinned, with_guard, env, &mut ids, yield_fn);
    }

    #[allow(clippy::too_many_arguments)]
    fn match_position(
        &self,
        rule_idx: usize,
        rule: &ChrRule,
        heads: &[&HeadPat],
        pos: usize,
        pinned: Option<(usize, ConstraintId)>,
        with_guard: bool,
        env: Env,
        ids: &mut Vec<ConstraintId>,
        yield_fn: &mut dyn FnMut(Env, Vec<ConstraintId>) -> bool,
    ) -> bool {
        if pos == heads.len() {
            if rule.is_propagation() && self.store.history_contains(&(rule_idx, ids.clone())) {
                return false;
            }
            let final_env = if with_guard {
                let mut genv = env;
                for atom in &rule.guard {
                    if !self.eval_guard_atom(atom, &mut genv) {
                        return false;
                    }
                }
                genv
            } else {
                env
            };
            return yield_fn(final_env, ids.clone());
        }
        let head = heads[pos];
        match pinned {
            Some((p, cid)) if p == pos => {
                if ids.contains(&cid) || !self.store.is_live(cid) {
                    return false;
                }
                self.try_candidate(rule_idx, rule, heads, pos, cid, pinned, with_guard, &env, ids, yield_fn)
            }
            _ => {
                let candidates: Vec<ConstraintId> =
                    self.store.live_ids(&head.functor, head.args.len()).to_vec();
                for cid in candidates {
                    if ids.contains(&cid) {
                        continue;
                    }
                    if matches!(pinned, Some((_, p)) if p == cid) {
                        continue; // the pinned constraint is reserved for its position
                    }
                    if self.try_candidate(rule_idx, rule, heads, pos, cid, pinned, with_guard, &env, ids, yield_fn)
                    {
                        return true;
                    }
                }
                false
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn try_candidate(
        &self,
        rule_idx: usize,
        rule: &ChrRule,
        heads: &[&HeadPat],
        pos: usize,
        cid: ConstraintId,
        pinned: Option<(usize, ConstraintId)>,
        with_guard: bool,
        env: &Env,
        ids: &mut Vec<ConstraintId>,
        yield_fn: &mut dyn FnMut(Env, Vec<ConstraintId>) -> bool,
    ) -> bool {
        let head = heads[pos];
        let constraint = self.store.get(cid);
        let mut cand_env = env.clone();
        if !self.match_head(head, constraint, &mut cand_env) {
            return false;
        }
        ids.push(cid);
        let stop = self.match_position(rule_idx, rule, heads, pos + 1, pinned, with_guard, cand_env, ids, yield_fn);
        ids.pop();
        stop
    }

    fn match_head(&self, head: &HeadPat, constraint: &Constraint, env: &mut Env) -> bool {
        if head.functor != constraint.functor || head.args.len() != constraint.args.len() {
            return false;
        }
        match (&head.time, &constraint.time) {
            (None, None) => {}
            (Some(pt), Some(ct)) => {
                let resolved = self.store.resolve(ct);
                if !self.match_term(pt, &resolved, env) {
                    return false;
                }
            }
            _ => return false,
        }
        for (pat, arg) in head.args.iter().zip(constraint.args.iter()) {
            let resolved = self.store.resolve(arg);
            if !self.match_term(pat, &resolved, env) {
                return false;
            }
        }
        true
    }

    /// One-way matching: pattern variables bind (into `env`), store
    /// variables are rigid. `term` must be fully resolved.
    fn match_term(&self, pattern: &Term, term: &Term, env: &mut Env) -> bool {
        match pattern {
            Term::Var(v) if v.is_pattern() => match env.get(&v.name) {
                Some(bound) => self.store.resolve(bound) == *term,
                None => {
                    env.insert(v.name.clone(), term.clone());
                    true
                }
            },
            Term::Var(_) => self.store.resolve(pattern) == *term,
            Term::Atom(_) | Term::Int(_) | Term::Str(_) => pattern == term,
            Term::Compound(f, args) => match term {
                Term::Compound(g, targs) if f == g && args.len() == targs.len() => {
                    args.iter().zip(targs.iter()).all(|(p, t)| self.match_term(p, t, env))
                }
                _ => false,
            },
        }
    }

    // --- guards ----------------------------------------------------------

    fn eval_guard_atom(&self, atom: &GuardAtom, env: &mut Env) -> bool {
        let holds = self.eval_guard_test(&atom.test, env);
        holds != atom.negated
    }

    fn eval_guard_test(&self, test: &GuardTest, env: &mut Env) -> bool {
        let inst = |t: &Term, env: &Env| self.store.resolve(&instantiate_rigid(t, env));
        match test {
            GuardTest::True => true,
            GuardTest::Match(a, b) => {
                let ra = inst(a, env);
                let rb = inst(b, env);
                self.guard_match(&ra, &rb, env)
            }
            GuardTest::NotIdentical(a, b) => inst(a, env) != inst(b, env),
            GuardTest::Lt(a, b) => int_cmp(&inst(a, env), &inst(b, env), |x, y| x < y),
            GuardTest::Le(a, b) => int_cmp(&inst(a, env), &inst(b, env), |x, y| x <= y),
            GuardTest::Gt(a, b) => int_cmp(&inst(a, env), &inst(b, env), |x, y| x > y),
            GuardTest::Ge(a, b) => int_cmp(&inst(a, env), &inst(b, env), |x, y| x >= y),
            GuardTest::Ground(t) => inst(t, env).is_ground(),
            GuardTest::Integer(t) => matches!(inst(t, env), Term::Int(_)),
            GuardTest::IsList(t) => is_proper_list(&inst(t, env)),
            GuardTest::Member(x, l) => {
                let rx = inst(x, env);
                list_prefix(&inst(l, env)).0.contains(&rx)
            }
            GuardTest::NotMember(x, l) => {
                let rx = inst(x, env);
                !list_prefix(&inst(l, env)).0.contains(&rx)
            }
        }
    }

    /// Guard equality: may bind rule (pattern) variables, never store
    /// variables. Both sides are resolved against the store already.
    fn guard_match(&self, a: &Term, b: &Term, env: &mut Env) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x.is_pattern() && y.is_pattern() && x.name == y.name => true,
            (Term::Var(x), other) if x.is_pattern() => {
                env.insert(x.name.clone(), other.clone());
                true
            }
            (other, Term::Var(y)) if y.is_pattern() => {
                env.insert(y.name.clone(), other.clone());
                true
            }
            (Term::Var(x), Term::Var(y)) => x.id == y.id,
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Str(x), Term::Str(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(x, y)| {
                        let rx = self.store.resolve(&instantiate_rigid(x, env));
                        let ry = self.store.resolve(&instantiate_rigid(y, env));
                        self.guard_match(&rx, &ry, env)
                    })
            }
            _ => false,
        }
    }

    // --- firing ------------------------------------------------------------

    fn fire_at(&mut self, rule_idx: usize, env: Env, ids: &[ConstraintId]) -> Result<FireOutcome, EngineError> {
        if self.budget_left == 0 {
            return Ok(FireOutcome::BudgetExhausted);
        }
        self.budget_left -= 1;
        self.stats.firings += 1;

        let rule = self.program.rule(rule_idx);
        if rule.is_propagation() {
            self.store.history_add((rule_idx, ids.to_vec()));
        }
        let kept = rule.kept.len();
        let body = rule.body.clone();
        for id in &ids[kept..] {
            self.store.remove(*id);
        }
        let mut env = env;
        self.exec_items(body, &mut env)?;
        Ok(FireOutcome::Fired)
    }

    // --- body execution ----------------------------------------------------

    fn exec_items(&mut self, items: Vec<BodyItem>, env: &mut Env) -> Result<(), EngineError> {
        let mut work = items;
        let mut i = 0;
        while i < work.len() {
            if self.store.status() == StoreStatus::Failed {
                return Ok(());
            }
            match work[i].clone() {
                BodyItem::Add(c) => {
                    let constraint = self.instantiate_constraint(&c, env);
                    match constraint.kind {
                        Kind::UserDefined => self.add_user(constraint)?,
                        Kind::BuiltIn => {
                            if let Some(expansion) = self.exec_builtin(&constraint)? {
                                work = splice(expansion, &work[i + 1..]);
                                i = 0;
                                self.wake_touched();
                                continue;
                            }
                        }
                    }
                }
                BodyItem::Call(t) => {
                    let t = self.resolve(&instantiate(&t, env, &mut |n| fresh_local(n)));
                    let item = self.reflect(&t, None)?;
                    work = splice(vec![item], &work[i + 1..]);
                    i = 0;
                    self.wake_touched();
                    continue;
                }
                BodyItem::Apply { target, extra } => {
                    let target = self.resolve(&instantiate(&target, env, &mut |n| fresh_local(n)));
                    let extra: Vec<Term> =
                        extra.iter().map(|t| instantiate(t, env, &mut |n| fresh_local(n))).collect();
                    let constraint = self.apply_closure(&target, extra)?;
                    self.add_user(constraint)?;
                }
                BodyItem::Disjunction(branches) => {
                    let continuation: Vec<BodyItem> = work[i + 1..].to_vec();
                    if branches.is_empty() {
                        self.store.fail();
                        return Ok(());
                    }
                    let mut alternatives = branches;
                    let first = alternatives.remove(0);
                    if !alternatives.is_empty() {
                        self.stats.choice_points += 1;
                        self.frames.push(ChoiceFrame {
                            trail_mark: self.store.trail_mark(),
                            pending: self.pending.clone(),
                            labeling: self.labeling_added,
                            env: env.clone(),
                            alternatives,
                            continuation: continuation.clone(),
                        });
                    }
                    work = splice(first, &continuation);
                    i = 0;
                    continue;
                }
            }
            self.wake_touched();
            i += 1;
        }
        Ok(())
    }

    fn instantiate_constraint(&self, c: &Constraint, env: &mut Env) -> Constraint {
        Constraint {
            kind: c.kind,
            functor: c.functor.clone(),
            args: c.args.iter().map(|t| instantiate(t, env, &mut |n| fresh_local(n))).collect(),
            time: c.time.as_ref().map(|t| instantiate(t, env, &mut |n| fresh_local(n))),
        }
    }

    fn add_user(&mut self, c: Constraint) -> Result<(), EngineError> {
        let decl = self
            .program
            .decl(&c.functor, c.args.len())
            .ok_or_else(|| EngineError::program(format!("posting undeclared constraint {}/{}", c.functor, c.args.len())))?;
        if c.time.is_some() && !decl.timed {
            return Err(EngineError::program(format!("functor {} does not admit a time qualifier", c.functor)));
        }
        let dedup = decl.already_in_store;
        if let Some(id) = self.store.add(c, dedup) {
            self.register_watchers(id);
            self.pending.push_back(id);
        }
        Ok(())
    }

    /// Turns a term into a postable constraint: atoms `true`/`fail` are
    /// control, `@(C, T)` attaches a time qualifier, timeless `eq` is
    /// built-in equality, everything else is a user-defined constraint.
    fn reflect(&self, t: &Term, time: Option<Term>) -> Result<BodyItem, EngineError> {
        match t {
            Term::Atom(a) if a == "true" => Ok(BodyItem::Add(Constraint::builtin("true", vec![]))),
            Term::Atom(a) if a == "fail" => Ok(BodyItem::Add(Constraint::builtin("fail", vec![]))),
            Term::Atom(a) => Ok(BodyItem::Add(Constraint::user(a.clone(), vec![]).with_time(time))),
            Term::Compound(f, args) if f == "@" && args.len() == 2 => {
                let inner = self.resolve(&args[0]);
                self.reflect(&inner, Some(args[1].clone()))
            }
            Term::Compound(f, args) if f == "eq" && args.len() == 2 && time.is_none() => {
                Ok(BodyItem::Add(Constraint::builtin("=", args.clone())))
            }
            Term::Compound(f, args) => {
                Ok(BodyItem::Add(Constraint::user(f.clone(), args.clone()).with_time(time)))
            }
            Term::Var(v) => Err(EngineError::program(format!(
                "cannot post unbound variable {} as a constraint",
                Term::Var(v.clone())
            ))),
            other => Err(EngineError::program(format!("cannot post literal {other} as a constraint"))),
        }
    }

    fn apply_closure(&self, target: &Term, extra: Vec<Term>) -> Result<Constraint, EngineError> {
        match target {
            Term::Atom(f) => Ok(Constraint::user(f.clone(), extra)),
            Term::Compound(c, args) if c == "closure" && !args.is_empty() => match &args[0] {
                Term::Atom(f) => {
                    let mut all = args[1..].to_vec();
                    all.extend(extra);
                    Ok(Constraint::user(f.clone(), all))
                }
                other => Err(EngineError::program(format!("closure target must be an atom, got {other}"))),
            },
            other => Err(EngineError::program(format!("cannot apply non-closure term {other}"))),
        }
    }

    // --- built-ins --------------------------------------------------------

    /// Executes a built-in. `Some(items)` asks the caller to splice the
    /// returned body items in place of the built-in (used by `member`'s
    /// enumeration).
    fn exec_builtin(&mut self, c: &Constraint) -> Result<Option<Vec<BodyItem>>, EngineError> {
        let args: Vec<Term> = c.args.iter().map(|t| self.store.resolve(t)).collect();
        match (c.functor.as_str(), args.as_slice()) {
            ("true", []) => Ok(None),
            ("fail", []) => {
                self.store.fail();
                Ok(None)
            }
            ("=", [a, b]) => {
                if self.store.unify(a, b) == UnifyOutcome::Clash {
                    self.store.fail();
                }
                Ok(None)
            }
            ("neq", [a, b]) => {
                if a == b {
                    self.store.fail();
                } else if !(a.is_ground() && b.is_ground()) {
                    // not yet decidable: park it as a store constraint
                    self.add_user(Constraint::user("neq", vec![a.clone(), b.clone()]))?;
                }
                Ok(None)
            }
            ("lt", [a, b]) | ("leq", [a, b]) | ("gt", [a, b]) | ("geq", [a, b]) => {
                if !(a.is_ground() && b.is_ground()) {
                    return Err(EngineError::program(format!(
                        "built-in comparison {} on insufficiently instantiated terms",
                        Constraint::builtin(c.functor.clone(), args.clone())
                    )));
                }
                let ok = match (a.as_int(), b.as_int()) {
                    (Some(x), Some(y)) => match c.functor.as_str() {
                        "lt" => x < y,
                        "leq" => x <= y,
                        "gt" => x > y,
                        _ => x >= y,
                    },
                    _ => false, // order is defined on integers only
                };
                if !ok {
                    self.store.fail();
                }
                Ok(None)
            }
            ("ground", [t]) => {
                if !t.is_ground() {
                    self.store.fail();
                }
                Ok(None)
            }
            ("integer", [t]) => {
                if !matches!(t, Term::Int(_)) {
                    self.store.fail();
                }
                Ok(None)
            }
            ("is_list", [t]) => {
                if !is_proper_list(t) {
                    self.store.fail();
                }
                Ok(None)
            }
            ("length", [l, n]) => {
                let (elems, tail) = list_prefix(l);
                if tail.is_some() {
                    return Err(EngineError::program(format!("length on a non-closed list {l}")));
                }
                let len = Term::Int(elems.len() as i64);
                if self.store.unify(n, &len) == UnifyOutcome::Clash {
                    self.store.fail();
                }
                Ok(None)
            }
            ("member", [x, l]) => self.builtin_member(x, l),
            ("not_member", [x, l]) => {
                let (elems, _) = list_prefix(l);
                for e in elems {
                    if e == *x {
                        self.store.fail();
                        return Ok(None);
                    }
                    if !(e.is_ground() && x.is_ground()) {
                        self.add_user(Constraint::user("neq", vec![x.clone(), e.clone()]))?;
                    }
                }
                Ok(None)
            }
            ("cardinal", [l, n]) => {
                let bound = n
                    .as_int()
                    .ok_or_else(|| EngineError::program(format!("cardinal bound must be an integer, got {n}")))?;
                let (elems, _) = list_prefix(l);
                let mut distinct: Vec<&Term> = Vec::new();
                for e in &elems {
                    if !distinct.contains(&e) {
                        distinct.push(e);
                    }
                }
                if (distinct.len() as i64) > bound {
                    self.store.fail();
                }
                Ok(None)
            }
            _ => Err(EngineError::program(format!(
                "unknown built-in {}/{}",
                c.functor,
                c.args.len()
            ))),
        }
    }

    /// `member(X, L)`: on a closed list, a deterministic check when `X`
    /// appears, otherwise a choice point over the elements. On an open or
    /// unbound list, records `X` as a known member by extending the tail.
    fn builtin_member(&mut self, x: &Term, l: &Term) -> Result<Option<Vec<BodyItem>>, EngineError> {
        let (elems, tail) = list_prefix(l);
        if elems.contains(x) {
            return Ok(None);
        }
        match tail {
            None => {
                // closed list: enumerate
                if elems.is_empty() {
                    self.store.fail();
                    return Ok(None);
                }
                let branches: Vec<Vec<BodyItem>> = elems
                    .into_iter()
                    .map(|e| vec![BodyItem::Add(Constraint::builtin("=", vec![x.clone(), e]))])
                    .collect();
                Ok(Some(vec![BodyItem::Disjunction(branches)]))
            }
            Some(tail_var) => {
                // open list: append x, keeping the tail open
                let new_tail = Term::cons(x.clone(), Term::Var(Var::fresh("Tail")));
                if self.store.unify(&tail_var, &new_tail) == UnifyOutcome::Clash {
                    self.store.fail();
                }
                Ok(None)
            }
        }
    }

    // --- watchers ----------------------------------------------------------

    fn register_watchers(&mut self, id: ConstraintId) {
        let c = self.store.get(id);
        let mut vars = Vec::new();
        for a in &c.args {
            self.store.resolve(a).collect_var_ids(&mut vars);
        }
        if let Some(t) = &c.time {
            self.store.resolve(t).collect_var_ids(&mut vars);
        }
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            let entry = self.watchers.entry(v).or_default();
            if !entry.contains(&id) {
                entry.push(id);
            }
        }
    }

    fn wake_touched(&mut self) {
        let touched = self.store.take_touched();
        for v in touched {
            // Watcher lists are kept (not consumed): bindings can be
            // undone by backtracking, and a constraint must wake again
            // when the variable is re-bound on another branch.
            let ids = match self.watchers.get(&v) {
                Some(ids) => ids.clone(),
                None => continue,
            };
            for id in ids {
                if self.store.is_live(id) {
                    // pick up watchers for variables the new binding exposed
                    self.register_watchers(id);
                    if !self.pending.contains(&id) {
                        self.pending.push_back(id);
                    }
                }
            }
        }
    }
}

fn fresh_local(name: &str) -> Term {
    Term::Var(Var::fresh(name))
}

/// Instantiates a pattern: pattern variables resolve through `env`,
/// missing ones are created by `fresh` and recorded (body-locals are
/// fresh per firing and shared across the body).
fn instantiate(t: &Term, env: &mut Env, fresh: &mut dyn FnMut(&str) -> Term) -> Term {
    match t {
        Term::Var(v) if v.is_pattern() => match env.get(&v.name) {
            Some(bound) => bound.clone(),
            None => {
                let nv = fresh(&v.name);
                env.insert(v.name.clone(), nv.clone());
                nv
            }
        },
        Term::Var(_) | Term::Atom(_) | Term::Int(_) | Term::Str(_) => t.clone(),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| instantiate(a, env, fresh)).collect())
        }
    }
}

/// Instantiates without freshening: unresolved pattern variables stay as
/// they are (guards treat them as unbound rule variables).
fn instantiate_rigid(t: &Term, env: &Env) -> Term {
    match t {
        Term::Var(v) if v.is_pattern() => env.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
        Term::Var(_) | Term::Atom(_) | Term::Int(_) | Term::Str(_) => t.clone(),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| instantiate_rigid(a, env)).collect())
        }
    }
}

fn int_cmp(a: &Term, b: &Term, cmp: impl Fn(i64, i64) -> bool) -> bool {
    match (a.as_int(), b.as_int()) {
        (Some(x), Some(y)) => cmp(x, y),
        _ => false,
    }
}

fn is_proper_list(t: &Term) -> bool {
    let mut cur = t;
    loop {
        if cur.is_nil() {
            return true;
        }
        match cur.as_cons() {
            Some((_, tail)) => cur = tail,
            None => return false,
        }
    }
}

/// Splits a (possibly open) list into its known prefix and, if the list is
/// not closed, the term in tail position (a variable for open lists).
fn list_prefix(t: &Term) -> (Vec<Term>, Option<Term>) {
    let mut elems = Vec::new();
    let mut cur = t.clone();
    loop {
        if cur.is_nil() {
            return (elems, None);
        }
        match cur.clone().as_cons() {
            Some((h, t)) => {
                elems.push(h.clone());
                cur = t.clone();
            }
            None => return (elems, Some(cur)),
        }
    }
}

fn splice(head: Vec<BodyItem>, rest: &[BodyItem]) -> Vec<BodyItem> {
    let mut out = head;
    out.extend(rest.iter().cloned());
    out
}

fn canonicalize(t: &Term, names: &mut HashMap<u64, usize>) -> Term {
    match t {
        Term::Var(v) => {
            let next = names.len();
            let n = *names.entry(v.id).or_insert(next);
            Term::Var(Var { name: format!("G{n}"), id: 0 })
        }
        Term::Atom(_) | Term::Int(_) | Term::Str(_) => t.clone(),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| canonicalize(a, names)).collect())
        }
    }
}

// --- top-level solve ---------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: DEFAULT_BUDGET }
    }
}

/// Result of solving a goal.
#[derive(Debug)]
#[allow(clippy::large_enum_variant)] // constructed once per solve
pub enum SolveResult<'p> {
    /// First fully labeled consistent store.
    Satisfiable(Solution<'p>),
    Unsatisfiable(RunStats),
    BudgetExhausted(RunStats),
}

impl<'p> SolveResult<'p> {
    pub fn stats(&self) -> RunStats {
        match self {
            SolveResult::Satisfiable(s) => s.stats(),
            SolveResult::Unsatisfiable(st) | SolveResult::BudgetExhausted(st) => *st,
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        matches!(self, SolveResult::Satisfiable(_))
    }

    pub fn is_unsatisfiable(&self) -> bool {
        matches!(self, SolveResult::Unsatisfiable(_))
    }
}

/// A satisfiable final state: witness bindings plus the residual store.
#[derive(Debug)]
pub struct Solution<'p> {
    state: SearchState<'p>,
}

impl<'p> Solution<'p> {
    pub fn resolve(&self, t: &Term) -> Term {
        self.state.resolve(t)
    }

    pub fn residual(&self) -> Vec<Constraint> {
        self.state.residual()
    }

    pub fn canonical_residual(&self) -> Vec<String> {
        self.state.canonical_residual()
    }

    pub fn stats(&self) -> RunStats {
        self.state.stats()
    }
}

/// Solves a goal against a program: posts the goal constraints in order,
/// saturates, labels, and backtracks until a consistent store or
/// exhaustion.
pub fn solve<'p>(
    program: &'p RuleProgram,
    goal: &[Constraint],
    options: SolveOptions,
) -> Result<SolveResult<'p>, EngineError> {
    let mut state = SearchState::new(program, options.budget);
    for c in goal {
        state.post(c)?;
        if state.store().status() == StoreStatus::Failed {
            break; // recovery through choice points happens in run()
        }
    }
    match state.run()? {
        RunOutcome::Satisfiable => Ok(SolveResult::Satisfiable(Solution { state })),
        RunOutcome::Unsatisfiable => Ok(SolveResult::Unsatisfiable(state.stats())),
        RunOutcome::BudgetExhausted => Ok(SolveResult::BudgetExhausted(state.stats())),
    }
}
