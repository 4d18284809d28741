//! The live constraint store: bindings, trail, indexes, history.

use super::constraint::{Constraint, Kind};
use super::term::Term;
use std::collections::{HashMap, HashSet};

pub type ConstraintId = usize;

/// `(rule index, matched constraint ids)` — one propagation firing.
pub type HistKey = (usize, Vec<ConstraintId>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoreStatus {
    Active,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnifyOutcome {
    Bound,
    Clash,
}

#[derive(Debug)]
enum TrailEntry {
    Bind(u64),
    Add(ConstraintId),
    Remove(ConstraintId),
    History(HistKey),
    Fail,
}

#[derive(Debug)]
struct Slot {
    constraint: Constraint,
    alive: bool,
}

/// The store: live constraints indexed by functor/arity, the binding map,
/// the propagation history, and a trail making all of it reversible.
#[derive(Debug, Default)]
pub struct ConstraintStore {
    slots: Vec<Slot>,
    index: HashMap<(String, usize), Vec<ConstraintId>>,
    bindings: HashMap<u64, Term>,
    history: HashSet<HistKey>,
    trail: Vec<TrailEntry>,
    status_failed: bool,
    /// Variables bound since the last `take_touched`; the solver uses this
    /// to wake suspended constraints.
    touched: Vec<u64>,
}

impl ConstraintStore {
    pub fn new() -> Self {
        ConstraintStore { status_failed: false, ..Default::default() }
    }

    pub fn status(&self) -> StoreStatus {
        if self.status_failed {
            StoreStatus::Failed
        } else {
            StoreStatus::Active
        }
    }

    pub fn fail(&mut self) {
        if !self.status_failed {
            self.status_failed = true;
            self.trail.push(TrailEntry::Fail);
        }
    }

    pub fn trail_mark(&self) -> usize {
        self.trail.len()
    }

    /// Rewinds every store mutation past `mark`, in reverse order.
    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                TrailEntry::Bind(v) => {
                    self.bindings.remove(&v);
                }
                TrailEntry::Add(id) => {
                    self.slots[id].alive = false;
                    let key = key_of(&self.slots[id].constraint);
                    if let Some(ids) = self.index.get_mut(&key) {
                        if let Ok(pos) = ids.binary_search(&id) {
                            ids.remove(pos);
                        }
                    }
                }
                TrailEntry::Remove(id) => {
                    self.slots[id].alive = true;
                    let key = key_of(&self.slots[id].constraint);
                    let ids = self.index.entry(key).or_default();
                    if let Err(pos) = ids.binary_search(&id) {
                        ids.insert(pos, id);
                    }
                }
                TrailEntry::History(k) => {
                    self.history.remove(&k);
                }
                TrailEntry::Fail => {
                    self.status_failed = false;
                }
            }
        }
    }

    // --- constraints ----------------------------------------------------

    /// Adds a user-defined constraint. Returns `None` when the functor is
    /// flagged already-in-store and a syntactically identical live
    /// constraint (after dereferencing) exists.
    pub fn add(&mut self, constraint: Constraint, dedup: bool) -> Option<ConstraintId> {
        debug_assert_eq!(constraint.kind, Kind::UserDefined);
        if dedup {
            let probe = self.resolve_constraint(&constraint);
            let key = key_of(&constraint);
            if let Some(ids) = self.index.get(&key) {
                for id in ids {
                    let existing = self.resolve_constraint(&self.slots[*id].constraint);
                    if existing.args == probe.args && existing.time == probe.time {
                        return None;
                    }
                }
            }
        }
        let id = self.slots.len();
        let key = key_of(&constraint);
        self.slots.push(Slot { constraint, alive: true });
        self.index.entry(key).or_default().push(id); // ids ascend, stays sorted
        self.trail.push(TrailEntry::Add(id));
        Some(id)
    }

    pub fn remove(&mut self, id: ConstraintId) {
        if !self.slots[id].alive {
            return;
        }
        self.slots[id].alive = false;
        let key = key_of(&self.slots[id].constraint);
        if let Some(ids) = self.index.get_mut(&key) {
            if let Ok(pos) = ids.binary_search(&id) {
                ids.remove(pos);
            }
        }
        self.trail.push(TrailEntry::Remove(id));
    }

    pub fn is_live(&self, id: ConstraintId) -> bool {
        self.slots.get(id).map(|s| s.alive).unwrap_or(false)
    }

    pub fn get(&self, id: ConstraintId) -> &Constraint {
        &self.slots[id].constraint
    }

    /// Live constraint ids with this functor/arity, oldest first.
    pub fn live_ids(&self, functor: &str, arity: usize) -> &[ConstraintId] {
        self.index
            .get(&(functor.to_string(), arity))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// All live constraints, oldest first.
    pub fn live(&self) -> impl Iterator<Item = (ConstraintId, &Constraint)> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(id, s)| (id, &s.constraint))
    }

    pub fn live_count(&self) -> usize {
        self.slots.iter().filter(|s| s.alive).count()
    }

    // --- propagation history ---------------------------------------------

    pub fn history_contains(&self, key: &HistKey) -> bool {
        self.history.contains(key)
    }

    pub fn history_add(&mut self, key: HistKey) {
        if self.history.insert(key.clone()) {
            self.trail.push(TrailEntry::History(key));
        }
    }

    // --- bindings ----------------------------------------------------------

    pub fn binding(&self, var_id: u64) -> Option<&Term> {
        self.bindings.get(&var_id)
    }

    /// Follows variable bindings at the top level only.
    pub fn deref_root<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(&v.id) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Fully resolves a term through the binding map.
    pub fn resolve(&self, t: &Term) -> Term {
        let t = self.deref_root(t);
        match t {
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
            other => other.clone(),
        }
    }

    pub fn resolve_constraint(&self, c: &Constraint) -> Constraint {
        Constraint {
            kind: c.kind,
            functor: c.functor.clone(),
            args: c.args.iter().map(|a| self.resolve(a)).collect(),
            time: c.time.as_ref().map(|t| self.resolve(t)),
        }
    }

    /// Unifies two terms with occurs check, recording bindings on the
    /// trail. On clash the probe bindings are rewound and the store is
    /// left unchanged.
    pub fn unify(&mut self, a: &Term, b: &Term) -> UnifyOutcome {
        let mark = self.trail.len();
        let touched_mark = self.touched.len();
        if self.unify_inner(a, b) {
            UnifyOutcome::Bound
        } else {
            self.undo_to(mark);
            self.touched.truncate(touched_mark);
            UnifyOutcome::Clash
        }
    }

    fn unify_inner(&mut self, a: &Term, b: &Term) -> bool {
        let ra = self.deref_root(a).clone();
        let rb = self.deref_root(b).clone();
        match (&ra, &rb) {
            (Term::Var(x), Term::Var(y)) if x.id == y.id => true,
            (Term::Var(x), _) => self.bind(x.id, &rb),
            (_, Term::Var(y)) => self.bind(y.id, &ra),
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Str(x), Term::Str(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && {
                    let xs = xs.clone();
                    let ys = ys.clone();
                    xs.iter().zip(ys.iter()).all(|(x, y)| self.unify_inner(x, y))
                }
            }
            _ => false,
        }
    }

    fn bind(&mut self, var_id: u64, term: &Term) -> bool {
        if self.occurs(var_id, term) {
            return false;
        }
        self.bindings.insert(var_id, term.clone());
        self.trail.push(TrailEntry::Bind(var_id));
        self.touched.push(var_id);
        true
    }

    fn occurs(&self, var_id: u64, term: &Term) -> bool {
        match self.deref_root(term) {
            Term::Var(v) => v.id == var_id,
            Term::Compound(_, args) => {
                let args = args.clone();
                args.iter().any(|a| self.occurs(var_id, a))
            }
            _ => false,
        }
    }

    pub fn take_touched(&mut self) -> Vec<u64> {
        std::mem::take(&mut self.touched)
    }
}

fn key_of(c: &Constraint) -> (String, usize) {
    (c.functor.clone(), c.args.len())
}
