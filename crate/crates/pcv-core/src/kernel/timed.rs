//! Deriving timed rules from timeless ones.
//!
//! A timeless rule with `n` heads derives `2ⁿ−1` timed rules, one per
//! non-empty subset of heads carrying `@T` with a single shared time
//! variable. Bodies become `@T` throughout. Timed simplification rules
//! only remove the timed heads: the timeless heads that activated the rule
//! move to kept position, preserving the activation sequence of the
//! timeless rules.

use crate::engine::constraint::{Constraint, Kind};
use crate::engine::rule::{BodyItem, ChrRule, HeadPat};
use crate::engine::term::{Term, Var};
use crate::engine::EngineError;

/// The shared time variable; the name cannot collide with hand-written
/// rule variables.
fn time_var() -> Term {
    Term::Var(Var { name: "T*".to_string(), id: 0 })
}

/// Expands a timeless propagation or simplification rule into its `2ⁿ−1`
/// timed variants. Simpagation inputs are rejected; heads must be timeless.
pub fn timed_expand(rule: &ChrRule) -> Result<Vec<ChrRule>, EngineError> {
    if rule.head_count() == 0 {
        return Err(EngineError::program(format!("timed_expand: rule `{}` has no heads", rule.name)));
    }
    if !rule.is_propagation() && !rule.is_simplification() {
        return Err(EngineError::program(format!(
            "timed_expand: rule `{}` is a simpagation; the template covers propagation and simplification only",
            rule.name
        )));
    }
    if rule.all_heads().any(|h| h.time.is_some()) {
        return Err(EngineError::program(format!("timed_expand: rule `{}` is already timed", rule.name)));
    }

    let t = time_var();
    let heads: Vec<&HeadPat> = rule.all_heads().collect();
    let n = heads.len();
    let body: Vec<BodyItem> = rule.body.iter().map(|item| time_shift(item, &t)).collect();

    let mut out = Vec::with_capacity((1 << n) - 1);
    for mask in 1u32..(1 << n) {
        let timed_at = |i: usize| mask & (1 << i) != 0;
        let name = format!("{}_t{}", rule.name, mask);
        if rule.is_propagation() {
            let kept: Vec<HeadPat> = heads
                .iter()
                .enumerate()
                .map(|(i, h)| with_time(h, timed_at(i).then(|| t.clone())))
                .collect();
            out.push(ChrRule { name, kept, removed: vec![], guard: rule.guard.clone(), body: body.clone() });
        } else {
            let kept: Vec<HeadPat> =
                heads.iter().enumerate().filter(|(i, _)| !timed_at(*i)).map(|(_, h)| (*h).clone()).collect();
            let removed: Vec<HeadPat> = heads
                .iter()
                .enumerate()
                .filter(|(i, _)| timed_at(*i))
                .map(|(i, h)| with_time(h, timed_at(i).then(|| t.clone())))
                .collect();
            out.push(ChrRule { name, kept, removed, guard: rule.guard.clone(), body: body.clone() });
        }
    }
    Ok(out)
}

/// A rule followed by its timed variants.
pub fn with_timed_variants(rule: ChrRule) -> Vec<ChrRule> {
    let timed = timed_expand(&rule).expect("timeless propagation/simplification rule");
    let mut out = vec![rule];
    out.extend(timed);
    out
}

/// Expands a rule whose heads at `optional` positions (in kept-then-removed
/// order) carry an optional `@T` sharing the rule's time variable `T`; one
/// variant per subset, the empty subset being the rule as written.
pub fn expand_optional_times(rule: ChrRule, optional: &[usize]) -> Vec<ChrRule> {
    let t = Term::Var(Var { name: "T".to_string(), id: 0 });
    let mut out = Vec::with_capacity(1 << optional.len());
    for mask in 0u32..(1 << optional.len()) {
        let mut r = rule.clone();
        if mask != 0 {
            r.name = format!("{}_o{}", rule.name, mask);
        }
        for (bit, pos) in optional.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                let kept_len = r.kept.len();
                let head = if *pos < kept_len { &mut r.kept[*pos] } else { &mut r.removed[*pos - kept_len] };
                head.time = Some(t.clone());
            }
        }
        out.push(r);
    }
    out
}

fn with_time(h: &HeadPat, time: Option<Term>) -> HeadPat {
    HeadPat { functor: h.functor.clone(), args: h.args.clone(), time }
}

/// Applies `@T` to a body item: user-defined constraints gain the time
/// slot, built-in timeless equality becomes the timed equality constraint,
/// other built-ins are time-independent, and reflected calls wrap in `@`.
fn time_shift(item: &BodyItem, t: &Term) -> BodyItem {
    match item {
        BodyItem::Add(c) => match c.kind {
            Kind::UserDefined => BodyItem::Add(c.clone().with_time(Some(t.clone()))),
            Kind::BuiltIn if c.functor == "=" => {
                BodyItem::Add(Constraint::user_at("eq", c.args.clone(), t.clone()))
            }
            Kind::BuiltIn => BodyItem::Add(c.clone()),
        },
        BodyItem::Call(term) => BodyItem::Call(Term::compound("@", vec![term.clone(), t.clone()])),
        BodyItem::Apply { .. } => item.clone(),
        BodyItem::Disjunction(branches) => BodyItem::Disjunction(
            branches.iter().map(|b| b.iter().map(|i| time_shift(i, t)).collect()).collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::dsl::*;

    fn prop2() -> ChrRule {
        propagation(
            "trans",
            vec![head("leq", vec![v("X"), v("Y")]), head("leq", vec![v("Y"), v("Z")])],
            vec![],
            vec![add("leq", vec![v("X"), v("Z")])],
        )
    }

    fn simp3() -> ChrRule {
        simplification(
            "s3",
            vec![
                head("p", vec![v("X")]),
                head("q", vec![v("X")]),
                head("r", vec![v("X")]),
            ],
            vec![],
            vec![add("out", vec![v("X")]), unify(v("X"), v("X"))],
        )
    }

    /// Brute-force enumerator of the expected head/removal pattern: one
    /// entry per non-empty subset of head indices.
    fn expected_subsets(n: usize) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            out.push((0..n).map(|i| mask & (1 << i) != 0).collect());
        }
        out
    }

    #[test]
    fn counts_are_two_to_n_minus_one() {
        let one = simplification("s1", vec![head("p", vec![v("X")])], vec![], vec![add("q", vec![v("X")])]);
        assert_eq!(timed_expand(&one).unwrap().len(), 1);
        assert_eq!(timed_expand(&prop2()).unwrap().len(), 3);
        assert_eq!(timed_expand(&simp3()).unwrap().len(), 7);
    }

    #[test]
    fn propagation_heads_follow_subset_pattern() {
        let rules = timed_expand(&prop2()).unwrap();
        let subsets = expected_subsets(2);
        assert_eq!(rules.len(), subsets.len());
        for (rule, subset) in rules.iter().zip(subsets.iter()) {
            assert!(rule.removed.is_empty());
            for (h, timed) in rule.kept.iter().zip(subset.iter()) {
                assert_eq!(h.time.is_some(), *timed);
            }
            // body is timed throughout
            for item in &rule.body {
                match item {
                    BodyItem::Add(c) => assert!(c.time.is_some()),
                    other => panic!("unexpected body item {other:?}"),
                }
            }
        }
    }

    #[test]
    fn simplification_keeps_timeless_heads() {
        let rules = timed_expand(&simp3()).unwrap();
        let subsets = expected_subsets(3);
        for (rule, subset) in rules.iter().zip(subsets.iter()) {
            let timed_count = subset.iter().filter(|b| **b).count();
            assert_eq!(rule.removed.len(), timed_count);
            assert_eq!(rule.kept.len(), 3 - timed_count);
            assert!(rule.removed.iter().all(|h| h.time.is_some()));
            assert!(rule.kept.iter().all(|h| h.time.is_none()));
            // removed heads are exactly the subset-selected functors
            let removed: Vec<&str> = rule.removed.iter().map(|h| h.functor.as_str()).collect();
            let expected: Vec<&str> = ["p", "q", "r"]
                .iter()
                .zip(subset.iter())
                .filter(|(_, t)| **t)
                .map(|(f, _)| *f)
                .collect();
            assert_eq!(removed, expected);
        }
    }

    #[test]
    fn builtin_equality_becomes_timed_equality() {
        let rules = timed_expand(&simp3()).unwrap();
        let last = rules.last().unwrap();
        let has_timed_eq = last.body.iter().any(|i| match i {
            BodyItem::Add(c) => c.functor == "eq" && c.kind == Kind::UserDefined && c.time.is_some(),
            _ => false,
        });
        assert!(has_timed_eq);
    }

    #[test]
    fn zero_heads_and_simpagations_are_rejected() {
        let bad = ChrRule { name: "none".into(), kept: vec![], removed: vec![], guard: vec![], body: vec![] };
        assert!(timed_expand(&bad).is_err());
        let sp = simpagation(
            "sp",
            vec![head("p", vec![v("X")])],
            vec![head("q", vec![v("X")])],
            vec![],
            vec![],
        );
        assert!(timed_expand(&sp).is_err());
    }

    #[test]
    fn optional_time_expansion() {
        let r = simpagation(
            "subs",
            vec![head_at("eq", vec![v("X"), v("Y")], v("T"))],
            vec![head("leq", vec![v("Y"), v("X")])],
            vec![],
            vec![],
        );
        let variants = expand_optional_times(r, &[1]);
        assert_eq!(variants.len(), 2);
        assert!(variants[0].removed[0].time.is_none());
        assert_eq!(variants[1].removed[0].time, Some(v("T")));
    }
}
