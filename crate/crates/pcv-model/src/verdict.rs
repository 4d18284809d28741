//! Goal verdicts, witnesses and reports.

use crate::event::GroundEvent;
use crate::spl::PathStep;
use std::fmt;
use std::time::Duration;

/// How unhandled events are treated when bridging tri-valued rule outcomes
/// to binary workflow constraints: `Close` denies them, `Open` allows them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assumption {
    Open,
    Close,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::Open => "open",
            Assumption::Close => "close",
        })
    }
}

/// Addresses the rule a redundancy goal replaces with a dummy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleTarget {
    /// A named, non-query rule.
    Named(String),
    /// A sub-expression of the query rule, e.g. `query.left.body`.
    QueryPath(Vec<PathStep>),
}

impl RuleTarget {
    /// Parses `name` or `query[.left|.right|.body]*`.
    pub fn parse(s: &str) -> Result<RuleTarget, String> {
        let mut parts = s.split('.');
        let head = parts.next().unwrap_or("");
        if head.is_empty() {
            return Err("empty redundancy target".to_string());
        }
        if head != "query" {
            if parts.next().is_some() {
                return Err(format!("path syntax is only valid on `query`, got `{s}`"));
            }
            return Ok(RuleTarget::Named(head.to_string()));
        }
        let mut path = Vec::new();
        for p in parts {
            path.push(match p {
                "left" => PathStep::Left,
                "right" => PathStep::Right,
                "body" => PathStep::Body,
                other => return Err(format!("unknown path step `{other}` (expected left, right or body)")),
            });
        }
        Ok(RuleTarget::QueryPath(path))
    }
}

impl fmt::Display for RuleTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTarget::Named(n) => f.write_str(n),
            RuleTarget::QueryPath(path) => {
                write!(f, "query")?;
                for p in path {
                    write!(f, ".{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// The inconsistency definition a goal run checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoalKind {
    Inapplicability,
    MonotonicDenial,
    MonotonicAcceptance,
    Redundancy(RuleTarget),
    WorkflowConsistency(Assumption),
}

impl fmt::Display for GoalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalKind::Inapplicability => f.write_str("inapplicability"),
            GoalKind::MonotonicDenial => f.write_str("monotonic-deny"),
            GoalKind::MonotonicAcceptance => f.write_str("monotonic-allow"),
            GoalKind::Redundancy(t) => write!(f, "redundancy={t}"),
            GoalKind::WorkflowConsistency(a) => write!(f, "wf-consistency/{a}"),
        }
    }
}

/// Ground evidence backing a verdict: the events of the solution found,
/// in time order for workflow traces, plus any residual symbolic
/// constraints rendered canonically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub events: Vec<GroundEvent>,
    pub residual: Vec<String>,
}

impl Witness {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty() && self.residual.is_empty()
    }
}

/// How a no-inconsistency verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    /// A concrete counter-witness was found.
    Witness,
    /// The full declared domain was enumerated.
    Exhausted,
}

impl fmt::Display for Search {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Search::Witness => "witness",
            Search::Exhausted => "exhausted",
        })
    }
}

/// Outcome of one goal run.
///
/// An `InconsistencyFound` with an empty witness is a proof by exhaustion
/// over the declared domain (e.g. "no event makes the policy applicable").
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    InconsistencyFound { witness: Witness },
    NoInconsistency { search: Search, witness: Option<Witness> },
    Error { diagnostic: String },
}

impl Verdict {
    pub fn is_inconsistency(&self) -> bool {
        matches!(self, Verdict::InconsistencyFound { .. })
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Verdict::Error { .. })
    }

    /// Verdict-level equality ignoring witnesses and diagnostics; the
    /// engine and the oracle must agree at this level.
    pub fn same_outcome(&self, other: &Verdict) -> bool {
        matches!(
            (self, other),
            (Verdict::InconsistencyFound { .. }, Verdict::InconsistencyFound { .. })
                | (Verdict::NoInconsistency { .. }, Verdict::NoInconsistency { .. })
                | (Verdict::Error { .. }, Verdict::Error { .. })
        )
    }
}

/// Solver effort counters for one goal run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub firings: u64,
    pub choice_points: u64,
}

/// One goal's result, ready for serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalReport {
    pub goal: GoalKind,
    pub policies: Vec<String>,
    pub workflow: Option<String>,
    pub domain: String,
    pub verdict: Verdict,
    pub stats: RunStats,
    /// Wall-clock time; reported in the human format only so that the
    /// structured format stays byte-deterministic.
    pub elapsed: Option<Duration>,
}

pub const REPORT_SCHEMA: &str = "pcv-report/1";

impl GoalReport {
    /// Stable structured rendering: fixed field order, no timing data.
    pub fn stable_text(&self) -> String {
        let mut s = String::new();
        push_line(&mut s, 0, &format!("goal {}", self.goal));
        push_line(&mut s, 1, &format!("policies: {}", join_or_dash(&self.policies)));
        push_line(&mut s, 1, &format!("workflow: {}", self.workflow.as_deref().unwrap_or("-")));
        push_line(&mut s, 1, &format!("domain: {}", self.domain));
        match &self.verdict {
            Verdict::InconsistencyFound { witness } => {
                push_line(&mut s, 1, "verdict: inconsistency");
                push_line(&mut s, 1, if witness.is_empty() { "search: exhausted" } else { "search: witness" });
                push_witness(&mut s, witness);
            }
            Verdict::NoInconsistency { search, witness } => {
                push_line(&mut s, 1, "verdict: no-inconsistency");
                push_line(&mut s, 1, &format!("search: {search}"));
                match witness {
                    Some(w) => push_witness(&mut s, w),
                    None => {
                        push_line(&mut s, 1, "witness: -");
                        push_line(&mut s, 1, "residual: -");
                    }
                }
            }
            Verdict::Error { diagnostic } => {
                push_line(&mut s, 1, "verdict: error");
                push_line(&mut s, 1, &format!("diagnostic: {diagnostic}"));
            }
        }
        push_line(
            &mut s,
            1,
            &format!("stats: firings={} choice_points={}", self.stats.firings, self.stats.choice_points),
        );
        s
    }

    /// Human-oriented rendering, free to include timing.
    pub fn human_text(&self) -> String {
        let headline = match &self.verdict {
            Verdict::InconsistencyFound { .. } => "INCONSISTENT",
            Verdict::NoInconsistency { .. } => "ok",
            Verdict::Error { .. } => "error",
        };
        let mut s = format!("[{headline}] {}", self.goal);
        if !self.policies.is_empty() {
            s.push_str(&format!("  policies: {}", self.policies.join("+")));
        }
        if let Some(w) = &self.workflow {
            s.push_str(&format!("  workflow: {w}"));
        }
        s.push('\n');
        match &self.verdict {
            Verdict::InconsistencyFound { witness } => {
                if witness.is_empty() {
                    s.push_str("  no solution over the declared domain (search exhausted)\n");
                } else {
                    for e in &witness.events {
                        s.push_str(&format!("  witness: {e}\n"));
                    }
                    for r in &witness.residual {
                        s.push_str(&format!("  residual: {r}\n"));
                    }
                }
            }
            Verdict::NoInconsistency { search, witness } => {
                s.push_str(&format!("  search: {search}\n"));
                if let Some(w) = witness {
                    for e in &w.events {
                        s.push_str(&format!("  witness: {e}\n"));
                    }
                    for r in &w.residual {
                        s.push_str(&format!("  residual: {r}\n"));
                    }
                }
            }
            Verdict::Error { diagnostic } => {
                s.push_str(&format!("  {diagnostic}\n"));
            }
        }
        s.push_str(&format!(
            "  firings: {}  choice points: {}",
            self.stats.firings, self.stats.choice_points
        ));
        if let Some(d) = self.elapsed {
            s.push_str(&format!("  elapsed: {}ms", d.as_millis()));
        }
        s.push('\n');
        s
    }
}

fn push_witness(s: &mut String, w: &Witness) {
    if w.events.is_empty() {
        push_line(s, 1, "witness: -");
    } else {
        let events: Vec<String> = w.events.iter().map(|e| e.to_string()).collect();
        push_line(s, 1, &format!("witness: {}", events.join("; ")));
    }
    if w.residual.is_empty() {
        push_line(s, 1, "residual: -");
    } else {
        push_line(s, 1, &format!("residual: {}", w.residual.join("; ")));
    }
}

fn push_line(s: &mut String, indent: usize, line: &str) {
    for _ in 0..indent {
        s.push_str("  ");
    }
    s.push_str(line);
    s.push('\n');
}

fn join_or_dash(items: &[String]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.join(", ")
    }
}

/// Renders a full run: schema header, run configuration, then each goal
/// report in command-line order.
pub fn render_stable_report(assumption: Assumption, budget: u64, reports: &[GoalReport]) -> String {
    let mut s = String::new();
    push_line(&mut s, 0, REPORT_SCHEMA);
    push_line(&mut s, 0, "run:");
    push_line(&mut s, 1, &format!("assumption: {assumption}"));
    push_line(&mut s, 1, &format!("budget: {budget}"));
    for r in reports {
        s.push_str(&r.stable_text());
    }
    push_line(&mut s, 0, "end");
    s
}
