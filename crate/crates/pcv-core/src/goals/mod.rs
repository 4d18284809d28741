//! Layer 5: the inconsistency goals.

pub mod packs;
pub mod runner;

pub use packs::{build_diff_pack, build_goal_support_pack, build_open_close_pack};
pub use runner::{
    all_events_term, event_term, goal_inapplicability, goal_monotonic_acceptance,
    goal_monotonic_denial, goal_rule_redundancy, goal_workflow_consistency, run_goal, term_event,
    GoalError, GoalSetup,
};
