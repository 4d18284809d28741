//! The workflow-subset description language: model and parser.
//!
//! Workflows are built from activities, participants and transitions.
//! Atomic activities are performed by a participant and enacted by events;
//! dummy activities route control flow; transitions carry activation
//! conditions over symbolic workflow data and order the enacting events in
//! time. Split and join properties (AND/XOR) say whether an activity
//! activates all or one outgoing transition and requires all or one
//! incoming transition.

pub mod ast;
pub mod parser;

pub use ast::{
    Activity, ActivityKind, CondCmp, DataObject, JoinKind, Participant, ParticipantKind, SplitKind,
    Transition, WorkflowModel,
};
pub use parser::parse_workflow;
