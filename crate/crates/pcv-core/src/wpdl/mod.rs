//! Workflow compilation (layer 4). The workflow-specific constraint
//! handler is empty: activity and transition constraints decompose
//! directly into kernel and logical constraints.

pub mod compile;

pub use compile::{compile_workflow, CompiledWorkflow, WfCompileOptions};
