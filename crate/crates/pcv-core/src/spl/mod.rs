//! The security constraint handler and policy compiler (layers 3 and 4).

pub mod compile;
pub mod logic;
pub mod trilogic;

pub use compile::{compile_policy, value_term, CompileError, CompileOptions, CompiledPolicy};
pub use logic::build_logic_pack;
pub use trilogic::build_trilogic_pack;
