//! Parse diagnostics with source positions.

use std::fmt;
use thiserror::Error;

/// A parse or validation failure, positioned in the source text.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{file}:{line}:{col}: {kind}: {msg}")]
pub struct ParseError {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub kind: DiagKind,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagKind {
    Syntax,
    DuplicateName,
    MissingQueryRule,
    UnboundSet,
    UnboundName,
    CyclicRuleRef,
    MissingStartActivity,
    DanglingReference,
    CyclicGraph,
    LoopNotSupported,
    Invalid,
}

impl fmt::Display for DiagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagKind::Syntax => "syntax error",
            DiagKind::DuplicateName => "duplicate name",
            DiagKind::MissingQueryRule => "missing query rule",
            DiagKind::UnboundSet => "unbound set",
            DiagKind::UnboundName => "unbound name",
            DiagKind::CyclicRuleRef => "cyclic rule reference",
            DiagKind::MissingStartActivity => "missing start activity",
            DiagKind::DanglingReference => "dangling reference",
            DiagKind::CyclicGraph => "cyclic transition graph",
            DiagKind::LoopNotSupported => "loop activity not supported",
            DiagKind::Invalid => "invalid",
        };
        f.write_str(s)
    }
}

impl ParseError {
    pub fn new(file: &str, line: u32, col: u32, kind: DiagKind, msg: impl Into<String>) -> Self {
        ParseError { file: file.to_string(), line, col, kind, msg: msg.into() }
    }
}
