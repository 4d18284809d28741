//! Ground events: fully instantiated points of the event universe.

use crate::value::Value;
use std::fmt;

/// One ground event `event(actor, action, target, pars, time)`.
///
/// Every field lies in the universe its [`crate::domain::DomainSpec`]
/// declares; `time` runs from 1 to the domain's horizon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundEvent {
    pub actor: Value,
    pub action: Value,
    pub target: Value,
    pub pars: Vec<Value>,
    pub time: i64,
}

impl fmt::Display for GroundEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event({}, {}, {}, [", self.actor, self.action, self.target)?;
        for (i, p) in self.pars.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "], {})", self.time)
    }
}
