//! Workflow model types.

use crate::spl::CmpOp;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParticipantKind {
    Person,
    Role,
    Application,
    OrgUnit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Participant {
    pub name: String,
    pub kind: ParticipantKind,
}

/// A named workflow data object with a symbolic data pattern, e.g.
/// `object Budget : budget(Cost)`. The object's name is the event-level
/// target; the pattern's fields are symbolic values constrained by
/// transition conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataObject {
    pub name: String,
    pub functor: String,
    pub fields: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinKind {
    And,
    Xor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitKind {
    And,
    /// Outgoing transitions tried in priority order; exactly one fires.
    Xor(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActivityKind {
    Atomic {
        performer: String,
        action: Value,
        /// Target object or plain atom; the event's target value is the name.
        target: String,
    },
    /// Routing-only activity with no event of its own.
    Dummy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Activity {
    pub name: String,
    pub kind: ActivityKind,
    pub join: JoinKind,
    pub split: SplitKind,
}

/// One conjunct of a transition condition: `field op literal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondCmp {
    pub field: String,
    pub op: CmpOp,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub from: String,
    pub to: String,
    /// Conjunction of comparisons; `None` is the unconditional else branch.
    pub condition: Option<Vec<CondCmp>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkflowModel {
    pub name: String,
    pub participants: Vec<Participant>,
    pub objects: Vec<DataObject>,
    pub activities: Vec<Activity>,
    pub transitions: Vec<Transition>,
    pub start: String,
    /// Completion is reaching any of these.
    pub ends: Vec<String>,
}

impl WorkflowModel {
    pub fn activity(&self, name: &str) -> Option<&Activity> {
        self.activities.iter().find(|a| a.name == name)
    }

    pub fn transition(&self, name: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.name == name)
    }

    pub fn object(&self, name: &str) -> Option<&DataObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn incoming(&self, activity: &str) -> Vec<&Transition> {
        self.transitions.iter().filter(|t| t.to == activity).collect()
    }

    pub fn outgoing(&self, activity: &str) -> Vec<&Transition> {
        self.transitions.iter().filter(|t| t.from == activity).collect()
    }

    /// The object declaring `field`, if any.
    pub fn field_object(&self, field: &str) -> Option<&DataObject> {
        self.objects.iter().find(|o| o.fields.iter().any(|f| f == field))
    }

    /// For a transition in an XOR-split priority list, the sibling
    /// transitions that outrank it (whose tests it must negate).
    pub fn higher_priority_siblings(&self, transition: &str) -> Vec<&str> {
        let Some(t) = self.transition(transition) else { return Vec::new() };
        match self.activity(&t.from).map(|a| &a.split) {
            Some(SplitKind::Xor(prio)) => prio
                .iter()
                .take_while(|n| n.as_str() != transition)
                .map(|n| n.as_str())
                .collect(),
            _ => Vec::new(),
        }
    }
}
