//! Runtime values shared by the interpreter, the scheduler and the
//! concurrent runtime.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Identity of an active object. Actor identities reuse the id of the
/// actor's initial object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjId(pub u64);

impl ObjId {
    /// The anonymous object running `main`, which is also the identity of
    /// the anonymous actor.
    pub const ANONYMOUS: ObjId = ObjId(0);

    pub fn is_anonymous(self) -> bool {
        self == Self::ANONYMOUS
    }
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_anonymous() {
            f.write_str("_")
        } else {
            write!(f, "o{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FutId(pub u64);

impl fmt::Display for FutId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// A runtime value. Equality is structural: integers compare by value,
/// references by identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Null,
    Obj(ObjId),
    Actor(ObjId),
    Fut(FutId),
    /// The unresolved marker (⊥).
    Undefined,
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Bool(_) => "Bool",
            Value::Int(_) => "Int",
            Value::Null => "null",
            Value::Obj(_) => "object",
            Value::Actor(_) => "actor",
            Value::Fut(_) => "future",
            Value::Undefined => "undefined",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Null => f.write_str("null"),
            Value::Obj(o) => write!(f, "{o}"),
            Value::Actor(o) => write!(f, "actor {o}"),
            Value::Fut(fu) => write!(f, "{fu}"),
            Value::Undefined => f.write_str("⊥"),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<i32> for Value {
    fn from(i: i32) -> Self {
        Value::Int(i64::from(i))
    }
}

impl From<u32> for Value {
    fn from(i: u32) -> Self {
        Value::Int(i64::from(i))
    }
}
