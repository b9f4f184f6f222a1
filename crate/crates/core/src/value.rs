use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A property value. Values of different kinds never compare.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Bool,
    Int,
    Float,
    Text,
}

impl ValueKind {
    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Bool => "boolean",
            ValueKind::Int => "int",
            ValueKind::Float => "double",
            ValueKind::Text => "string",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "boolean" => Some(ValueKind::Bool),
            "int" | "long" => Some(ValueKind::Int),
            "double" | "float" => Some(ValueKind::Float),
            "string" => Some(ValueKind::Text),
            _ => None,
        }
    }
}

impl PropertyValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            PropertyValue::Bool(_) => ValueKind::Bool,
            PropertyValue::Int(_) => ValueKind::Int,
            PropertyValue::Float(_) => ValueKind::Float,
            PropertyValue::Text(_) => ValueKind::Text,
        }
    }

    /// Orders two values of the same kind; mixing kinds is an error.
    pub fn try_cmp(&self, other: &PropertyValue, key: &str) -> Result<Ordering> {
        match (self, other) {
            (PropertyValue::Bool(a), PropertyValue::Bool(b)) => Ok(a.cmp(b)),
            (PropertyValue::Int(a), PropertyValue::Int(b)) => Ok(a.cmp(b)),
            (PropertyValue::Float(a), PropertyValue::Float(b)) => Ok(a.total_cmp(b)),
            (PropertyValue::Text(a), PropertyValue::Text(b)) => Ok(a.cmp(b)),
            _ => Err(Error::IncomparableKinds {
                key: key.to_string(),
                left: self.kind().name(),
                right: other.kind().name(),
            }),
        }
    }

    /// Parses the text form used in GraphML `data` elements.
    pub fn parse_as(kind: ValueKind, text: &str) -> Option<PropertyValue> {
        match kind {
            ValueKind::Bool => text.trim().parse().ok().map(PropertyValue::Bool),
            ValueKind::Int => text.trim().parse().ok().map(PropertyValue::Int),
            ValueKind::Float => text.trim().parse().ok().map(PropertyValue::Float),
            ValueKind::Text => Some(PropertyValue::Text(text.to_string())),
        }
    }
}

// Same-kind equality with floats compared bitwise-totally, so the type can be `Eq`.
impl PartialEq for PropertyValue {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.try_cmp(other, ""), Ok(Ordering::Equal))
    }
}

impl Eq for PropertyValue {}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Bool(b) => write!(f, "{b}"),
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Float(x) => write!(f, "{x}"),
            PropertyValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(s: &str) -> Self {
        PropertyValue::Text(s.to_string())
    }
}

impl From<String> for PropertyValue {
    fn from(s: String) -> Self {
        PropertyValue::Text(s)
    }
}

impl From<i64> for PropertyValue {
    fn from(i: i64) -> Self {
        PropertyValue::Int(i)
    }
}

impl From<f64> for PropertyValue {
    fn from(x: f64) -> Self {
        PropertyValue::Float(x)
    }
}

impl From<bool> for PropertyValue {
    fn from(b: bool) -> Self {
        PropertyValue::Bool(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_kinds_do_not_compare() {
        let err = PropertyValue::Int(3).try_cmp(&PropertyValue::Float(3.0), "age");
        assert!(matches!(err, Err(Error::IncomparableKinds { .. })));
        assert_ne!(PropertyValue::Int(3), PropertyValue::Float(3.0));
    }

    #[test]
    fn json_kinds() {
        let v: Vec<PropertyValue> = serde_json::from_str(r#"[true, 3, 3.5, 2.0, "x"]"#).unwrap();
        let kinds: Vec<_> = v.iter().map(PropertyValue::kind).collect();
        assert_eq!(
            kinds,
            [
                ValueKind::Bool,
                ValueKind::Int,
                ValueKind::Float,
                ValueKind::Float,
                ValueKind::Text
            ]
        );
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[true,3,3.5,2.0,"x"]"#);
    }
}
