//! Dynamically typed payloads carried by events, and their type descriptors.

use std::any::Any;
use std::fmt;
use std::sync::Arc;

/// Type of a channel, parameter or attribute.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeDesc {
    Bool,
    Int,
    Float,
    Str,
    /// A declared enumeration, looked up in [`crate::Design::types`].
    Enum(String),
    /// A declared structure, looked up in [`crate::Design::types`].
    Struct(String),
    /// A host type imported into the design; values are opaque.
    Imported(String),
    Array(Box<TypeDesc>),
}

impl TypeDesc {
    pub fn array(element: TypeDesc) -> Self {
        TypeDesc::Array(Box::new(element))
    }
}

impl fmt::Display for TypeDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeDesc::Bool => f.write_str("Boolean"),
            TypeDesc::Int => f.write_str("Integer"),
            TypeDesc::Float => f.write_str("Float"),
            TypeDesc::Str => f.write_str("String"),
            TypeDesc::Enum(n) | TypeDesc::Struct(n) | TypeDesc::Imported(n) => f.write_str(n),
            TypeDesc::Array(inner) => write!(f, "{inner}[]"),
        }
    }
}

/// A value of an imported host type.
#[derive(Clone)]
pub struct Opaque {
    type_name: String,
    payload: Arc<dyn Any + Send + Sync>,
}

impl Opaque {
    pub fn type_name(&self) -> &str {
        &self.type_name
    }
}

impl fmt::Debug for Opaque {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Opaque({})", self.type_name)
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Enum {
        type_name: String,
        label: String,
    },
    Struct {
        type_name: String,
        fields: Vec<(String, Value)>,
    },
    Array(Vec<Value>),
    Opaque(Opaque),
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        use Value::*;
        match (self, other) {
            (Bool(a), Bool(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Float(a), Float(b)) => a == b,
            (Str(a), Str(b)) => a == b,
            (
                Enum {
                    type_name: t1,
                    label: l1,
                },
                Enum {
                    type_name: t2,
                    label: l2,
                },
            ) => t1 == t2 && l1 == l2,
            (
                Struct {
                    type_name: t1,
                    fields: f1,
                },
                Struct {
                    type_name: t2,
                    fields: f2,
                },
            ) => t1 == t2 && f1 == f2,
            (Array(a), Array(b)) => a == b,
            (Opaque(a), Opaque(b)) => {
                a.type_name == b.type_name && Arc::ptr_eq(&a.payload, &b.payload)
            }
            _ => false,
        }
    }
}

impl Value {
    pub fn opaque<T: Any + Send + Sync>(type_name: &str, value: T) -> Self {
        Value::Opaque(Opaque {
            type_name: type_name.to_owned(),
            payload: Arc::new(value),
        })
    }

    pub fn enumeration(type_name: &str, label: &str) -> Self {
        Value::Enum {
            type_name: type_name.to_owned(),
            label: label.to_owned(),
        }
    }

    /// Field of a structure value.
    pub fn field(&self, name: &str) -> Option<&Value> {
        match self {
            Value::Struct { fields, .. } => fields.iter().find(|(n, _)| n == name).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            Value::Bool(_) => "Boolean".into(),
            Value::Int(_) => "Integer".into(),
            Value::Float(_) => "Float".into(),
            Value::Str(_) => "String".into(),
            Value::Enum { type_name, .. } | Value::Struct { type_name, .. } => type_name.clone(),
            Value::Array(_) => "array".into(),
            Value::Opaque(o) => o.type_name.clone(),
        }
    }
}

/// Conversion failure between a typed host value and a [`Value`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("expected a value of type {expected}, got {found}")]
pub struct ValueError {
    pub expected: String,
    pub found: String,
}

impl ValueError {
    pub fn new(expected: &str, found: &Value) -> Self {
        ValueError {
            expected: expected.to_owned(),
            found: found.kind_name(),
        }
    }
}

/// Host types that can travel on the bus.
pub trait Payload: Sized + Send + 'static {
    fn to_value(&self) -> Value;
    fn from_value(value: &Value) -> Result<Self, ValueError>;
}

impl Payload for bool {
    fn to_value(&self) -> Value {
        Value::Bool(*self)
    }
    fn from_value(value: &Value) -> Result<Self, ValueError> {
        match value {
            Value::Bool(b) => Ok(*b),
            other => Err(ValueError::new("Boolean", other)),
        }
    }
}

impl Payload for i64 {
    fn to_value(&self) -> Value {
        Value::Int(*self)
    }
    fn from_value(value: &Value) -> Result<Self, ValueError> {
        match value {
            Value::Int(i) => Ok(*i),
            other => Err(ValueError::new("Integer", other)),
        }
    }
}

impl Payload for f64 {
    fn to_value(&self) -> Value {
        Value::Float(*self)
    }
    fn from_value(value: &Value) -> Result<Self, ValueError> {
        match value {
            Value::Float(f) => Ok(*f),
            other => Err(ValueError::new("Float", other)),
        }
    }
}

impl Payload for String {
    fn to_value(&self) -> Value {
        Value::Str(self.clone())
    }
    fn from_value(value: &Value) -> Result<Self, ValueError> {
        match value {
            Value::Str(s) => Ok(s.clone()),
            other => Err(ValueError::new("String", other)),
        }
    }
}

impl<T: Payload> Payload for Vec<T> {
    fn to_value(&self) -> Value {
        Value::Array(self.iter().map(Payload::to_value).collect())
    }
    fn from_value(value: &Value) -> Result<Self, ValueError> {
        match value {
            Value::Array(items) => items.iter().map(T::from_value).collect(),
            other => Err(ValueError::new("array", other)),
        }
    }
}

/// Reads a structure field during [`Payload::from_value`].
pub fn struct_field<T: Payload>(value: &Value, type_name: &str, field: &str) -> Result<T, ValueError> {
    match value {
        Value::Struct { type_name: t, .. } if t == type_name => match value.field(field) {
            Some(v) => T::from_value(v),
            None => Err(ValueError {
                expected: format!("{type_name}.{field}"),
                found: "missing field".into(),
            }),
        },
        other => Err(ValueError::new(type_name, other)),
    }
}

/// Reads an enumeration label during [`Payload::from_value`].
pub fn enum_label<'v>(value: &'v Value, type_name: &str) -> Result<&'v str, ValueError> {
    match value {
        Value::Enum { type_name: t, label } if t == type_name => Ok(label),
        other => Err(ValueError::new(type_name, other)),
    }
}

/// Extracts an imported host value.
pub fn opaque_value<T: Any + Clone>(value: &Value, type_name: &str) -> Result<T, ValueError> {
    match value {
        Value::Opaque(o) if o.type_name == type_name => o
            .payload
            .downcast_ref::<T>()
            .cloned()
            .ok_or_else(|| ValueError::new(type_name, value)),
        other => Err(ValueError::new(type_name, other)),
    }
}
