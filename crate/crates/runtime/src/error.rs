use thiserror::Error;

use crate::event::ComponentId;
use crate::value::ValueError;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RuntimeError {
    #[error("`{0}` is not a component of the deployed design")]
    UnknownComponentType(String),
    #[error("`{0}` is not an entity class")]
    NotAnEntity(String),
    #[error("`{0}` is not an operator")]
    NotAnOperator(String),
    #[error("no registered component {0}")]
    UnknownComponent(ComponentId),
    #[error("entity class `{class}` requires attribute `{attribute}`")]
    MissingAttribute { class: String, attribute: String },
    #[error("entity class `{class}` declares no attribute `{attribute}`")]
    UnknownAttribute { class: String, attribute: String },
    #[error("attribute `{attribute}` of `{class}` expects {expected}")]
    AttributeType {
        class: String,
        attribute: String,
        expected: String,
    },
    #[error("{component} has no channel `{channel}`")]
    UndeclaredChannel {
        component: ComponentId,
        channel: String,
    },
    #[error("channel `{channel}` carries {expected}, got {found}")]
    TypeMismatch {
        channel: String,
        expected: String,
        found: String,
    },
    #[error("{component} is a {kind} and may not {operation}")]
    LayerViolation {
        component: ComponentId,
        kind: &'static str,
        operation: &'static str,
    },
    #[error("`{consumer}` declares no {interaction} input `{producer}.{channel}`")]
    UndeclaredInput {
        consumer: String,
        producer: String,
        channel: String,
        interaction: &'static str,
    },
    #[error("`{controller}` is not bound to action `{action}` on `{entity}`")]
    UndeclaredAction {
        controller: String,
        action: String,
        entity: String,
    },
    #[error("action `{action}` expects {expected} argument(s) of types ({signature})")]
    ArgumentMismatch {
        action: String,
        expected: usize,
        signature: String,
    },
    #[error("operator `{0}` is already instantiated")]
    DuplicateOperator(String),
    #[error("deployment refused: no factory for {}", .0.join(", "))]
    MissingFactory(Vec<String>),
    #[error("runtime is shut down")]
    ShutDown,
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("{0}")]
    Handler(String),
}

impl RuntimeError {
    /// Error raised by developer code inside a callback.
    pub fn handler(message: impl Into<String>) -> Self {
        RuntimeError::Handler(message.into())
    }
}

/// Failure of a pull provider to produce its current value.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ProviderError(pub String);

impl ProviderError {
    pub fn new(message: impl Into<String>) -> Self {
        ProviderError(message.into())
    }
}

impl From<ValueError> for ProviderError {
    fn from(e: ValueError) -> Self {
        ProviderError(e.to_string())
    }
}
