use std::fmt;
use std::sync::Arc;

use crate::value::Value;

/// Identity of a component instance. `instance_seq` counts up per name,
/// starting at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId {
    pub name: Arc<str>,
    pub instance_seq: u64,
}

impl ComponentId {
    pub fn new(name: &str, instance_seq: u64) -> Self {
        ComponentId {
            name: name.into(),
            instance_seq,
        }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.instance_seq)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub producer: ComponentId,
    /// Source name for entities, the operator's own name for contexts.
    pub channel: String,
    pub value: Value,
    pub seq: u64,
    pub timestamp: u64,
}

/// Selects registered entities of one class by attribute equality.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscoveryQuery {
    pub entity_class: String,
    pub filters: Vec<(String, Value)>,
}

impl DiscoveryQuery {
    pub fn all(entity_class: &str) -> Self {
        DiscoveryQuery {
            entity_class: entity_class.to_owned(),
            filters: Vec::new(),
        }
    }

    /// Adds a conjunctive `attribute == value` filter.
    pub fn filter(mut self, attribute: &str, value: Value) -> Self {
        self.filters.push((attribute.to_owned(), value));
        self
    }

    pub fn matches(&self, class: &str, attributes: &[(String, Value)]) -> bool {
        class == self.entity_class
            && self.filters.iter().all(|(name, want)| {
                attributes
                    .iter()
                    .any(|(n, have)| n == name && have == want)
            })
    }
}
