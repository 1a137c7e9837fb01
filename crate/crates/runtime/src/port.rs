use std::sync::Arc;

use crate::design::ComponentKind;
use crate::error::RuntimeError;
use crate::event::{ComponentId, DiscoveryQuery};
use crate::runtime::{kind_name, Inner, Slot};
use crate::value::Value;

pub(crate) enum Outgoing {
    Publish {
        channel: String,
        value: Value,
    },
    Invoke {
        target: ComponentId,
        action: String,
        args: Vec<Value>,
    },
}

/// What a component may do from inside a callback. Every operation is
/// checked against the design; sends leave once the callback returns.
pub struct Port {
    inner: Arc<Inner>,
    slot: Arc<Slot>,
    outbox: Vec<Outgoing>,
}

impl Port {
    pub(crate) fn new(inner: &Arc<Inner>, slot: &Arc<Slot>) -> Self {
        Port {
            inner: inner.clone(),
            slot: slot.clone(),
            outbox: Vec::new(),
        }
    }

    pub(crate) fn into_outbox(self) -> Vec<Outgoing> {
        self.outbox
    }

    pub fn id(&self) -> &ComponentId {
        &self.slot.id
    }

    pub fn now_ms(&self) -> u64 {
        self.inner.now_ms()
    }

    /// Publishes on one of this component's channels: a source for
    /// entities, the output for contexts.
    pub fn publish(&mut self, channel: &str, value: Value) -> Result<(), RuntimeError> {
        self.inner.validate_publish(&self.slot, channel, &value)?;
        self.outbox.push(Outgoing::Publish {
            channel: channel.to_owned(),
            value,
        });
        Ok(())
    }

    /// Pulls `source` from the entities matching `query`.
    pub fn request(
        &mut self,
        query: &DiscoveryQuery,
        source: &str,
    ) -> Result<Vec<Value>, RuntimeError> {
        self.inner.request(&self.slot, query, source)
    }

    /// Pulls the current output of an upstream context.
    pub fn request_context(&mut self, context: &str) -> Result<Option<Value>, RuntimeError> {
        self.inner.request_context(&self.slot, context)
    }

    /// Live subscription to `source` of every entity matching `query`.
    pub fn subscribe(&mut self, query: DiscoveryQuery, source: &str) -> Result<(), RuntimeError> {
        if self.slot.kind == ComponentKind::Entity {
            return Err(RuntimeError::LayerViolation {
                component: self.slot.id.clone(),
                kind: kind_name(self.slot.kind),
                operation: "subscribe",
            });
        }
        self.inner.subscribe(&self.slot.id, query, source)
    }

    pub fn discover(&self, query: &DiscoveryQuery) -> Result<Vec<ComponentId>, RuntimeError> {
        self.inner.discover(query)
    }

    /// Orders `action` on entity `target`. Controllers only.
    pub fn invoke(
        &mut self,
        target: &ComponentId,
        action: &str,
        args: Vec<Value>,
    ) -> Result<(), RuntimeError> {
        self.inner.validate_invoke(&self.slot, target, action, &args)?;
        self.outbox.push(Outgoing::Invoke {
            target: target.clone(),
            action: action.to_owned(),
            args,
        });
        Ok(())
    }

    /// Orders `action` on every entity matching `query`.
    pub fn invoke_all(
        &mut self,
        query: &DiscoveryQuery,
        action: &str,
        args: Vec<Value>,
    ) -> Result<usize, RuntimeError> {
        let class = ComponentId::new(&query.entity_class, 0);
        self.inner.validate_invoke(&self.slot, &class, action, &args)?;
        let targets = self.inner.discover(query)?;
        for t in &targets {
            self.invoke(t, action, args.clone())?;
        }
        Ok(targets.len())
    }
}
