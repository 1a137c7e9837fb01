//! Event bus, registry and discovery.
//!
//! Every component owns a bounded mailbox drained by one worker thread.
//! Handlers run under a per-component lock; pull requests take the
//! provider's lock from the requesting thread. Publishes and action
//! invocations made inside a handler are validated immediately and sent
//! once the handler lock has been released.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Weak};
use std::thread::{self, JoinHandle};

use crossbeam_channel::{Receiver, Sender};
use parking_lot::{Condvar, Mutex, RwLock};

use crate::clock::{Clock, SystemClock};
use crate::design::{ComponentDecl, ComponentKind, Design, Interaction};
use crate::error::{ProviderError, RuntimeError};
use crate::event::{ComponentId, DiscoveryQuery, Event};
use crate::port::{Outgoing, Port};
use crate::trace::{DeliveryRecord, TraceRecord};
use crate::value::Value;

/// Callbacks of one component instance. Generated adapters implement this
/// and forward to developer code.
pub trait Handler: Send {
    fn on_event(&mut self, event: &Event, port: &mut Port) -> Result<(), RuntimeError> {
        let _ = port;
        Err(RuntimeError::handler(format!(
            "unexpected event on `{}`",
            event.channel
        )))
    }

    fn on_action(
        &mut self,
        action: &str,
        args: &[Value],
        port: &mut Port,
    ) -> Result<(), RuntimeError> {
        let _ = (args, port);
        Err(RuntimeError::handler(format!("unexpected action `{action}`")))
    }

    /// Current value of `channel`, for pull consumers.
    fn provide(&mut self, channel: &str, port: &mut Port) -> Result<Value, ProviderError> {
        let _ = port;
        Err(ProviderError::new(format!("`{channel}` cannot be pulled")))
    }

    fn post_initialize(&mut self, port: &mut Port) -> Result<(), RuntimeError> {
        let _ = port;
        Ok(())
    }
}

#[derive(Clone)]
pub struct RuntimeConfig {
    /// Mailbox capacity per component; producers block when it is full.
    pub queue_capacity: usize,
    pub clock: Arc<dyn Clock>,
    /// Keep a [`TraceRecord`] per published event.
    pub trace: bool,
    /// Keep a [`DeliveryRecord`] per handled event.
    pub record_deliveries: bool,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        RuntimeConfig {
            queue_capacity: 1024,
            clock: Arc::new(SystemClock::new()),
            trace: false,
            record_deliveries: false,
        }
    }
}

/// Liveness of a component. Deliveries hold the gate open; closing it waits
/// for them to finish, and nothing passes afterwards.
pub(crate) struct Gate {
    state: Mutex<(bool, usize)>,
    idle: Condvar,
}

impl Gate {
    fn new() -> Self {
        Gate {
            state: Mutex::new((true, 0)),
            idle: Condvar::new(),
        }
    }

    fn enter(&self) -> bool {
        let mut s = self.state.lock();
        if s.0 {
            s.1 += 1;
        }
        s.0
    }

    fn exit(&self) {
        let mut s = self.state.lock();
        s.1 -= 1;
        if s.1 == 0 {
            self.idle.notify_all();
        }
    }

    fn close(&self) {
        let mut s = self.state.lock();
        s.0 = false;
        while s.1 > 0 {
            self.idle.wait(&mut s);
        }
    }
}

pub(crate) enum Envelope {
    Event { event: Arc<Event>, from: Arc<Gate> },
    Action { action: String, args: Vec<Value> },
}

pub(crate) struct Slot {
    pub(crate) id: ComponentId,
    pub(crate) kind: ComponentKind,
    registration: u64,
    attributes: Vec<(String, Value)>,
    handler: Mutex<Box<dyn Handler>>,
    busy: AtomicBool,
    gate: Arc<Gate>,
    sequences: Mutex<HashMap<String, u64>>,
}

/// Registry entry. The worker exits once the last sender is gone, so
/// removing the entry retires the component after its mailbox drains.
struct Entry {
    slot: Arc<Slot>,
    tx: Sender<Envelope>,
}

struct LiveSubscription {
    consumer: ComponentId,
    query: DiscoveryQuery,
    source: String,
}

#[derive(Default)]
struct Registry {
    components: BTreeMap<ComponentId, Entry>,
    /// context name -> subscribed consumers
    static_subs: BTreeMap<String, Vec<ComponentId>>,
    live: Vec<LiveSubscription>,
}

impl Registry {
    fn routes(&self, producer: &Slot, channel: &str) -> Vec<(ComponentId, Sender<Envelope>)> {
        let mut consumers: Vec<&ComponentId> = match producer.kind {
            ComponentKind::Entity => self
                .live
                .iter()
                .filter(|s| {
                    s.source == channel
                        && s.query.matches(&producer.id.name, &producer.attributes)
                })
                .map(|s| &s.consumer)
                .collect(),
            ComponentKind::Context => self
                .static_subs
                .get(channel)
                .map(|v| v.iter().collect())
                .unwrap_or_default(),
            ComponentKind::Controller => Vec::new(),
        };
        consumers.sort();
        consumers.dedup();
        consumers
            .into_iter()
            .filter_map(|id| self.components.get(id).map(|e| (id.clone(), e.tx.clone())))
            .collect()
    }

    fn matching(&self, query: &DiscoveryQuery) -> Vec<Arc<Slot>> {
        let mut out: Vec<Arc<Slot>> = self
            .components
            .values()
            .map(|e| &e.slot)
            .filter(|s| {
                s.kind == ComponentKind::Entity && query.matches(&s.id.name, &s.attributes)
            })
            .cloned()
            .collect();
        out.sort_by_key(|s| s.registration);
        out
    }
}

pub(crate) struct Inner {
    pub(crate) design: Design,
    config: RuntimeConfig,
    registry: RwLock<Registry>,
    instance_counters: Mutex<HashMap<String, u64>>,
    registrations: AtomicU64,
    in_flight: Mutex<u64>,
    quiet: Condvar,
    trace: Mutex<Vec<TraceRecord>>,
    deliveries: Mutex<Vec<DeliveryRecord>>,
    violations: AtomicU64,
    stopped: AtomicBool,
    workers: Mutex<Vec<JoinHandle<()>>>,
}

/// Handle to a running bus. Clones share the same bus.
#[derive(Clone)]
pub struct Runtime {
    pub(crate) inner: Arc<Inner>,
}

/// Publishing handle given to an entity implementation.
#[derive(Clone)]
pub struct EntityPublisher {
    inner: Weak<Inner>,
    id: ComponentId,
}

impl EntityPublisher {
    pub fn id(&self) -> &ComponentId {
        &self.id
    }

    pub fn publish(&self, source: &str, value: Value) -> Result<(), RuntimeError> {
        let inner = self.inner.upgrade().ok_or(RuntimeError::ShutDown)?;
        inner.publish(&self.id, source, value)
    }
}

impl Runtime {
    pub fn new(design: Design, config: RuntimeConfig) -> Self {
        Runtime {
            inner: Arc::new(Inner {
                design,
                config,
                registry: RwLock::new(Registry::default()),
                instance_counters: Mutex::new(HashMap::new()),
                registrations: AtomicU64::new(0),
                in_flight: Mutex::new(0),
                quiet: Condvar::new(),
                trace: Mutex::new(Vec::new()),
                deliveries: Mutex::new(Vec::new()),
                violations: AtomicU64::new(0),
                stopped: AtomicBool::new(false),
                workers: Mutex::new(Vec::new()),
            }),
        }
    }

    pub fn design(&self) -> &Design {
        &self.inner.design
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.inner.config.clock
    }

    /// Reserves the next identity of an entity class, so an implementation
    /// can hold its publisher before it is registered.
    pub fn allocate_entity_id(&self, class: &str) -> Result<ComponentId, RuntimeError> {
        let decl = self.inner.decl(class)?;
        if decl.kind != ComponentKind::Entity {
            return Err(RuntimeError::NotAnEntity(class.to_owned()));
        }
        Ok(self.inner.next_id(class))
    }

    pub fn publisher(&self, id: &ComponentId) -> EntityPublisher {
        EntityPublisher {
            inner: Arc::downgrade(&self.inner),
            id: id.clone(),
        }
    }

    /// Makes an entity visible to discovery. Every live query matching it
    /// starts receiving its sources.
    pub fn register_entity(
        &self,
        id: ComponentId,
        handler: Box<dyn Handler>,
        attributes: Vec<(String, Value)>,
    ) -> Result<ComponentId, RuntimeError> {
        self.inner.ensure_running()?;
        let decl = self.inner.decl(&id.name)?;
        if decl.kind != ComponentKind::Entity {
            return Err(RuntimeError::NotAnEntity(id.name.to_string()));
        }
        let attributes = self.inner.validate_attributes(decl, attributes)?;
        if self.inner.registry.read().components.contains_key(&id) {
            return Err(RuntimeError::handler(format!("{id} is already registered")));
        }
        self.inner.spawn(id.clone(), ComponentKind::Entity, attributes, handler);
        log::debug!("registered {id}");
        Ok(id)
    }

    /// Allocates an id, builds the implementation with its publisher and
    /// registers it.
    pub fn register_entity_with(
        &self,
        class: &str,
        attributes: Vec<(String, Value)>,
        build: impl FnOnce(EntityPublisher) -> Box<dyn Handler>,
    ) -> Result<ComponentId, RuntimeError> {
        let id = self.allocate_entity_id(class)?;
        let handler = build(self.publisher(&id));
        self.register_entity(id, handler, attributes)
    }

    /// Instantiates a context or controller. Each operator exists once.
    pub fn add_operator(
        &self,
        name: &str,
        handler: Box<dyn Handler>,
    ) -> Result<ComponentId, RuntimeError> {
        self.inner.ensure_running()?;
        let decl = self.inner.decl(name)?;
        if decl.kind == ComponentKind::Entity {
            return Err(RuntimeError::NotAnOperator(name.to_owned()));
        }
        if self
            .inner
            .registry
            .read()
            .components
            .keys()
            .any(|k| &*k.name == name)
        {
            return Err(RuntimeError::DuplicateOperator(name.to_owned()));
        }
        let id = self.inner.next_id(name);
        self.inner.spawn(id.clone(), decl.kind, Vec::new(), handler);
        Ok(id)
    }

    /// Removes an entity. No event it produced is delivered after this
    /// returns. Unknown ids are ignored with a warning.
    pub fn unregister_entity(&self, id: &ComponentId) {
        let entry = {
            let mut reg = self.inner.registry.write();
            match reg.components.get(id) {
                Some(e) if e.slot.kind == ComponentKind::Entity => reg.components.remove(id),
                _ => None,
            }
        };
        let Some(entry) = entry else {
            log::warn!("unregister of unknown entity {id} ignored");
            return;
        };
        entry.slot.gate.close();
        log::debug!("unregistered {id}");
    }

    /// Subscribes `consumer` to the output of context `context`.
    pub fn subscribe_context(
        &self,
        consumer: &ComponentId,
        context: &str,
    ) -> Result<(), RuntimeError> {
        self.inner.subscribe_context(consumer, context)
    }

    /// Adds a live subscription of `consumer` to `source` of every entity
    /// matching `query`, now and in the future.
    pub fn subscribe(
        &self,
        consumer: &ComponentId,
        query: DiscoveryQuery,
        source: &str,
    ) -> Result<(), RuntimeError> {
        self.inner.subscribe(consumer, query, source)
    }

    pub fn publish(
        &self,
        producer: &ComponentId,
        channel: &str,
        value: Value,
    ) -> Result<(), RuntimeError> {
        self.inner.publish(producer, channel, value)
    }

    /// Pulls `source` from every entity matching `query`, in registration
    /// order. Failing providers are skipped.
    pub fn request(
        &self,
        consumer: &ComponentId,
        query: &DiscoveryQuery,
        source: &str,
    ) -> Result<Vec<Value>, RuntimeError> {
        let slot = self.inner.slot(consumer)?;
        self.inner.request(&slot, query, source)
    }

    pub fn request_context(
        &self,
        consumer: &ComponentId,
        context: &str,
    ) -> Result<Option<Value>, RuntimeError> {
        let slot = self.inner.slot(consumer)?;
        self.inner.request_context(&slot, context)
    }

    /// Invokes `action` on entity `target` on behalf of controller `from`.
    pub fn invoke(
        &self,
        from: &ComponentId,
        target: &ComponentId,
        action: &str,
        args: Vec<Value>,
    ) -> Result<(), RuntimeError> {
        let slot = self.inner.slot(from)?;
        self.inner.validate_invoke(&slot, target, action, &args)?;
        self.inner.send_action(target, action, args);
        Ok(())
    }

    /// Registered entities matching `query`, in registration order.
    pub fn discover(&self, query: &DiscoveryQuery) -> Vec<ComponentId> {
        self.inner
            .registry
            .read()
            .matching(query)
            .iter()
            .map(|s| s.id.clone())
            .collect()
    }

    /// Consumers that an event on `producer`'s `channel` would reach now.
    pub fn subscribers(&self, producer: &ComponentId, channel: &str) -> Vec<ComponentId> {
        let reg = self.inner.registry.read();
        match reg.components.get(producer) {
            Some(p) => reg.routes(&p.slot, channel).into_iter().map(|(id, _)| id).collect(),
            None => Vec::new(),
        }
    }

    /// Runs `post_initialize` of one component.
    pub fn post_initialize(&self, id: &ComponentId) -> Result<(), RuntimeError> {
        let slot = self.inner.slot(id)?;
        let mut result = Ok(());
        self.inner
            .with_handler(&slot, |h, port| result = h.post_initialize(port));
        result
    }

    /// Blocks until every queued event and action has been handled.
    /// Must not be called from inside a handler.
    pub fn settle(&self) {
        let mut n = self.inner.in_flight.lock();
        while *n > 0 {
            self.inner.quiet.wait(&mut n);
        }
    }

    /// Stops every component. Nothing is delivered once this returns.
    pub fn shutdown(&self) {
        if self.inner.stopped.swap(true, Ordering::SeqCst) {
            return;
        }
        {
            let mut reg = self.inner.registry.write();
            reg.live.clear();
            reg.static_subs.clear();
            reg.components.clear();
        }
        let me = thread::current().id();
        let handles = std::mem::take(&mut *self.inner.workers.lock());
        for h in handles {
            if h.thread().id() != me {
                let _ = h.join();
            }
        }
        log::debug!("runtime shut down");
    }

    pub fn is_shut_down(&self) -> bool {
        self.inner.stopped.load(Ordering::SeqCst)
    }

    /// Trace records since the last drain, sorted by (ts, producer,
    /// channel, seq).
    pub fn drain_trace(&self) -> Vec<TraceRecord> {
        let mut out = std::mem::take(&mut *self.inner.trace.lock());
        out.sort();
        out
    }

    pub fn drain_deliveries(&self) -> Vec<DeliveryRecord> {
        std::mem::take(&mut *self.inner.deliveries.lock())
    }

    pub fn component_count(&self) -> usize {
        self.inner.registry.read().components.len()
    }

    pub fn components(&self) -> Vec<ComponentId> {
        self.inner.registry.read().components.keys().cloned().collect()
    }

    /// Times a handler was entered while another call of the same
    /// component was still running. Zero unless serialization is broken.
    pub fn reentrancy_violations(&self) -> u64 {
        self.inner.violations.load(Ordering::SeqCst)
    }
}

impl Inner {
    pub(crate) fn decl(&self, name: &str) -> Result<&ComponentDecl, RuntimeError> {
        self.design
            .component(name)
            .ok_or_else(|| RuntimeError::UnknownComponentType(name.to_owned()))
    }

    pub(crate) fn now_ms(&self) -> u64 {
        self.config.clock.now_ms()
    }

    fn ensure_running(&self) -> Result<(), RuntimeError> {
        if self.stopped.load(Ordering::SeqCst) {
            Err(RuntimeError::ShutDown)
        } else {
            Ok(())
        }
    }

    fn next_id(&self, name: &str) -> ComponentId {
        let mut counters = self.instance_counters.lock();
        let n = counters.entry(name.to_owned()).or_insert(0);
        *n += 1;
        ComponentId::new(name, *n)
    }

    pub(crate) fn slot(&self, id: &ComponentId) -> Result<Arc<Slot>, RuntimeError> {
        self.ensure_running()?;
        self.registry
            .read()
            .components
            .get(id)
            .map(|e| e.slot.clone())
            .ok_or_else(|| RuntimeError::UnknownComponent(id.clone()))
    }

    fn validate_attributes(
        &self,
        decl: &ComponentDecl,
        attributes: Vec<(String, Value)>,
    ) -> Result<Vec<(String, Value)>, RuntimeError> {
        for (name, _) in &attributes {
            if !decl.attributes.iter().any(|(n, _)| n == name) {
                return Err(RuntimeError::UnknownAttribute {
                    class: decl.name.clone(),
                    attribute: name.clone(),
                });
            }
        }
        let mut ordered = Vec::with_capacity(decl.attributes.len());
        for (name, ty) in &decl.attributes {
            let Some((_, value)) = attributes.iter().find(|(n, _)| n == name) else {
                return Err(RuntimeError::MissingAttribute {
                    class: decl.name.clone(),
                    attribute: name.clone(),
                });
            };
            if !self.design.conforms(value, ty) {
                return Err(RuntimeError::AttributeType {
                    class: decl.name.clone(),
                    attribute: name.clone(),
                    expected: ty.to_string(),
                });
            }
            ordered.push((name.clone(), value.clone()));
        }
        Ok(ordered)
    }

    pub(crate) fn check_attributes(
        &self,
        decl: &ComponentDecl,
        attributes: &[(String, Value)],
    ) -> Result<(), RuntimeError> {
        self.validate_attributes(decl, attributes.to_vec()).map(|_| ())
    }

    fn validate_query(&self, query: &DiscoveryQuery) -> Result<(), RuntimeError> {
        let decl = self.decl(&query.entity_class)?;
        if decl.kind != ComponentKind::Entity {
            return Err(RuntimeError::NotAnEntity(query.entity_class.clone()));
        }
        for (attr, value) in &query.filters {
            match decl.attributes.iter().find(|(n, _)| n == attr) {
                None => {
                    return Err(RuntimeError::UnknownAttribute {
                        class: decl.name.clone(),
                        attribute: attr.clone(),
                    })
                }
                Some((_, ty)) if !self.design.conforms(value, ty) => {
                    return Err(RuntimeError::AttributeType {
                        class: decl.name.clone(),
                        attribute: attr.clone(),
                        expected: ty.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn spawn(
        self: &Arc<Self>,
        id: ComponentId,
        kind: ComponentKind,
        attributes: Vec<(String, Value)>,
        handler: Box<dyn Handler>,
    ) {
        let (tx, rx) = crossbeam_channel::bounded(self.config.queue_capacity.max(1));
        let slot = Arc::new(Slot {
            id: id.clone(),
            kind,
            registration: self.registrations.fetch_add(1, Ordering::SeqCst),
            attributes,
            handler: Mutex::new(handler),
            busy: AtomicBool::new(false),
            gate: Arc::new(Gate::new()),
            sequences: Mutex::new(HashMap::new()),
        });
        let weak = Arc::downgrade(self);
        let worker_slot = slot.clone();
        let handle = thread::Builder::new()
            .name(format!("scc-{id}"))
            .spawn(move || worker(weak, worker_slot, rx))
            .expect("spawn component worker");
        self.workers.lock().push(handle);
        self.registry.write().components.insert(id, Entry { slot, tx });
    }

    fn subscribe_context(&self, consumer: &ComponentId, context: &str) -> Result<(), RuntimeError> {
        let slot = self.slot(consumer)?;
        self.check_input(&slot, context, context, Interaction::Push)?;
        let mut reg = self.registry.write();
        let subs = reg.static_subs.entry(context.to_owned()).or_default();
        if !subs.contains(consumer) {
            subs.push(consumer.clone());
        }
        Ok(())
    }

    pub(crate) fn subscribe(
        &self,
        consumer: &ComponentId,
        query: DiscoveryQuery,
        source: &str,
    ) -> Result<(), RuntimeError> {
        let slot = self.slot(consumer)?;
        self.validate_query(&query)?;
        self.check_input(&slot, &query.entity_class, source, Interaction::Push)?;
        let mut reg = self.registry.write();
        let exists = reg
            .live
            .iter()
            .any(|s| &s.consumer == consumer && s.query == query && s.source == source);
        if !exists {
            reg.live.push(LiveSubscription {
                consumer: consumer.clone(),
                query,
                source: source.to_owned(),
            });
        }
        Ok(())
    }

    fn check_input(
        &self,
        consumer: &Slot,
        producer: &str,
        channel: &str,
        interaction: Interaction,
    ) -> Result<(), RuntimeError> {
        let decl = self.decl(&consumer.id.name)?;
        match decl.input(producer, channel) {
            Some(i) if i.interaction == interaction => Ok(()),
            _ => Err(RuntimeError::UndeclaredInput {
                consumer: decl.name.clone(),
                producer: producer.to_owned(),
                channel: channel.to_owned(),
                interaction: match interaction {
                    Interaction::Push => "push",
                    Interaction::Pull => "pull",
                },
            }),
        }
    }

    /// Checks that `slot` may publish `value` on `channel`.
    pub(crate) fn validate_publish(
        &self,
        slot: &Slot,
        channel: &str,
        value: &Value,
    ) -> Result<(), RuntimeError> {
        if slot.kind == ComponentKind::Controller {
            return Err(RuntimeError::LayerViolation {
                component: slot.id.clone(),
                kind: "controller",
                operation: "publish",
            });
        }
        let decl = self.decl(&slot.id.name)?;
        let ty = decl
            .channel_type(channel)
            .ok_or_else(|| RuntimeError::UndeclaredChannel {
                component: slot.id.clone(),
                channel: channel.to_owned(),
            })?;
        if !self.design.conforms(value, ty) {
            return Err(RuntimeError::TypeMismatch {
                channel: channel.to_owned(),
                expected: ty.to_string(),
                found: value.kind_name(),
            });
        }
        Ok(())
    }

    fn publish(&self, producer: &ComponentId, channel: &str, value: Value) -> Result<(), RuntimeError> {
        let slot = self.slot(producer)?;
        self.validate_publish(&slot, channel, &value)?;
        self.send_event(&slot, channel, value);
        Ok(())
    }

    /// Sequences and routes an already validated event.
    pub(crate) fn send_event(&self, slot: &Arc<Slot>, channel: &str, value: Value) {
        let mut sequences = slot.sequences.lock();
        let seq = sequences.entry(channel.to_owned()).or_insert(0);
        *seq += 1;
        let event = Arc::new(Event {
            producer: slot.id.clone(),
            channel: channel.to_owned(),
            value,
            seq: *seq,
            timestamp: self.config.clock.now_ms(),
        });
        if self.config.trace {
            self.trace.lock().push(TraceRecord {
                ts: event.timestamp,
                producer: event.producer.to_string(),
                channel: event.channel.clone(),
                seq: event.seq,
            });
        }
        let consumers = self.registry.read().routes(slot, channel);
        for (_, tx) in consumers {
            self.begin();
            let envelope = Envelope::Event {
                event: event.clone(),
                from: slot.gate.clone(),
            };
            if tx.send(envelope).is_err() {
                self.finish();
            }
        }
    }

    pub(crate) fn validate_invoke(
        &self,
        slot: &Slot,
        target: &ComponentId,
        action: &str,
        args: &[Value],
    ) -> Result<(), RuntimeError> {
        if slot.kind != ComponentKind::Controller {
            return Err(RuntimeError::LayerViolation {
                component: slot.id.clone(),
                kind: kind_name(slot.kind),
                operation: "invoke actions",
            });
        }
        let decl = self.decl(&slot.id.name)?;
        if !decl
            .action_bindings
            .iter()
            .any(|(a, e)| a == action && **e == *target.name)
        {
            return Err(RuntimeError::UndeclaredAction {
                controller: decl.name.clone(),
                action: action.to_owned(),
                entity: target.name.to_string(),
            });
        }
        let entity = self.decl(&target.name)?;
        let sig = entity
            .actions
            .iter()
            .find(|a| a.name == action)
            .ok_or_else(|| RuntimeError::UndeclaredAction {
                controller: decl.name.clone(),
                action: action.to_owned(),
                entity: target.name.to_string(),
            })?;
        let ok = sig.params.len() == args.len()
            && sig
                .params
                .iter()
                .zip(args)
                .all(|((_, ty), v)| self.design.conforms(v, ty));
        if !ok {
            return Err(RuntimeError::ArgumentMismatch {
                action: action.to_owned(),
                expected: sig.params.len(),
                signature: sig
                    .params
                    .iter()
                    .map(|(_, t)| t.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        }
        Ok(())
    }

    pub(crate) fn send_action(&self, target: &ComponentId, action: &str, args: Vec<Value>) {
        let tx = self.registry.read().components.get(target).map(|e| e.tx.clone());
        let Some(tx) = tx else {
            log::warn!("action `{action}` for vanished {target} dropped");
            return;
        };
        self.begin();
        let envelope = Envelope::Action {
            action: action.to_owned(),
            args,
        };
        if tx.send(envelope).is_err() {
            self.finish();
        }
    }

    pub(crate) fn discover(&self, query: &DiscoveryQuery) -> Result<Vec<ComponentId>, RuntimeError> {
        self.validate_query(query)?;
        Ok(self
            .registry
            .read()
            .matching(query)
            .iter()
            .map(|s| s.id.clone())
            .collect())
    }

    pub(crate) fn request(
        self: &Arc<Self>,
        consumer: &Slot,
        query: &DiscoveryQuery,
        source: &str,
    ) -> Result<Vec<Value>, RuntimeError> {
        self.validate_query(query)?;
        self.check_input(consumer, &query.entity_class, source, Interaction::Pull)?;
        let providers = self.registry.read().matching(query);
        Ok(providers
            .iter()
            .filter_map(|p| self.pull(consumer, p, source))
            .collect())
    }

    pub(crate) fn request_context(
        self: &Arc<Self>,
        consumer: &Slot,
        context: &str,
    ) -> Result<Option<Value>, RuntimeError> {
        self.check_input(consumer, context, context, Interaction::Pull)?;
        let provider = self
            .registry
            .read()
            .components
            .values()
            .find(|e| &*e.slot.id.name == context)
            .map(|e| e.slot.clone());
        Ok(provider.and_then(|p| self.pull(consumer, &p, context)))
    }

    fn pull(self: &Arc<Self>, consumer: &Slot, provider: &Arc<Slot>, channel: &str) -> Option<Value> {
        if !provider.gate.enter() {
            return None;
        }
        let mut result = Err(ProviderError::new("not run"));
        self.with_handler(provider, |h, port| result = h.provide(channel, port));
        provider.gate.exit();
        let value = match result {
            Ok(v) => v,
            Err(e) => {
                log::error!(
                    "{} failed to provide `{channel}` to {}: {e}",
                    provider.id,
                    consumer.id
                );
                return None;
            }
        };
        match self.validate_publish(provider, channel, &value) {
            Ok(()) => Some(value),
            Err(e) => {
                log::error!("{} provided a bad value: {e}", provider.id);
                None
            }
        }
    }

    /// Runs `f` under the component's lock, then sends what it queued.
    pub(crate) fn with_handler(
        self: &Arc<Self>,
        slot: &Arc<Slot>,
        f: impl FnOnce(&mut dyn Handler, &mut Port),
    ) {
        let outbox = {
            let mut handler = slot.handler.lock();
            if slot.busy.swap(true, Ordering::SeqCst) {
                self.violations.fetch_add(1, Ordering::SeqCst);
            }
            let mut port = Port::new(self, slot);
            f(&mut **handler, &mut port);
            slot.busy.store(false, Ordering::SeqCst);
            port.into_outbox()
        };
        for out in outbox {
            match out {
                Outgoing::Publish { channel, value } => self.send_event(slot, &channel, value),
                Outgoing::Invoke {
                    target,
                    action,
                    args,
                } => self.send_action(&target, &action, args),
            }
        }
    }

    fn begin(&self) {
        *self.in_flight.lock() += 1;
    }

    fn finish(&self) {
        let mut n = self.in_flight.lock();
        *n -= 1;
        if *n == 0 {
            self.quiet.notify_all();
        }
    }

    fn deliver(self: &Arc<Self>, slot: &Arc<Slot>, envelope: Envelope) {
        match envelope {
            Envelope::Event { event, from } => {
                if self.stopped.load(Ordering::SeqCst) || !from.enter() {
                    return;
                }
                if slot.gate.enter() {
                    if self.config.record_deliveries {
                        self.deliveries.lock().push(DeliveryRecord {
                            consumer: slot.id.to_string(),
                            producer: event.producer.to_string(),
                            channel: event.channel.clone(),
                            seq: event.seq,
                        });
                    }
                    self.with_handler(slot, |h, port| {
                        if let Err(e) = h.on_event(&event, port) {
                            log::error!("{} failed on `{}`: {e}", slot.id, event.channel);
                        }
                    });
                    slot.gate.exit();
                }
                from.exit();
            }
            Envelope::Action { action, args } => {
                if self.stopped.load(Ordering::SeqCst) || !slot.gate.enter() {
                    return;
                }
                self.with_handler(slot, |h, port| {
                    if let Err(e) = h.on_action(&action, &args, port) {
                        log::error!("{} failed on action `{action}`: {e}", slot.id);
                    }
                });
                slot.gate.exit();
            }
        }
    }
}

fn worker(inner: Weak<Inner>, slot: Arc<Slot>, rx: Receiver<Envelope>) {
    while let Ok(envelope) = rx.recv() {
        let Some(rt) = inner.upgrade() else { break };
        rt.deliver(&slot, envelope);
        rt.finish();
    }
}

pub(crate) fn kind_name(kind: ComponentKind) -> &'static str {
    match kind {
        ComponentKind::Entity => "entity",
        ComponentKind::Context => "context",
        ComponentKind::Controller => "controller",
    }
}
