use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use scc_runtime::*;

fn design() -> Design {
    Design::default()
        .with_type("Mode", TypeDef::Enumeration(vec!["A".into(), "B".into()]))
        .with_component(ComponentDecl::entity("Switch").source("mode", TypeDesc::Enum("Mode".into())))
        .with_component(ComponentDecl::entity("Lamp").action("On", vec![]))
        .with_component(
            ComponentDecl::context("Current", TypeDesc::Enum("Mode".into())).source_input(
                "Switch",
                "mode",
                Interaction::Push,
            ),
        )
        .with_component(
            ComponentDecl::controller("Panel")
                .context_input("Current", Interaction::Push)
                .binds("On", "Lamp"),
        )
}

/// Subscribes in `post_initialize` and forwards every mode.
struct Current(Arc<AtomicUsize>);

impl Handler for Current {
    fn on_event(&mut self, event: &Event, port: &mut Port) -> Result<(), RuntimeError> {
        port.publish("Current", event.value.clone())
    }

    fn post_initialize(&mut self, port: &mut Port) -> Result<(), RuntimeError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        port.subscribe(DiscoveryQuery::all("Switch"), "mode")
    }
}

struct Panel;

impl Handler for Panel {
    fn on_event(&mut self, _: &Event, port: &mut Port) -> Result<(), RuntimeError> {
        port.invoke_all(&DiscoveryQuery::all("Lamp"), "On", vec![])?;
        Ok(())
    }
}

struct Lamp(Arc<AtomicUsize>);

impl Handler for Lamp {
    fn on_action(&mut self, _: &str, _: &[Value], _: &mut Port) -> Result<(), RuntimeError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }
}

struct Idle;
impl Handler for Idle {}

struct Counters {
    init: Arc<AtomicUsize>,
    lamp: Arc<AtomicUsize>,
}

fn deployment(skip: Option<&str>) -> (Deployment, EntityPublisher, Counters) {
    let c = Counters {
        init: Arc::new(AtomicUsize::new(0)),
        lamp: Arc::new(AtomicUsize::new(0)),
    };
    let mut d = Deployment::new(design(), RuntimeConfig::default());
    if skip != Some("Current") {
        d.add_operator("Current", Box::new(Current(c.init.clone())));
    }
    if skip != Some("Panel") {
        d.add_operator("Panel", Box::new(Panel));
    }
    let switch = d.publisher("Switch").unwrap();
    d.add_entity(&switch, Box::new(Idle), vec![]);
    if skip != Some("Lamp") {
        let lamp = d.publisher("Lamp").unwrap();
        d.add_entity(&lamp, Box::new(Lamp(c.lamp.clone())), vec![]);
    }
    (d, switch, c)
}

#[test]
fn full_deployment_starts_and_wires() {
    let (d, switch, c) = deployment(None);
    let system = d.start().unwrap();
    assert_eq!(system.runtime().component_count(), 4);
    assert_eq!(system.components().len(), 4);
    assert_eq!(c.init.load(Ordering::SeqCst), 1);
    switch.publish("mode", Value::enumeration("Mode", "B")).unwrap();
    system.runtime().settle();
    assert_eq!(c.lamp.load(Ordering::SeqCst), 1);
    system.shutdown();
}

#[test]
fn missing_factory_refuses_before_anything_runs() {
    let (d, _, c) = deployment(Some("Panel"));
    assert_eq!(d.missing(), vec!["Panel".to_string()]);
    let rt = d.runtime().clone();
    match d.start() {
        Err(RuntimeError::MissingFactory(names)) => assert_eq!(names, vec!["Panel".to_string()]),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("deployment should be refused"),
    }
    assert_eq!(rt.component_count(), 0);
    assert_eq!(c.init.load(Ordering::SeqCst), 0);

    let (d, _, _) = deployment(Some("Lamp"));
    assert!(matches!(d.start(), Err(RuntimeError::MissingFactory(n)) if n == ["Lamp"]));
}

#[test]
fn shutdown_on_drop() {
    let (d, switch, c) = deployment(None);
    let system = d.start().unwrap();
    let rt = system.runtime().clone();
    drop(system);
    assert!(rt.is_shut_down());
    assert!(switch.publish("mode", Value::enumeration("Mode", "A")).is_err());
    assert_eq!(c.lamp.load(Ordering::SeqCst), 0);
}

#[test]
fn bad_attributes_refuse_deployment() {
    let design = Design::default().with_component(
        ComponentDecl::entity("Tagged")
            .attribute("tag", TypeDesc::Str)
            .source("s", TypeDesc::Bool),
    );
    let mut d = Deployment::new(design, RuntimeConfig::default());
    let p = d.publisher("Tagged").unwrap();
    d.add_entity(&p, Box::new(Idle), vec![]);
    let rt = d.runtime().clone();
    assert!(matches!(d.start(), Err(RuntimeError::MissingAttribute { .. })));
    assert_eq!(rt.component_count(), 0);
}
