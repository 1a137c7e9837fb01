use crate::design::{ComponentKind, Design, Interaction};
use crate::error::RuntimeError;
use crate::event::ComponentId;
use crate::runtime::{EntityPublisher, Handler, Runtime, RuntimeConfig};
use crate::value::Value;

type PendingEntity = (ComponentId, Box<dyn Handler>, Vec<(String, Value)>);

/// Collects one factory product per design component, then starts them
/// all at once. Nothing runs before [`Deployment::start`] succeeds.
pub struct Deployment {
    runtime: Runtime,
    operators: Vec<(String, Box<dyn Handler>)>,
    entities: Vec<PendingEntity>,
}

impl Deployment {
    pub fn new(design: Design, config: RuntimeConfig) -> Self {
        Deployment {
            runtime: Runtime::new(design, config),
            operators: Vec::new(),
            entities: Vec::new(),
        }
    }

    pub fn runtime(&self) -> &Runtime {
        &self.runtime
    }

    /// Publisher for the next instance of `class`, to hand to its factory.
    pub fn publisher(&self, class: &str) -> Result<EntityPublisher, RuntimeError> {
        let id = self.runtime.allocate_entity_id(class)?;
        Ok(self.runtime.publisher(&id))
    }

    pub fn add_entity(
        &mut self,
        publisher: &EntityPublisher,
        handler: Box<dyn Handler>,
        attributes: Vec<(String, Value)>,
    ) {
        self.entities
            .push((publisher.id().clone(), handler, attributes));
    }

    pub fn add_operator(&mut self, name: &str, handler: Box<dyn Handler>) {
        self.operators.push((name.to_owned(), handler));
    }

    /// Declared components that have no factory product yet.
    pub fn missing(&self) -> Vec<String> {
        self.runtime
            .design()
            .components
            .iter()
            .filter(|c| match c.kind {
                ComponentKind::Entity => !self.entities.iter().any(|(id, ..)| *id.name == c.name),
                _ => !self.operators.iter().any(|(n, _)| *n == c.name),
            })
            .map(|c| c.name.clone())
            .collect()
    }

    /// Instantiates operators, wires context subscriptions, registers
    /// entities, then runs every `post_initialize`.
    pub fn start(self) -> Result<RunningSystem, RuntimeError> {
        let missing = self.missing();
        if !missing.is_empty() {
            return Err(RuntimeError::MissingFactory(missing));
        }
        let rt = self.runtime;
        let design = rt.design().clone();
        for (name, _) in &self.operators {
            if design.component(name).map(|c| c.kind) == Some(ComponentKind::Entity) {
                return Err(RuntimeError::NotAnOperator(name.clone()));
            }
        }
        for (id, _, attrs) in &self.entities {
            let decl = rt.inner.decl(&id.name)?;
            rt.inner.check_attributes(decl, attrs)?;
        }

        let started = (|| {
            let mut ids = Vec::new();
            for (name, handler) in self.operators {
                ids.push(rt.add_operator(&name, handler)?);
            }
            for id in &ids {
                let decl = design.component(&id.name).expect("operator is declared");
                for input in &decl.inputs {
                    let from_context = design.component(&input.producer).map(|c| c.kind)
                        == Some(ComponentKind::Context);
                    if from_context && input.interaction == Interaction::Push {
                        rt.subscribe_context(id, &input.producer)?;
                    }
                }
            }
            for (id, handler, attrs) in self.entities {
                ids.push(rt.register_entity(id, handler, attrs)?);
            }
            for id in &ids {
                rt.post_initialize(id)?;
            }
            Ok(ids)
        })();

        match started {
            Ok(ids) => Ok(RunningSystem { runtime: rt, ids }),
            Err(e) => {
                rt.shutdown();
                Err(e)
            }
        }
    }
}

/// A started deployment. Dropping it shuts the runtime down.
pub struct RunningSystem {
    runtime: Runtime,
    ids: Vec<ComponentId>,
}

impl RunningSystem {
    pub fn runtime(&self) -> &Runtime {
        &self.runtime
    }

    /// Components started by the deployment, operators first.
    pub fn components(&self) -> &[ComponentId] {
        &self.ids
    }

    pub fn shutdown(self) {
        self.runtime.shutdown();
    }
}

impl Drop for RunningSystem {
    fn drop(&mut self) {
        self.runtime.shutdown();
    }
}
