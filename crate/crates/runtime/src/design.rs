//! Description of a deployed design, as emitted by the framework generator.

use std::collections::BTreeMap;

use crate::value::{TypeDesc, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Entity,
    Context,
    Controller,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Interaction {
    Push,
    Pull,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeDef {
    Structure(Vec<(String, TypeDesc)>),
    Enumeration(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub params: Vec<(String, TypeDesc)>,
}

/// One input of an operator. For context outputs `producer` and `channel`
/// are both the context name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDecl {
    pub producer: String,
    pub channel: String,
    pub interaction: Interaction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: String,
    pub kind: ComponentKind,
    pub attributes: Vec<(String, TypeDesc)>,
    pub sources: Vec<(String, TypeDesc)>,
    pub actions: Vec<ActionDecl>,
    pub output: Option<TypeDesc>,
    pub inputs: Vec<InputDecl>,
    /// `(action, entity class)` pairs a controller may invoke.
    pub action_bindings: Vec<(String, String)>,
}

impl ComponentDecl {
    fn new(name: &str, kind: ComponentKind) -> Self {
        ComponentDecl {
            name: name.to_owned(),
            kind,
            attributes: Vec::new(),
            sources: Vec::new(),
            actions: Vec::new(),
            output: None,
            inputs: Vec::new(),
            action_bindings: Vec::new(),
        }
    }

    pub fn entity(name: &str) -> Self {
        Self::new(name, ComponentKind::Entity)
    }

    pub fn context(name: &str, output: TypeDesc) -> Self {
        let mut decl = Self::new(name, ComponentKind::Context);
        decl.output = Some(output);
        decl
    }

    pub fn controller(name: &str) -> Self {
        Self::new(name, ComponentKind::Controller)
    }

    pub fn attribute(mut self, name: &str, ty: TypeDesc) -> Self {
        self.attributes.push((name.to_owned(), ty));
        self
    }

    pub fn source(mut self, name: &str, ty: TypeDesc) -> Self {
        self.sources.push((name.to_owned(), ty));
        self
    }

    pub fn action(mut self, name: &str, params: Vec<(&str, TypeDesc)>) -> Self {
        self.actions.push(ActionDecl {
            name: name.to_owned(),
            params: params.into_iter().map(|(n, t)| (n.to_owned(), t)).collect(),
        });
        self
    }

    pub fn source_input(mut self, class: &str, source: &str, interaction: Interaction) -> Self {
        self.inputs.push(InputDecl {
            producer: class.to_owned(),
            channel: source.to_owned(),
            interaction,
        });
        self
    }

    pub fn context_input(mut self, context: &str, interaction: Interaction) -> Self {
        self.inputs.push(InputDecl {
            producer: context.to_owned(),
            channel: context.to_owned(),
            interaction,
        });
        self
    }

    pub fn binds(mut self, action: &str, entity: &str) -> Self {
        self.action_bindings
            .push((action.to_owned(), entity.to_owned()));
        self
    }

    /// Channels this component publishes on, with their types.
    pub fn channel_type(&self, channel: &str) -> Option<&TypeDesc> {
        match self.kind {
            ComponentKind::Entity => self
                .sources
                .iter()
                .find(|(n, _)| n == channel)
                .map(|(_, t)| t),
            ComponentKind::Context if channel == self.name => self.output.as_ref(),
            _ => None,
        }
    }

    pub fn input(&self, producer: &str, channel: &str) -> Option<&InputDecl> {
        self.inputs
            .iter()
            .find(|i| i.producer == producer && i.channel == channel)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Design {
    pub types: BTreeMap<String, TypeDef>,
    pub components: Vec<ComponentDecl>,
}

impl Design {
    pub fn with_type(mut self, name: &str, def: TypeDef) -> Self {
        self.types.insert(name.to_owned(), def);
        self
    }

    pub fn with_component(mut self, decl: ComponentDecl) -> Self {
        self.components.push(decl);
        self
    }

    pub fn component(&self, name: &str) -> Option<&ComponentDecl> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Whether `value` is a well-formed instance of `ty`.
    pub fn conforms(&self, value: &Value, ty: &TypeDesc) -> bool {
        match (ty, value) {
            (TypeDesc::Bool, Value::Bool(_))
            | (TypeDesc::Int, Value::Int(_))
            | (TypeDesc::Float, Value::Float(_))
            | (TypeDesc::Str, Value::Str(_)) => true,
            (TypeDesc::Imported(name), Value::Opaque(o)) => o.type_name() == name,
            (TypeDesc::Array(inner), Value::Array(items)) => {
                items.iter().all(|v| self.conforms(v, inner))
            }
            (TypeDesc::Enum(name), Value::Enum { type_name, label }) => {
                type_name == name
                    && matches!(self.types.get(name), Some(TypeDef::Enumeration(labels)) if labels.contains(label))
            }
            (TypeDesc::Struct(name), Value::Struct { type_name, fields }) => {
                if type_name != name {
                    return false;
                }
                let Some(TypeDef::Structure(decl)) = self.types.get(name) else {
                    return false;
                };
                decl.len() == fields.len()
                    && decl.iter().all(|(fname, fty)| {
                        fields
                            .iter()
                            .find(|(n, _)| n == fname)
                            .is_some_and(|(_, v)| self.conforms(v, fty))
                    })
            }
            _ => false,
        }
    }
}
