//! Component graph of a checked design and its DOT rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use serde::Serialize;

use crate::model::Interaction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Layer {
    Entity,
    Context,
    Controller,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentNode {
    pub name: String,
    pub layer: Layer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// entity source -> operator
    Source(String),
    /// context output -> operator
    ContextOutput,
    /// controller -> entity action
    Action(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataEdge {
    pub kind: EdgeKind,
    pub interaction: Interaction,
}

/// Directed graph whose nodes are the declared components. Data flows from
/// producers to consumers; action edges go from controllers to entities.
#[derive(Clone, Debug, Default)]
pub struct ComponentGraph {
    graph: DiGraph<ComponentNode, DataEdge>,
    index: BTreeMap<String, NodeIndex>,
}

impl ComponentGraph {
    pub(crate) fn add_node(&mut self, name: &str, layer: Layer) {
        if self.index.contains_key(name) {
            return;
        }
        let idx = self.graph.add_node(ComponentNode {
            name: name.to_owned(),
            layer,
        });
        self.index.insert(name.to_owned(), idx);
    }

    pub(crate) fn add_edge(&mut self, from: &str, to: &str, edge: DataEdge) {
        if let (Some(&a), Some(&b)) = (self.index.get(from), self.index.get(to)) {
            self.graph.add_edge(a, b, edge);
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> Vec<&ComponentNode> {
        self.index.values().map(|&i| &self.graph[i]).collect()
    }

    pub fn layer_of(&self, name: &str) -> Option<Layer> {
        self.index.get(name).map(|&i| self.graph[i].layer)
    }

    /// Every edge as `(from, to, edge)`, sorted by endpoint names.
    pub fn edges(&self) -> Vec<(&str, &str, &DataEdge)> {
        let mut out: Vec<_> = self
            .graph
            .edge_references()
            .map(|e| {
                (
                    self.graph[e.source()].name.as_str(),
                    self.graph[e.target()].name.as_str(),
                    e.weight(),
                )
            })
            .collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Distinct `(from, to)` component pairs.
    pub fn edge_pairs(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = self
            .edges()
            .into_iter()
            .map(|(a, b, _)| (a.to_owned(), b.to_owned()))
            .collect();
        pairs.dedup();
        pairs
    }

    /// Context names in an order where every context comes after the
    /// contexts it consumes.
    pub fn context_order(&self) -> Vec<String> {
        let contexts = self.graph.filter_map(
            |_, n| (n.layer == Layer::Context).then(|| n.clone()),
            |_, e| Some(e.clone()),
        );
        match petgraph::algo::toposort(&contexts, None) {
            Ok(order) => order.into_iter().map(|i| contexts[i].name.clone()).collect(),
            Err(_) => Vec::new(),
        }
    }

    /// DOT rendering; node shape encodes the layer.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph design {\n  rankdir=BT;\n");
        for node in self.nodes() {
            let shape = match node.layer {
                Layer::Entity => "box",
                Layer::Context => "ellipse",
                Layer::Controller => "hexagon",
            };
            writeln!(out, "  \"{}\" [shape={shape}];", node.name).unwrap();
        }

        let mut merged: BTreeMap<(&str, &str), (Vec<&str>, bool)> = BTreeMap::new();
        for (from, to, edge) in self.edges() {
            let entry = merged.entry((from, to)).or_default();
            match &edge.kind {
                EdgeKind::Source(s) | EdgeKind::Action(s) => entry.0.push(s),
                EdgeKind::ContextOutput => {}
            }
            entry.1 |= edge.interaction == Interaction::Pull;
        }
        for ((from, to), (labels, pull)) in merged {
            let mut attrs = Vec::new();
            if !labels.is_empty() {
                attrs.push(format!("label=\"{}\"", labels.join(", ")));
            }
            if pull {
                attrs.push("style=dashed".to_owned());
            }
            if attrs.is_empty() {
                writeln!(out, "  \"{from}\" -> \"{to}\";").unwrap();
            } else {
                writeln!(out, "  \"{from}\" -> \"{to}\" [{}];", attrs.join(", ")).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}
