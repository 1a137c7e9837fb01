//! Name resolution, type resolution and layering rules.
//!
//! | rule | constraint |
//! |------|------------|
//! | R1 | controllers consume only pushed context outputs |
//! | R2 | contexts consume only entity sources and context outputs |
//! | R3 | entities consume nothing |
//! | R4 | the context dependency graph is acyclic |
//! | R5 | every referenced name resolves (types, upstream contexts) |
//! | R6 | names are unique in their namespace |
//! | R7 | `source s from E` names an entity class `E` declaring `s` |
//! | R8 | `action A on E` names an entity class `E` declaring `A` |

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use petgraph::graph::DiGraph;

use crate::graph::{ComponentGraph, DataEdge, EdgeKind, Layer};
use crate::model::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleViolation {
    pub rule: Rule,
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error[{}]: {}", self.span, self.rule, self.message)
    }
}

/// Non-fatal findings, such as components nobody uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckWarning {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for CheckWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.span, self.message)
    }
}

/// A specification that passed every rule.
#[derive(Clone, Debug)]
pub struct CheckedSpec {
    spec: Specification,
    named_types: BTreeMap<String, DataType>,
    graph: ComponentGraph,
    warnings: Vec<CheckWarning>,
}

impl CheckedSpec {
    pub fn spec(&self) -> &Specification {
        &self.spec
    }

    pub fn graph(&self) -> &ComponentGraph {
        &self.graph
    }

    pub fn warnings(&self) -> &[CheckWarning] {
        &self.warnings
    }

    /// Declared structures and enumerations plus imports, keyed by the name
    /// used in type positions.
    pub fn named_types(&self) -> &BTreeMap<String, DataType> {
        &self.named_types
    }

    pub fn resolve(&self, ty: &TypeExpr) -> DataType {
        resolve_expr(ty, &self.named_types).expect("checked specs resolve every type")
    }

    pub fn source_type(&self, class: &str, source: &str) -> Option<DataType> {
        let src = self.spec.entity(class)?.source(source)?;
        Some(self.resolve(&src.ty))
    }

    pub fn context_type(&self, context: &str) -> Option<DataType> {
        Some(self.resolve(&self.spec.context(context)?.output))
    }

    /// Type delivered by an input binding.
    pub fn input_type(&self, input: &InputBinding) -> DataType {
        match &input.kind {
            InputKind::EntitySource { source, class } => self.source_type(&class.name, &source.name),
            InputKind::ContextOutput { context } => self.context_type(&context.name),
        }
        .expect("checked specs bind only declared inputs")
    }
}

/// Runs every rule. All violations are reported, ordered by location.
pub fn check(spec: &Specification) -> Result<CheckedSpec, Vec<RuleViolation>> {
    let mut cx = Checker {
        spec,
        kinds: HashMap::new(),
        violations: Vec::new(),
    };
    cx.unique_names();
    cx.types();
    cx.entities();
    cx.contexts();
    cx.controllers();
    cx.cycles();

    let mut violations = cx.violations;
    if !violations.is_empty() {
        violations.sort_by(|a, b| (&a.span, a.rule).cmp(&(&b.span, b.rule)));
        violations.dedup();
        return Err(violations);
    }

    let named_types = named_types(spec);
    let graph = build_graph(spec);
    let warnings = warnings(spec, &graph);
    Ok(CheckedSpec {
        spec: spec.clone(),
        named_types,
        graph,
        warnings,
    })
}

struct Checker<'a> {
    spec: &'a Specification,
    /// First declaration of every top-level name.
    kinds: HashMap<&'a str, DeclKind>,
    violations: Vec<RuleViolation>,
}

impl<'a> Checker<'a> {
    fn report(&mut self, rule: Rule, span: &SourceSpan, message: String) {
        self.violations.push(RuleViolation {
            rule,
            span: span.clone(),
            message,
        });
    }

    fn kind(&self, name: &str) -> Option<DeclKind> {
        self.kinds.get(name).copied()
    }

    fn unique_names(&mut self) {
        let mut first: HashMap<&str, (DeclKind, SourceSpan)> = HashMap::new();
        let mut dups = Vec::new();
        for (name, kind, span) in self.spec.declarations() {
            match first.get(name) {
                Some((k, at)) => dups.push((
                    span.clone(),
                    format!(
                        "`{name}` is already declared as {k} at {}:{}",
                        at.start_line, at.start_col
                    ),
                )),
                None => {
                    first.insert(name, (kind, span.clone()));
                }
            }
        }
        self.kinds = first.into_iter().map(|(n, (k, _))| (n, k)).collect();
        for (span, msg) in dups {
            self.report(Rule::R6, &span, msg);
        }

        for t in &self.spec.types {
            match t {
                TypeDecl::Structure { name, fields, .. } => {
                    let ids: Vec<&Ident> = fields.iter().map(|f| &f.name).collect();
                    self.unique_members(&ids, &format!("structure `{name}`"), "field");
                }
                TypeDecl::Enumeration { name, labels, .. } => {
                    let ids: Vec<&Ident> = labels.iter().collect();
                    self.unique_members(&ids, &format!("enumeration `{name}`"), "label");
                }
            }
        }
        for e in &self.spec.entities {
            let ids: Vec<&Ident> = e
                .attributes
                .iter()
                .map(|a| &a.name)
                .chain(e.sources.iter().map(|s| &s.name))
                .chain(e.actions.iter().map(|a| &a.name))
                .collect();
            self.unique_members(&ids, &format!("entity `{}`", e.name), "member");
            for a in &e.actions {
                let ids: Vec<&Ident> = a.params.iter().map(|p| &p.name).collect();
                self.unique_members(&ids, &format!("action `{}.{}`", e.name, a.name), "parameter");
            }
        }
        for c in &self.spec.contexts {
            self.unique_inputs(&c.inputs, &format!("context `{}`", c.name));
        }
        for c in &self.spec.controllers {
            self.unique_inputs(&c.inputs, &format!("controller `{}`", c.name));
            let mut seen = HashSet::new();
            for a in &c.actions {
                if !seen.insert((a.action.as_str(), a.entity.as_str())) {
                    self.report(
                        Rule::R6,
                        &a.span,
                        format!(
                            "controller `{}` binds action `{} on {}` twice",
                            c.name, a.action, a.entity
                        ),
                    );
                }
            }
        }
    }

    fn unique_members(&mut self, ids: &[&Ident], owner: &str, what: &str) {
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id.as_str()) {
                self.report(
                    Rule::R6,
                    &id.span,
                    format!("{owner} declares {what} `{id}` twice"),
                );
            }
        }
    }

    /// Inputs must differ both as references and by the name of the
    /// callback they produce.
    fn unique_inputs(&mut self, inputs: &[InputBinding], owner: &str) {
        let mut names = HashSet::new();
        for i in inputs {
            if !names.insert(i.input_name().as_str()) {
                self.report(
                    Rule::R6,
                    &i.span,
                    format!("{owner} already has an input named `{}`", i.input_name()),
                );
            }
        }
    }

    fn resolve_type_ref(&mut self, ty: &TypeExpr) {
        for id in ty.named_refs() {
            match self.kind(&id.name) {
                Some(DeclKind::Type) | Some(DeclKind::Import) => {}
                Some(other) => self.report(
                    Rule::R5,
                    &id.span,
                    format!("`{id}` is {other}, not a type"),
                ),
                None => self.report(
                    Rule::R5,
                    &id.span,
                    format!("unknown type `{id}`; declare it or import it"),
                ),
            }
        }
    }

    fn types(&mut self) {
        for t in &self.spec.types {
            if let TypeDecl::Structure { fields, .. } = t {
                for f in fields {
                    self.resolve_type_ref(&f.ty);
                }
            }
        }
        // a structure may only contain itself behind an array
        let structs: HashMap<&str, &Vec<TypedName>> = self
            .spec
            .types
            .iter()
            .filter_map(|t| match t {
                TypeDecl::Structure { name, fields, .. } => Some((name.as_str(), fields)),
                _ => None,
            })
            .collect();
        for t in &self.spec.types {
            if let TypeDecl::Structure { name, .. } = t {
                if contains_directly(name.as_str(), name.as_str(), &structs, &mut HashSet::new()) {
                    self.report(
                        Rule::R5,
                        &name.span,
                        format!("structure `{name}` contains itself without an array in between"),
                    );
                }
            }
        }
    }

    fn entities(&mut self) {
        for e in &self.spec.entities {
            for t in e.attributes.iter().chain(&e.sources) {
                self.resolve_type_ref(&t.ty);
            }
            for a in &e.actions {
                for p in &a.params {
                    self.resolve_type_ref(&p.ty);
                }
            }
            for i in &e.inputs {
                self.report(
                    Rule::R3,
                    &i.span,
                    format!(
                        "entity `{}` cannot consume `{}`; entities only provide sources and actions",
                        e.name,
                        i.input_name()
                    ),
                );
            }
        }
    }

    fn source_binding(&mut self, source: &Ident, class: &Ident, span: &SourceSpan) {
        match self.spec.entity(&class.name) {
            Some(e) if self.kind(&class.name) == Some(DeclKind::Entity) => {
                if e.source(&source.name).is_none() {
                    self.report(
                        Rule::R7,
                        &source.span,
                        format!("entity `{class}` has no source `{source}`"),
                    );
                }
            }
            _ => self.report(
                Rule::R7,
                span,
                format!("`{class}` is not an entity class, so it provides no source `{source}`"),
            ),
        }
    }

    fn contexts(&mut self) {
        for c in &self.spec.contexts {
            self.resolve_type_ref(&c.output);
            for i in &c.inputs {
                match &i.kind {
                    InputKind::EntitySource { source, class } => {
                        self.source_binding(source, class, &i.span)
                    }
                    InputKind::ContextOutput { context } => match self.kind(&context.name) {
                        Some(DeclKind::Context) => {}
                        Some(other) => self.report(
                            Rule::R2,
                            &context.span,
                            format!(
                                "context `{}` consumes `{context}`, which is {other}; contexts consume only entity sources and context outputs",
                                c.name
                            ),
                        ),
                        None => self.report(
                            Rule::R5,
                            &context.span,
                            format!("unknown context `{context}`"),
                        ),
                    },
                }
            }
        }
    }

    fn controllers(&mut self) {
        for c in &self.spec.controllers {
            for i in &c.inputs {
                match &i.kind {
                    InputKind::EntitySource { source, class } => self.report(
                        Rule::R1,
                        &i.span,
                        format!(
                            "controller `{}` consumes source `{source}` of `{class}`; controllers consume only context outputs",
                            c.name
                        ),
                    ),
                    InputKind::ContextOutput { context } => match self.kind(&context.name) {
                        Some(DeclKind::Context) if i.is_pull() => self.report(
                            Rule::R1,
                            &i.span,
                            format!(
                                "controller `{}` cannot pull `{context}`; controllers react to pushed context information",
                                c.name
                            ),
                        ),
                        Some(DeclKind::Context) => {}
                        Some(other) => self.report(
                            Rule::R1,
                            &context.span,
                            format!(
                                "controller `{}` consumes `{context}`, which is {other}; controllers consume only context outputs",
                                c.name
                            ),
                        ),
                        None => self.report(
                            Rule::R5,
                            &context.span,
                            format!("unknown context `{context}`"),
                        ),
                    },
                }
            }
            for a in &c.actions {
                match self.spec.entity(&a.entity.name) {
                    Some(e) if self.kind(&a.entity.name) == Some(DeclKind::Entity) => {
                        if e.action(&a.action.name).is_none() {
                            self.report(
                                Rule::R8,
                                &a.action.span,
                                format!("entity `{}` has no action `{}`", a.entity, a.action),
                            );
                        }
                    }
                    _ => self.report(
                        Rule::R8,
                        &a.entity.span,
                        format!(
                            "`{}` is not an entity class, so it has no action `{}`",
                            a.entity, a.action
                        ),
                    ),
                }
            }
        }
    }

    fn cycles(&mut self) {
        let mut g: DiGraph<&ContextOperator, ()> = DiGraph::new();
        let mut index = HashMap::new();
        for c in &self.spec.contexts {
            index.entry(c.name.as_str()).or_insert_with(|| g.add_node(c));
        }
        for c in &self.spec.contexts {
            for i in &c.inputs {
                if let InputKind::ContextOutput { context } = &i.kind {
                    if let (Some(&from), Some(&to)) =
                        (index.get(context.as_str()), index.get(c.name.as_str()))
                    {
                        g.add_edge(from, to, ());
                    }
                }
            }
        }
        for scc in petgraph::algo::tarjan_scc(&g) {
            let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
            if !cyclic {
                continue;
            }
            let mut members: Vec<&ContextOperator> = scc.iter().map(|&i| g[i]).collect();
            members.sort_by(|a, b| a.span.cmp(&b.span));
            let names: Vec<&str> = members.iter().map(|c| c.name.as_str()).collect();
            let first = members[0];
            self.report(
                Rule::R4,
                &first.name.span,
                format!("context dependency cycle through {}", names.join(", ")),
            );
        }
    }
}

fn contains_directly<'a>(
    target: &str,
    current: &'a str,
    structs: &HashMap<&'a str, &'a Vec<TypedName>>,
    visited: &mut HashSet<&'a str>,
) -> bool {
    if !visited.insert(current) {
        return false;
    }
    let Some(fields) = structs.get(current) else {
        return false;
    };
    fields.iter().any(|f| match &f.ty {
        TypeExpr::Named(id) => {
            id.name == target || contains_directly(target, id.as_str(), structs, visited)
        }
        _ => false,
    })
}

fn named_types(spec: &Specification) -> BTreeMap<String, DataType> {
    let mut known: BTreeMap<String, DataType> = BTreeMap::new();
    for i in &spec.imports {
        known.insert(i.local_name().to_owned(), DataType::Imported(i.qualified_name()));
    }
    let decls: HashMap<&str, &TypeDecl> =
        spec.types.iter().map(|t| (t.name().as_str(), t)).collect();

    fn build(
        decl: &TypeDecl,
        decls: &HashMap<&str, &TypeDecl>,
        known: &mut BTreeMap<String, DataType>,
        building: &mut HashSet<String>,
    ) -> DataType {
        if let Some(t) = known.get(decl.name().as_str()) {
            return t.clone();
        }
        let ty = match decl {
            TypeDecl::Enumeration { name, labels, .. } => DataType::Enumeration {
                name: name.name.clone(),
                labels: labels.iter().map(|l| l.name.clone()).collect(),
            },
            TypeDecl::Structure { name, fields, .. } => {
                building.insert(name.name.clone());
                let fields = fields
                    .iter()
                    .map(|f| (f.name.name.clone(), build_expr(&f.ty, decls, known, building)))
                    .collect();
                building.remove(name.as_str());
                DataType::Structure {
                    name: name.name.clone(),
                    fields,
                }
            }
        };
        known.insert(decl.name().name.clone(), ty.clone());
        ty
    }

    fn build_expr(
        ty: &TypeExpr,
        decls: &HashMap<&str, &TypeDecl>,
        known: &mut BTreeMap<String, DataType>,
        building: &mut HashSet<String>,
    ) -> DataType {
        match ty {
            TypeExpr::Primitive(k, _) => DataType::Primitive(*k),
            TypeExpr::Array(inner, _) => {
                DataType::array_of(build_expr(inner, decls, known, building))
            }
            TypeExpr::Named(id) => match known.get(id.as_str()) {
                Some(t) => t.clone(),
                None => match decls.get(id.as_str()) {
                    Some(d) if !building.contains(id.as_str()) => build(d, decls, known, building),
                    // a structure under construction or an unresolved name:
                    // refer to it by name only (nominal typing)
                    _ => DataType::Structure {
                        name: id.name.clone(),
                        fields: Vec::new(),
                    },
                },
            },
        }
    }

    let mut building = HashSet::new();
    for t in &spec.types {
        build(t, &decls, &mut known, &mut building);
    }
    known
}

fn resolve_expr(ty: &TypeExpr, named: &BTreeMap<String, DataType>) -> Option<DataType> {
    Some(match ty {
        TypeExpr::Primitive(k, _) => DataType::Primitive(*k),
        TypeExpr::Named(id) => named.get(id.as_str())?.clone(),
        TypeExpr::Array(inner, _) => DataType::array_of(resolve_expr(inner, named)?),
    })
}

fn build_graph(spec: &Specification) -> ComponentGraph {
    let mut g = ComponentGraph::default();
    for e in &spec.entities {
        g.add_node(e.name.as_str(), Layer::Entity);
    }
    for c in &spec.contexts {
        g.add_node(c.name.as_str(), Layer::Context);
    }
    for c in &spec.controllers {
        g.add_node(c.name.as_str(), Layer::Controller);
    }
    let input_edge = |g: &mut ComponentGraph, consumer: &str, i: &InputBinding| {
        let kind = match &i.kind {
            InputKind::EntitySource { source, .. } => EdgeKind::Source(source.name.clone()),
            InputKind::ContextOutput { .. } => EdgeKind::ContextOutput,
        };
        g.add_edge(
            i.producer().as_str(),
            consumer,
            DataEdge {
                kind,
                interaction: i.interaction,
            },
        );
    };
    for c in &spec.contexts {
        for i in &c.inputs {
            input_edge(&mut g, c.name.as_str(), i);
        }
    }
    for c in &spec.controllers {
        for i in &c.inputs {
            input_edge(&mut g, c.name.as_str(), i);
        }
        for a in &c.actions {
            g.add_edge(
                c.name.as_str(),
                a.entity.as_str(),
                DataEdge {
                    kind: EdgeKind::Action(a.action.name.clone()),
                    interaction: Interaction::Push,
                },
            );
        }
    }
    g
}

fn warnings(spec: &Specification, graph: &ComponentGraph) -> Vec<CheckWarning> {
    let connected: HashSet<&str> = graph
        .edges()
        .into_iter()
        .flat_map(|(a, b, _)| [a, b])
        .collect();
    let mut out = Vec::new();
    for e in &spec.entities {
        if e.sources.is_empty() && e.actions.is_empty() {
            out.push(CheckWarning {
                span: e.name.span.clone(),
                message: format!("entity `{}` declares neither sources nor actions", e.name),
            });
        } else if !connected.contains(e.name.as_str()) {
            out.push(CheckWarning {
                span: e.name.span.clone(),
                message: format!("entity `{}` is never used", e.name),
            });
        }
    }
    for c in &spec.contexts {
        let consumed = graph
            .edges()
            .iter()
            .any(|(from, _, _)| *from == c.name.as_str());
        if !consumed {
            out.push(CheckWarning {
                span: c.name.span.clone(),
                message: format!("output of context `{}` is never consumed", c.name),
            });
        }
    }
    out.sort_by(|a, b| a.span.cmp(&b.span));
    out
}
