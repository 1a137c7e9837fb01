//! Canonical text form of a [`Specification`].

use std::fmt::Write;

use crate::model::*;

/// Formats `spec` canonically: imports first, then types, entities,
/// contexts and controllers, one blank line between declarations.
pub fn pretty_print(spec: &Specification) -> String {
    let mut blocks: Vec<String> = Vec::new();

    if !spec.imports.is_empty() {
        let mut s = String::new();
        for i in &spec.imports {
            writeln!(s, "import {};", i.qualified_name()).unwrap();
        }
        blocks.push(s);
    }

    for t in &spec.types {
        blocks.push(match t {
            TypeDecl::Structure { name, fields, .. } => {
                let body: String = fields
                    .iter()
                    .map(|f| format!("{} as {}; ", f.name, f.ty))
                    .collect();
                format!("structure {name} {{ {body}}}\n")
            }
            TypeDecl::Enumeration { name, labels, .. } => {
                let labels: Vec<&str> = labels.iter().map(Ident::as_str).collect();
                format!("enumeration {name} {{ {} }}\n", labels.join(", "))
            }
        });
    }

    for e in &spec.entities {
        let mut s = format!("entity {} {{\n", e.name);
        for a in &e.attributes {
            writeln!(s, "  attribute {} as {};", a.name, a.ty).unwrap();
        }
        for src in &e.sources {
            writeln!(s, "  source {} as {};", src.name, src.ty).unwrap();
        }
        for a in &e.actions {
            let params: Vec<String> = a
                .params
                .iter()
                .map(|p| format!("{} as {}", p.name, p.ty))
                .collect();
            writeln!(s, "  action {}({});", a.name, params.join(", ")).unwrap();
        }
        for i in &e.inputs {
            writeln!(s, "  {}", input(i)).unwrap();
        }
        s.push_str("}\n");
        blocks.push(s);
    }

    for c in &spec.contexts {
        let mut s = format!("context {} as {} {{\n", c.name, c.output);
        for i in &c.inputs {
            writeln!(s, "  {}", input(i)).unwrap();
        }
        s.push_str("}\n");
        blocks.push(s);
    }

    for c in &spec.controllers {
        let mut s = format!("controller {} {{\n", c.name);
        for i in &c.inputs {
            writeln!(s, "  {}", input(i)).unwrap();
        }
        for a in &c.actions {
            writeln!(s, "  action {} on {};", a.action, a.entity).unwrap();
        }
        s.push_str("}\n");
        blocks.push(s);
    }

    blocks.join("\n")
}

fn input(i: &InputBinding) -> String {
    let pull = if i.is_pull() { " pull" } else { "" };
    match &i.kind {
        InputKind::EntitySource { source, class } => format!("source {source} from {class}{pull};"),
        InputKind::ContextOutput { context } => format!("context {context}{pull};"),
    }
}
