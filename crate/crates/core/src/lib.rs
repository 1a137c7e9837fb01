//! Front end and framework generator for the SCC design language.
//!
//! ```
//! let spec = scc_core::parse("entity Lamp { action On(); }", "lamp.scc").unwrap();
//! let checked = scc_core::check(&spec).unwrap();
//! assert_eq!(checked.graph().node_count(), 1);
//! ```

pub mod analyzer;
pub mod codegen;
pub mod diagnostic;
pub mod graph;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod pretty;

pub use analyzer::{check, CheckWarning, CheckedSpec, Rule, RuleViolation};
pub use codegen::{emit, generate, CodegenError, GeneratedFramework, ImplementationKind, ImplementationPoint};
pub use diagnostic::{ParseDiagnostic, Severity};
pub use graph::{ComponentGraph, Layer};
pub use model::{DataType, Specification};
pub use parser::parse;
pub use pretty::pretty_print;

/// DOT rendering of the component graph.
pub fn export_graph(checked: &CheckedSpec) -> String {
    checked.graph().to_dot()
}
