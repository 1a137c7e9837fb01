//! Abstract syntax and data types of the SCC design language.
//!
//! The syntax tree keeps type references unresolved ([`TypeExpr`]); the
//! analyzer turns them into [`DataType`]s.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Words of the language that may never be used as identifiers.
pub const RESERVED_WORDS: &[&str] = &[
    "import",
    "structure",
    "enumeration",
    "entity",
    "attribute",
    "source",
    "action",
    "context",
    "controller",
    "as",
    "from",
    "pull",
    "on",
    "Boolean",
    "Integer",
    "Float",
    "String",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.contains(&word)
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A region of a source file. Lines and columns are 1-based; the end
/// position is exclusive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, start: (u32, u32), end: (u32, u32)) -> Self {
        SourceSpan {
            file,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file.clone(), start, end)
    }

    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: SourceSpan::default(),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PrimitiveKind {
    Boolean,
    Integer,
    Float,
    String,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 4] = [
        PrimitiveKind::Boolean,
        PrimitiveKind::Integer,
        PrimitiveKind::Float,
        PrimitiveKind::String,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            PrimitiveKind::Boolean => "Boolean",
            PrimitiveKind::Integer => "Integer",
            PrimitiveKind::Float => "Float",
            PrimitiveKind::String => "String",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        PrimitiveKind::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

/// A type as written in the source, before name resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    Primitive(PrimitiveKind, SourceSpan),
    Named(Ident),
    Array(Box<TypeExpr>, SourceSpan),
}

impl TypeExpr {
    pub fn span(&self) -> &SourceSpan {
        match self {
            TypeExpr::Primitive(_, span) | TypeExpr::Array(_, span) => span,
            TypeExpr::Named(id) => &id.span,
        }
    }

    /// Every named type referenced by this expression.
    pub fn named_refs(&self) -> Vec<&Ident> {
        match self {
            TypeExpr::Primitive(..) => Vec::new(),
            TypeExpr::Named(id) => vec![id],
            TypeExpr::Array(inner, _) => inner.named_refs(),
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Primitive(k, _) => f.write_str(k.keyword()),
            TypeExpr::Named(id) => f.write_str(&id.name),
            TypeExpr::Array(inner, _) => write!(f, "{inner}[]"),
        }
    }
}

/// `name as type`, used for fields, attributes, sources and parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: Ident,
    pub ty: TypeExpr,
    pub span: SourceSpan,
}

impl TypedName {
    pub fn new(name: &str, ty: TypeExpr) -> Self {
        TypedName {
            name: Ident::new(name),
            ty,
            span: SourceSpan::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeDecl {
    Structure {
        name: Ident,
        fields: Vec<TypedName>,
        span: SourceSpan,
    },
    Enumeration {
        name: Ident,
        labels: Vec<Ident>,
        span: SourceSpan,
    },
}

impl TypeDecl {
    pub fn name(&self) -> &Ident {
        match self {
            TypeDecl::Structure { name, .. } | TypeDecl::Enumeration { name, .. } => name,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            TypeDecl::Structure { span, .. } | TypeDecl::Enumeration { span, .. } => span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    /// Dot-separated segments, e.g. `["geometry_msgs", "Twist"]`.
    pub segments: Vec<String>,
    pub span: SourceSpan,
}

impl Import {
    pub fn qualified_name(&self) -> String {
        self.segments.join(".")
    }

    /// The name under which the import is referenced in type positions.
    pub fn local_name(&self) -> &str {
        self.segments.last().map(String::as_str).unwrap_or("")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Interaction {
    Push,
    Pull,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputKind {
    /// `source <source> from <class>`
    EntitySource { source: Ident, class: Ident },
    /// `context <name>`
    ContextOutput { context: Ident },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputBinding {
    pub kind: InputKind,
    pub interaction: Interaction,
    pub span: SourceSpan,
}

impl InputBinding {
    /// Name of the data item the binding delivers: the source name, or the
    /// upstream context name.
    pub fn input_name(&self) -> &Ident {
        match &self.kind {
            InputKind::EntitySource { source, .. } => source,
            InputKind::ContextOutput { context } => context,
        }
    }

    /// The component producing the input.
    pub fn producer(&self) -> &Ident {
        match &self.kind {
            InputKind::EntitySource { class, .. } => class,
            InputKind::ContextOutput { context } => context,
        }
    }

    pub fn is_pull(&self) -> bool {
        self.interaction == Interaction::Pull
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSig {
    pub name: Ident,
    pub params: Vec<TypedName>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityClass {
    pub name: Ident,
    pub attributes: Vec<TypedName>,
    pub sources: Vec<TypedName>,
    pub actions: Vec<ActionSig>,
    /// Always empty in a valid design; kept so that the checker can report
    /// entities which try to consume data.
    pub inputs: Vec<InputBinding>,
    pub span: SourceSpan,
}

impl EntityClass {
    pub fn source(&self, name: &str) -> Option<&TypedName> {
        self.sources.iter().find(|s| s.name.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSig> {
        self.actions.iter().find(|a| a.name.name == name)
    }

    pub fn attribute(&self, name: &str) -> Option<&TypedName> {
        self.attributes.iter().find(|a| a.name.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextOperator {
    pub name: Ident,
    pub output: TypeExpr,
    pub inputs: Vec<InputBinding>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionBinding {
    pub action: Ident,
    pub entity: Ident,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlOperator {
    pub name: Ident,
    pub inputs: Vec<InputBinding>,
    pub actions: Vec<ActionBinding>,
    pub span: SourceSpan,
}

/// One parsed compilation unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Specification {
    pub imports: Vec<Import>,
    pub types: Vec<TypeDecl>,
    pub entities: Vec<EntityClass>,
    pub contexts: Vec<ContextOperator>,
    pub controllers: Vec<ControlOperator>,
}

/// What kind of declaration a top-level name refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DeclKind {
    Import,
    Type,
    Entity,
    Context,
    Controller,
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeclKind::Import => "import",
            DeclKind::Type => "type",
            DeclKind::Entity => "entity",
            DeclKind::Context => "context",
            DeclKind::Controller => "controller",
        })
    }
}

impl Specification {
    pub fn is_empty(&self) -> bool {
        self.imports.is_empty()
            && self.types.is_empty()
            && self.entities.is_empty()
            && self.contexts.is_empty()
            && self.controllers.is_empty()
    }

    pub fn entity(&self, name: &str) -> Option<&EntityClass> {
        self.entities.iter().find(|e| e.name.name == name)
    }

    pub fn context(&self, name: &str) -> Option<&ContextOperator> {
        self.contexts.iter().find(|c| c.name.name == name)
    }

    pub fn controller(&self, name: &str) -> Option<&ControlOperator> {
        self.controllers.iter().find(|c| c.name.name == name)
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.name().name == name)
    }

    /// Every top-level name with its kind and span, in source order per kind.
    pub fn declarations(&self) -> Vec<(&str, DeclKind, &SourceSpan)> {
        let mut out = Vec::new();
        for i in &self.imports {
            out.push((i.local_name(), DeclKind::Import, &i.span));
        }
        for t in &self.types {
            out.push((t.name().as_str(), DeclKind::Type, &t.name().span));
        }
        for e in &self.entities {
            out.push((e.name.as_str(), DeclKind::Entity, &e.name.span));
        }
        for c in &self.contexts {
            out.push((c.name.as_str(), DeclKind::Context, &c.name.span));
        }
        for c in &self.controllers {
            out.push((c.name.as_str(), DeclKind::Controller, &c.name.span));
        }
        out
    }

    pub fn kind_of(&self, name: &str) -> Option<DeclKind> {
        self.declarations()
            .into_iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, k, _)| k)
    }

    /// A copy with every span reset, for comparisons that ignore locations.
    pub fn without_spans(&self) -> Specification {
        let mut spec = self.clone();
        spec.clear_spans();
        spec
    }

    fn clear_spans(&mut self) {
        fn ident(id: &mut Ident) {
            id.span = SourceSpan::default();
        }
        fn ty(t: &mut TypeExpr) {
            match t {
                TypeExpr::Primitive(_, span) => *span = SourceSpan::default(),
                TypeExpr::Named(id) => ident(id),
                TypeExpr::Array(inner, span) => {
                    *span = SourceSpan::default();
                    ty(inner);
                }
            }
        }
        fn typed(list: &mut [TypedName]) {
            for t in list {
                ident(&mut t.name);
                ty(&mut t.ty);
                t.span = SourceSpan::default();
            }
        }
        fn inputs(list: &mut [InputBinding]) {
            for i in list {
                match &mut i.kind {
                    InputKind::EntitySource { source, class } => {
                        ident(source);
                        ident(class);
                    }
                    InputKind::ContextOutput { context } => ident(context),
                }
                i.span = SourceSpan::default();
            }
        }

        for i in &mut self.imports {
            i.span = SourceSpan::default();
        }
        for t in &mut self.types {
            match t {
                TypeDecl::Structure { name, fields, span } => {
                    ident(name);
                    typed(fields);
                    *span = SourceSpan::default();
                }
                TypeDecl::Enumeration { name, labels, span } => {
                    ident(name);
                    labels.iter_mut().for_each(ident);
                    *span = SourceSpan::default();
                }
            }
        }
        for e in &mut self.entities {
            ident(&mut e.name);
            typed(&mut e.attributes);
            typed(&mut e.sources);
            for a in &mut e.actions {
                ident(&mut a.name);
                typed(&mut a.params);
                a.span = SourceSpan::default();
            }
            inputs(&mut e.inputs);
            e.span = SourceSpan::default();
        }
        for c in &mut self.contexts {
            ident(&mut c.name);
            ty(&mut c.output);
            inputs(&mut c.inputs);
            c.span = SourceSpan::default();
        }
        for c in &mut self.controllers {
            ident(&mut c.name);
            inputs(&mut c.inputs);
            for a in &mut c.actions {
                ident(&mut a.action);
                ident(&mut a.entity);
                a.span = SourceSpan::default();
            }
            c.span = SourceSpan::default();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("enumeration `{0}` must declare at least one label")]
    EmptyEnumeration(String),
    #[error("enumeration `{0}` declares label `{1}` twice")]
    DuplicateLabel(String, String),
    #[error("structure `{0}` must declare at least one field")]
    EmptyStructure(String),
    #[error("structure `{0}` declares field `{1}` twice")]
    DuplicateField(String, String),
}

/// A resolved data type.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DataType {
    Primitive(PrimitiveKind),
    Enumeration {
        name: String,
        labels: Vec<String>,
    },
    Structure {
        name: String,
        fields: Vec<(String, DataType)>,
    },
    Imported(String),
    ArrayOf(Box<DataType>),
}

impl DataType {
    pub fn enumeration(name: &str, labels: Vec<String>) -> Result<Self, ModelError> {
        if labels.is_empty() {
            return Err(ModelError::EmptyEnumeration(name.to_owned()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ModelError::DuplicateLabel(name.to_owned(), l.clone()));
            }
        }
        Ok(DataType::Enumeration {
            name: name.to_owned(),
            labels,
        })
    }

    pub fn structure(name: &str, fields: Vec<(String, DataType)>) -> Result<Self, ModelError> {
        if fields.is_empty() {
            return Err(ModelError::EmptyStructure(name.to_owned()));
        }
        for (i, (f, _)) in fields.iter().enumerate() {
            if fields[..i].iter().any(|(g, _)| g == f) {
                return Err(ModelError::DuplicateField(name.to_owned(), f.clone()));
            }
        }
        Ok(DataType::Structure {
            name: name.to_owned(),
            fields,
        })
    }

    pub fn array_of(element: DataType) -> Self {
        DataType::ArrayOf(Box::new(element))
    }

    /// Structural for primitives and arrays, nominal for declared and
    /// imported types.
    pub fn type_equal(&self, other: &DataType) -> bool {
        match (self, other) {
            (DataType::Primitive(a), DataType::Primitive(b)) => a == b,
            (DataType::ArrayOf(a), DataType::ArrayOf(b)) => a.type_equal(b),
            (DataType::Enumeration { name: a, .. }, DataType::Enumeration { name: b, .. }) => {
                a == b
            }
            (DataType::Structure { name: a, .. }, DataType::Structure { name: b, .. }) => a == b,
            (DataType::Imported(a), DataType::Imported(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Primitive(k) => f.write_str(k.keyword()),
            DataType::Enumeration { name, .. } | DataType::Structure { name, .. } => {
                f.write_str(name)
            }
            DataType::Imported(q) => f.write_str(q),
            DataType::ArrayOf(inner) => write!(f, "{inner}[]"),
        }
    }
}
