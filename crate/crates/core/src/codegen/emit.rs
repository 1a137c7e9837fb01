//! Rendering of a checked design into Rust source units.

use std::collections::BTreeSet;

use super::naming::{ident, snake_case, type_ident, Scope};
use super::{CodegenError, ImplementationKind, ImplementationPoint, HEADER};
use crate::analyzer::CheckedSpec;
use crate::model::{
    ContextOperator, ControlOperator, DataType, EntityClass, InputBinding, InputKind, Interaction,
    PrimitiveKind, TypeDecl,
};

const RT: &str = "::scc_runtime";
const RESULT: &str = "::std::result::Result";
const STRING: &str = "::std::string::String";
const VEC: &str = "::std::vec::Vec";
const BOX: &str = "::std::boxed::Box";

macro_rules! out {
    ($buf:expr) => { $buf.push('\n') };
    ($buf:expr, $($arg:tt)*) => {{
        $buf.push_str(&format!($($arg)*));
        $buf.push('\n');
    }};
}

/// Where generated items live, as seen from the code being written.
#[derive(Clone, Copy)]
pub(super) enum Site<'a> {
    /// Inside `generated/<module>.rs`.
    Unit,
    /// Inside a developer file next to the `generated` module.
    Developer(&'a str),
}

impl Site<'_> {
    fn root(&self) -> &'static str {
        match self {
            Site::Unit => "super",
            Site::Developer(_) => "crate::generated",
        }
    }

    /// Path prefix of an item declared in the component's own unit.
    fn local(&self) -> String {
        match self {
            Site::Unit => String::new(),
            Site::Developer(module) => format!("crate::generated::{module}::"),
        }
    }
}

fn types_path(site: Site<'_>) -> String {
    format!("{}::types", site.root())
}

/// Host type of a design type. `types` is the path of the types module, or
/// empty inside it.
pub(super) fn rust_type(ty: &DataType, types: &str) -> Result<String, CodegenError> {
    Ok(match ty {
        DataType::Primitive(PrimitiveKind::Boolean) => "bool".into(),
        DataType::Primitive(PrimitiveKind::Integer) => "i64".into(),
        DataType::Primitive(PrimitiveKind::Float) => "f64".into(),
        DataType::Primitive(PrimitiveKind::String) => STRING.into(),
        DataType::Enumeration { name, .. } | DataType::Structure { name, .. } => {
            if types.is_empty() {
                type_ident(name)?
            } else {
                format!("{types}::{}", type_ident(name)?)
            }
        }
        DataType::Imported(qualified) => imported_path(qualified)?,
        DataType::ArrayOf(inner) => format!("{VEC}<{}>", rust_type(inner, types)?),
    })
}

fn imported_path(qualified: &str) -> Result<String, CodegenError> {
    let segments: Result<Vec<String>, CodegenError> = qualified.split('.').map(ident).collect();
    Ok(format!("crate::{}", segments?.join("::")))
}

fn type_desc(ty: &DataType) -> String {
    match ty {
        DataType::Primitive(PrimitiveKind::Boolean) => format!("{RT}::TypeDesc::Bool"),
        DataType::Primitive(PrimitiveKind::Integer) => format!("{RT}::TypeDesc::Int"),
        DataType::Primitive(PrimitiveKind::Float) => format!("{RT}::TypeDesc::Float"),
        DataType::Primitive(PrimitiveKind::String) => format!("{RT}::TypeDesc::Str"),
        DataType::Enumeration { name, .. } => format!("{RT}::TypeDesc::Enum({STRING}::from({name:?}))"),
        DataType::Structure { name, .. } => format!("{RT}::TypeDesc::Struct({STRING}::from({name:?}))"),
        DataType::Imported(q) => format!("{RT}::TypeDesc::Imported({STRING}::from({q:?}))"),
        DataType::ArrayOf(inner) => format!("{RT}::TypeDesc::array({})", type_desc(inner)),
    }
}

fn interaction(i: Interaction) -> String {
    match i {
        Interaction::Push => format!("{RT}::Interaction::Push"),
        Interaction::Pull => format!("{RT}::Interaction::Pull"),
    }
}

fn rt_result(ok: &str) -> String {
    format!("{RESULT}<{ok}, {RT}::RuntimeError>")
}

/// Everything the renderer needs to know about one component.
pub(super) struct Names {
    pub module: String,
    pub ty: String,
}

pub(super) struct Emitter<'a> {
    pub checked: &'a CheckedSpec,
    pulled_sources: BTreeSet<(String, String)>,
    pulled_contexts: BTreeSet<String>,
}

impl<'a> Emitter<'a> {
    pub fn new(checked: &'a CheckedSpec) -> Self {
        let spec = checked.spec();
        let mut pulled_sources = BTreeSet::new();
        let mut pulled_contexts = BTreeSet::new();
        let inputs = spec
            .contexts
            .iter()
            .flat_map(|c| &c.inputs)
            .chain(spec.controllers.iter().flat_map(|c| &c.inputs));
        for input in inputs.filter(|i| i.is_pull()) {
            match &input.kind {
                InputKind::EntitySource { source, class } => {
                    pulled_sources.insert((class.name.clone(), source.name.clone()));
                }
                InputKind::ContextOutput { context } => {
                    pulled_contexts.insert(context.name.clone());
                }
            }
        }
        Emitter {
            checked,
            pulled_sources,
            pulled_contexts,
        }
    }

    pub fn names(&self, component: &str) -> Result<Names, CodegenError> {
        Ok(Names {
            module: ident(&snake_case(component))?,
            ty: type_ident(component)?,
        })
    }

    fn resolve_named(&self, input: &InputBinding) -> DataType {
        self.checked.input_type(input)
    }

    fn has_types(&self) -> bool {
        let spec = self.checked.spec();
        !spec.types.is_empty() || !spec.imports.is_empty()
    }

    // ---- types -------------------------------------------------------

    pub fn types_unit(&self) -> Result<Option<String>, CodegenError> {
        if !self.has_types() {
            return Ok(None);
        }
        let spec = self.checked.spec();
        let mut b = String::from(HEADER);
        out!(b);
        let mut scope = Scope::new("module `types`");
        for decl in &spec.types {
            out!(b);
            match decl {
                TypeDecl::Structure { name, fields, .. } => {
                    let ty = type_ident(&name.name)?;
                    scope.claim(&ty, &name.name)?;
                    self.structure(&mut b, &name.name, &ty, fields)?;
                }
                TypeDecl::Enumeration { name, labels, .. } => {
                    let ty = type_ident(&name.name)?;
                    scope.claim(&ty, &name.name)?;
                    let labels: Vec<String> = labels.iter().map(|l| l.name.clone()).collect();
                    enumeration(&mut b, &name.name, &ty, &labels)?;
                }
            }
        }
        for import in &spec.imports {
            let q = import.qualified_name();
            let path = imported_path(&q)?;
            out!(b);
            out!(b, "impl {RT}::Payload for {path} {{");
            out!(b, "    fn to_value(&self) -> {RT}::Value {{");
            out!(b, "        {RT}::Value::opaque({q:?}, ::std::clone::Clone::clone(self))");
            out!(b, "    }}");
            out!(b);
            out!(b, "    fn from_value(value: &{RT}::Value) -> {RESULT}<Self, {RT}::ValueError> {{");
            out!(b, "        {RT}::opaque_value(value, {q:?})");
            out!(b, "    }}");
            out!(b, "}}");
        }
        Ok(Some(b))
    }

    fn structure(
        &self,
        b: &mut String,
        name: &str,
        ty: &str,
        fields: &[crate::model::TypedName],
    ) -> Result<(), CodegenError> {
        let mut scope = Scope::new(format!("structure `{name}`"));
        let mut rendered = Vec::new();
        for f in fields {
            let field = ident(&snake_case(&f.name.name))?;
            scope.claim(&field, &f.name.name)?;
            let t = rust_type(&self.checked.resolve(&f.ty), "")?;
            rendered.push((f.name.name.clone(), field, t));
        }
        out!(b, "#[derive(Debug, Clone, PartialEq)]");
        out!(b, "pub struct {ty} {{");
        for (_, field, t) in &rendered {
            out!(b, "    pub {field}: {t},");
        }
        out!(b, "}}");
        out!(b);
        out!(b, "impl {RT}::Payload for {ty} {{");
        out!(b, "    fn to_value(&self) -> {RT}::Value {{");
        out!(b, "        {RT}::Value::Struct {{");
        out!(b, "            type_name: {STRING}::from({name:?}),");
        out!(b, "            fields: ::std::vec![");
        for (dsl, field, _) in &rendered {
            out!(b, "                ({STRING}::from({dsl:?}), {RT}::Payload::to_value(&self.{field})),");
        }
        out!(b, "            ],");
        out!(b, "        }}");
        out!(b, "    }}");
        out!(b);
        out!(b, "    fn from_value(value: &{RT}::Value) -> {RESULT}<Self, {RT}::ValueError> {{");
        out!(b, "        {RESULT}::Ok({ty} {{");
        for (dsl, field, _) in &rendered {
            out!(b, "            {field}: {RT}::struct_field(value, {name:?}, {dsl:?})?,");
        }
        out!(b, "        }})");
        out!(b, "    }}");
        out!(b, "}}");
        Ok(())
    }

    // ---- entities ----------------------------------------------------

    fn action_signatures(&self, e: &EntityClass, site: Site<'_>) -> Result<Vec<(String, String)>, CodegenError> {
        let types = types_path(site);
        let mut scope = Scope::new(format!("trait `Abstract{}`", type_ident(&e.name.name)?));
        let mut sigs = Vec::new();
        for a in &e.actions {
            let method = ident(&snake_case(&a.name.name))?;
            scope.claim(&method, &a.name.name)?;
            let mut params = Scope::new(format!("action `{}`", a.name.name));
            let mut list = String::from("&mut self");
            for p in &a.params {
                let pn = ident(&snake_case(&p.name.name))?;
                params.claim(&pn, &p.name.name)?;
                let t = rust_type(&self.checked.resolve(&p.ty), &types)?;
                list.push_str(&format!(", {pn}: {t}"));
            }
            sigs.push((
                a.name.name.clone(),
                format!("fn {method}({list}) -> {}", rt_result("()")),
            ));
        }
        for s in &e.sources {
            if !self.pulled_sources.contains(&(e.name.name.clone(), s.name.name.clone())) {
                continue;
            }
            let method = ident(&format!("provide_{}", snake_case(&s.name.name)))?;
            scope.claim(&method, &s.name.name)?;
            let t = rust_type(&self.checked.resolve(&s.ty), &types)?;
            sigs.push((
                s.name.name.clone(),
                format!("fn {method}(&mut self) -> {RESULT}<{t}, {RT}::ProviderError>"),
            ));
        }
        Ok(sigs)
    }

    pub fn entity_unit(
        &self,
        e: &EntityClass,
        manifest: &mut Vec<ImplementationPoint>,
    ) -> Result<String, CodegenError> {
        let n = self.names(&e.name.name)?;
        let cname = &e.name.name;
        let ty = &n.ty;
        let types = types_path(Site::Unit);
        let mut tscope = Scope::new(format!("module `{}`", n.module));
        for t in [format!("{ty}Attributes"), format!("{ty}Publisher"), format!("Abstract{ty}"), format!("{ty}Adapter")] {
            tscope.claim(&t, cname)?;
        }
        tscope.claim("register", cname)?;

        let mut b = String::from(HEADER);
        out!(b);

        // attributes
        let mut ascope = Scope::new(format!("attributes of `{cname}`"));
        let mut attrs = Vec::new();
        for a in &e.attributes {
            let f = ident(&snake_case(&a.name.name))?;
            ascope.claim(&f, &a.name.name)?;
            attrs.push((a.name.name.clone(), f, rust_type(&self.checked.resolve(&a.ty), &types)?));
        }
        out!(b);
        out!(b, "/// Attributes of a `{cname}` instance, fixed at registration.");
        if attrs.is_empty() {
            out!(b, "#[derive(Debug, Clone, Default, PartialEq)]");
        } else {
            out!(b, "#[derive(Debug, Clone, PartialEq)]");
        }
        out!(b, "pub struct {ty}Attributes {{");
        for (_, f, t) in &attrs {
            out!(b, "    pub {f}: {t},");
        }
        out!(b, "}}");
        out!(b);
        out!(b, "impl {ty}Attributes {{");
        out!(b, "    pub fn to_values(&self) -> {VEC}<({STRING}, {RT}::Value)> {{");
        if attrs.is_empty() {
            out!(b, "        {VEC}::new()");
        } else {
            out!(b, "        ::std::vec![");
            for (dsl, f, _) in &attrs {
                out!(b, "            ({STRING}::from({dsl:?}), {RT}::Payload::to_value(&self.{f})),");
            }
            out!(b, "        ]");
        }
        out!(b, "    }}");
        out!(b, "}}");

        // publisher
        let mut pscope = Scope::new(format!("`{ty}Publisher`"));
        pscope.claim("new", cname)?;
        pscope.claim("id", cname)?;
        out!(b);
        out!(b, "/// Publishes the sources of one `{cname}` instance.");
        out!(b, "#[derive(Clone)]");
        out!(b, "pub struct {ty}Publisher {{");
        out!(b, "    inner: {RT}::EntityPublisher,");
        out!(b, "}}");
        out!(b);
        out!(b, "impl {ty}Publisher {{");
        out!(b, "    pub fn new(inner: {RT}::EntityPublisher) -> Self {{");
        out!(b, "        {ty}Publisher {{ inner }}");
        out!(b, "    }}");
        out!(b);
        out!(b, "    pub fn id(&self) -> &{RT}::ComponentId {{");
        out!(b, "        self.inner.id()");
        out!(b, "    }}");
        for s in &e.sources {
            let m = ident(&format!("publish_{}", snake_case(&s.name.name)))?;
            pscope.claim(&m, &s.name.name)?;
            let t = rust_type(&self.checked.resolve(&s.ty), &types)?;
            out!(b);
            out!(b, "    pub fn {m}(&self, value: {t}) -> {} {{", rt_result("()"));
            out!(b, "        self.inner.publish({:?}, {RT}::Payload::to_value(&value))", s.name.name);
            out!(b, "    }}");
        }
        out!(b, "}}");

        // abstract type
        let sigs = self.action_signatures(e, Site::Unit)?;
        out!(b);
        out!(b, "/// Developer implementation of `{cname}`.");
        if sigs.is_empty() {
            out!(b, "pub trait Abstract{ty}: ::std::marker::Send {{}}");
        } else {
            out!(b, "pub trait Abstract{ty}: ::std::marker::Send {{");
            for (i, (_, sig)) in sigs.iter().enumerate() {
                if i > 0 {
                    out!(b);
                }
                out!(b, "    {sig};");
            }
            out!(b, "}}");
        }
        let n_actions = e.actions.len();
        for (i, (_, sig)) in sigs.iter().enumerate() {
            manifest.push(ImplementationPoint {
                component_name: cname.clone(),
                kind: if i < n_actions {
                    ImplementationKind::EntityActionHandler
                } else {
                    ImplementationKind::EntitySourceProvider
                },
                required_signature: sig.clone(),
            });
        }

        // adapter
        out!(b);
        out!(b, "/// Connects an [`Abstract{ty}`] to the runtime.");
        out!(b, "pub struct {ty}Adapter {{");
        out!(b, "    inner: {BOX}<dyn Abstract{ty}>,");
        out!(b, "}}");
        out!(b);
        out!(b, "impl {ty}Adapter {{");
        out!(b, "    pub fn new(inner: {BOX}<dyn Abstract{ty}>) -> Self {{");
        out!(b, "        {ty}Adapter {{ inner }}");
        out!(b, "    }}");
        out!(b);
        out!(b, "    pub fn inner_mut(&mut self) -> &mut dyn Abstract{ty} {{");
        out!(b, "        &mut *self.inner");
        out!(b, "    }}");
        let mut calls = Vec::new();
        for a in &e.actions {
            let method = ident(&snake_case(&a.name.name))?;
            let call = format!("call_{}", snake_case(&a.name.name));
            out!(b);
            out!(b, "    fn {call}(&mut self, args: &[{RT}::Value]) -> {} {{", rt_result("()"));
            let count = a.params.len();
            out!(b, "        if args.len() != {count} {{");
            out!(
                b,
                "            return {RESULT}::Err({RT}::RuntimeError::handler(\"`{}` expects {count} argument{}\"));",
                a.name.name,
                if count == 1 { "" } else { "s" }
            );
            out!(b, "        }}");
            let mut names = Vec::new();
            for (i, p) in a.params.iter().enumerate() {
                let pn = ident(&snake_case(&p.name.name))?;
                let t = rust_type(&self.checked.resolve(&p.ty), &types)?;
                out!(b, "        let {pn}: {t} = {RT}::Payload::from_value(&args[{i}])?;");
                names.push(pn);
            }
            out!(b, "        self.inner.{method}({})", names.join(", "));
            out!(b, "    }}");
            calls.push((a.name.name.clone(), call));
        }
        out!(b, "}}");
        out!(b);
        let provides: Vec<_> = e
            .sources
            .iter()
            .filter(|s| self.pulled_sources.contains(&(cname.clone(), s.name.name.clone())))
            .collect();
        if calls.is_empty() && provides.is_empty() {
            out!(b, "impl {RT}::Handler for {ty}Adapter {{}}");
        } else {
            out!(b, "impl {RT}::Handler for {ty}Adapter {{");
            if !calls.is_empty() {
                out!(b, "    fn on_action(");
                out!(b, "        &mut self,");
                out!(b, "        action: &str,");
                out!(b, "        args: &[{RT}::Value],");
                out!(b, "        _port: &mut {RT}::Port,");
                out!(b, "    ) -> {} {{", rt_result("()"));
                out!(b, "        match action {{");
                for (dsl, call) in &calls {
                    out!(b, "            {dsl:?} => self.{call}(args),");
                }
                out!(b, "            other => {RESULT}::Err({RT}::RuntimeError::handler(::std::format!(");
                out!(b, "                \"`{cname}` has no action `{{}}`\",");
                out!(b, "                other");
                out!(b, "            ))),");
                out!(b, "        }}");
                out!(b, "    }}");
            }
            if !provides.is_empty() {
                if !calls.is_empty() {
                    out!(b);
                }
                out!(b, "    fn provide(");
                out!(b, "        &mut self,");
                out!(b, "        channel: &str,");
                out!(b, "        _port: &mut {RT}::Port,");
                out!(b, "    ) -> {RESULT}<{RT}::Value, {RT}::ProviderError> {{");
                out!(b, "        match channel {{");
                for s in provides {
                    let m = ident(&format!("provide_{}", snake_case(&s.name.name)))?;
                    out!(
                        b,
                        "            {:?} => self.inner.{m}().map(|v| {RT}::Payload::to_value(&v)),",
                        s.name.name
                    );
                }
                out!(b, "            other => {RESULT}::Err({RT}::ProviderError::new(::std::format!(");
                out!(b, "                \"`{cname}` cannot provide `{{}}`\",");
                out!(b, "                other");
                out!(b, "            ))),");
                out!(b, "        }}");
                out!(b, "    }}");
            }
            out!(b, "}}");
        }

        // dynamic registration
        out!(b);
        out!(b, "/// Registers one more `{cname}` instance on a running system.");
        out!(b, "pub fn register(");
        out!(b, "    runtime: &{RT}::Runtime,");
        out!(b, "    build: impl FnOnce({ty}Publisher) -> ({BOX}<dyn Abstract{ty}>, {ty}Attributes),");
        out!(b, ") -> {} {{", rt_result(&format!("{RT}::ComponentId")));
        out!(b, "    let id = runtime.allocate_entity_id({cname:?})?;");
        out!(b, "    let (implementation, attributes) = build({ty}Publisher::new(runtime.publisher(&id)));");
        out!(b, "    runtime.register_entity(");
        out!(b, "        id,");
        out!(b, "        {BOX}::new({ty}Adapter::new(implementation)),");
        out!(b, "        attributes.to_values(),");
        out!(b, "    )");
        out!(b, "}}");
        Ok(b)
    }

    // ---- operators ---------------------------------------------------

    fn callback_signatures(
        &self,
        name: &str,
        inputs: &[InputBinding],
        site: Site<'_>,
    ) -> Result<Vec<(String, String)>, CodegenError> {
        let ty = type_ident(name)?;
        let types = types_path(site);
        let local = site.local();
        let mut scope = Scope::new(format!("trait `Abstract{ty}`"));
        scope.claim("post_initialize", name)?;
        let mut sigs = Vec::new();
        for input in inputs.iter().filter(|i| !i.is_pull()) {
            let dsl = input.input_name().name.clone();
            let method = ident(&format!("on_{}", snake_case(&dsl)))?;
            scope.claim(&method, &dsl)?;
            let t = rust_type(&self.resolve_named(input), &types)?;
            sigs.push((
                dsl,
                format!(
                    "fn {method}(&mut self, value: {t}, cx: &mut {local}{ty}Context<'_>) -> {}",
                    rt_result("()")
                ),
            ));
        }
        Ok(sigs)
    }

    /// Context proxy methods shared by contexts and controllers.
    fn proxy_methods(
        &self,
        b: &mut String,
        scope: &mut Scope,
        inputs: &[InputBinding],
        extra_types: &mut Vec<String>,
        tscope: &mut Scope,
    ) -> Result<(), CodegenError> {
        let types = types_path(Site::Unit);
        let spec = self.checked.spec();
        for input in inputs.iter().filter(|i| i.is_pull()) {
            let t = rust_type(&self.resolve_named(input), &types)?;
            match &input.kind {
                InputKind::ContextOutput { context } => {
                    let m = ident(&format!("get_{}", snake_case(&context.name)))?;
                    scope.claim(&m, &context.name)?;
                    out!(b);
                    out!(b, "    /// Current output of `{}`, if it has published.", context.name);
                    out!(b, "    pub fn {m}(&mut self) -> {} {{", rt_result(&format!("::std::option::Option<{t}>")));
                    out!(b, "        match self.port.request_context({:?})? {{", context.name);
                    out!(b, "            ::std::option::Option::Some(v) => {{");
                    out!(b, "                {RESULT}::Ok(::std::option::Option::Some({RT}::Payload::from_value(&v)?))");
                    out!(b, "            }}");
                    out!(b, "            ::std::option::Option::None => {RESULT}::Ok(::std::option::Option::None),");
                    out!(b, "        }}");
                    out!(b, "    }}");
                }
                InputKind::EntitySource { source, class } => {
                    let m = ident(&format!("get_{}", snake_case(&source.name)))?;
                    scope.claim(&m, &source.name)?;
                    out!(b);
                    out!(b, "    /// `{}` of every `{}` instance, in registration order.", source.name, class.name);
                    out!(b, "    pub fn {m}(&mut self) -> {} {{", rt_result(&format!("{VEC}<{t}>")));
                    out!(
                        b,
                        "        let values = self.port.request(&{RT}::DiscoveryQuery::all({:?}), {:?})?;",
                        class.name,
                        source.name
                    );
                    out!(b, "        let mut out = {VEC}::with_capacity(values.len());");
                    out!(b, "        for v in &values {{");
                    out!(b, "            out.push({RT}::Payload::from_value(v)?);");
                    out!(b, "        }}");
                    out!(b, "        {RESULT}::Ok(out)");
                    out!(b, "    }}");
                }
            }
        }

        // subscription proxies, one per entity class with push source inputs
        let mut classes: Vec<(&str, Vec<&str>)> = Vec::new();
        for input in inputs.iter().filter(|i| !i.is_pull()) {
            if let InputKind::EntitySource { source, class } = &input.kind {
                match classes.iter_mut().find(|(c, _)| *c == class.name) {
                    Some((_, sources)) => sources.push(&source.name),
                    None => classes.push((&class.name, vec![&source.name])),
                }
            }
        }
        for (class, sources) in classes {
            let entity = spec.entity(class).expect("checked specs bind declared entities");
            let cty = type_ident(class)?;
            let proxy = format!("{cty}Subscription");
            tscope.claim(&proxy, class)?;
            let m = ident(&format!("discover_{}_for_subscribe", snake_case(class)))?;
            scope.claim(&m, class)?;
            out!(b);
            out!(b, "    /// Selects `{class}` instances whose sources to receive.");
            out!(b, "    pub fn {m}(&mut self) -> {proxy}<'_> {{");
            out!(b, "        {proxy} {{");
            out!(b, "            port: &mut *self.port,");
            out!(b, "            query: {RT}::DiscoveryQuery::all({class:?}),");
            out!(b, "        }}");
            out!(b, "    }}");

            let mut p = String::new();
            let mut pscope = Scope::new(format!("`{proxy}`"));
            out!(p);
            out!(p, "/// Discovery of `{class}` instances for subscription.");
            out!(p, "pub struct {proxy}<'a> {{");
            out!(p, "    port: &'a mut {RT}::Port,");
            out!(p, "    query: {RT}::DiscoveryQuery,");
            out!(p, "}}");
            out!(p);
            out!(p, "impl {proxy}<'_> {{");
            self.selectors(&mut p, &mut pscope, entity)?;
            for source in sources {
                let sm = ident(&format!("subscribe_{}", snake_case(source)))?;
                pscope.claim(&sm, source)?;
                out!(p);
                out!(p, "    /// Receives `{source}` from every selected instance, including later ones.");
                out!(p, "    pub fn {sm}(self) -> {} {{", rt_result("()"));
                out!(p, "        self.port.subscribe(self.query, {source:?})");
                out!(p, "    }}");
            }
            out!(p, "}}");
            extra_types.push(p);
        }
        Ok(())
    }

    fn selectors(&self, b: &mut String, scope: &mut Scope, entity: &EntityClass) -> Result<(), CodegenError> {
        let types = types_path(Site::Unit);
        scope.claim("all", "all")?;
        out!(b, "    pub fn all(self) -> Self {{");
        out!(b, "        self");
        out!(b, "    }}");
        for a in &entity.attributes {
            let m = ident(&format!("where_{}", snake_case(&a.name.name)))?;
            scope.claim(&m, &a.name.name)?;
            let t = rust_type(&self.checked.resolve(&a.ty), &types)?;
            out!(b);
            out!(b, "    /// Keeps instances whose `{}` equals `value`.", a.name.name);
            out!(b, "    pub fn {m}(self, value: {t}) -> Self {{");
            out!(b, "        Self {{");
            out!(
                b,
                "            query: self.query.filter({:?}, {RT}::Payload::to_value(&value)),",
                a.name.name
            );
            out!(b, "            port: self.port,");
            out!(b, "        }}");
            out!(b, "    }}");
        }
        Ok(())
    }

    fn operator_unit(
        &self,
        name: &str,
        inputs: &[InputBinding],
        output: Option<&DataType>,
        controller: Option<&ControlOperator>,
        manifest: &mut Vec<ImplementationPoint>,
    ) -> Result<String, CodegenError> {
        let n = self.names(name)?;
        let ty = &n.ty;
        let types = types_path(Site::Unit);
        let pulled = output.is_some() && self.pulled_contexts.contains(name);
        let layer = if controller.is_some() { "controller" } else { "context" };

        let mut tscope = Scope::new(format!("module `{}`", n.module));
        for t in [format!("{ty}Context"), format!("Abstract{ty}"), format!("{ty}Adapter")] {
            tscope.claim(&t, name)?;
        }

        let mut b = String::from(HEADER);
        out!(b);
        out!(b);
        out!(b, "/// What a `{name}` callback may do.");
        out!(b, "pub struct {ty}Context<'a> {{");
        out!(b, "    port: &'a mut {RT}::Port,");
        if pulled {
            out!(b, "    last: &'a mut ::std::option::Option<{RT}::Value>,");
        }
        out!(b, "}}");
        out!(b);
        out!(b, "impl {ty}Context<'_> {{");
        let mut mscope = Scope::new(format!("`{ty}Context`"));
        mscope.claim("id", name)?;
        mscope.claim("now_ms", name)?;
        out!(b, "    pub fn id(&self) -> &{RT}::ComponentId {{");
        out!(b, "        self.port.id()");
        out!(b, "    }}");
        out!(b);
        out!(b, "    pub fn now_ms(&self) -> u64 {{");
        out!(b, "        self.port.now_ms()");
        out!(b, "    }}");
        if let Some(out_ty) = output {
            let m = ident(&format!("publish_{}", snake_case(name)))?;
            mscope.claim(&m, name)?;
            let t = rust_type(out_ty, &types)?;
            out!(b);
            out!(b, "    /// Publishes a new output of `{name}`.");
            out!(b, "    pub fn {m}(&mut self, value: {t}) -> {} {{", rt_result("()"));
            out!(b, "        let value = {RT}::Payload::to_value(&value);");
            if pulled {
                out!(b, "        self.port.publish({name:?}, ::std::clone::Clone::clone(&value))?;");
                out!(b, "        *self.last = ::std::option::Option::Some(value);");
                out!(b, "        {RESULT}::Ok(())");
            } else {
                out!(b, "        self.port.publish({name:?}, value)");
            }
            out!(b, "    }}");
        }
        let mut extra = Vec::new();
        self.proxy_methods(&mut b, &mut mscope, inputs, &mut extra, &mut tscope)?;
        if let Some(ctrl) = controller {
            let spec = self.checked.spec();
            let mut groups: Vec<(&str, Vec<&str>)> = Vec::new();
            for binding in &ctrl.actions {
                match groups.iter_mut().find(|(e, _)| *e == binding.entity.name) {
                    Some((_, acts)) => acts.push(&binding.action.name),
                    None => groups.push((&binding.entity.name, vec![&binding.action.name])),
                }
            }
            for (entity_name, actions) in groups {
                let entity = spec.entity(entity_name).expect("checked specs bind declared entities");
                let ety = type_ident(entity_name)?;
                let proxy = format!("{ety}Actions");
                tscope.claim(&proxy, entity_name)?;
                let discover = ident(&format!("discover_{}_for_action", snake_case(entity_name)))?;
                let short = ident(&snake_case(entity_name))?;
                mscope.claim(&discover, entity_name)?;
                mscope.claim(&short, entity_name)?;
                out!(b);
                out!(b, "    /// Selects `{entity_name}` instances to act on.");
                out!(b, "    pub fn {discover}(&mut self) -> {proxy}<'_> {{");
                out!(b, "        {proxy} {{");
                out!(b, "            port: &mut *self.port,");
                out!(b, "            query: {RT}::DiscoveryQuery::all({entity_name:?}),");
                out!(b, "        }}");
                out!(b, "    }}");
                out!(b);
                out!(b, "    /// Every `{entity_name}` instance.");
                out!(b, "    pub fn {short}(&mut self) -> {proxy}<'_> {{");
                out!(b, "        self.{discover}()");
                out!(b, "    }}");

                let mut p = String::new();
                let mut pscope = Scope::new(format!("`{proxy}`"));
                out!(p);
                out!(p, "/// Actions on selected `{entity_name}` instances.");
                out!(p, "pub struct {proxy}<'a> {{");
                out!(p, "    port: &'a mut {RT}::Port,");
                out!(p, "    query: {RT}::DiscoveryQuery,");
                out!(p, "}}");
                out!(p);
                out!(p, "impl {proxy}<'_> {{");
                self.selectors(&mut p, &mut pscope, entity)?;
                for action in actions {
                    let sig = entity.action(action).expect("checked specs bind declared actions");
                    let m = ident(&snake_case(action))?;
                    pscope.claim(&m, action)?;
                    let mut params = String::new();
                    let mut args = Vec::new();
                    for prm in &sig.params {
                        let pn = ident(&snake_case(&prm.name.name))?;
                        let t = rust_type(&self.checked.resolve(&prm.ty), &types)?;
                        params.push_str(&format!(", {pn}: {t}"));
                        args.push(format!("{RT}::Payload::to_value(&{pn})"));
                    }
                    let args = if args.is_empty() {
                        format!("{VEC}::new()")
                    } else {
                        format!("::std::vec![{}]", args.join(", "))
                    };
                    out!(p);
                    out!(p, "    /// Orders `{action}`; returns how many instances were addressed.");
                    out!(p, "    pub fn {m}(&mut self{params}) -> {} {{", rt_result("usize"));
                    out!(p, "        self.port.invoke_all(&self.query, {action:?}, {args})");
                    out!(p, "    }}");
                }
                out!(p, "}}");
                extra.push(p);
            }
        }
        out!(b, "}}");
        for p in extra {
            b.push_str(&p);
        }

        // abstract type
        let sigs = self.callback_signatures(name, inputs, Site::Unit)?;
        let kind = if controller.is_some() {
            ImplementationKind::ControllerCallback
        } else {
            ImplementationKind::ContextCallback
        };
        out!(b);
        out!(b, "/// Developer implementation of the `{name}` {layer}.");
        out!(b, "pub trait Abstract{ty}: ::std::marker::Send {{");
        for (_, sig) in &sigs {
            out!(b, "    {sig};");
            out!(b);
            manifest.push(ImplementationPoint {
                component_name: name.to_owned(),
                kind,
                required_signature: sig.clone(),
            });
        }
        if controller.is_some() {
            out!(b, "    /// Runs once after deployment wiring.");
        } else {
            out!(b, "    /// Runs once after deployment wiring; the place to subscribe.");
        }
        out!(b, "    fn post_initialize(&mut self, cx: &mut {ty}Context<'_>) -> {} {{", rt_result("()"));
        out!(b, "        let _ = cx;");
        out!(b, "        {RESULT}::Ok(())");
        out!(b, "    }}");
        out!(b, "}}");

        // adapter
        let cx_init = if pulled {
            format!("{ty}Context {{ port, last: &mut self.last }}")
        } else {
            format!("{ty}Context {{ port }}")
        };
        out!(b);
        out!(b, "/// Connects an [`Abstract{ty}`] to the runtime.");
        out!(b, "pub struct {ty}Adapter {{");
        out!(b, "    inner: {BOX}<dyn Abstract{ty}>,");
        if pulled {
            out!(b, "    last: ::std::option::Option<{RT}::Value>,");
        }
        out!(b, "}}");
        out!(b);
        out!(b, "impl {ty}Adapter {{");
        out!(b, "    pub fn new(inner: {BOX}<dyn Abstract{ty}>) -> Self {{");
        if pulled {
            out!(b, "        {ty}Adapter {{ inner, last: ::std::option::Option::None }}");
        } else {
            out!(b, "        {ty}Adapter {{ inner }}");
        }
        out!(b, "    }}");
        out!(b);
        out!(b, "    pub fn inner_mut(&mut self) -> &mut dyn Abstract{ty} {{");
        out!(b, "        &mut *self.inner");
        out!(b, "    }}");
        let mut arms = Vec::new();
        for input in inputs.iter().filter(|i| !i.is_pull()) {
            let dsl = &input.input_name().name;
            let snake = snake_case(dsl);
            let method = ident(&format!("on_{snake}"))?;
            let call = format!("call_on_{snake}");
            let t = rust_type(&self.resolve_named(input), &types)?;
            out!(b);
            out!(b, "    fn {call}(");
            out!(b, "        &mut self,");
            out!(b, "        event: &{RT}::Event,");
            out!(b, "        port: &mut {RT}::Port,");
            out!(b, "    ) -> {} {{", rt_result("()"));
            out!(b, "        let value: {t} = {RT}::Payload::from_value(&event.value)?;");
            out!(b, "        let mut cx = {cx_init};");
            out!(b, "        self.inner.{method}(value, &mut cx)");
            out!(b, "    }}");
            let channel = match &input.kind {
                InputKind::EntitySource { source, .. } => source.name.clone(),
                InputKind::ContextOutput { context } => context.name.clone(),
            };
            arms.push((input.producer().name.clone(), channel, call));
        }
        out!(b, "}}");
        out!(b);
        out!(b, "impl {RT}::Handler for {ty}Adapter {{");
        out!(b, "    fn on_event(");
        out!(b, "        &mut self,");
        out!(b, "        event: &{RT}::Event,");
        out!(b, "        port: &mut {RT}::Port,");
        out!(b, "    ) -> {} {{", rt_result("()"));
        if arms.is_empty() {
            out!(b, "        let _ = port;");
        }
        out!(b, "        match (&*event.producer.name, event.channel.as_str()) {{");
        for (producer, channel, call) in &arms {
            out!(b, "            ({producer:?}, {channel:?}) => self.{call}(event, port),");
        }
        out!(b, "            (producer, channel) => {RESULT}::Err({RT}::RuntimeError::handler(::std::format!(");
        out!(b, "                \"`{name}` does not consume `{{}}` from `{{}}`\",");
        out!(b, "                channel, producer");
        out!(b, "            ))),");
        out!(b, "        }}");
        out!(b, "    }}");
        out!(b);
        out!(b, "    fn post_initialize(&mut self, port: &mut {RT}::Port) -> {} {{", rt_result("()"));
        out!(b, "        let mut cx = {cx_init};");
        out!(b, "        self.inner.post_initialize(&mut cx)");
        out!(b, "    }}");
        if pulled {
            out!(b);
            out!(b, "    fn provide(");
            out!(b, "        &mut self,");
            out!(b, "        channel: &str,");
            out!(b, "        _port: &mut {RT}::Port,");
            out!(b, "    ) -> {RESULT}<{RT}::Value, {RT}::ProviderError> {{");
            out!(b, "        match (channel, &self.last) {{");
            out!(b, "            ({name:?}, ::std::option::Option::Some(v)) => {RESULT}::Ok(::std::clone::Clone::clone(v)),");
            out!(b, "            ({name:?}, ::std::option::Option::None) => {{");
            out!(b, "                {RESULT}::Err({RT}::ProviderError::new(\"`{name}` has not published yet\"))");
            out!(b, "            }}");
            out!(b, "            (other, _) => {RESULT}::Err({RT}::ProviderError::new(::std::format!(");
            out!(b, "                \"`{name}` cannot provide `{{}}`\",");
            out!(b, "                other");
            out!(b, "            ))),");
            out!(b, "        }}");
            out!(b, "    }}");
        }
        out!(b, "}}");
        Ok(b)
    }

    pub fn context_unit(
        &self,
        c: &ContextOperator,
        manifest: &mut Vec<ImplementationPoint>,
    ) -> Result<String, CodegenError> {
        let output = self.checked.resolve(&c.output);
        self.operator_unit(&c.name.name, &c.inputs, Some(&output), None, manifest)
    }

    pub fn controller_unit(
        &self,
        c: &ControlOperator,
        manifest: &mut Vec<ImplementationPoint>,
    ) -> Result<String, CodegenError> {
        self.operator_unit(&c.name.name, &c.inputs, None, Some(c), manifest)
    }

    // ---- deployment --------------------------------------------------

    /// `(component, factory signature, is entity)` in design order.
    pub fn factory_signatures(&self, site: Site<'_>) -> Result<Vec<(String, String, bool)>, CodegenError> {
        let spec = self.checked.spec();
        let root = site.root();
        let mut scope = Scope::new("trait `MainDeploy`");
        scope.claim("deploy_all", "deployAll")?;
        let mut out = Vec::new();
        for e in &spec.entities {
            let n = self.names(&e.name.name)?;
            let m = ident(&format!("create_{}", n.module.trim_start_matches("r#")))?;
            scope.claim(&m, &e.name.name)?;
            let (module, ty) = (&n.module, &n.ty);
            out.push((
                e.name.name.clone(),
                format!(
                    "fn {m}(&mut self, publisher: {root}::{module}::{ty}Publisher) -> ({BOX}<dyn {root}::{module}::Abstract{ty}>, {root}::{module}::{ty}Attributes)"
                ),
                true,
            ));
        }
        let operators = spec
            .contexts
            .iter()
            .map(|c| &c.name.name)
            .chain(spec.controllers.iter().map(|c| &c.name.name));
        for name in operators {
            let n = self.names(name)?;
            let m = ident(&format!("create_{}", n.module.trim_start_matches("r#")))?;
            scope.claim(&m, name)?;
            let (module, ty) = (&n.module, &n.ty);
            out.push((
                name.clone(),
                format!("fn {m}(&mut self) -> {BOX}<dyn {root}::{module}::Abstract{ty}>"),
                false,
            ));
        }
        Ok(out)
    }

    pub fn deploy_unit(&self, manifest: &mut Vec<ImplementationPoint>) -> Result<String, CodegenError> {
        let spec = self.checked.spec();
        let mut b = String::from(HEADER);
        out!(b);
        out!(b);
        out!(b, "/// The design as seen by the runtime.");
        out!(b, "pub fn design() -> {RT}::Design {{");
        out!(b, "    {RT}::Design::default()");
        for decl in &spec.types {
            match decl {
                TypeDecl::Structure { name, fields, .. } => {
                    out!(b, "        .with_type(");
                    out!(b, "            {:?},", name.name);
                    out!(b, "            {RT}::TypeDef::Structure(::std::vec![");
                    for f in fields {
                        out!(
                            b,
                            "                ({STRING}::from({:?}), {}),",
                            f.name.name,
                            type_desc(&self.checked.resolve(&f.ty))
                        );
                    }
                    out!(b, "            ]),");
                    out!(b, "        )");
                }
                TypeDecl::Enumeration { name, labels, .. } => {
                    let labels: Vec<String> =
                        labels.iter().map(|l| format!("{STRING}::from({:?})", l.name)).collect();
                    out!(b, "        .with_type(");
                    out!(b, "            {:?},", name.name);
                    out!(b, "            {RT}::TypeDef::Enumeration(::std::vec![{}]),", labels.join(", "));
                    out!(b, "        )");
                }
            }
        }
        for e in &spec.entities {
            out!(b, "        .with_component(");
            out!(b, "            {RT}::ComponentDecl::entity({:?})", e.name.name);
            for a in &e.attributes {
                out!(b, "                .attribute({:?}, {})", a.name.name, type_desc(&self.checked.resolve(&a.ty)));
            }
            for s in &e.sources {
                out!(b, "                .source({:?}, {})", s.name.name, type_desc(&self.checked.resolve(&s.ty)));
            }
            for a in &e.actions {
                let params: Vec<String> = a
                    .params
                    .iter()
                    .map(|p| format!("({:?}, {})", p.name.name, type_desc(&self.checked.resolve(&p.ty))))
                    .collect();
                if params.is_empty() {
                    out!(b, "                .action({:?}, {VEC}::new())", a.name.name);
                } else {
                    out!(b, "                .action({:?}, ::std::vec![{}])", a.name.name, params.join(", "));
                }
            }
            out!(b, "        )");
        }
        let inputs = |b: &mut String, inputs: &[InputBinding]| {
            for i in inputs {
                match &i.kind {
                    InputKind::EntitySource { source, class } => out!(
                        b,
                        "                .source_input({:?}, {:?}, {})",
                        class.name,
                        source.name,
                        interaction(i.interaction)
                    ),
                    InputKind::ContextOutput { context } => out!(
                        b,
                        "                .context_input({:?}, {})",
                        context.name,
                        interaction(i.interaction)
                    ),
                }
            }
        };
        for c in &spec.contexts {
            out!(b, "        .with_component(");
            out!(
                b,
                "            {RT}::ComponentDecl::context({:?}, {})",
                c.name.name,
                type_desc(&self.checked.resolve(&c.output))
            );
            inputs(&mut b, &c.inputs);
            out!(b, "        )");
        }
        for c in &spec.controllers {
            out!(b, "        .with_component(");
            out!(b, "            {RT}::ComponentDecl::controller({:?})", c.name.name);
            inputs(&mut b, &c.inputs);
            for a in &c.actions {
                out!(b, "                .binds({:?}, {:?})", a.action.name, a.entity.name);
            }
            out!(b, "        )");
        }
        out!(b, "}}");

        let factories = self.factory_signatures(Site::Unit)?;
        out!(b);
        out!(b, "/// One factory per component. `deploy_all` builds and starts the system.");
        out!(b, "pub trait MainDeploy {{");
        for (component, sig, _) in &factories {
            out!(b, "    {sig};");
            out!(b);
            manifest.push(ImplementationPoint {
                component_name: component.clone(),
                kind: ImplementationKind::DeployFactory,
                required_signature: sig.clone(),
            });
        }
        out!(b, "    fn deploy_all(");
        out!(b, "        &mut self,");
        out!(b, "        config: {RT}::RuntimeConfig,");
        out!(b, "    ) -> {} {{", rt_result(&format!("{RT}::RunningSystem")));
        let binding = if factories.is_empty() { "let" } else { "let mut" };
        out!(b, "        {binding} deployment = {RT}::Deployment::new(design(), config);");
        for (component, _, is_entity) in &factories {
            let n = self.names(component)?;
            let (module, ty) = (&n.module, &n.ty);
            let create = format!("create_{}", module.trim_start_matches("r#"));
            let create = ident(&create)?;
            if *is_entity {
                out!(b, "        {{");
                out!(b, "            let publisher = deployment.publisher({component:?})?;");
                out!(b, "            let (implementation, attributes) =");
                out!(b, "                self.{create}(super::{module}::{ty}Publisher::new(::std::clone::Clone::clone(&publisher)));");
                out!(b, "            deployment.add_entity(");
                out!(b, "                &publisher,");
                out!(b, "                {BOX}::new(super::{module}::{ty}Adapter::new(implementation)),");
                out!(b, "                attributes.to_values(),");
                out!(b, "            );");
                out!(b, "        }}");
            } else {
                out!(b, "        deployment.add_operator(");
                out!(b, "            {component:?},");
                out!(b, "            {BOX}::new(super::{module}::{ty}Adapter::new(self.{create}())),");
                out!(b, "        );");
            }
        }
        out!(b, "        deployment.start()");
        out!(b, "    }}");
        out!(b, "}}");
        Ok(b)
    }

    pub fn mod_unit(&self, modules: &[String]) -> String {
        let mut b = String::from(HEADER);
        out!(b);
        for m in modules {
            let file = m.trim_start_matches("r#");
            out!(b);
            out!(b, "pub mod {m} {{");
            out!(b, "    include!(\"{file}.rs\");");
            out!(b, "}}");
        }
        b
    }
}

fn enumeration(b: &mut String, name: &str, ty: &str, labels: &[String]) -> Result<(), CodegenError> {
    let mut scope = Scope::new(format!("enumeration `{name}`"));
    let mut variants = Vec::new();
    for l in labels {
        let v = type_ident(l)?;
        scope.claim(&v, l)?;
        variants.push((l.clone(), v));
    }
    out!(b, "#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]");
    out!(b, "pub enum {ty} {{");
    for (_, v) in &variants {
        out!(b, "    {v},");
    }
    out!(b, "}}");
    out!(b);
    out!(b, "impl {ty} {{");
    out!(b, "    pub const ALL: [{ty}; {}] = [{}];", variants.len(), variants
        .iter()
        .map(|(_, v)| format!("{ty}::{v}"))
        .collect::<Vec<_>>()
        .join(", "));
    out!(b);
    out!(b, "    /// Label as written in the design.");
    out!(b, "    pub fn label(self) -> &'static str {{");
    out!(b, "        match self {{");
    for (l, v) in &variants {
        out!(b, "            {ty}::{v} => {l:?},");
    }
    out!(b, "        }}");
    out!(b, "    }}");
    out!(b, "}}");
    out!(b);
    out!(b, "impl {RT}::Payload for {ty} {{");
    out!(b, "    fn to_value(&self) -> {RT}::Value {{");
    out!(b, "        {RT}::Value::enumeration({name:?}, self.label())");
    out!(b, "    }}");
    out!(b);
    out!(b, "    fn from_value(value: &{RT}::Value) -> {RESULT}<Self, {RT}::ValueError> {{");
    out!(b, "        match {RT}::enum_label(value, {name:?})? {{");
    for (l, v) in &variants {
        out!(b, "            {l:?} => {RESULT}::Ok({ty}::{v}),");
    }
    out!(b, "            _ => {RESULT}::Err({RT}::ValueError::new({name:?}, value)),");
    out!(b, "        }}");
    out!(b, "    }}");
    out!(b, "}}");
    Ok(())
}

/// Developer-facing signatures for stubs, keyed like the manifest.
pub(super) fn developer_signatures(
    emitter: &Emitter<'_>,
    component: &str,
) -> Result<Vec<String>, CodegenError> {
    let spec = emitter.checked.spec();
    let n = emitter.names(component)?;
    let site = Site::Developer(n.module.trim_start_matches("r#"));
    if let Some(e) = spec.entity(component) {
        return Ok(emitter.action_signatures(e, site)?.into_iter().map(|(_, s)| s).collect());
    }
    let inputs = match (spec.context(component), spec.controller(component)) {
        (Some(c), _) => &c.inputs,
        (_, Some(c)) => &c.inputs,
        _ => return Ok(Vec::new()),
    };
    Ok(emitter
        .callback_signatures(component, inputs, site)?
        .into_iter()
        .map(|(_, s)| s)
        .collect())
}

pub(super) fn developer_factories(emitter: &Emitter<'_>) -> Result<Vec<(String, String, bool)>, CodegenError> {
    emitter.factory_signatures(Site::Developer("deploy"))
}
