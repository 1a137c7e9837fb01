//! Generation of a design-specific Rust framework.
//!
//! For each component the generator emits an abstract trait the developer
//! implements, an adapter that plugs the implementation into the runtime,
//! and the typed proxies its callbacks may use. Nothing else is exposed, so
//! an interaction absent from the design cannot be written against the
//! framework. `deploy.rs` holds the runtime view of the design and the
//! `MainDeploy` trait with one factory per component.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! generated/mod.rs          include! of every unit
//! generated/types.rs        declared structures and enumerations
//! generated/<component>.rs  one per component
//! generated/deploy.rs
//! manifest.json             required implementation points
//! ```

mod emit;
pub mod naming;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analyzer::CheckedSpec;
use emit::Emitter;

/// First line of every generated unit.
pub const HEADER: &str = "// GENERATED — DO NOT EDIT\n";

#[derive(Debug, thiserror::Error)]
pub enum CodegenError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("in {scope}: `{first}` and `{second}` both map to `{name}`")]
    Collision {
        scope: String,
        name: String,
        first: String,
        second: String,
    },
    #[error("`{0}` cannot be used as a Rust identifier")]
    Unrepresentable(String),
}

impl CodegenError {
    fn io(path: &Path, source: io::Error) -> Self {
        CodegenError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ImplementationKind {
    ContextCallback,
    ControllerCallback,
    EntitySourceProvider,
    EntityActionHandler,
    DeployFactory,
}

/// A member the developer must supply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ImplementationPoint {
    pub component_name: String,
    pub kind: ImplementationKind,
    /// The trait method signature, as emitted.
    pub required_signature: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedFramework {
    /// Paths relative to the output directory.
    pub units: Vec<(PathBuf, String)>,
    pub manifest: Vec<ImplementationPoint>,
}

impl GeneratedFramework {
    pub fn unit(&self, path: impl AsRef<Path>) -> Option<&str> {
        let path = path.as_ref();
        self.units
            .iter()
            .find(|(p, _)| p == path)
            .map(|(_, s)| s.as_str())
    }

    pub fn manifest_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Writes every unit and the manifest under `out_dir`. Generated files
    /// left over from an earlier design are removed; other files are kept.
    pub fn write(&self, out_dir: &Path) -> Result<(), CodegenError> {
        let gen_dir = out_dir.join("generated");
        fs::create_dir_all(&gen_dir).map_err(|e| CodegenError::io(&gen_dir, e))?;
        let entries = fs::read_dir(&gen_dir).map_err(|e| CodegenError::io(&gen_dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| CodegenError::io(&gen_dir, e))?;
            let path = entry.path();
            let rel = path.strip_prefix(out_dir).unwrap_or(&path).to_owned();
            if path.extension().is_some_and(|x| x == "rs")
                && self.unit(&rel).is_none()
                && fs::read_to_string(&path).is_ok_and(|s| s.starts_with(HEADER))
            {
                fs::remove_file(&path).map_err(|e| CodegenError::io(&path, e))?;
            }
        }
        for (rel, text) in &self.units {
            let path = out_dir.join(rel);
            // leave identical files alone so build tools see no change
            if fs::read_to_string(&path).is_ok_and(|s| s == *text) {
                continue;
            }
            fs::write(&path, text).map_err(|e| CodegenError::io(&path, e))?;
        }
        let path = out_dir.join("manifest.json");
        let json = self.manifest_json();
        if !fs::read_to_string(&path).is_ok_and(|s| s == json) {
            fs::write(&path, json).map_err(|e| CodegenError::io(&path, e))?;
        }
        Ok(())
    }
}

/// Renders the framework without touching the file system.
pub fn emit(checked: &CheckedSpec) -> Result<GeneratedFramework, CodegenError> {
    let em = Emitter::new(checked);
    let spec = checked.spec();
    let mut modules = naming::Scope::new("module `generated`");
    modules.claim("types", "types")?;
    modules.claim("deploy", "deploy")?;

    let mut units = Vec::new();
    let mut manifest = Vec::new();
    let mut names = Vec::new();
    let mut push = |module: String, text: String, units: &mut Vec<(PathBuf, String)>| {
        let file = module.trim_start_matches("r#");
        units.push((PathBuf::from(format!("generated/{file}.rs")), text));
        names.push(module);
    };

    if let Some(types) = em.types_unit()? {
        push("types".into(), types, &mut units);
    }
    for e in &spec.entities {
        let n = em.names(&e.name.name)?;
        modules.claim(&n.module, &e.name.name)?;
        push(n.module, em.entity_unit(e, &mut manifest)?, &mut units);
    }
    for c in &spec.contexts {
        let n = em.names(&c.name.name)?;
        modules.claim(&n.module, &c.name.name)?;
        push(n.module, em.context_unit(c, &mut manifest)?, &mut units);
    }
    for c in &spec.controllers {
        let n = em.names(&c.name.name)?;
        modules.claim(&n.module, &c.name.name)?;
        push(n.module, em.controller_unit(c, &mut manifest)?, &mut units);
    }
    push("deploy".into(), em.deploy_unit(&mut manifest)?, &mut units);
    drop(push);
    units.insert(0, (PathBuf::from("generated/mod.rs"), em.mod_unit(&names)));
    Ok(GeneratedFramework { units, manifest })
}

/// Emits the framework and writes it under `out_dir`.
pub fn generate(checked: &CheckedSpec, out_dir: &Path) -> Result<GeneratedFramework, CodegenError> {
    let framework = emit(checked)?;
    framework.write(out_dir)?;
    Ok(framework)
}

/// Outcome of [`scaffold`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScaffoldReport {
    pub written: Vec<PathBuf>,
    /// Files that already existed and were left untouched.
    pub skipped: Vec<PathBuf>,
}

/// One-time starter files for the developer: one per component plus
/// `deploy.rs`, each with `todo!()` bodies. The stubs expect the framework
/// to be mounted as `crate::generated`. Existing files are never
/// overwritten.
pub fn scaffold(checked: &CheckedSpec, dir: &Path) -> Result<ScaffoldReport, CodegenError> {
    // validates every name
    emit(checked)?;
    let em = Emitter::new(checked);
    let spec = checked.spec();
    fs::create_dir_all(dir).map_err(|e| CodegenError::io(dir, e))?;
    let mut files = Vec::new();
    let components = spec
        .entities
        .iter()
        .map(|e| (&e.name.name, "entity"))
        .chain(spec.contexts.iter().map(|c| (&c.name.name, "context")))
        .chain(spec.controllers.iter().map(|c| (&c.name.name, "controller")));
    for (name, layer) in components {
        let n = em.names(name)?;
        let module = n.module.trim_start_matches("r#");
        let sigs = emit::developer_signatures(&em, name)?;
        let mut s = format!("//! Implementation of the `{name}` {layer}.\n\npub struct {}Impl;\n\n", n.ty);
        s.push_str(&format!(
            "impl crate::generated::{module}::Abstract{} for {}Impl {{",
            n.ty, n.ty
        ));
        if sigs.is_empty() {
            s.push_str("}\n");
        } else {
            s.push('\n');
            for (i, sig) in sigs.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                s.push_str(&format!("    {sig} {{\n        todo!()\n    }}\n"));
            }
            s.push_str("}\n");
        }
        files.push((format!("{module}.rs"), s));
    }
    let factories = emit::developer_factories(&em)?;
    let mut s = String::from("//! Factories for every component.\n\npub struct Deploy;\n\nimpl crate::generated::deploy::MainDeploy for Deploy {");
    if factories.is_empty() {
        s.push_str("}\n");
    } else {
        s.push('\n');
        for (i, (_, sig, _)) in factories.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            s.push_str(&format!("    {sig} {{\n        todo!()\n    }}\n"));
        }
        s.push_str("}\n");
    }
    files.push(("deploy.rs".into(), s));

    let mut report = ScaffoldReport::default();
    for (file, text) in files {
        let path = dir.join(file);
        if path.exists() {
            report.skipped.push(path);
            continue;
        }
        fs::write(&path, text).map_err(|e| CodegenError::io(&path, e))?;
        report.written.push(path);
    }
    Ok(report)
}
