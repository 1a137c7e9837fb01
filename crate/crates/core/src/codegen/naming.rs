//! Mapping from design identifiers to host-language identifiers.

use std::collections::BTreeMap;

use super::CodegenError;

const KEYWORDS: &[&str] = &[
    "abstract", "as", "async", "await", "become", "box", "break", "const", "continue", "crate",
    "do", "dyn", "else", "enum", "extern", "false", "final", "fn", "for", "gen", "if", "impl",
    "in", "let", "loop", "macro", "match", "mod", "move", "mut", "override", "priv", "pub", "ref",
    "return", "self", "Self", "static", "struct", "super", "trait", "true", "try", "type",
    "typeof", "unsafe", "unsized", "use", "virtual", "where", "while", "yield",
];

/// Keywords that cannot be written as raw identifiers.
const UNRAWABLE: &[&str] = &["self", "Self", "super", "crate"];

fn words(name: &str) -> Vec<String> {
    let chars: Vec<char> = name.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if c.is_ascii_uppercase() && !cur.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            if prev.is_ascii_lowercase() || prev.is_ascii_digit() || (prev.is_ascii_uppercase() && next_lower) {
                out.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// `LaserScan` -> `laser_scan`, `TakePicture` -> `take_picture`.
pub fn snake_case(name: &str) -> String {
    words(name)
        .iter()
        .map(|w| w.to_ascii_lowercase())
        .collect::<Vec<_>>()
        .join("_")
}

/// `RANDOM` -> `Random`, `twist_msg` -> `TwistMsg`; names already in
/// camel case keep their spelling.
pub fn upper_camel(name: &str) -> String {
    let all_caps = name.len() > 1
        && name.chars().any(|c| c.is_ascii_alphabetic())
        && !name.chars().any(|c| c.is_ascii_lowercase());
    if !name.contains('_') && !all_caps {
        let mut c = name.chars();
        return match c.next() {
            Some(first) => first.to_ascii_uppercase().to_string() + c.as_str(),
            None => String::new(),
        };
    }
    words(name)
        .iter()
        .map(|w| {
            let lower = w.to_ascii_lowercase();
            let mut c = lower.chars();
            match c.next() {
                Some(first) => first.to_ascii_uppercase().to_string() + c.as_str(),
                None => String::new(),
            }
        })
        .collect()
}

/// Escapes keywords as raw identifiers.
pub fn ident(name: &str) -> Result<String, CodegenError> {
    if UNRAWABLE.contains(&name) {
        return Err(CodegenError::Unrepresentable(name.to_owned()));
    }
    if KEYWORDS.contains(&name) {
        Ok(format!("r#{name}"))
    } else {
        Ok(name.to_owned())
    }
}

/// Type names start upper case, so they never shadow built-in types.
pub fn type_ident(name: &str) -> Result<String, CodegenError> {
    ident(&upper_camel(name))
}

/// Detects distinct design names that map to one host name in a scope.
#[derive(Default)]
pub struct Scope {
    what: String,
    taken: BTreeMap<String, String>,
}

impl Scope {
    pub fn new(what: impl Into<String>) -> Self {
        Scope {
            what: what.into(),
            taken: BTreeMap::new(),
        }
    }

    /// Claims `host` for the design name `origin`.
    pub fn claim(&mut self, host: &str, origin: &str) -> Result<(), CodegenError> {
        match self.taken.get(host) {
            Some(prev) => Err(CodegenError::Collision {
                scope: self.what.clone(),
                name: host.to_owned(),
                first: prev.clone(),
                second: origin.to_owned(),
            }),
            None => {
                self.taken.insert(host.to_owned(), origin.to_owned());
                Ok(())
            }
        }
    }
}
