//! Turtle-subset and N-Triples reading and writing.
//!
//! The Turtle reader accepts `@prefix`/`@base` (and their SPARQL-style
//! forms), prefixed names, IRI references, the `a` keyword, predicate and
//! object lists, labelled blank nodes, and string literals with language tags
//! or datatypes. Collections, `[ ]` property lists, and numeric/boolean
//! shorthand are reported as unsupported. Errors recover at the next `.`
//! outside brackets, so one document can yield many diagnostics.

mod lexer;
mod parser;
mod writer;

use std::collections::BTreeMap;
use std::fmt;

use crate::rdf::{has_scheme, Iri};
use crate::vocab;

pub use parser::{parse, parse_into, ParseOutput};
pub use writer::{serialize, write_node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Turtle,
    NTriples,
}

impl Format {
    /// Guess from a file name: `.nt` is N-Triples, everything else Turtle.
    pub fn from_path(path: &str) -> Format {
        if path.to_ascii_lowercase().ends_with(".nt") {
            Format::NTriples
        } else {
            Format::Turtle
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticLevel {
    Error,
    Warning,
}

impl DiagnosticLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticLevel::Error => "error",
            DiagnosticLevel::Warning => "warning",
        }
    }
}

/// A positioned parser message. Line and column are 1-based; columns count
/// characters, not bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub level: DiagnosticLevel,
}

impl ParseDiagnostic {
    pub fn is_error(&self) -> bool {
        self.level == DiagnosticLevel::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.level.as_str(), self.message)
    }
}

/// Prefix bindings plus an optional base IRI. Later bindings replace earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixTable {
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

impl PrefixTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// skos, rdf, rdfs and validation.
    pub fn standard() -> Self {
        let mut t = PrefixTable::new();
        t.insert("skos", vocab::SKOS);
        t.insert("rdf", vocab::RDF);
        t.insert("rdfs", vocab::RDFS);
        t.insert("validation", vocab::VALIDATION);
        t
    }

    /// Returns the previous namespace bound to `prefix`, if any.
    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) -> Option<String> {
        self.prefixes.insert(prefix.into(), namespace.into())
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.prefixes.get(prefix).map(String::as_str)
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn set_base(&mut self, base: Option<String>) {
        self.base = base;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn merge(&mut self, other: &PrefixTable) {
        for (p, ns) in other.iter() {
            self.insert(p, ns);
        }
    }

    /// `None` for an unbound prefix. An expansion that is not absolute is an error.
    pub fn expand(&self, prefix: &str, local: &str) -> Option<Result<Iri, String>> {
        let ns = self.get(prefix)?;
        let full = format!("{ns}{local}");
        Some(Iri::new(&full).map_err(|_| format!("expansion of {prefix}:{local} is not absolute: <{full}>")))
    }

    /// Longest namespace whose remainder is a plain local name.
    pub fn compact<'a>(&'a self, iri: &'a str) -> Option<(&'a str, &'a str)> {
        self.prefixes
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()) && has_scheme(ns))
            .map(|(p, ns)| (p.as_str(), &iri[ns.len()..]))
            .filter(|(_, local)| is_plain_local(local))
            .min_by_key(|(p, local)| (local.len(), *p))
    }
}

/// Local names we are willing to write unescaped.
fn is_plain_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => return true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        Some(_) => return false,
    }
    !local.ends_with('.')
        && local.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}
