//! In-memory RDF data model.
//!
//! Terms are interned into a per-graph dictionary and every set/index
//! operation runs on [`NodeId`] triples. The public surface speaks [`Node`]
//! and [`Triple`]; the id-level API is used by the closure engine and the
//! detectors, which never need to touch strings on their hot paths.
//!
//! Canonical order is the derived `Ord` on [`Triple`]: subject, then
//! predicate, then object, where nodes order IRIs before blank nodes before
//! literals and compare by their lexical content otherwise.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RdfError {
    #[error("not an absolute IRI: <{0}>")]
    RelativeIri(String),
    #[error("literal {0} in subject position")]
    LiteralSubject(String),
    #[error("predicate must be an IRI, found {0}")]
    NonIriPredicate(String),
}

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, RdfError> {
        let value = value.as_ref();
        if has_scheme(value) {
            Ok(Iri(Arc::from(value)))
        } else {
            Err(RdfError::RelativeIri(value.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `scheme ":"` where scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )
pub fn has_scheme(value: &str) -> bool {
    let mut chars = value.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        match c {
            ':' => return true,
            c if c.is_ascii_alphanumeric() || c == '+' || c == '-' || c == '.' => {}
            _ => return false,
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<Iri>,
    pub language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal { lexical: lexical.into(), datatype: Some(datatype), language: None }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: Some(language.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Iri(Iri),
    /// Blank node label, without the `_:` prefix.
    Blank(String),
    Literal(Literal),
}

impl Node {
    /// Panics on a relative IRI; meant for constants and tests.
    pub fn iri(value: &str) -> Node {
        Node::Iri(Iri::new(value).expect("absolute IRI"))
    }

    pub fn blank(label: impl Into<String>) -> Node {
        Node::Blank(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Node {
        Node::Literal(Literal::simple(lexical))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Node::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Node::Literal(_))
    }
}

impl From<Iri> for Node {
    fn from(iri: Iri) -> Self {
        Node::Iri(iri)
    }
}

/// N-Triples rendering.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Iri(iri) => write!(f, "<{}>", escape_iri(iri.as_str())),
            Node::Blank(label) => write!(f, "_:{label}"),
            Node::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(&lit.lexical))?;
                if let Some(lang) = &lit.language {
                    write!(f, "@{lang}")
                } else if let Some(dt) = &lit.datatype {
                    write!(f, "^^<{}>", escape_iri(dt.as_str()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_iri(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                out.push_str(&format!("\\u{:04X}", c as u32))
            }
            c if (c as u32) <= 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Node,
    pub predicate: Node,
    pub object: Node,
}

impl Triple {
    pub fn new(subject: Node, predicate: Node, object: Node) -> Self {
        Triple { subject, predicate, object }
    }

    pub fn validate(&self) -> Result<(), RdfError> {
        if let Node::Literal(_) = self.subject {
            return Err(RdfError::LiteralSubject(self.subject.to_string()));
        }
        if self.predicate.as_iri().is_none() {
            return Err(RdfError::NonIriPredicate(self.predicate.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Total, platform-independent ordering of a set of triples. Duplicates collapse.
pub fn canonical_sort<I: IntoIterator<Item = Triple>>(triples: I) -> Vec<Triple> {
    let mut out: Vec<Triple> = triples.into_iter().collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdTriple {
    pub s: NodeId,
    pub p: NodeId,
    pub o: NodeId,
}

impl IdTriple {
    pub fn new(s: NodeId, p: NodeId, o: NodeId) -> Self {
        IdTriple { s, p, o }
    }
}

/// A deduplicated triple set with subject, predicate, object, (s,p) and (p,o)
/// indexes. Insert-only: nothing in the pipeline ever retracts a triple.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    terms: Vec<Node>,
    ids: HashMap<Node, NodeId>,
    triples: Vec<IdTriple>,
    set: HashSet<IdTriple>,
    by_s: HashMap<NodeId, Vec<IdTriple>>,
    by_p: HashMap<NodeId, Vec<IdTriple>>,
    by_o: HashMap<NodeId, Vec<IdTriple>>,
    by_sp: HashMap<(NodeId, NodeId), Vec<NodeId>>,
    by_po: HashMap<(NodeId, NodeId), Vec<NodeId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Result<Self, RdfError> {
        let mut g = Graph::new();
        for t in triples {
            g.insert(&t)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn intern(&mut self, node: &Node) -> NodeId {
        if let Some(id) = self.ids.get(node) {
            return *id;
        }
        let id = NodeId(self.terms.len() as u32);
        self.terms.push(node.clone());
        self.ids.insert(node.clone(), id);
        id
    }

    pub fn id_of(&self, node: &Node) -> Option<NodeId> {
        self.ids.get(node).copied()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.terms[id.0 as usize]
    }

    /// Every interned term, including ones not (or no longer) used by a triple.
    pub fn terms(&self) -> &[Node] {
        &self.terms
    }

    /// Returns `Ok(true)` iff the triple was not already present.
    pub fn insert(&mut self, t: &Triple) -> Result<bool, RdfError> {
        t.validate()?;
        let s = self.intern(&t.subject);
        let p = self.intern(&t.predicate);
        let o = self.intern(&t.object);
        Ok(self.insert_ids(IdTriple::new(s, p, o)))
    }

    /// Id-level insert. The ids must come from this graph's dictionary and
    /// respect the [`Triple`] invariants.
    pub fn insert_ids(&mut self, t: IdTriple) -> bool {
        if !self.set.insert(t) {
            return false;
        }
        self.triples.push(t);
        self.by_s.entry(t.s).or_default().push(t);
        self.by_p.entry(t.p).or_default().push(t);
        self.by_o.entry(t.o).or_default().push(t);
        self.by_sp.entry((t.s, t.p)).or_default().push(t.o);
        self.by_po.entry((t.p, t.o)).or_default().push(t.s);
        true
    }

    pub fn extend(&mut self, other: &Graph) {
        for t in other.id_triples() {
            let s = self.intern(other.node(t.s));
            let p = self.intern(other.node(t.p));
            let o = self.intern(other.node(t.o));
            self.insert_ids(IdTriple::new(s, p, o));
        }
    }

    pub fn contains(&self, t: &Triple) -> bool {
        match (self.id_of(&t.subject), self.id_of(&t.predicate), self.id_of(&t.object)) {
            (Some(s), Some(p), Some(o)) => self.set.contains(&IdTriple::new(s, p, o)),
            _ => false,
        }
    }

    pub fn contains_ids(&self, t: IdTriple) -> bool {
        self.set.contains(&t)
    }

    /// Triples in insertion order.
    pub fn id_triples(&self) -> &[IdTriple] {
        &self.triples
    }

    pub fn resolve(&self, t: IdTriple) -> Triple {
        Triple::new(self.node(t.s).clone(), self.node(t.p).clone(), self.node(t.o).clone())
    }

    /// Looks a triple up in the dictionary without interning anything.
    pub fn encode(&self, t: &Triple) -> Option<IdTriple> {
        Some(IdTriple::new(
            self.id_of(&t.subject)?,
            self.id_of(&t.predicate)?,
            self.id_of(&t.object)?,
        ))
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().map(|t| self.resolve(*t))
    }

    pub fn sorted(&self) -> Vec<Triple> {
        canonical_sort(self.iter())
    }

    pub fn objects(&self, s: NodeId, p: NodeId) -> &[NodeId] {
        self.by_sp.get(&(s, p)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn subjects(&self, p: NodeId, o: NodeId) -> &[NodeId] {
        self.by_po.get(&(p, o)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_predicate(&self, p: NodeId) -> &[IdTriple] {
        self.by_p.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_subject(&self, s: NodeId) -> &[IdTriple] {
        self.by_s.get(&s).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_object(&self, o: NodeId) -> &[IdTriple] {
        self.by_o.get(&o).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Id-level pattern match, in no particular order.
    pub fn matching_ids(&self, s: Option<NodeId>, p: Option<NodeId>, o: Option<NodeId>) -> Vec<IdTriple> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let t = IdTriple::new(s, p, o);
                if self.set.contains(&t) { vec![t] } else { vec![] }
            }
            (Some(s), Some(p), None) => {
                self.objects(s, p).iter().map(|&o| IdTriple::new(s, p, o)).collect()
            }
            (None, Some(p), Some(o)) => {
                self.subjects(p, o).iter().map(|&s| IdTriple::new(s, p, o)).collect()
            }
            (Some(s), None, o) => self
                .with_subject(s)
                .iter()
                .filter(|t| o.is_none_or(|o| t.o == o))
                .copied()
                .collect(),
            (None, Some(p), None) => self.with_predicate(p).to_vec(),
            (None, None, Some(o)) => self.with_object(o).to_vec(),
            (None, None, None) => self.triples.clone(),
        }
    }

    /// All triples agreeing with every bound position, in canonical order.
    pub fn matching(&self, s: Option<&Node>, p: Option<&Node>, o: Option<&Node>) -> Vec<Triple> {
        // A bound node that was never interned cannot match anything.
        let lookup = |n: Option<&Node>| match n {
            None => Ok(None),
            Some(n) => self.id_of(n).map(Some).ok_or(()),
        };
        let (Ok(s), Ok(p), Ok(o)) = (lookup(s), lookup(p), lookup(o)) else {
            return Vec::new();
        };
        let mut out: Vec<Triple> =
            self.matching_ids(s, p, o).into_iter().map(|t| self.resolve(t)).collect();
        out.sort();
        out
    }

    pub fn freeze(self) -> FrozenGraph {
        FrozenGraph(Arc::new(self))
    }
}

/// Graph equality is set equality over resolved triples; dictionaries may differ.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains(&t))
    }
}

impl Eq for Graph {}

/// A graph after construction. Cheap to clone and safe to share between threads.
#[derive(Clone, Debug)]
pub struct FrozenGraph(Arc<Graph>);

impl Deref for FrozenGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.0
    }
}

impl From<Graph> for FrozenGraph {
    fn from(g: Graph) -> Self {
        g.freeze()
    }
}
