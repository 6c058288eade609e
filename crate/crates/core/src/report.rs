//! Report assembly and rendering: JSON, RDF (Turtle) and plain text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::classify::rollup;
use crate::closure::DerivationTree;
use crate::detect::{Finding, FindingClass, PatternClass, Severity};
use crate::rdf::{Graph, Literal, Node, Triple};
use crate::syntax::{serialize, write_node, Format, ParseDiagnostic, PrefixTable};
use crate::vocab::{self, rdf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Path of the JSON schema, relative to the crate root.
pub const SCHEMA_PATH: &str = "schema/report.schema.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Clean,
    Warnings,
    Errors,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Clean => "clean",
            Status::Warnings => "warnings",
            Status::Errors => "errors",
        }
    }

    pub fn of(findings: &[Finding]) -> Status {
        match findings.iter().map(|f| f.severity).max() {
            None => Status::Clean,
            Some(Severity::Error) => Status::Errors,
            Some(_) => Status::Warnings,
        }
    }
}

/// A parse diagnostic tagged with the input it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceDiagnostic {
    pub source: String,
    pub diagnostic: ParseDiagnostic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub version: String,
    /// Lowercase hex SHA-256 of the raw input bytes.
    pub input_digest: String,
    pub findings: Vec<Finding>,
    pub counts: BTreeMap<PatternClass, usize>,
    pub diagnostics: Vec<SourceDiagnostic>,
    pub status: Status,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    /// `input` is every input's bytes, concatenated in command-line order.
    pub fn new(input: &[u8], findings: Vec<Finding>, diagnostics: Vec<SourceDiagnostic>) -> Report {
        Report {
            version: VERSION.to_string(),
            input_digest: digest(input),
            counts: rollup(&findings),
            status: Status::of(&findings),
            findings,
            diagnostics,
        }
    }

    pub fn has_parse_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.diagnostic.is_error())
    }
}

/// IRIs bare, blank nodes as `_:label`, literals in N-Triples form.
fn node_text(n: &Node) -> String {
    match n {
        Node::Iri(iri) => iri.as_str().to_string(),
        other => other.to_string(),
    }
}

#[derive(Serialize)]
struct JsonTriple {
    s: String,
    p: String,
    o: String,
}

impl From<&Triple> for JsonTriple {
    fn from(t: &Triple) -> Self {
        JsonTriple { s: node_text(&t.subject), p: node_text(&t.predicate), o: node_text(&t.object) }
    }
}

#[derive(Serialize)]
struct JsonTree {
    triple: JsonTriple,
    rule: &'static str,
    premises: Vec<JsonTree>,
}

impl From<&DerivationTree> for JsonTree {
    fn from(t: &DerivationTree) -> Self {
        JsonTree {
            triple: (&t.conclusion).into(),
            rule: t.justification.name(),
            premises: t.premises.iter().map(JsonTree::from).collect(),
        }
    }
}

#[derive(Serialize)]
struct JsonFinding {
    pattern: &'static str,
    severity: &'static str,
    bindings: BTreeMap<String, String>,
    matched: Vec<JsonTriple>,
    implied: Option<JsonTriple>,
    explanation: Vec<JsonTree>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    source: &'a str,
    line: usize,
    column: usize,
    level: &'static str,
    message: &'a str,
}

/// Counts keyed by class name, in class order rather than alphabetical.
struct JsonCounts<'a>(&'a BTreeMap<PatternClass, usize>);

impl Serialize for JsonCounts<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (c, n) in self.0 {
            map.serialize_entry(c.name(), n)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    version: &'a str,
    input_digest: &'a str,
    status: &'static str,
    counts: JsonCounts<'a>,
    findings: Vec<JsonFinding>,
    diagnostics: Vec<JsonDiagnostic<'a>>,
}

/// Pretty-printed JSON with a fixed key order, newline-terminated.
pub fn to_json(r: &Report) -> String {
    let doc = JsonReport {
        version: &r.version,
        input_digest: &r.input_digest,
        status: r.status.as_str(),
        counts: JsonCounts(&r.counts),
        findings: r
            .findings
            .iter()
            .map(|f| JsonFinding {
                pattern: f.class.name(),
                severity: f.severity.as_str(),
                bindings: f.bindings.iter().map(|(k, v)| (k.clone(), node_text(v))).collect(),
                matched: f.matched.iter().map(JsonTriple::from).collect(),
                implied: f.implied.as_ref().map(JsonTriple::from),
                explanation: f.explanation.iter().chain(&f.implied_derivation).map(JsonTree::from).collect(),
                notes: f.notes.clone(),
            })
            .collect(),
        diagnostics: r
            .diagnostics
            .iter()
            .map(|d| JsonDiagnostic {
                source: &d.source,
                line: d.diagnostic.line,
                column: d.diagnostic.column,
                level: d.diagnostic.level.as_str(),
                message: &d.diagnostic.message,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn vr(local: &str) -> Node {
    Node::iri(&format!("{}{local}", vocab::REPORT))
}

/// A blank-node label prefix no label in the report already starts with.
fn fresh_prefix(r: &Report) -> String {
    let mut used = BTreeSet::new();
    for f in &r.findings {
        for t in f.matched.iter().chain(&f.implied) {
            for n in [&t.subject, &t.object] {
                if let Node::Blank(l) = n {
                    used.insert(l.clone());
                }
            }
        }
        for n in f.bindings.values() {
            if let Node::Blank(l) = n {
                used.insert(l.clone());
            }
        }
    }
    let mut prefix = "r".to_string();
    while used.iter().any(|l| l.starts_with(&prefix)) {
        prefix.push('r');
    }
    prefix
}

/// The report as RDF. Each finding is a blank node typed with its class;
/// matched and implied triples are attached as rdf:Statement reifications.
pub fn to_rdf(r: &Report) -> Graph {
    let mut g = Graph::new();
    let mut add = |s: &Node, p: Node, o: Node| {
        g.insert(&Triple::new(s.clone(), p, o)).expect("report triples are well formed");
    };
    let ty = Node::iri(rdf::TYPE);
    let prefix = fresh_prefix(r);
    let report = Node::blank(format!("{prefix}report"));
    add(&report, ty.clone(), vr("Report"));
    add(&report, vr("version"), Node::literal(r.version.clone()));
    add(&report, vr("inputDigest"), Node::literal(r.input_digest.clone()));
    add(&report, vr("status"), Node::literal(r.status.as_str()));

    let reify = |add: &mut dyn FnMut(&Node, Node, Node), label: String, t: &Triple| {
        let st = Node::blank(label);
        add(&st, ty.clone(), Node::iri(rdf::STATEMENT));
        add(&st, Node::iri(rdf::SUBJECT), t.subject.clone());
        add(&st, Node::iri(rdf::PREDICATE), t.predicate.clone());
        add(&st, Node::iri(rdf::OBJECT), t.object.clone());
        st
    };

    for (i, f) in r.findings.iter().enumerate() {
        let i = i + 1;
        let node = Node::blank(format!("{prefix}f{i}"));
        add(&report, vr("finding"), node.clone());
        add(&node, Node::iri(rdf::TYPE), Node::iri(&f.class.iri()));
        add(&node, vr("severity"), Node::literal(f.severity.as_str()));
        add(&node, vr("index"), Node::Literal(Literal::typed(i.to_string(), xsd_integer())));
        for (j, t) in f.matched.iter().enumerate() {
            let st = reify(&mut add, format!("{prefix}f{i}m{}", j + 1), t);
            add(&node, vr("matched"), st);
        }
        if let Some(t) = &f.implied {
            let st = reify(&mut add, format!("{prefix}f{i}i"), t);
            add(&node, vr("implied"), st);
        }
        for (k, (var, value)) in f.bindings.iter().enumerate() {
            let b = Node::blank(format!("{prefix}f{i}b{}", k + 1));
            add(&node, vr("binding"), b.clone());
            add(&b, vr("variable"), Node::literal(var.clone()));
            add(&b, vr("value"), value.clone());
        }
        for note in &f.notes {
            add(&node, vr("note"), Node::literal(note.clone()));
        }
    }
    g
}

fn xsd_integer() -> crate::rdf::Iri {
    crate::rdf::Iri::new(format!("{}integer", vocab::XSD)).expect("absolute")
}

/// Prefixes used when writing a report as Turtle.
pub fn report_prefixes() -> PrefixTable {
    let mut p = PrefixTable::standard();
    p.insert("vr", vocab::REPORT);
    p.insert("skos", vocab::SKOS);
    p.insert("xsd", vocab::XSD);
    p
}

pub fn to_turtle(r: &Report) -> String {
    serialize(&to_rdf(r), Format::Turtle, &report_prefixes())
}

/// A finding as recovered from a report graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RdfFinding {
    pub class: FindingClass,
    pub matched: BTreeSet<Triple>,
    pub implied: Option<Triple>,
}

/// Reads findings back out of a [`to_rdf`] graph, in report order.
pub fn read_rdf(g: &Graph) -> Vec<RdfFinding> {
    let one = |s: &Node, p: &str| -> Option<Node> {
        g.matching(Some(s), Some(&Node::iri(p)), None).into_iter().next().map(|t| t.object)
    };
    let unreify = |st: &Node| -> Option<Triple> {
        Some(Triple::new(one(st, rdf::SUBJECT)?, one(st, rdf::PREDICATE)?, one(st, rdf::OBJECT)?))
    };
    let index_of = |n: &Node| -> usize {
        match one(n, &format!("{}index", vocab::REPORT)) {
            Some(Node::Literal(l)) => l.lexical.parse().unwrap_or(usize::MAX),
            _ => usize::MAX,
        }
    };
    let mut out: Vec<(usize, RdfFinding)> = Vec::new();
    for link in g.matching(None, Some(&vr("finding")), None) {
        let node = link.object;
        let class = g
            .matching(Some(&node), Some(&Node::iri(rdf::TYPE)), None)
            .into_iter()
            .find_map(|t| t.object.as_iri().and_then(|i| FindingClass::from_iri(i.as_str())));
        let Some(class) = class else { continue };
        let matched = g
            .matching(Some(&node), Some(&vr("matched")), None)
            .iter()
            .filter_map(|t| unreify(&t.object))
            .collect();
        let implied = g
            .matching(Some(&node), Some(&vr("implied")), None)
            .first()
            .and_then(|t| unreify(&t.object));
        out.push((index_of(&node), RdfFinding { class, matched, implied }));
    }
    out.sort();
    out.into_iter().map(|(_, f)| f).collect()
}

fn triple_text(t: &Triple, p: &PrefixTable) -> String {
    format!("{} {} {}", write_node(&t.subject, p), write_node(&t.predicate, p), write_node(&t.object, p))
}

/// Plain text. Verbosity 0 is one line per diagnostic and finding plus a
/// summary line; 1 adds matched and implied triples; 2 adds derivations.
pub fn to_text(r: &Report, verbosity: u8) -> String {
    let p = report_prefixes();
    let mut out = String::new();
    for d in &r.diagnostics {
        let _ = writeln!(out, "{}:{}", d.source, d.diagnostic);
    }
    for f in &r.findings {
        let bindings: Vec<String> =
            f.bindings.iter().map(|(k, v)| format!("{k}={}", write_node(v, &p))).collect();
        let _ = writeln!(out, "{} {} {}", f.severity, f.class.name(), bindings.join(" "));
        if verbosity >= 1 {
            for t in &f.matched {
                let _ = writeln!(out, "    matched: {}", triple_text(t, &p));
            }
            if let Some(t) = &f.implied {
                let _ = writeln!(out, "    implies: {}", triple_text(t, &p));
            }
            for n in &f.notes {
                let _ = writeln!(out, "    note: {n}");
            }
        }
        if verbosity >= 2 {
            let trees: Vec<&DerivationTree> = f.explanation.iter().chain(&f.implied_derivation).collect();
            if !trees.is_empty() {
                let _ = writeln!(out, "    derivation:");
                for tree in trees {
                    out.push_str(&tree.render(&p, 6));
                }
            }
        }
    }
    let n = r.findings.len();
    if n == 0 {
        let _ = writeln!(out, "{}, 0 findings", r.status.as_str());
    } else {
        let count = |s: Severity| r.findings.iter().filter(|f| f.severity == s).count();
        let _ = writeln!(
            out,
            "{}, {n} finding{} ({} error, {} warning, {} info)",
            r.status.as_str(),
            if n == 1 { "" } else { "s" },
            count(Severity::Error),
            count(Severity::Warning),
            count(Severity::Info),
        );
    }
    out
}
