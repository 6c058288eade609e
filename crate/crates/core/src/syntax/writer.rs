use std::fmt::Write;

use super::{Format, PrefixTable};
use crate::rdf::{escape_iri, escape_string, Graph, Node};
use crate::vocab;

/// Renders a node in Turtle, compacting IRIs against `prefixes` where the
/// local part is a plain name.
pub fn write_node(node: &Node, prefixes: &PrefixTable) -> String {
    match node {
        Node::Iri(iri) => match prefixes.compact(iri.as_str()) {
            Some((p, local)) => format!("{p}:{local}"),
            None => format!("<{}>", escape_iri(iri.as_str())),
        },
        Node::Blank(label) => format!("_:{label}"),
        Node::Literal(lit) => {
            let mut out = format!("\"{}\"", escape_string(&lit.lexical));
            if let Some(lang) = &lit.language {
                out.push('@');
                out.push_str(lang);
            } else if let Some(dt) = &lit.datatype {
                out.push_str("^^");
                out.push_str(&write_node(&Node::Iri(dt.clone()), prefixes));
            }
            out
        }
    }
}

/// Serializes in canonical triple order. N-Triples ignores `prefixes`.
pub fn serialize(graph: &Graph, format: Format, prefixes: &PrefixTable) -> String {
    let triples = graph.sorted();
    let mut out = String::new();
    match format {
        Format::NTriples => {
            for t in &triples {
                let _ = writeln!(out, "{t}");
            }
        }
        Format::Turtle => {
            if let Some(base) = prefixes.base() {
                let _ = writeln!(out, "@base <{}> .", escape_iri(base));
            }
            for (p, ns) in prefixes.iter() {
                let _ = writeln!(out, "@prefix {p}: <{}> .", escape_iri(ns));
            }
            let rdf_type = Node::iri(vocab::rdf::TYPE);
            let mut i = 0;
            while i < triples.len() {
                let subject = &triples[i].subject;
                let _ = write!(out, "\n{}", write_node(subject, prefixes));
                let mut first_pred = true;
                while i < triples.len() && &triples[i].subject == subject {
                    let predicate = &triples[i].predicate;
                    let verb = if *predicate == rdf_type {
                        "a".to_string()
                    } else {
                        write_node(predicate, prefixes)
                    };
                    let sep = if first_pred { " " } else { " ;\n    " };
                    let _ = write!(out, "{sep}{verb} ");
                    first_pred = false;
                    let mut first_obj = true;
                    while i < triples.len() && &triples[i].subject == subject && &triples[i].predicate == predicate {
                        if !first_obj {
                            out.push_str(", ");
                        }
                        out.push_str(&write_node(&triples[i].object, prefixes));
                        first_obj = false;
                        i += 1;
                    }
                }
                out.push_str(" .\n");
            }
        }
    }
    out
}
