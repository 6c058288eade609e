//! Pattern-class ontology, count rollup, and the scheme-convention lint.

use std::collections::{BTreeMap, BTreeSet};

use crate::detect::{Finding, PatternClass, Severity};
use crate::rdf::{Graph, Node, Triple};
use crate::vocab::{self, rdf, rdfs, skos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDescriptor {
    pub class: PatternClass,
    pub comment: &'static str,
    pub parents: BTreeSet<PatternClass>,
    pub severity: Severity,
}

fn comment(class: PatternClass) -> &'static str {
    use PatternClass::*;
    match class {
        Pattern1VocabularyHijacking => "The inferred skos:broaderTransitive relation via skos:broadMatch mapping is considered as vocabulary hijacking to the original vocabulary",
        Pattern1NonConsistentWithSKOSRules => "The inferred skos:broaderTransitive relation via skos:broadMatch mapping is considered as contradictory with the existing skos:related relation",
        Pattern1NonConsistentWithSKOSExtraRules => "The inferred skos:broaderTransitive relation via skos:broadMatch mapping consists a cycle the with existing skos:broaderTransitive relation",
        Pattern2VocabularyHijacking => "The inferred skos:exactMatch relation via skos:exactMatch mappings is considered as vocabulary hijacking to the original vocabulary",
        Pattern2NonConsistentWithSKOSExtraRules => "The inferred skos:exactMatch relation via skos:exactMatch mappings is considered as conflicting with the existing skos:broaderTransitive relation",
        Pattern3NonConsistentWithSKOSRules => "The inferred skos:broaderTransitive relation via skos:broaderTransitive and skos:broadMatch is considered as contradictory with the existing skos:relatedMatch mapping",
        Pattern3NonConsistentWithSKOSExtraRules => "The inferred skos:broaderTransitive relation via skos:broaderTransitive and skos:broadMatch is considered as conflicting with the existing skos:exactMatch mapping",
        Pattern4NonConsistentWithSKOSRules => "The inferred skos:broaderTransitive relation via skos:broadMatch and skos:broaderTransitive is considered as contradictory with the existing skos:relatedMatch mapping",
        Pattern4NonConsistentWithSKOSExtraRules => "The inferred skos:broaderTransitive relation via skos:broadMatch and skos:broaderTransitive is considered as conflicting with the existing skos:exactMatch mapping",
        Pattern5VocabularyHijacking => "The inferred skos:broaderTransitive relation via skos:broadMatch mappings and skos:broaderTransitive is considered as vocabulary hijacking to the original vocabulary",
        Pattern5NonConsistentWithSKOSRules => "The inferred skos:broaderTransitive relation via skos:broadMatch mappings and skos:broaderTransitive is considered as contradictory with the existing skos:related relation",
        Pattern5NonConsistentWithSKOSExtraRules => "The inferred skos:broaderTransitive relation via skos:broadMatch mappings and skos:broaderTransitive consists a cycle with the existing skos:broaderTransitive relation",
        Pattern6NonConsistentWithSKOSRules => "The inferred skos:broaderTransitive relation via skos:broaderTransitive, skos:broadMatch and skos:broaderTransitive is considered as contradictory with the existing skos:relatedMatch mapping",
        Pattern6NonConsistentWithSKOSExtraRules => "The inferred skos:broaderTransitive relation via skos:broaderTransitive, skos:broadMatch and skos:broaderTransitive is considered as conflicting with the existing skos:exactMatch mapping",
        Pattern7CounterIntuitive => "The skos:exactMatch mappings and skos:broaderTransitive relations form a cycle across two concept schemes, which is considered as counter intuitive",
    }
}

fn parent(class: PatternClass) -> Option<PatternClass> {
    use PatternClass::*;
    match class {
        Pattern1NonConsistentWithSKOSRules | Pattern1NonConsistentWithSKOSExtraRules => Some(Pattern1VocabularyHijacking),
        Pattern2NonConsistentWithSKOSExtraRules => Some(Pattern2VocabularyHijacking),
        Pattern5NonConsistentWithSKOSRules | Pattern5NonConsistentWithSKOSExtraRules => Some(Pattern5VocabularyHijacking),
        _ => None,
    }
}

pub fn descriptor(class: PatternClass) -> ClassDescriptor {
    ClassDescriptor {
        class,
        comment: comment(class),
        parents: parent(class).into_iter().collect(),
        severity: class.severity(),
    }
}

pub fn descriptors() -> Vec<ClassDescriptor> {
    PatternClass::ALL.into_iter().map(descriptor).collect()
}

/// Strict ancestors, nearest first.
pub fn ancestors(class: PatternClass) -> Vec<PatternClass> {
    let mut out = Vec::new();
    let mut cur = class;
    while let Some(p) = parent(cur) {
        if out.contains(&p) {
            break;
        }
        out.push(p);
        cur = p;
    }
    out
}

/// The class hierarchy as RDF: one rdfs:Class per pattern class with its
/// comment and subclass edges.
pub fn ontology() -> Graph {
    let mut g = Graph::new();
    let ty = Node::iri(rdf::TYPE);
    let class = Node::iri(rdfs::CLASS);
    let comment_p = Node::iri(rdfs::COMMENT);
    let sub = Node::iri(rdfs::SUB_CLASS_OF);
    for d in descriptors() {
        let me = Node::iri(&d.class.iri());
        let mut add = |p: &Node, o: Node| {
            g.insert(&Triple::new(me.clone(), p.clone(), o)).expect("ontology triples are well formed");
        };
        add(&ty, class.clone());
        add(&comment_p, Node::literal(d.comment));
        for p in &d.parents {
            add(&sub, Node::iri(&p.iri()));
        }
    }
    g
}

/// Per-class counts where each finding also counts towards every ancestor
/// class. All 15 classes are present; convention findings are ignored.
pub fn rollup(findings: &[Finding]) -> BTreeMap<PatternClass, usize> {
    let mut counts: BTreeMap<PatternClass, usize> = PatternClass::ALL.into_iter().map(|c| (c, 0)).collect();
    for f in findings {
        if let Some(c) = f.pattern() {
            *counts.entry(c).or_default() += 1;
            for a in ancestors(c) {
                *counts.entry(a).or_default() += 1;
            }
        }
    }
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConventionRule {
    /// A mapping property links two concepts of one scheme.
    MappingWithinScheme,
    /// A semantic relation links concepts of different schemes.
    SemanticAcrossSchemes,
}

impl ConventionRule {
    pub const ALL: [ConventionRule; 2] = [ConventionRule::MappingWithinScheme, ConventionRule::SemanticAcrossSchemes];

    pub fn name(self) -> &'static str {
        match self {
            ConventionRule::MappingWithinScheme => "MappingWithinScheme",
            ConventionRule::SemanticAcrossSchemes => "SemanticAcrossSchemes",
        }
    }

    pub fn iri(self) -> String {
        format!("{}{}", vocab::REPORT, self.name())
    }

    pub fn from_iri(iri: &str) -> Option<ConventionRule> {
        let name = iri.strip_prefix(vocab::REPORT)?;
        Self::ALL.into_iter().find(|r| r.name() == name)
    }
}

/// Flags mapping links inside one declared scheme and semantic links across
/// declared schemes. Concepts with no skos:inScheme are skipped. Works on the
/// asserted graph only.
pub fn convention_lint(input: &Graph) -> Vec<Finding> {
    let in_scheme = Node::iri(skos::IN_SCHEME);
    let mut schemes: BTreeMap<&Node, BTreeSet<&Node>> = BTreeMap::new();
    let declared = input.matching(None, Some(&in_scheme), None);
    for t in &declared {
        schemes.entry(&t.subject).or_default().insert(&t.object);
    }

    let mapping: Vec<Node> = skos::MAPPING_RELATIONS.iter().map(|p| Node::iri(p)).collect();
    let semantic: Vec<Node> = skos::SEMANTIC_RELATIONS.iter().map(|p| Node::iri(p)).collect();
    let membership = |c: &Node, s: &Node| Triple::new(c.clone(), in_scheme.clone(), s.clone());

    let mut out = Vec::new();
    for t in input.sorted() {
        let (Some(ss), Some(os)) = (schemes.get(&t.subject), schemes.get(&t.object)) else {
            continue;
        };
        let (rule, s_scheme, o_scheme) = if mapping.contains(&t.predicate) {
            match ss.intersection(os).next() {
                Some(shared) => (ConventionRule::MappingWithinScheme, *shared, *shared),
                None => continue,
            }
        } else if semantic.contains(&t.predicate) && ss.is_disjoint(os) {
            (ConventionRule::SemanticAcrossSchemes, *ss.first().unwrap(), *os.first().unwrap())
        } else {
            continue;
        };
        let mut bindings = BTreeMap::new();
        bindings.insert("x".to_string(), t.subject.clone());
        bindings.insert("y".to_string(), t.object.clone());
        let matched = [t.clone(), membership(&t.subject, s_scheme), membership(&t.object, o_scheme)].into();
        out.push(Finding::new(crate::detect::FindingClass::Convention(rule), bindings, matched));
    }
    out
}
