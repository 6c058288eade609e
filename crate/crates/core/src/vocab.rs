//! Namespace and term IRIs used throughout the crate.

pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// Pattern classes live here.
pub const VALIDATION: &str =
    "http://eulersharp.sourceforge.net/2003/03swap/skos-mapping-validation-rules#";

/// Report structure (findings, reified matches, severities).
pub const REPORT: &str = "urn:x-skosval:report#";

pub mod skos {
    pub const BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
    pub const NARROWER: &str = "http://www.w3.org/2004/02/skos/core#narrower";
    pub const RELATED: &str = "http://www.w3.org/2004/02/skos/core#related";
    pub const BROADER_TRANSITIVE: &str = "http://www.w3.org/2004/02/skos/core#broaderTransitive";
    pub const NARROWER_TRANSITIVE: &str = "http://www.w3.org/2004/02/skos/core#narrowerTransitive";
    pub const BROAD_MATCH: &str = "http://www.w3.org/2004/02/skos/core#broadMatch";
    pub const NARROW_MATCH: &str = "http://www.w3.org/2004/02/skos/core#narrowMatch";
    pub const RELATED_MATCH: &str = "http://www.w3.org/2004/02/skos/core#relatedMatch";
    pub const CLOSE_MATCH: &str = "http://www.w3.org/2004/02/skos/core#closeMatch";
    pub const EXACT_MATCH: &str = "http://www.w3.org/2004/02/skos/core#exactMatch";
    pub const IN_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#inScheme";

    pub const SEMANTIC_RELATIONS: [&str; 5] =
        [BROADER, NARROWER, RELATED, BROADER_TRANSITIVE, NARROWER_TRANSITIVE];
    pub const MAPPING_RELATIONS: [&str; 5] =
        [BROAD_MATCH, NARROW_MATCH, RELATED_MATCH, CLOSE_MATCH, EXACT_MATCH];

    /// The ten relation predicates the closure and detectors care about.
    pub const RELATIONS: [&str; 10] = [
        BROADER,
        NARROWER,
        RELATED,
        BROADER_TRANSITIVE,
        NARROWER_TRANSITIVE,
        BROAD_MATCH,
        NARROW_MATCH,
        RELATED_MATCH,
        CLOSE_MATCH,
        EXACT_MATCH,
    ];
}

pub mod rdf {
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const STATEMENT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement";
    pub const SUBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#subject";
    pub const PREDICATE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#predicate";
    pub const OBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#object";
}

pub mod rdfs {
    pub const CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
    pub const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
}
