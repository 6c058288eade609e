//! Validation of SKOS cross-vocabulary mappings.
//!
//! The pipeline is parse → [`closure::compute_closure`] → [`detect::detect_all`]
//! → [`classify::rollup`] → [`report`]. The closure materializes the SKOS
//! prerequisite entailments (symmetric mapping and related links,
//! narrowMatch/narrower inversion, broaderTransitive), recording one
//! derivation per entailed triple. Detectors match problematic mapping
//! patterns against that closure, with negation-as-failure checks evaluated
//! against it as well.

pub mod classify;
pub mod cli;
pub mod closure;
pub mod detect;
pub mod rdf;
pub mod report;
pub mod syntax;
pub mod vocab;



pub use closure::{compute_closure, ClosureGraph};
pub use detect::{detect_all, Finding, PatternClass, Severity};
pub use rdf::{canonical_sort, Graph, Iri, Literal, Node, Triple};
