//! The problematic-pattern detectors.
//!
//! Every detector matches its antecedent against the closure, with
//! negation-as-failure tests evaluated against the same closure. Findings
//! are keyed by (class, matched triple set), so two matches that copy the
//! same subgraph are one finding.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::classify::ConventionRule;
use crate::closure::{ClosureGraph, DerivationTree, RuleId};
use crate::rdf::{IdTriple, Node, NodeId, Triple};
use crate::vocab::{self, skos};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternClass {
    Pattern1VocabularyHijacking,
    Pattern1NonConsistentWithSKOSRules,
    Pattern1NonConsistentWithSKOSExtraRules,
    Pattern2VocabularyHijacking,
    Pattern2NonConsistentWithSKOSExtraRules,
    Pattern3NonConsistentWithSKOSRules,
    Pattern3NonConsistentWithSKOSExtraRules,
    Pattern4NonConsistentWithSKOSRules,
    Pattern4NonConsistentWithSKOSExtraRules,
    Pattern5VocabularyHijacking,
    Pattern5NonConsistentWithSKOSRules,
    Pattern5NonConsistentWithSKOSExtraRules,
    Pattern6NonConsistentWithSKOSRules,
    Pattern6NonConsistentWithSKOSExtraRules,
    Pattern7CounterIntuitive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownPattern(pub String);

impl fmt::Display for UnknownPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown pattern '{}'", self.0)
    }
}

impl std::error::Error for UnknownPattern {}

impl PatternClass {
    pub const ALL: [PatternClass; 15] = [
        PatternClass::Pattern1VocabularyHijacking,
        PatternClass::Pattern1NonConsistentWithSKOSRules,
        PatternClass::Pattern1NonConsistentWithSKOSExtraRules,
        PatternClass::Pattern2VocabularyHijacking,
        PatternClass::Pattern2NonConsistentWithSKOSExtraRules,
        PatternClass::Pattern3NonConsistentWithSKOSRules,
        PatternClass::Pattern3NonConsistentWithSKOSExtraRules,
        PatternClass::Pattern4NonConsistentWithSKOSRules,
        PatternClass::Pattern4NonConsistentWithSKOSExtraRules,
        PatternClass::Pattern5VocabularyHijacking,
        PatternClass::Pattern5NonConsistentWithSKOSRules,
        PatternClass::Pattern5NonConsistentWithSKOSExtraRules,
        PatternClass::Pattern6NonConsistentWithSKOSRules,
        PatternClass::Pattern6NonConsistentWithSKOSExtraRules,
        PatternClass::Pattern7CounterIntuitive,
    ];

    pub fn all() -> BTreeSet<PatternClass> {
        Self::ALL.into_iter().collect()
    }

    pub fn name(self) -> &'static str {
        use PatternClass::*;
        match self {
            Pattern1VocabularyHijacking => "Pattern1VocabularyHijacking",
            Pattern1NonConsistentWithSKOSRules => "Pattern1NonConsistentWithSKOSRules",
            Pattern1NonConsistentWithSKOSExtraRules => "Pattern1NonConsistentWithSKOSExtraRules",
            Pattern2VocabularyHijacking => "Pattern2VocabularyHijacking",
            Pattern2NonConsistentWithSKOSExtraRules => "Pattern2NonConsistentWithSKOSExtraRules",
            Pattern3NonConsistentWithSKOSRules => "Pattern3NonConsistentWithSKOSRules",
            Pattern3NonConsistentWithSKOSExtraRules => "Pattern3NonConsistentWithSKOSExtraRules",
            Pattern4NonConsistentWithSKOSRules => "Pattern4NonConsistentWithSKOSRules",
            Pattern4NonConsistentWithSKOSExtraRules => "Pattern4NonConsistentWithSKOSExtraRules",
            Pattern5VocabularyHijacking => "Pattern5VocabularyHijacking",
            Pattern5NonConsistentWithSKOSRules => "Pattern5NonConsistentWithSKOSRules",
            Pattern5NonConsistentWithSKOSExtraRules => "Pattern5NonConsistentWithSKOSExtraRules",
            Pattern6NonConsistentWithSKOSRules => "Pattern6NonConsistentWithSKOSRules",
            Pattern6NonConsistentWithSKOSExtraRules => "Pattern6NonConsistentWithSKOSExtraRules",
            Pattern7CounterIntuitive => "Pattern7CounterIntuitive",
        }
    }

    /// 1 to 7.
    pub fn pattern_number(self) -> u8 {
        self.name().as_bytes()[7] - b'0'
    }

    pub fn iri(self) -> String {
        format!("{}{}", vocab::VALIDATION, self.name())
    }

    pub fn severity(self) -> Severity {
        let name = self.name();
        if name.ends_with("SKOSRules") {
            Severity::Error
        } else if name.ends_with("CounterIntuitive") {
            Severity::Info
        } else {
            Severity::Warning
        }
    }

    pub fn is_hijacking(self) -> bool {
        self.name().ends_with("VocabularyHijacking")
    }

    /// Every class of one pattern, e.g. the three Pattern 1 classes.
    pub fn of_pattern(n: u8) -> Vec<PatternClass> {
        Self::ALL.into_iter().filter(|c| c.pattern_number() == n).collect()
    }

    pub fn from_iri(iri: &str) -> Option<PatternClass> {
        iri.strip_prefix(vocab::VALIDATION).and_then(|n| n.parse().ok())
    }

    /// Accepts a full class name or a coarse `patternN` name (any case).
    pub fn parse_selection(name: &str) -> Result<Vec<PatternClass>, UnknownPattern> {
        let lower = name.trim().to_ascii_lowercase();
        if let Some(n) = lower.strip_prefix("pattern").and_then(|d| d.parse::<u8>().ok()) {
            if (1..=7).contains(&n) {
                return Ok(Self::of_pattern(n));
            }
        }
        name.trim().parse().map(|c| vec![c])
    }
}

impl FromStr for PatternClass {
    type Err = UnknownPattern;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownPattern(s.to_string()))
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a finding is an instance of: one of the pattern classes, or a
/// scheme-convention lint rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FindingClass {
    Pattern(PatternClass),
    Convention(ConventionRule),
}

impl FindingClass {
    pub fn name(self) -> &'static str {
        match self {
            FindingClass::Pattern(p) => p.name(),
            FindingClass::Convention(r) => r.name(),
        }
    }

    pub fn iri(self) -> String {
        match self {
            FindingClass::Pattern(p) => p.iri(),
            FindingClass::Convention(r) => r.iri(),
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            FindingClass::Pattern(p) => p.severity(),
            FindingClass::Convention(_) => Severity::Info,
        }
    }

    pub fn pattern(self) -> Option<PatternClass> {
        match self {
            FindingClass::Pattern(p) => Some(p),
            FindingClass::Convention(_) => None,
        }
    }

    pub fn from_iri(iri: &str) -> Option<FindingClass> {
        PatternClass::from_iri(iri)
            .map(FindingClass::Pattern)
            .or_else(|| ConventionRule::from_iri(iri).map(FindingClass::Convention))
    }
}

impl From<PatternClass> for FindingClass {
    fn from(p: PatternClass) -> Self {
        FindingClass::Pattern(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub class: FindingClass,
    pub severity: Severity,
    /// Antecedent variable name (without `?`) to node.
    pub bindings: BTreeMap<String, Node>,
    pub matched: BTreeSet<Triple>,
    /// The relation the matched mappings would assert.
    pub implied: Option<Triple>,
    /// Derivations of the matched triples that are entailed rather than asserted.
    pub explanation: Vec<DerivationTree>,
    /// How `implied` follows from the matched triples.
    pub implied_derivation: Option<DerivationTree>,
    pub notes: Vec<String>,
}

impl Finding {
    pub fn new(class: impl Into<FindingClass>, bindings: BTreeMap<String, Node>, matched: BTreeSet<Triple>) -> Self {
        let class = class.into();
        Finding {
            class,
            severity: class.severity(),
            bindings,
            matched,
            implied: None,
            explanation: Vec::new(),
            implied_derivation: None,
            notes: Vec::new(),
        }
    }

    pub fn pattern(&self) -> Option<PatternClass> {
        self.class.pattern()
    }

    pub fn binding(&self, var: &str) -> Option<&Node> {
        self.bindings.get(var)
    }

    fn key(&self) -> (FindingClass, Vec<Triple>) {
        (self.class, self.matched.iter().cloned().collect())
    }
}

/// Collects findings, merging those with equal (class, matched set). On a
/// merge the smaller bindings map is kept so the result does not depend on
/// enumeration order.
#[derive(Default)]
pub(crate) struct FindingSet {
    by_key: BTreeMap<(FindingClass, Vec<Triple>), Finding>,
}

impl FindingSet {
    pub(crate) fn push(&mut self, f: Finding) {
        match self.by_key.entry(f.key()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(f);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                if f.bindings < e.get().bindings {
                    e.insert(f);
                }
            }
        }
    }

    pub(crate) fn into_vec(self) -> Vec<Finding> {
        self.by_key.into_values().collect()
    }
}

struct Matcher<'a> {
    c: &'a ClosureGraph,
    bm: NodeId,
    em: NodeId,
    rm: NodeId,
    bt: NodeId,
    rel: NodeId,
    out: RefCell<FindingSet>,
}

impl<'a> Matcher<'a> {
    fn new(c: &'a ClosureGraph) -> Self {
        let v = c.vocab();
        Matcher {
            c,
            bm: v.broad_match,
            em: v.exact_match,
            rm: v.related_match,
            bt: v.broader_transitive,
            rel: v.related,
            out: RefCell::default(),
        }
    }

    fn holds(&self, s: NodeId, p: NodeId, o: NodeId) -> bool {
        self.c.holds_ids(IdTriple::new(s, p, o))
    }

    fn pairs(&self, p: NodeId) -> Vec<(NodeId, NodeId)> {
        self.c.graph().with_predicate(p).iter().map(|t| (t.s, t.o)).collect()
    }

    fn objects(&self, s: NodeId, p: NodeId) -> Vec<NodeId> {
        self.c.graph().objects(s, p).to_vec()
    }

    fn subjects(&self, p: NodeId, o: NodeId) -> Vec<NodeId> {
        self.c.graph().subjects(p, o).to_vec()
    }

    fn emit(
        &self,
        class: PatternClass,
        vars: &[(&str, NodeId)],
        matched: &[(NodeId, NodeId, NodeId)],
        implied: Option<(IdTriple, DerivationTree)>,
    ) {
        let g = self.c.graph();
        let bindings = vars.iter().map(|(k, v)| (k.to_string(), g.node(*v).clone())).collect();
        let ids: BTreeSet<IdTriple> = matched.iter().map(|&(s, p, o)| IdTriple::new(s, p, o)).collect();
        let matched_set = ids.iter().map(|t| g.resolve(*t)).collect();
        let mut f = Finding::new(class, bindings, matched_set);
        let mut entailed: Vec<IdTriple> = ids.into_iter().filter(|t| self.c.is_entailed_ids(*t)).collect();
        entailed.sort_by_key(|t| g.resolve(*t));
        f.explanation = entailed.into_iter().map(|t| self.c.explain_ids(t)).collect();
        if let Some((t, tree)) = implied {
            f.implied = Some(g.resolve(t));
            f.implied_derivation = Some(tree);
        }
        if class.pattern_number() == 1 && f.bindings.get("A1") == f.bindings.get("A2") {
            f.notes.push("A1 and A2 are bound to the same concept".to_string());
        }
        self.out.borrow_mut().push(f);
    }

    fn tree(&self, s: NodeId, p: NodeId, o: NodeId) -> DerivationTree {
        self.c.explain_ids(IdTriple::new(s, p, o))
    }

    /// x bM y, read as the hierarchical x bT y.
    fn bm_as_bt(&self, x: NodeId, y: NodeId) -> DerivationTree {
        let broader = DerivationTree::rule(RuleId::BroadMatchToBroader, vec![self.tree(x, self.bm, y)]);
        DerivationTree::rule(RuleId::BroaderToBT, vec![broader])
    }

    fn chain(&self, a: DerivationTree, b: DerivationTree) -> DerivationTree {
        DerivationTree::rule(RuleId::BTTransitive, vec![a, b])
    }

    fn p1(&self) {
        let (bm, bt, rel) = (self.bm, self.bt, self.rel);
        for (a1, b1) in self.pairs(bm) {
            for a2 in self.objects(b1, bm) {
                let vars = [("A1", a1), ("B1", b1), ("A2", a2)];
                let base = [(a1, bm, b1), (b1, bm, a2)];
                let implied = || {
                    let tree = self.chain(self.bm_as_bt(a1, b1), self.bm_as_bt(b1, a2));
                    Some((IdTriple::new(a1, bt, a2), tree))
                };
                if !self.holds(a1, bt, a2) {
                    let imp = implied();
                    self.emit(PatternClass::Pattern1VocabularyHijacking, &vars, &base, imp);
                }
                if self.holds(a1, rel, a2) {
                    let imp = implied();
                    self.emit(PatternClass::Pattern1NonConsistentWithSKOSRules, &vars, &[base[0], base[1], (a1, rel, a2)], imp);
                }
                if self.holds(a2, bt, a1) {
                    let imp = implied();
                    self.emit(PatternClass::Pattern1NonConsistentWithSKOSExtraRules, &vars, &[base[0], base[1], (a2, bt, a1)], imp);
                }
            }
        }
    }

    fn p2(&self) {
        let (em, bt) = (self.em, self.bt);
        for (a1, b1) in self.pairs(em) {
            for a2 in self.objects(b1, em) {
                if a1 == a2 {
                    continue;
                }
                let vars = [("A1", a1), ("B1", b1), ("A2", a2)];
                let base = [(a1, em, b1), (b1, em, a2)];
                let implied = || {
                    let tree = DerivationTree::rule(
                        RuleId::ExactMatchTransitive,
                        vec![self.tree(a1, em, b1), self.tree(b1, em, a2)],
                    );
                    Some((IdTriple::new(a1, em, a2), tree))
                };
                let imp = implied();
                self.emit(PatternClass::Pattern2VocabularyHijacking, &vars, &base, imp);
                if self.holds(a2, bt, a1) {
                    let imp = implied();
                    self.emit(PatternClass::Pattern2NonConsistentWithSKOSExtraRules, &vars, &[base[0], base[1], (a2, bt, a1)], imp);
                }
            }
        }
    }

    fn p3(&self) {
        let (bm, bt, rm, em) = (self.bm, self.bt, self.rm, self.em);
        for (a2, a1) in self.pairs(bt) {
            for b1 in self.objects(a1, bm) {
                let vars = [("A2", a2), ("A1", a1), ("B1", b1)];
                let implied = || {
                    let tree = self.chain(self.tree(a2, bt, a1), self.bm_as_bt(a1, b1));
                    Some((IdTriple::new(a2, bt, b1), tree))
                };
                for (p, class) in [
                    (rm, PatternClass::Pattern3NonConsistentWithSKOSRules),
                    (em, PatternClass::Pattern3NonConsistentWithSKOSExtraRules),
                ] {
                    if self.holds(b1, p, a2) {
                        let imp = implied();
                        self.emit(class, &vars, &[(a2, bt, a1), (a1, bm, b1), (b1, p, a2)], imp);
                    }
                }
            }
        }
    }

    fn p4(&self) {
        let (bm, bt, rm, em) = (self.bm, self.bt, self.rm, self.em);
        for (a1, a2) in self.pairs(bt) {
            for b1 in self.subjects(bm, a1) {
                let vars = [("A1", a1), ("A2", a2), ("B1", b1)];
                let implied = || {
                    let tree = self.chain(self.bm_as_bt(b1, a1), self.tree(a1, bt, a2));
                    Some((IdTriple::new(b1, bt, a2), tree))
                };
                for (p, class) in [
                    (rm, PatternClass::Pattern4NonConsistentWithSKOSRules),
                    (em, PatternClass::Pattern4NonConsistentWithSKOSExtraRules),
                ] {
                    if self.holds(a2, p, b1) {
                        let imp = implied();
                        self.emit(class, &vars, &[(a1, bt, a2), (b1, bm, a1), (a2, p, b1)], imp);
                    }
                }
            }
        }
    }

    fn p5(&self) {
        let (bm, bt, rel) = (self.bm, self.bt, self.rel);
        for (a1, b1) in self.pairs(bm) {
            for b2 in self.objects(b1, bt) {
                for a2 in self.objects(b2, bm) {
                    let vars = [("A1", a1), ("B1", b1), ("B2", b2), ("A2", a2)];
                    let base = [(a1, bm, b1), (b1, bt, b2), (b2, bm, a2)];
                    let implied = || {
                        let left = self.chain(self.bm_as_bt(a1, b1), self.tree(b1, bt, b2));
                        let tree = self.chain(left, self.bm_as_bt(b2, a2));
                        Some((IdTriple::new(a1, bt, a2), tree))
                    };
                    if a1 != a2 && !self.holds(a1, bt, a2) {
                        let imp = implied();
                        self.emit(PatternClass::Pattern5VocabularyHijacking, &vars, &base, imp);
                    }
                    if self.holds(a2, rel, a1) {
                        let imp = implied();
                        self.emit(
                            PatternClass::Pattern5NonConsistentWithSKOSRules,
                            &vars,
                            &[base[0], base[1], base[2], (a2, rel, a1)],
                            imp,
                        );
                    }
                    if self.holds(a2, bt, a1) {
                        let imp = implied();
                        self.emit(
                            PatternClass::Pattern5NonConsistentWithSKOSExtraRules,
                            &vars,
                            &[base[0], base[1], base[2], (a2, bt, a1)],
                            imp,
                        );
                    }
                }
            }
        }
    }

    fn p6(&self) {
        let (bm, bt, rm, em) = (self.bm, self.bt, self.rm, self.em);
        for (a2, a1) in self.pairs(bt) {
            for b1 in self.objects(a1, bm) {
                for b2 in self.objects(b1, bt) {
                    let vars = [("A2", a2), ("A1", a1), ("B1", b1), ("B2", b2)];
                    let implied = || {
                        let left = self.chain(self.tree(a2, bt, a1), self.bm_as_bt(a1, b1));
                        let tree = self.chain(left, self.tree(b1, bt, b2));
                        Some((IdTriple::new(a2, bt, b2), tree))
                    };
                    for (p, class) in [
                        (rm, PatternClass::Pattern6NonConsistentWithSKOSRules),
                        (em, PatternClass::Pattern6NonConsistentWithSKOSExtraRules),
                    ] {
                        if self.holds(b2, p, a2) {
                            let imp = implied();
                            self.emit(class, &vars, &[(a2, bt, a1), (a1, bm, b1), (b1, bt, b2), (b2, p, a2)], imp);
                        }
                    }
                }
            }
        }
    }

    fn p7(&self) {
        let (bt, em) = (self.bt, self.em);
        for (a2, a1) in self.pairs(bt) {
            for b1 in self.objects(a1, em) {
                for b2 in self.objects(b1, bt) {
                    if !self.holds(b2, em, a2) {
                        continue;
                    }
                    let vars = [("A2", a2), ("A1", a1), ("B1", b1), ("B2", b2)];
                    let tree = DerivationTree::rule(
                        RuleId::ExactMatchSubstitution,
                        vec![self.tree(a1, em, b1), self.tree(b1, bt, b2), self.tree(b2, em, a2)],
                    );
                    self.emit(
                        PatternClass::Pattern7CounterIntuitive,
                        &vars,
                        &[(a2, bt, a1), (a1, em, b1), (b1, bt, b2), (b2, em, a2)],
                        Some((IdTriple::new(a1, bt, a2), tree)),
                    );
                }
            }
        }
    }
}

impl Matcher<'_> {
    fn pattern(&self, n: u8) {
        match n {
            1 => self.p1(),
            2 => self.p2(),
            3 => self.p3(),
            4 => self.p4(),
            5 => self.p5(),
            6 => self.p6(),
            7 => self.p7(),
            _ => {}
        }
    }
}

fn run(c: &ClosureGraph, n: u8) -> Vec<Finding> {
    let m = Matcher::new(c);
    m.pattern(n);
    m.out.into_inner().into_vec()
}

/// Pattern 1: two chained broadMatch links.
pub fn detect_p1(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 1)
}

/// Pattern 2: two chained exactMatch links between distinct concepts.
pub fn detect_p2(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 2)
}

pub fn detect_p3(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 3)
}

pub fn detect_p4(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 4)
}

pub fn detect_p5(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 5)
}

pub fn detect_p6(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 6)
}

/// Pattern 7: a broader/exactMatch cycle across two schemes.
pub fn detect_p7(c: &ClosureGraph) -> Vec<Finding> {
    run(c, 7)
}

/// All enabled detectors, deduplicated and ordered by (class, matched).
pub fn detect_all(c: &ClosureGraph, enabled: &BTreeSet<PatternClass>) -> Vec<Finding> {
    let m = Matcher::new(c);
    let patterns: BTreeSet<u8> = enabled.iter().map(|p| p.pattern_number()).collect();
    for n in patterns {
        m.pattern(n);
    }
    m.out
        .into_inner()
        .into_vec()
        .into_iter()
        .filter(|f| f.pattern().is_some_and(|p| enabled.contains(&p)))
        .collect()
}

/// Merges findings whose matched sets coincide once symmetric triples
/// (exactMatch, relatedMatch, closeMatch, related) are read in either
/// direction. The first finding of each group is kept.
pub fn collapse_symmetric(findings: Vec<Finding>) -> Vec<Finding> {
    let symmetric: Vec<Node> = [skos::EXACT_MATCH, skos::RELATED_MATCH, skos::CLOSE_MATCH, skos::RELATED]
        .iter()
        .map(|p| Node::iri(p))
        .collect();
    let normalize = |t: &Triple| {
        if symmetric.contains(&t.predicate) && t.object < t.subject {
            Triple::new(t.object.clone(), t.predicate.clone(), t.subject.clone())
        } else {
            t.clone()
        }
    };
    let mut seen = BTreeSet::new();
    findings
        .into_iter()
        .filter(|f| {
            let key: BTreeSet<Triple> = f.matched.iter().map(normalize).collect();
            seen.insert((f.class, key))
        })
        .collect()
}
