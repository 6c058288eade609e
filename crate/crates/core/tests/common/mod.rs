//! Independent oracles shared by the integration tests.
//!
//! Nothing here goes through the library's closure or detectors: graphs are
//! turned into a dense relation matrix, closed by naive iteration, and the
//! pattern antecedents are enumerated with plain nested loops.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use skosval::vocab::skos;
use skosval::{Graph, Node, PatternClass, Triple};

pub const BROADER: usize = 0;
pub const NARROWER: usize = 1;
pub const RELATED: usize = 2;
pub const BT: usize = 3;
pub const NT: usize = 4;
pub const BM: usize = 5;
pub const NM: usize = 6;
pub const RM: usize = 7;
pub const CM: usize = 8;
pub const EM: usize = 9;

pub const PREDICATES: [&str; 10] = [
    skos::BROADER,
    skos::NARROWER,
    skos::RELATED,
    skos::BROADER_TRANSITIVE,
    skos::NARROWER_TRANSITIVE,
    skos::BROAD_MATCH,
    skos::NARROW_MATCH,
    skos::RELATED_MATCH,
    skos::CLOSE_MATCH,
    skos::EXACT_MATCH,
];

/// A graph over nodes 0..n and the ten SKOS relations, as `m[p][s][o]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub n: usize,
    pub m: Vec<Vec<Vec<bool>>>,
}

pub fn node(i: usize) -> Node {
    Node::iri(&format!("urn:x:n{i}"))
}

impl Matrix {
    pub fn new(n: usize) -> Self {
        Matrix { n, m: vec![vec![vec![false; n]; n]; 10] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, usize)]) -> Self {
        let mut m = Matrix::new(n);
        for &(s, p, o) in edges {
            m.m[p][s][o] = true;
        }
        m
    }

    pub fn has(&self, s: usize, p: usize, o: usize) -> bool {
        self.m[p][s][o]
    }

    pub fn triple(s: usize, p: usize, o: usize) -> Triple {
        Triple::new(node(s), Node::iri(PREDICATES[p]), node(o))
    }

    pub fn triples(&self) -> BTreeSet<Triple> {
        let mut out = BTreeSet::new();
        for p in 0..10 {
            for s in 0..self.n {
                for o in 0..self.n {
                    if self.m[p][s][o] {
                        out.insert(Self::triple(s, p, o));
                    }
                }
            }
        }
        out
    }

    pub fn graph(&self) -> Graph {
        Graph::from_triples(self.triples()).unwrap()
    }

    /// Apply every prerequisite rule to everything until nothing changes.
    pub fn naive_closure(&self) -> Matrix {
        let mut c = self.clone();
        let n = self.n;
        loop {
            let mut next = c.clone();
            for x in 0..n {
                for y in 0..n {
                    if c.m[EM][x][y] {
                        next.m[EM][y][x] = true;
                    }
                    if c.m[NM][x][y] {
                        next.m[BM][y][x] = true;
                    }
                    if c.m[RM][x][y] {
                        next.m[RM][y][x] = true;
                    }
                    if c.m[NARROWER][x][y] {
                        next.m[BROADER][y][x] = true;
                    }
                    if c.m[RELATED][x][y] {
                        next.m[RELATED][y][x] = true;
                    }
                    if c.m[BROADER][x][y] {
                        next.m[BT][x][y] = true;
                    }
                    if c.m[BT][x][y] {
                        for z in 0..n {
                            if c.m[BT][y][z] {
                                next.m[BT][x][z] = true;
                            }
                        }
                    }
                }
            }
            if next == c {
                return c;
            }
            c = next;
        }
    }
}

pub type Key = (PatternClass, BTreeSet<Triple>);

fn key(class: PatternClass, ts: &[(usize, usize, usize)]) -> Key {
    (class, ts.iter().map(|&(s, p, o)| Matrix::triple(s, p, o)).collect())
}

/// Every antecedent instance of every pattern rule over a closed matrix, as
/// (class, matched set), read straight off the rule text.
pub fn brute_force(c: &Matrix) -> BTreeSet<Key> {
    use PatternClass::*;
    let n = c.n;
    let h = |s, p, o| c.has(s, p, o);
    let mut out = BTreeSet::new();
    for a1 in 0..n {
        for b1 in 0..n {
            for a2 in 0..n {
                // Pattern 1
                if h(a1, BM, b1) && h(b1, BM, a2) {
                    let base = [(a1, BM, b1), (b1, BM, a2)];
                    if !h(a1, BT, a2) {
                        out.insert(key(Pattern1VocabularyHijacking, &base));
                    }
                    if h(a1, RELATED, a2) {
                        out.insert(key(Pattern1NonConsistentWithSKOSRules, &[base[0], base[1], (a1, RELATED, a2)]));
                    }
                    if h(a2, BT, a1) {
                        out.insert(key(Pattern1NonConsistentWithSKOSExtraRules, &[base[0], base[1], (a2, BT, a1)]));
                    }
                }
                // Pattern 2
                if h(a1, EM, b1) && h(b1, EM, a2) && a1 != a2 {
                    let base = [(a1, EM, b1), (b1, EM, a2)];
                    out.insert(key(Pattern2VocabularyHijacking, &base));
                    if h(a2, BT, a1) {
                        out.insert(key(Pattern2NonConsistentWithSKOSExtraRules, &[base[0], base[1], (a2, BT, a1)]));
                    }
                }
                // Pattern 3
                if h(a2, BT, a1) && h(a1, BM, b1) {
                    if h(b1, RM, a2) {
                        out.insert(key(Pattern3NonConsistentWithSKOSRules, &[(a2, BT, a1), (a1, BM, b1), (b1, RM, a2)]));
                    }
                    if h(b1, EM, a2) {
                        out.insert(key(Pattern3NonConsistentWithSKOSExtraRules, &[(a2, BT, a1), (a1, BM, b1), (b1, EM, a2)]));
                    }
                }
                // Pattern 4
                if h(a1, BT, a2) && h(b1, BM, a1) {
                    if h(a2, RM, b1) {
                        out.insert(key(Pattern4NonConsistentWithSKOSRules, &[(a1, BT, a2), (b1, BM, a1), (a2, RM, b1)]));
                    }
                    if h(a2, EM, b1) {
                        out.insert(key(Pattern4NonConsistentWithSKOSExtraRules, &[(a1, BT, a2), (b1, BM, a1), (a2, EM, b1)]));
                    }
                }
                for b2 in 0..n {
                    // Pattern 5
                    if h(a1, BM, b1) && h(b1, BT, b2) && h(b2, BM, a2) {
                        let base = [(a1, BM, b1), (b1, BT, b2), (b2, BM, a2)];
                        if a1 != a2 && !h(a1, BT, a2) {
                            out.insert(key(Pattern5VocabularyHijacking, &base));
                        }
                        if h(a2, RELATED, a1) {
                            out.insert(key(Pattern5NonConsistentWithSKOSRules, &[base[0], base[1], base[2], (a2, RELATED, a1)]));
                        }
                        if h(a2, BT, a1) {
                            out.insert(key(Pattern5NonConsistentWithSKOSExtraRules, &[base[0], base[1], base[2], (a2, BT, a1)]));
                        }
                    }
                    // Pattern 6
                    if h(a2, BT, a1) && h(a1, BM, b1) && h(b1, BT, b2) {
                        let base = [(a2, BT, a1), (a1, BM, b1), (b1, BT, b2)];
                        if h(b2, RM, a2) {
                            out.insert(key(Pattern6NonConsistentWithSKOSRules, &[base[0], base[1], base[2], (b2, RM, a2)]));
                        }
                        if h(b2, EM, a2) {
                            out.insert(key(Pattern6NonConsistentWithSKOSExtraRules, &[base[0], base[1], base[2], (b2, EM, a2)]));
                        }
                    }
                    // Pattern 7
                    if h(a2, BT, a1) && h(a1, EM, b1) && h(b1, BT, b2) && h(b2, EM, a2) {
                        out.insert(key(Pattern7CounterIntuitive, &[(a2, BT, a1), (a1, EM, b1), (b1, BT, b2), (b2, EM, a2)]));
                    }
                }
            }
        }
    }
    out
}

/// `count` graphs of at most 15 nodes and 60 triples over the ten relations.
pub fn corpus(seed: u64, count: usize) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=15);
            let t = rng.random_range(0..=60);
            let edges: Vec<(usize, usize, usize)> =
                (0..t).map(|_| (rng.random_range(0..n), rng.random_range(0..10), rng.random_range(0..n))).collect();
            Matrix::from_edges(n, &edges)
        })
        .collect()
}

/// Like [`corpus`] but sparse and mapping-heavy, so hijacking findings are
/// common while the hierarchy stays shallow.
pub fn sparse_corpus(seed: u64, count: usize) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weighted = [BROADER, NARROWER, RELATED, BM, BM, NM, RM, EM, EM, BT];
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=15);
            let t = rng.random_range(1..=n * 2);
            let edges: Vec<(usize, usize, usize)> = (0..t)
                .map(|_| (rng.random_range(0..n), weighted[rng.random_range(0..weighted.len())], rng.random_range(0..n)))
                .collect();
            Matrix::from_edges(n, &edges)
        })
        .collect()
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Run the CLI in-process: (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    cli_stdin(args, "")
}

pub fn cli_stdin(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut input = stdin.as_bytes();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = skosval::cli::main_with_args(
        std::iter::once("skosval").chain(args.iter().copied()),
        &mut input,
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// The subset of JSON Schema the report schema uses: type, enum, required,
/// properties, additionalProperties, items, oneOf, minimum, pattern, $ref
/// into `$defs`.
pub fn validate_schema(schema: &Value, doc: &Value) -> Result<(), String> {
    check(schema, schema, doc, "$")
}

fn check(root: &Value, s: &Value, v: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").ok_or_else(|| format!("unsupported $ref {r}"))?;
        return check(root, &root["$defs"][name], v, path);
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        let ok = alts.iter().filter(|a| check(root, a, v, path).is_ok()).count();
        return if ok == 1 { Ok(()) } else { Err(format!("{path}: {ok} oneOf branches match")) };
    }
    if let Some(opts) = s.get("enum").and_then(Value::as_array) {
        if !opts.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_u64() || v.is_i64(),
            "null" => v.is_null(),
            "boolean" => v.is_boolean(),
            other => return Err(format!("unsupported type {other}")),
        };
        if !ok {
            return Err(format!("{path}: expected {t}, got {v}"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_i64), v.as_i64()) {
        if x < min {
            return Err(format!("{path}: {x} < {min}"));
        }
    }
    if let (Some(p), Some(x)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
        if !regex::Regex::new(p).unwrap().is_match(x) {
            return Err(format!("{path}: {x:?} does not match {p}"));
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(req) = s.get("required").and_then(Value::as_array) {
            for k in req {
                let k = k.as_str().unwrap();
                if !obj.contains_key(k) {
                    return Err(format!("{path}: missing {k}"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, child) in obj {
            let sub = format!("{path}.{k}");
            match props.and_then(|p| p.get(k)) {
                Some(ps) => check(root, ps, child, &sub)?,
                None => match s.get("additionalProperties") {
                    Some(Value::Bool(false)) => return Err(format!("{sub}: not allowed")),
                    Some(ap @ Value::Object(_)) => check(root, ap, child, &sub)?,
                    _ => {}
                },
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            check(root, items, child, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

pub fn load_schema() -> Value {
    let text = std::fs::read_to_string(format!("{}/{}", env!("CARGO_MANIFEST_DIR"), skosval::report::SCHEMA_PATH)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Findings reduced to the dedup key.
pub fn keys(findings: &[skosval::Finding]) -> BTreeSet<Key> {
    findings.iter().filter_map(|f| f.pattern().map(|p| (p, f.matched.clone()))).collect()
}

pub fn count_by_class(ks: &BTreeSet<Key>) -> BTreeMap<PatternClass, usize> {
    let mut m = BTreeMap::new();
    for (c, _) in ks {
        *m.entry(*c).or_default() += 1;
    }
    m
}
