mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use skosval::closure::Justification;
use skosval::detect::collapse_symmetric;
use skosval::rdf::Literal;
use skosval::syntax::{parse, parse_into, serialize, Format, PrefixTable};
use skosval::{compute_closure, detect_all, Graph, Node, PatternClass, Triple};

fn edges(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, usize)>)> {
    (1..=max_nodes).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..10usize, 0..n), 0..=max_edges)))
}

fn matrix() -> impl Strategy<Value = Matrix> {
    edges(8, 30).prop_map(|(n, es)| Matrix::from_edges(n, &es))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_contains_input_and_is_a_fixpoint(m in matrix()) {
        let g = m.graph();
        let c = compute_closure(&g);
        for t in g.iter() {
            prop_assert!(c.graph().contains(&t));
        }
        let again = compute_closure(c.graph());
        prop_assert!(again.entailed().is_empty());
    }

    #[test]
    fn closure_is_monotone(m in matrix(), extra in (0..8usize, 0..10usize, 0..8usize)) {
        let (s, p, o) = extra;
        prop_assume!(s < m.n && o < m.n);
        let mut bigger = m.clone();
        bigger.m[p][s][o] = true;
        let small: BTreeSet<Triple> = compute_closure(&m.graph()).graph().iter().collect();
        let large: BTreeSet<Triple> = compute_closure(&bigger.graph()).graph().iter().collect();
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn every_entailed_triple_has_a_sound_derivation(m in matrix()) {
        let g = m.graph();
        let c = compute_closure(&g);
        for t in c.entailed() {
            let tree = c.explain(&t).unwrap();
            prop_assert!(tree.is_well_formed());
            prop_assert!(matches!(tree.justification, Justification::Rule(r) if r.in_closure()));
            for leaf in tree.leaves() {
                prop_assert!(g.contains(leaf));
            }
        }
    }

    #[test]
    fn findings_are_sound(m in matrix()) {
        let g = m.graph();
        let c = compute_closure(&g);
        for f in detect_all(&c, &PatternClass::all()) {
            for t in &f.matched {
                prop_assert!(c.graph().contains(t));
            }
            for tree in &f.explanation {
                prop_assert!(tree.is_well_formed());
                prop_assert!(f.matched.contains(&tree.conclusion));
            }
            if let Some(tree) = &f.implied_derivation {
                prop_assert!(tree.is_well_formed());
                prop_assert_eq!(Some(&tree.conclusion), f.implied.as_ref());
                for leaf in tree.leaves() {
                    prop_assert!(g.contains(leaf));
                }
            }
            prop_assert_eq!(f.severity, f.class.severity());
        }
    }

    #[test]
    fn detection_is_deterministic_and_ordered(m in matrix()) {
        let c = compute_closure(&m.graph());
        let a = detect_all(&c, &PatternClass::all());
        let b = detect_all(&compute_closure(&m.graph()), &PatternClass::all());
        prop_assert_eq!(&a, &b);
        let order: Vec<_> = a.iter().map(|f| (f.class, f.matched.iter().cloned().collect::<Vec<_>>())).collect();
        let mut sorted = order.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(order, sorted);
    }

    #[test]
    fn enabled_subset_filters(m in matrix(), mask in 0u16..(1 << 15)) {
        let c = compute_closure(&m.graph());
        let all = detect_all(&c, &PatternClass::all());
        let enabled: BTreeSet<PatternClass> =
            PatternClass::ALL.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| *c).collect();
        let some = detect_all(&c, &enabled);
        let expected: Vec<_> = all.into_iter().filter(|f| enabled.contains(&f.pattern().unwrap())).collect();
        prop_assert_eq!(some, expected);
    }

    #[test]
    fn pattern2_hijacks_come_in_pairs(m in matrix()) {
        let c = compute_closure(&m.graph());
        let n = detect_all(&c, &[PatternClass::Pattern2VocabularyHijacking].into()).len();
        prop_assert_eq!(n % 2, 0);
    }

    #[test]
    fn collapse_never_grows(m in matrix()) {
        let fs = detect_all(&compute_closure(&m.graph()), &PatternClass::all());
        let n = fs.len();
        let collapsed = collapse_symmetric(fs);
        prop_assert!(collapsed.len() <= n);
        let p2 = collapsed.iter().filter(|f| f.pattern() == Some(PatternClass::Pattern2VocabularyHijacking)).count();
        let p2_all = detect_all(&compute_closure(&m.graph()), &[PatternClass::Pattern2VocabularyHijacking].into()).len();
        prop_assert_eq!(p2 * 2, p2_all);
    }

    #[test]
    fn adding_implied_triple_retracts_hijack(m in matrix()) {
        let g = m.graph();
        for f in detect_all(&compute_closure(&g), &[PatternClass::Pattern1VocabularyHijacking, PatternClass::Pattern5VocabularyHijacking].into()) {
            let mut g2 = g.clone();
            g2.insert(f.implied.as_ref().unwrap()).unwrap();
            let after = detect_all(&compute_closure(&g2), &[f.pattern().unwrap()].into());
            prop_assert!(!after.iter().any(|a| a.matched == f.matched && a.implied == f.implied));
        }
    }
}

fn literal_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            Just('a'), Just('Z'), Just(' '), Just('"'), Just('\\'), Just('\n'), Just('\r'), Just('\t'),
            Just('\''), Just('é'), Just('✓'), Just('\u{1F600}'), Just('\u{7}'), Just('.'), Just('#'), Just('<'),
        ],
        0..12,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

fn term() -> impl Strategy<Value = Node> {
    prop_oneof![
        (0..5u8).prop_map(|i| Node::iri(&format!("http://example.org/c{i}"))),
        (0..3u8).prop_map(|i| Node::iri(&format!("http://example.org/odd path/{i}>"))),
        (0..3u8).prop_map(|i| Node::blank(format!("b{i}"))),
    ]
}

fn object() -> impl Strategy<Value = Node> {
    prop_oneof![
        term(),
        literal_text().prop_map(Node::literal),
        (literal_text(), prop_oneof![Just("en"), Just("de-CH")]).prop_map(|(s, l)| Node::Literal(Literal::lang(s, l))),
        literal_text().prop_map(|s| Node::Literal(Literal::typed(
            s,
            skosval::Iri::new("http://www.w3.org/2001/XMLSchema#string").unwrap()
        ))),
    ]
}

fn any_graph() -> impl Strategy<Value = Graph> {
    prop::collection::vec((term(), 0..10usize, object()), 0..20).prop_map(|ts| {
        Graph::from_triples(ts.into_iter().map(|(s, p, o)| Triple::new(s, Node::iri(PREDICATES[p]), o))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn turtle_round_trip(g in any_graph()) {
        let mut prefixes = PrefixTable::standard();
        prefixes.insert("ex", "http://example.org/");
        let text = serialize(&g, Format::Turtle, &prefixes);
        let (back, d) = parse(&text, Format::Turtle, None);
        prop_assert!(d.is_empty(), "{:?}\n{}", d, text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn ntriples_round_trip(g in any_graph()) {
        let text = serialize(&g, Format::NTriples, &PrefixTable::new());
        let (back, d) = parse(&text, Format::NTriples, None);
        prop_assert!(d.is_empty(), "{:?}\n{}", d, text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn parser_never_panics(text in "[ -~\n]{0,80}") {
        let _ = parse(&text, Format::Turtle, None);
        let _ = parse(&text, Format::NTriples, None);
    }

    #[test]
    fn separate_documents_keep_blank_nodes_apart(a in any_graph(), b in any_graph()) {
        let p = PrefixTable::standard();
        let ta = serialize(&a, Format::NTriples, &p);
        let tb = serialize(&b, Format::NTriples, &p);
        let mut merged = Graph::new();
        parse_into(&mut merged, &ta, Format::NTriples, None);
        parse_into(&mut merged, &tb, Format::NTriples, None);
        let shared_blank = a.terms().iter().any(|n| matches!(n, Node::Blank(_)) && b.terms().contains(n));
        if !shared_blank {
            let mut union = a.clone();
            union.extend(&b);
            prop_assert_eq!(merged, union);
        } else {
            prop_assert!(merged.len() >= a.len().max(b.len()));
        }
    }
}
