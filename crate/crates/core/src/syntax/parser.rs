use std::collections::{HashMap, HashSet};

use super::lexer::{LexError, Lexer, Tok, Token};
use super::{DiagnosticLevel, Format, ParseDiagnostic, PrefixTable};
use crate::rdf::{has_scheme, Graph, Iri, Literal, Node, Triple};
use crate::vocab;

/// Result of reading one document into a graph.
#[derive(Clone, Debug, Default)]
pub struct ParseOutput {
    pub diagnostics: Vec<ParseDiagnostic>,
    /// Prefixes in effect at the end of the document.
    pub prefixes: PrefixTable,
    pub triples_added: usize,
}

impl ParseOutput {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(ParseDiagnostic::is_error)
    }
}

/// Parses a whole document into a fresh graph.
pub fn parse(text: &str, format: Format, base: Option<&str>) -> (Graph, Vec<ParseDiagnostic>) {
    let mut graph = Graph::new();
    let out = parse_into(&mut graph, text, format, base);
    (graph, out.diagnostics)
}

/// Parses a document into an existing graph. Blank node labels are scoped to
/// this document: a label already used by an earlier document is renamed.
pub fn parse_into(graph: &mut Graph, text: &str, format: Format, base: Option<&str>) -> ParseOutput {
    let reserved: HashSet<String> = graph
        .terms()
        .iter()
        .filter_map(|n| match n {
            Node::Blank(l) => Some(l.clone()),
            _ => None,
        })
        .collect();
    let mut prefixes = PrefixTable::new();
    prefixes.set_base(base.map(str::to_string));
    let mut p = Parser {
        lexer: Lexer::new(text),
        peeked: None,
        format,
        prefixes,
        diagnostics: Vec::new(),
        reserved,
        blank_map: HashMap::new(),
        assigned: HashSet::new(),
        added: 0,
    };
    p.document(graph);
    ParseOutput { diagnostics: p.diagnostics, prefixes: p.prefixes, triples_added: p.added }
}

struct Failure {
    line: usize,
    col: usize,
    message: String,
}

impl From<LexError> for Failure {
    fn from(e: LexError) -> Self {
        Failure { line: e.line, col: e.col, message: e.message }
    }
}

type PResult<T> = Result<T, Failure>;

fn fail<T>(tok: &Token, message: impl Into<String>) -> PResult<T> {
    Err(Failure { line: tok.line, col: tok.col, message: message.into() })
}

struct Parser {
    lexer: Lexer,
    peeked: Option<Token>,
    format: Format,
    prefixes: PrefixTable,
    diagnostics: Vec<ParseDiagnostic>,
    reserved: HashSet<String>,
    blank_map: HashMap<String, String>,
    assigned: HashSet<String>,
    added: usize,
}

impl Parser {
    fn peek(&mut self) -> PResult<&Token> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().expect("peeked"))
    }

    fn next(&mut self) -> PResult<Token> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => Ok(self.lexer.next_token()?),
        }
    }

    fn expect_dot(&mut self) -> PResult<()> {
        let tok = self.peek()?;
        if tok.tok == Tok::Dot {
            self.next()?;
            Ok(())
        } else {
            let tok = tok.clone();
            fail(&tok, format!("expected '.', found {}", tok.tok.describe()))
        }
    }

    fn report(&mut self, f: Failure, level: DiagnosticLevel) {
        self.diagnostics.push(ParseDiagnostic { line: f.line, column: f.col, message: f.message, level });
    }

    fn document(&mut self, graph: &mut Graph) {
        loop {
            match self.peek() {
                Ok(Token { tok: Tok::Eof, .. }) => return,
                Ok(_) => {}
                Err(f) => {
                    let line = f.line;
                    self.report(f, DiagnosticLevel::Error);
                    self.recover(Some(line));
                    continue;
                }
            }
            let result = match self.format {
                Format::Turtle => self.turtle_statement(graph),
                Format::NTriples => self.ntriples_statement(graph),
            };
            if let Err(f) = result {
                let line = f.line;
                self.report(f, DiagnosticLevel::Error);
                self.recover(Some(line));
            }
        }
    }

    /// Turtle: skip past the next `.` at bracket depth zero.
    /// N-Triples: skip to the next `.` or the first token on a later line.
    fn recover(&mut self, error_line: Option<usize>) {
        let mut depth = 0i32;
        loop {
            let tok = match self.peek() {
                Ok(t) => t.clone(),
                Err(_) => continue,
            };
            if self.format == Format::NTriples {
                if let Some(line) = error_line {
                    if tok.line > line {
                        return;
                    }
                }
            }
            self.peeked = None;
            match tok.tok {
                Tok::Eof => {
                    self.peeked = Some(tok);
                    return;
                }
                Tok::Dot if depth <= 0 => return,
                Tok::Unsupported { depth: d, .. } => depth += d,
                _ => {}
            }
        }
    }

    fn emit(&mut self, graph: &mut Graph, s: &Node, p: &Node, o: &Node) {
        let t = Triple::new(s.clone(), p.clone(), o.clone());
        if let Ok(true) = graph.insert(&t) {
            self.added += 1;
        }
    }

    fn turtle_statement(&mut self, graph: &mut Graph) -> PResult<()> {
        let tok = self.peek()?.clone();
        match tok.tok {
            Tok::PrefixDirective => {
                self.next()?;
                self.prefix_decl(&tok)?;
                self.expect_dot()
            }
            Tok::SparqlPrefix => {
                self.next()?;
                self.prefix_decl(&tok)
            }
            Tok::BaseDirective => {
                self.next()?;
                self.base_decl()?;
                self.expect_dot()
            }
            Tok::SparqlBase => {
                self.next()?;
                self.base_decl()
            }
            _ => {
                let subject = self.subject()?;
                self.predicate_object_list(graph, &subject)?;
                self.expect_dot()
            }
        }
    }

    fn prefix_decl(&mut self, directive: &Token) -> PResult<()> {
        let tok = self.next()?;
        let Tok::PName { prefix, local } = &tok.tok else {
            return fail(&tok, format!("expected prefix label, found {}", tok.tok.describe()));
        };
        if !local.is_empty() {
            return fail(&tok, format!("expected prefix label ending in ':', found {prefix}:{local}"));
        }
        let prefix = prefix.clone();
        let iri_tok = self.next()?;
        let Tok::IriRef(raw) = &iri_tok.tok else {
            return fail(&iri_tok, format!("expected namespace IRI, found {}", iri_tok.tok.describe()));
        };
        let ns = self.resolve_iri(raw, &iri_tok)?;
        if let Some(old) = self.prefixes.insert(prefix.clone(), ns.as_str()) {
            if old != ns.as_str() {
                self.diagnostics.push(ParseDiagnostic {
                    line: directive.line,
                    column: directive.col,
                    message: format!("prefix '{prefix}:' redefined from <{old}> to <{ns}>"),
                    level: DiagnosticLevel::Warning,
                });
            }
        }
        Ok(())
    }

    fn base_decl(&mut self) -> PResult<()> {
        let tok = self.next()?;
        let Tok::IriRef(raw) = &tok.tok else {
            return fail(&tok, format!("expected base IRI, found {}", tok.tok.describe()));
        };
        let base = self.resolve_iri(raw, &tok)?;
        self.prefixes.set_base(Some(base.as_str().to_string()));
        Ok(())
    }

    fn resolve_iri(&self, raw: &str, tok: &Token) -> PResult<Iri> {
        if has_scheme(raw) {
            return Iri::new(raw).or_else(|e| fail(tok, e.to_string()));
        }
        if self.format == Format::NTriples {
            return fail(tok, format!("relative IRI <{raw}> is not allowed in N-Triples"));
        }
        let Some(base) = self.prefixes.base() else {
            return fail(tok, format!("relative IRI <{raw}> with no base"));
        };
        let joined = url::Url::parse(base).and_then(|b| b.join(raw));
        match joined {
            Ok(u) => Iri::new(u.as_str()).or_else(|e| fail(tok, e.to_string())),
            Err(e) => fail(tok, format!("cannot resolve <{raw}> against <{base}>: {e}")),
        }
    }

    fn iri_term(&self, tok: &Token) -> Option<PResult<Node>> {
        match &tok.tok {
            Tok::IriRef(raw) => Some(self.resolve_iri(raw, tok).map(Node::Iri)),
            Tok::PName { prefix, local } => {
                if self.format == Format::NTriples {
                    return Some(fail(tok, "prefixed names are not allowed in N-Triples"));
                }
                Some(match self.prefixes.expand(prefix, local) {
                    None => fail(tok, format!("undefined prefix '{prefix}'")),
                    Some(Err(msg)) => fail(tok, msg),
                    Some(Ok(iri)) => Ok(Node::Iri(iri)),
                })
            }
            _ => None,
        }
    }

    fn blank(&mut self, label: &str) -> Node {
        if let Some(l) = self.blank_map.get(label) {
            return Node::Blank(l.clone());
        }
        let mut candidate = label.to_string();
        let mut n = 1;
        while self.reserved.contains(&candidate) || self.assigned.contains(&candidate) {
            candidate = format!("{label}_{n}");
            n += 1;
        }
        self.assigned.insert(candidate.clone());
        self.blank_map.insert(label.to_string(), candidate.clone());
        Node::Blank(candidate)
    }

    /// Fails without consuming a `.`, so recovery stops at that statement end.
    fn refuse_dot(&mut self, what: &str) -> PResult<()> {
        let tok = self.peek()?;
        if matches!(tok.tok, Tok::Dot | Tok::Eof) {
            let tok = tok.clone();
            return fail(&tok, format!("expected {what}, found {}", tok.tok.describe()));
        }
        Ok(())
    }

    fn subject(&mut self) -> PResult<Node> {
        self.refuse_dot("subject")?;
        let tok = self.next()?;
        if let Some(r) = self.iri_term(&tok) {
            return r;
        }
        match &tok.tok {
            Tok::Blank(l) => Ok(self.blank(&l.clone())),
            Tok::Str(_) => fail(&tok, "literal cannot be used as a subject"),
            Tok::Unsupported { construct, .. } => {
                let construct = *construct;
                self.peeked = Some(tok.clone());
                fail(&tok, construct)
            }
            other => fail(&tok, format!("expected subject, found {}", other.describe())),
        }
    }

    fn verb(&mut self) -> PResult<Node> {
        self.refuse_dot("predicate")?;
        let tok = self.next()?;
        if let Some(r) = self.iri_term(&tok) {
            return r;
        }
        match &tok.tok {
            Tok::A if self.format == Format::Turtle => Ok(Node::iri(vocab::rdf::TYPE)),
            Tok::Blank(_) => fail(&tok, "blank node cannot be used as a predicate"),
            Tok::Str(_) => fail(&tok, "literal cannot be used as a predicate"),
            Tok::Unsupported { construct, .. } => {
                let construct = *construct;
                self.peeked = Some(tok.clone());
                fail(&tok, construct)
            }
            other => fail(&tok, format!("expected predicate, found {}", other.describe())),
        }
    }

    fn object(&mut self) -> PResult<Node> {
        self.refuse_dot("object")?;
        let tok = self.next()?;
        if let Some(r) = self.iri_term(&tok) {
            return r;
        }
        match &tok.tok {
            Tok::Blank(l) => Ok(self.blank(&l.clone())),
            Tok::Str(s) => {
                let lexical = s.clone();
                match self.peek()?.tok.clone() {
                    Tok::LangTag(lang) => {
                        self.next()?;
                        Ok(Node::Literal(Literal::lang(lexical, lang)))
                    }
                    Tok::DoubleCaret => {
                        self.next()?;
                        let dt_tok = self.next()?;
                        match self.iri_term(&dt_tok) {
                            Some(Ok(Node::Iri(dt))) => Ok(Node::Literal(Literal::typed(lexical, dt))),
                            Some(Err(e)) => Err(e),
                            _ => fail(&dt_tok, format!("expected datatype IRI, found {}", dt_tok.tok.describe())),
                        }
                    }
                    _ => Ok(Node::Literal(Literal::simple(lexical))),
                }
            }
            Tok::Unsupported { construct, .. } => {
                let construct = *construct;
                self.peeked = Some(tok.clone());
                fail(&tok, construct)
            }
            other => fail(&tok, format!("expected object, found {}", other.describe())),
        }
    }

    fn predicate_object_list(&mut self, graph: &mut Graph, subject: &Node) -> PResult<()> {
        loop {
            let verb = self.verb()?;
            loop {
                let object = self.object()?;
                self.emit(graph, subject, &verb, &object);
                if self.peek()?.tok == Tok::Comma {
                    self.next()?;
                } else {
                    break;
                }
            }
            if self.peek()?.tok != Tok::Semicolon {
                return Ok(());
            }
            while self.peek()?.tok == Tok::Semicolon {
                self.next()?;
            }
            if self.peek()?.tok == Tok::Dot {
                return Ok(());
            }
        }
    }

    fn ntriples_statement(&mut self, graph: &mut Graph) -> PResult<()> {
        let first = self.peek()?.clone();
        match first.tok {
            Tok::IriRef(_) | Tok::Blank(_) | Tok::Str(_) | Tok::PName { .. } => {}
            ref other => return fail(&first, format!("expected subject, found {}", other.describe())),
        }
        let subject = self.subject()?;
        let verb_tok = self.peek()?.clone();
        if !matches!(verb_tok.tok, Tok::IriRef(_)) {
            return fail(&verb_tok, format!("expected predicate IRI, found {}", verb_tok.tok.describe()));
        }
        let verb = self.verb()?;
        let object = self.object()?;
        self.expect_dot()?;
        self.emit(graph, &subject, &verb, &object);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SKOS_DECL: &str = "@prefix skos: <http://www.w3.org/2004/02/skos/core#>.\n";

    fn errors(d: &[ParseDiagnostic]) -> Vec<&ParseDiagnostic> {
        d.iter().filter(|d| d.is_error()).collect()
    }

    #[test]
    fn single_statement_expands_prefix() {
        let text = format!("{SKOS_DECL}<urn:a1> skos:broadMatch <urn:b1>.");
        let (g, d) = parse(&text, Format::Turtle, None);
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(
            g.sorted(),
            vec![Triple::new(Node::iri("urn:a1"), Node::iri(vocab::skos::BROAD_MATCH), Node::iri("urn:b1"))]
        );
    }

    #[test]
    fn object_list() {
        let (g, d) = parse(r#"<urn:a1> <urn:p> "x", "y"."#, Format::Turtle, None);
        assert!(d.is_empty());
        assert_eq!(g.len(), 2);
        assert_eq!(g.matching(Some(&Node::iri("urn:a1")), Some(&Node::iri("urn:p")), None).len(), 2);
    }

    #[test]
    fn undefined_prefix_drops_statement() {
        let (g, d) = parse("ex:a ex:p ex:b .", Format::Turtle, None);
        assert!(g.is_empty());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].line, 1);
        assert_eq!(d[0].column, 1);
        assert!(d[0].message.contains("'ex'"), "{}", d[0].message);
    }

    #[test]
    fn predicate_lists_and_a() {
        let text = format!("{SKOS_DECL}<urn:a> a skos:Concept ; skos:broader <urn:b>, <urn:c> ; .");
        let (g, d) = parse(&text, Format::Turtle, None);
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(g.len(), 3);
        assert!(g.contains(&Triple::new(
            Node::iri("urn:a"),
            Node::iri(vocab::rdf::TYPE),
            Node::iri(&format!("{}Concept", vocab::SKOS))
        )));
    }

    #[test]
    fn base_resolution() {
        let (g, d) = parse("@base <http://ex.org/dir/> . <a> <p> <../b> .", Format::Turtle, None);
        assert!(d.is_empty(), "{d:?}");
        assert!(g.contains(&Triple::new(
            Node::iri("http://ex.org/dir/a"),
            Node::iri("http://ex.org/dir/p"),
            Node::iri("http://ex.org/b"),
        )));
    }

    #[test]
    fn relative_iri_without_base() {
        let (g, d) = parse("<a> <urn:p> <urn:b> .", Format::Turtle, None);
        assert!(g.is_empty());
        assert!(d[0].message.contains("no base"));
    }

    #[test]
    fn recovery_continues_after_bad_statement() {
        let text = "<urn:a> <urn:p> [ <urn:q> <urn:r> . ] .\n<urn:a> <urn:p> <urn:ok> .\n<urn:x> <urn:p> 42 .\n<urn:z> <urn:p> <urn:ok2> .\n<urn:y> <urn:p> \"unterminated .\n";
        let (g, d) = parse(text, Format::Turtle, None);
        let errs = errors(&d);
        assert_eq!(errs.len(), 3, "{d:?}");
        assert!(errs[0].message.contains("property list"));
        assert!(errs[1].message.contains("numeric"));
        assert!(errs[2].message.contains("unterminated"));
        assert_eq!((errs[2].line, errs[2].column), (5, 17));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn missing_object_does_not_swallow_next_statement() {
        let (g, d) = parse("<urn:a> <urn:p> .\n<urn:b> <urn:p> <urn:c> .", Format::Turtle, None);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].line, d[0].column), (1, 17));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn literal_subject_is_an_error() {
        let (g, d) = parse("\"x\" <urn:p> <urn:o> .", Format::Turtle, None);
        assert!(g.is_empty());
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn typed_and_language_literals() {
        let text = "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n<urn:a> <urn:p> \"1\"^^xsd:integer, \"chat\"@fr .";
        let (g, d) = parse(text, Format::Turtle, None);
        assert!(d.is_empty(), "{d:?}");
        let objects: Vec<Node> = g.sorted().into_iter().map(|t| t.object).collect();
        assert!(objects.contains(&Node::Literal(Literal::lang("chat", "fr"))));
        assert!(objects.contains(&Node::Literal(Literal::typed(
            "1",
            Iri::new("http://www.w3.org/2001/XMLSchema#integer").unwrap()
        ))));
    }

    #[test]
    fn prefix_redefinition_warns_and_replaces() {
        let text = "@prefix ex: <urn:one#> .\n@prefix ex: <urn:two#> .\nex:a ex:p ex:b .";
        let (g, d) = parse(text, Format::Turtle, None);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].level, DiagnosticLevel::Warning);
        assert!(g.contains(&Triple::new(Node::iri("urn:two#a"), Node::iri("urn:two#p"), Node::iri("urn:two#b"))));
    }

    #[test]
    fn sparql_style_directives() {
        let (g, d) = parse("PREFIX ex: <urn:ex#>\nex:a ex:p ex:b .", Format::Turtle, None);
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn bom_is_tolerated() {
        let (g, d) = parse("\u{FEFF}<urn:a> <urn:p> <urn:b> .", Format::Turtle, None);
        assert!(d.is_empty());
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn ntriples_lines() {
        let text = "<urn:a> <urn:p> <urn:b> .\n_:x <urn:p> \"v\"@en .\n<urn:c> <urn:p> <urn:d> <urn:e> .\n<urn:f> <urn:p> \"t\"^^<urn:dt> .\n";
        let (g, d) = parse(text, Format::NTriples, None);
        assert_eq!(g.len(), 3);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].line, 3);
    }

    #[test]
    fn ntriples_rejects_turtle_shorthand() {
        let (g, d) = parse("<urn:a> a <urn:b> .\n<urn:a> <urn:p> <urn:b> .", Format::NTriples, None);
        assert_eq!(g.len(), 1);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn blank_labels_are_document_scoped() {
        let mut g = Graph::new();
        parse_into(&mut g, "_:b <urn:p> <urn:one> .", Format::Turtle, None);
        parse_into(&mut g, "_:b <urn:p> <urn:two> . _:b_1 <urn:p> <urn:three> .", Format::Turtle, None);
        let subjects: HashSet<Node> = g.iter().map(|t| t.subject).collect();
        assert_eq!(subjects.len(), 3);
    }

    #[test]
    fn deterministic() {
        let text = "@prefix ex: <urn:ex#> . ex:a ex:p ex:b ; ex:q [ ] . bad";
        let a = parse(text, Format::Turtle, None);
        let b = parse(text, Format::Turtle, None);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
