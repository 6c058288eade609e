//! Tokenizer shared by the Turtle-subset and N-Triples parsers.

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    /// Unescaped IRI reference, possibly relative.
    IriRef(String),
    PName { prefix: String, local: String },
    Blank(String),
    /// Unescaped string content.
    Str(String),
    LangTag(String),
    DoubleCaret,
    Dot,
    Semicolon,
    Comma,
    A,
    PrefixDirective,
    BaseDirective,
    SparqlPrefix,
    SparqlBase,
    /// A construct outside the supported grammar. `depth` is the nesting
    /// change it implies, used when skipping to the end of a statement.
    Unsupported { construct: &'static str, depth: i32 },
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::IriRef(i) => format!("IRI <{i}>"),
            Tok::PName { prefix, local } => format!("prefixed name {prefix}:{local}"),
            Tok::Blank(l) => format!("blank node _:{l}"),
            Tok::Str(_) => "string literal".into(),
            Tok::LangTag(l) => format!("language tag @{l}"),
            Tok::DoubleCaret => "'^^'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Semicolon => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::A => "keyword 'a'".into(),
            Tok::PrefixDirective => "@prefix".into(),
            Tok::BaseDirective => "@base".into(),
            Tok::SparqlPrefix => "PREFIX".into(),
            Tok::SparqlBase => "BASE".into(),
            Tok::Unsupported { construct, .. } => (*construct).into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct LexError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

pub(crate) struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    eof_line: usize,
    eof_col: usize,
    after_string: bool,
}

const LOCAL_ESCAPABLE: &str = "_~.-!$&'()*+,;=/?#@%";

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c)
        || c == '-'
        || c.is_ascii_digit()
        || c == '\u{B7}'
        || ('\u{300}'..='\u{36F}').contains(&c)
        || ('\u{203F}'..='\u{2040}').contains(&c)
        || (c.is_numeric() && !c.is_ascii())
}

impl Lexer {
    pub(crate) fn new(text: &str) -> Self {
        let text = text.strip_prefix('\u{FEFF}').unwrap_or(text);
        let chars: Vec<char> = text.chars().collect();
        // Position of the last character; end-of-input errors point there.
        let (mut line, mut col, mut eof_line, mut eof_col) = (1, 1, 1, 1);
        for &c in &chars {
            eof_line = line;
            eof_col = col;
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        Lexer { chars, pos: 0, line: 1, col: 1, eof_line, eof_col, after_string: false }
    }

    fn peek_char(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek_char() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let after_string = std::mem::replace(&mut self.after_string, false);
        let err = |message: String| LexError { message, line, col };
        let tok = |tok: Tok| Token { tok, line, col };
        let Some(c) = self.peek_char() else {
            return Ok(Token { tok: Tok::Eof, line: self.eof_line, col: self.eof_col });
        };
        match c {
            '<' => {
                self.bump();
                self.iri_ref().map(|i| tok(Tok::IriRef(i))).map_err(err)
            }
            '"' | '\'' => {
                let s = self.string(c).map_err(err)?;
                self.after_string = true;
                Ok(tok(Tok::Str(s)))
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                self.blank_label().map(|l| tok(Tok::Blank(l))).map_err(err)
            }
            '@' => {
                self.bump();
                let mut word = String::new();
                while let Some(c) = self.peek_char() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        word.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if after_string {
                    if valid_lang_tag(&word) {
                        Ok(tok(Tok::LangTag(word)))
                    } else {
                        Err(err(format!("malformed language tag '@{word}'")))
                    }
                } else if word == "prefix" {
                    Ok(tok(Tok::PrefixDirective))
                } else if word == "base" {
                    Ok(tok(Tok::BaseDirective))
                } else {
                    Err(err(format!("unknown directive '@{word}'")))
                }
            }
            '^' => {
                self.bump();
                if self.peek_char() == Some('^') {
                    self.bump();
                    Ok(tok(Tok::DoubleCaret))
                } else {
                    Err(err("expected '^^'".into()))
                }
            }
            '.' if !self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                self.bump();
                Ok(tok(Tok::Dot))
            }
            ';' => {
                self.bump();
                Ok(tok(Tok::Semicolon))
            }
            ',' => {
                self.bump();
                Ok(tok(Tok::Comma))
            }
            '[' | ']' | '(' | ')' | '{' | '}' => {
                self.bump();
                let (construct, depth) = match c {
                    '[' => ("unsupported construct: blank node property list '['", 1),
                    ']' => ("unsupported construct: blank node property list ']'", -1),
                    '(' => ("unsupported construct: collection '('", 1),
                    ')' => ("unsupported construct: collection ')'", -1),
                    '{' => ("unsupported construct: formula '{'", 1),
                    _ => ("unsupported construct: formula '}'", -1),
                };
                Ok(tok(Tok::Unsupported { construct, depth }))
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => {
                while let Some(c) = self.peek_char() {
                    let continues = c.is_ascii_digit()
                        || matches!(c, 'e' | 'E' | '+' | '-')
                        || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()));
                    if !continues {
                        break;
                    }
                    self.bump();
                }
                Ok(tok(Tok::Unsupported { construct: "unsupported construct: numeric literal", depth: 0 }))
            }
            c if c == ':' || is_pn_chars_base(c) => self.word().map(tok).map_err(err),
            other => {
                self.bump();
                Err(err(format!("unexpected character '{other}'")))
            }
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, String> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .peek_char()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| "malformed unicode escape".to_string())?;
            self.bump();
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| format!("invalid code point U+{value:X}"))
    }

    fn iri_ref(&mut self) -> Result<String, String> {
        let mut out = String::new();
        let mut error: Option<String> = None;
        loop {
            match self.peek_char() {
                None | Some('\n') | Some('\r') => {
                    return Err(error.unwrap_or_else(|| "unterminated IRI".into()));
                }
                Some('>') => {
                    self.bump();
                    return match error {
                        Some(e) => Err(e),
                        None => Ok(out),
                    };
                }
                Some('\\') => {
                    self.bump();
                    let r = match self.bump() {
                        Some('u') => self.hex_escape(4),
                        Some('U') => self.hex_escape(8),
                        _ => Err("invalid escape in IRI".into()),
                    };
                    match r {
                        Ok(c) => out.push(c),
                        Err(e) => {
                            error.get_or_insert(e);
                        }
                    }
                }
                Some(c) if matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') || c <= ' ' => {
                    self.bump();
                    error.get_or_insert(format!("invalid character {c:?} in IRI"));
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    fn string_escape(&mut self) -> Result<char, String> {
        match self.bump() {
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('f') => Ok('\u{c}'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('\\') => Ok('\\'),
            Some('u') => self.hex_escape(4),
            Some('U') => self.hex_escape(8),
            Some(c) => Err(format!("invalid escape '\\{c}' in string")),
            None => Err("unterminated string literal".into()),
        }
    }

    fn string(&mut self, quote: char) -> Result<String, String> {
        let long = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        let mut out = String::new();
        let mut error: Option<String> = None;
        if long {
            self.bump();
            self.bump();
            self.bump();
            loop {
                match self.peek_char() {
                    None => return Err("unterminated long string literal".into()),
                    Some(c) if c == quote
                        && self.peek_at(1) == Some(quote)
                        && self.peek_at(2) == Some(quote) =>
                    {
                        self.bump();
                        self.bump();
                        self.bump();
                        break;
                    }
                    Some('\\') => {
                        self.bump();
                        match self.string_escape() {
                            Ok(c) => out.push(c),
                            Err(e) => {
                                error.get_or_insert(e);
                            }
                        }
                    }
                    Some(c) => {
                        self.bump();
                        out.push(c);
                    }
                }
            }
        } else {
            self.bump();
            loop {
                match self.peek_char() {
                    None | Some('\n') | Some('\r') => {
                        return Err("unterminated string literal".into());
                    }
                    Some(c) if c == quote => {
                        self.bump();
                        break;
                    }
                    Some('\\') => {
                        self.bump();
                        match self.string_escape() {
                            Ok(c) => out.push(c),
                            Err(e) => {
                                error.get_or_insert(e);
                            }
                        }
                    }
                    Some(c) => {
                        self.bump();
                        out.push(c);
                    }
                }
            }
        }
        match error {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    fn blank_label(&mut self) -> Result<String, String> {
        match self.peek_char() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {}
            _ => return Err("empty blank node label".into()),
        }
        let end = self.scan_name_end(self.pos, |c| is_pn_chars(c) || c == '.', false);
        let label: String = self.chars[self.pos..end].iter().collect();
        while self.pos < end {
            self.bump();
        }
        Ok(label)
    }

    /// Index one past the last character of a name starting at `start`.
    /// Names may contain dots but not end with one.
    fn scan_name_end(&self, start: usize, allowed: impl Fn(char) -> bool, plx: bool) -> usize {
        let mut i = start;
        let mut good_end = start;
        while i < self.chars.len() {
            let c = self.chars[i];
            if plx && c == '%' {
                let hex = |k: usize| self.chars.get(k).is_some_and(|c| c.is_ascii_hexdigit());
                if hex(i + 1) && hex(i + 2) {
                    i += 3;
                    good_end = i;
                    continue;
                }
                break;
            }
            if plx && c == '\\' {
                if self.chars.get(i + 1).is_some_and(|c| LOCAL_ESCAPABLE.contains(*c)) {
                    i += 2;
                    good_end = i;
                    continue;
                }
                break;
            }
            if !allowed(c) {
                break;
            }
            i += 1;
            if c != '.' {
                good_end = i;
            }
        }
        good_end
    }

    fn word(&mut self) -> Result<Tok, String> {
        let prefix_end = if self.peek_char() == Some(':') {
            self.pos
        } else {
            self.scan_name_end(self.pos, |c| is_pn_chars(c) || c == '.', false)
        };
        let prefix: String = self.chars[self.pos..prefix_end].iter().collect();
        while self.pos < prefix_end {
            self.bump();
        }
        if self.peek_char() != Some(':') {
            return match prefix.as_str() {
                "a" => Ok(Tok::A),
                "true" | "false" => {
                    Ok(Tok::Unsupported { construct: "unsupported construct: boolean literal", depth: 0 })
                }
                w if w.eq_ignore_ascii_case("prefix") => Ok(Tok::SparqlPrefix),
                w if w.eq_ignore_ascii_case("base") => Ok(Tok::SparqlBase),
                w => Err(format!("unexpected bare word '{w}'")),
            };
        }
        self.bump();
        let start = self.pos;
        let first_ok = match self.peek_char() {
            Some(c) => is_pn_chars_u(c) || c == ':' || c.is_ascii_digit() || c == '%' || c == '\\',
            None => false,
        };
        let end = if first_ok {
            self.scan_name_end(start, |c| is_pn_chars(c) || c == '.' || c == ':', true)
        } else {
            start
        };
        let mut local = String::new();
        while self.pos < end {
            let c = self.bump().unwrap_or_default();
            if c == '\\' {
                if let Some(e) = self.bump() {
                    local.push(e);
                }
            } else {
                local.push(c);
            }
        }
        Ok(Tok::PName { prefix, local })
    }
}

fn valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}
