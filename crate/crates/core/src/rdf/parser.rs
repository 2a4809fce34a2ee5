//! TriG-subset reader.
//!
//! Accepted: `@prefix`/`PREFIX`, `@base`/`BASE`, named graph blocks (optionally
//! introduced by `GRAPH`), the `a` keyword, predicate lists with `;`, object
//! lists with `,`, short and long string literals with language tags or
//! datatypes, numeric and boolean shorthands, blank node labels and comments.
//! Collections, `[ ]` property lists and quoted triples are rejected.

use super::term::{BlankNode, Iri, Literal, Subject, Term};
use super::{Dataset, PrefixMap, Quad, RdfError};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// Parses TriG text into a dataset. Triples outside a graph block are rejected.
pub fn parse_trig(text: &str) -> Result<Dataset, RdfError> {
    Parser::new(text, None).run()
}

/// Parses Turtle (or TriG) text; top-level triples are placed into `graph`.
pub fn parse_turtle_into(text: &str, graph: &Iri) -> Result<Dataset, RdfError> {
    Parser::new(text, Some(graph.clone())).run()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    prefixes: PrefixMap,
    base: Option<url::Url>,
    default_graph: Option<Iri>,
    out: Dataset,
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, default_graph: Option<Iri>) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            col: 1,
            prefixes: PrefixMap::new(),
            base: None,
            default_graph,
            out: Dataset::new(),
        }
    }

    fn run(mut self) -> Result<Dataset, RdfError> {
        if self.src.starts_with('\u{feff}') {
            self.bump();
        }
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { break };
            match c {
                '@' => self.at_directive()?,
                '{' => return Err(self.err("default graph blocks are not supported")),
                _ => {
                    if self.keyword_ahead("PREFIX") {
                        self.sparql_prefix()?;
                    } else if self.keyword_ahead("BASE") {
                        self.sparql_base()?;
                    } else if self.keyword_ahead("GRAPH") {
                        self.consume_word();
                        self.skip_ws();
                        let g = self.graph_label()?;
                        self.block(g)?;
                    } else {
                        self.top_level_item()?;
                    }
                }
            }
        }
        self.out.prefixes = self.prefixes;
        Ok(self.out)
    }

    // A graph label followed by `{`, or (Turtle mode only) a triples statement.
    fn top_level_item(&mut self) -> Result<(), RdfError> {
        let start = self.mark();
        let first = self.subject()?;
        self.skip_ws();
        if self.peek() == Some('{') {
            let Subject::Iri(g) = first else {
                return Err(self.err_at(start, "graph name must be an IRI"));
            };
            return self.block(g);
        }
        let Some(graph) = self.default_graph.clone() else {
            return Err(self.err_at(start, "triples outside a named graph are not supported"));
        };
        self.predicate_object_list(&first, &graph)?;
        self.skip_ws();
        self.expect('.')
    }

    fn block(&mut self, graph: Iri) -> Result<(), RdfError> {
        self.skip_ws();
        self.expect('{')?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(());
                }
                None => return Err(self.err("unterminated graph block")),
                _ => {}
            }
            let s = self.subject()?;
            self.predicate_object_list(&s, &graph)?;
            self.skip_ws();
            match self.peek() {
                Some('.') => {
                    self.bump();
                }
                Some('}') => {}
                _ => return Err(self.err("expected '.' or '}'")),
            }
        }
    }

    fn predicate_object_list(&mut self, s: &Subject, graph: &Iri) -> Result<(), RdfError> {
        loop {
            self.skip_ws();
            let p = self.verb()?;
            loop {
                self.skip_ws();
                let o = self.object()?;
                self.out.insert(Quad {
                    subject: s.clone(),
                    predicate: p.clone(),
                    object: o,
                    graph: graph.clone(),
                });
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            // trailing `;` before the terminator is allowed
            if matches!(self.peek(), Some('.') | Some('}') | None) {
                return Ok(());
            }
        }
    }

    fn at_directive(&mut self) -> Result<(), RdfError> {
        let start = self.mark();
        self.bump();
        let word = self.consume_word();
        match word.as_str() {
            "prefix" => {
                self.skip_ws();
                let (label, ns) = self.prefix_decl()?;
                self.skip_ws();
                self.expect('.')?;
                self.bind(label, ns, start)
            }
            "base" => {
                self.skip_ws();
                let iri = self.iriref()?;
                self.skip_ws();
                self.expect('.')?;
                self.set_base(iri, start)
            }
            _ => Err(self.err_at(start, &format!("unknown directive @{word}"))),
        }
    }

    fn sparql_prefix(&mut self) -> Result<(), RdfError> {
        let start = self.mark();
        self.consume_word();
        self.skip_ws();
        let (label, ns) = self.prefix_decl()?;
        self.bind(label, ns, start)
    }

    fn sparql_base(&mut self) -> Result<(), RdfError> {
        let start = self.mark();
        self.consume_word();
        self.skip_ws();
        let iri = self.iriref()?;
        self.set_base(iri, start)
    }

    fn bind(&mut self, label: String, ns: Iri, start: Mark) -> Result<(), RdfError> {
        self.prefixes
            .insert(label, ns)
            .map_err(|e| self.err_at(start, &e.to_string()))
    }

    fn set_base(&mut self, iri: Iri, start: Mark) -> Result<(), RdfError> {
        let url = url::Url::parse(iri.as_str()).map_err(|e| self.err_at(start, &format!("bad base IRI: {e}")))?;
        self.base = Some(url);
        Ok(())
    }

    fn prefix_decl(&mut self) -> Result<(String, Iri), RdfError> {
        let start = self.mark();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') {
                label.push(c);
                self.bump();
            } else {
                return Err(self.err("invalid prefix label"));
            }
        }
        self.expect(':')?;
        if !super::dataset::is_prefix_label(&label) {
            return Err(self.err_at(start, &format!("invalid prefix label {label:?}")));
        }
        self.skip_ws();
        let ns = self.iriref()?;
        Ok((label, ns))
    }

    fn graph_label(&mut self) -> Result<Iri, RdfError> {
        match self.peek() {
            Some('<') => self.iriref(),
            Some(_) => self.prefixed_name(),
            None => Err(self.err("expected graph name")),
        }
    }

    fn subject(&mut self) -> Result<Subject, RdfError> {
        match self.peek() {
            Some('<') => Ok(Subject::Iri(self.iriref()?)),
            Some('_') if self.rest().starts_with("_:") => Ok(Subject::Blank(self.blank()?)),
            Some('[') | Some('(') => Err(self.err("collections and anonymous nodes are not supported")),
            Some(c) if c == ':' || c.is_alphabetic() => Ok(Subject::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.err(&format!("unexpected character {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        if self.peek() == Some('a') {
            let next = self.rest()[1..].chars().next();
            if next.is_none_or(|c| c.is_whitespace() || c == '<' || c == '"' || c == '#') {
                self.bump();
                return Ok(Iri::from_static(RDF_TYPE));
            }
        }
        match self.peek() {
            Some('<') => self.iriref(),
            Some(c) if c == ':' || c.is_alphabetic() => self.prefixed_name(),
            Some(c) => Err(self.err(&format!("expected predicate, found {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.peek() {
            Some('<') => {
                if self.rest().starts_with("<<") {
                    return Err(self.err("quoted triples are not supported"));
                }
                Ok(Term::Iri(self.iriref()?))
            }
            Some('_') if self.rest().starts_with("_:") => Ok(Term::Blank(self.blank()?)),
            Some('"') | Some('\'') => self.string_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.numeric_literal(),
            Some('.') if self.rest()[1..].starts_with(|c: char| c.is_ascii_digit()) => self.numeric_literal(),
            Some('[') | Some('(') => Err(self.err("collections and anonymous nodes are not supported")),
            Some(c) if c == ':' || c.is_alphabetic() => {
                for (word, value) in [("true", "true"), ("false", "false")] {
                    if self.keyword_ahead_exact(word) {
                        self.consume_word();
                        return Ok(Term::Literal(Literal::typed(value, xsd("boolean"))));
                    }
                }
                Ok(Term::Iri(self.prefixed_name()?))
            }
            Some(c) => Err(self.err(&format!("expected object, found {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn iriref(&mut self) -> Result<Iri, RdfError> {
        let start = self.mark();
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = self.uchar()?;
                    value.push(c);
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.err(&format!("invalid character {c:?} in IRI")));
                }
                Some(c) => value.push(c),
            }
        }
        self.resolve(value, start)
    }

    fn resolve(&self, value: String, start: Mark) -> Result<Iri, RdfError> {
        if has_scheme(&value) {
            return Iri::new(value).map_err(|e| self.err_at(start, &e.to_string()));
        }
        let Some(base) = &self.base else {
            return Err(RdfError::RelativeIri {
                iri: value,
                line: start.line,
                column: start.col,
            });
        };
        let joined = base
            .join(&value)
            .map_err(|e| self.err_at(start, &format!("cannot resolve {value:?}: {e}")))?;
        Iri::new(joined.as_str().to_string()).map_err(|e| self.err_at(start, &e.to_string()))
    }

    fn uchar(&mut self) -> Result<char, RdfError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.err("invalid escape in IRI")),
        };
        self.hex_char(len)
    }

    fn hex_char(&mut self, len: usize) -> Result<char, RdfError> {
        let start = self.mark();
        let mut code = 0u32;
        for _ in 0..len {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.err_at(start, "invalid unicode escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.err_at(start, "invalid code point"))
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let start = self.mark();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() != Some(':') {
            return Err(self.err_at(start, &format!("expected prefixed name, found {label:?}")));
        }
        self.bump();
        let local = self.local_part()?;
        let Some(ns) = self.prefixes.get(&label) else {
            return Err(RdfError::UndefinedPrefixAt {
                prefix: label,
                line: start.line,
                column: start.col,
            });
        };
        Iri::new(format!("{}{}", ns.as_str(), local)).map_err(|e| self.err_at(start, &e.to_string()))
    }

    fn local_part(&mut self) -> Result<String, RdfError> {
        let mut out = String::new();
        let mut first = true;
        while let Some(c) = self.peek() {
            if c == '.' {
                // dots are part of the name only when more name characters follow
                let rest = self.rest();
                let after = rest.trim_start_matches('.');
                let continues = after.chars().next().is_some_and(is_local_char);
                if first || !continues {
                    break;
                }
                let dots = rest.len() - after.len();
                for _ in 0..dots {
                    self.bump();
                    out.push('.');
                }
                continue;
            }
            if c == '-' && first {
                break;
            }
            if c == '%' {
                self.bump();
                let start = self.mark();
                for _ in 0..2 {
                    match self.bump() {
                        Some(h) if h.is_ascii_hexdigit() => {}
                        _ => return Err(self.err_at(start, "invalid percent escape in local name")),
                    }
                }
                out.push_str(&self.src[start.pos - 1..self.pos]);
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if LOCAL_ESCAPES.contains(e) => out.push(e),
                    _ => return Err(self.err("invalid escape in local name")),
                }
            } else if c.is_alphanumeric() || matches!(c, '_' | ':' | '-') {
                self.bump();
                out.push(c);
            } else {
                break;
            }
            first = false;
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<BlankNode, RdfError> {
        let start = self.mark();
        self.bump();
        self.bump();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        BlankNode::new(label).map_err(|e| self.err_at(start, &e.to_string()))
    }

    fn string_literal(&mut self) -> Result<Term, RdfError> {
        let start = self.mark();
        let quote = self.bump().expect("quote");
        let triple: String = std::iter::repeat_n(quote, 3).collect();
        let long = self.rest().starts_with(&triple[..2]);
        if long {
            self.bump();
            self.bump();
        }
        let mut value = String::new();
        loop {
            if long && self.rest().starts_with(&triple) {
                self.bump();
                self.bump();
                self.bump();
                break;
            }
            match self.bump() {
                None => return Err(self.err_at(start, "unterminated string")),
                Some(c) if c == quote && !long => break,
                Some('\\') => value.push(self.echar()?),
                Some('\n') | Some('\r') if !long => return Err(self.err("line break in short string")),
                Some(c) => value.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let tag_start = self.mark();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Literal::lang(value, tag)
                    .map(Term::Literal)
                    .map_err(|e| self.err_at(tag_start, &e.to_string()))
            }
            Some('^') => {
                self.expect('^')?;
                self.expect('^')?;
                let dt = match self.peek() {
                    Some('<') => self.iriref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::Literal(Literal::typed(value, dt)))
            }
            _ => Ok(Term::Literal(Literal::string(value))),
        }
    }

    fn echar(&mut self) -> Result<char, RdfError> {
        Ok(match self.bump() {
            Some('t') => '\t',
            Some('b') => '\u{8}',
            Some('n') => '\n',
            Some('r') => '\r',
            Some('f') => '\u{c}',
            Some('"') => '"',
            Some('\'') => '\'',
            Some('\\') => '\\',
            Some('u') => self.hex_char(4)?,
            Some('U') => self.hex_char(8)?,
            _ => return Err(self.err("invalid string escape")),
        })
    }

    fn numeric_literal(&mut self) -> Result<Term, RdfError> {
        let start = self.pos;
        let mark = self.mark();
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.bump();
        }
        let mut int_digits = 0;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            int_digits += 1;
        }
        let mut kind = "integer";
        let rest = self.rest();
        if rest.starts_with('.') && rest[1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            kind = "decimal";
        } else if int_digits == 0 {
            return Err(self.err_at(mark, "invalid number"));
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            self.bump();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.bump();
            }
            let mut exp = 0;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
                exp += 1;
            }
            if exp == 0 {
                return Err(self.err_at(mark, "invalid exponent"));
            }
            kind = "double";
        }
        let lexical = &self.src[start..self.pos];
        Ok(Term::Literal(Literal::typed(lexical, xsd(kind))))
    }

    // -- cursor helpers --

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RdfError> {
        match self.peek() {
            Some(found) if found == c => {
                self.bump();
                Ok(())
            }
            Some(found) => Err(self.err(&format!("expected {c:?}, found {found:?}"))),
            None => Err(self.err(&format!("expected {c:?}, found end of input"))),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn consume_word(&mut self) -> String {
        let mut w = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() {
                w.push(c);
                self.bump();
            } else {
                break;
            }
        }
        w
    }

    /// Case-insensitive keyword followed by a non-name character.
    fn keyword_ahead(&self, word: &str) -> bool {
        let rest = self.rest();
        rest.get(..word.len()).is_some_and(|head| head.eq_ignore_ascii_case(word))
            && !rest[word.len()..].starts_with(|c: char| c.is_alphanumeric() || matches!(c, ':' | '_' | '-' | '.'))
    }

    fn keyword_ahead_exact(&self, word: &str) -> bool {
        let rest = self.rest();
        rest.starts_with(word)
            && !rest[word.len()..].starts_with(|c: char| c.is_alphanumeric() || matches!(c, ':' | '_' | '-'))
    }

    fn err(&self, message: &str) -> RdfError {
        self.err_at(self.mark(), message)
    }

    fn err_at(&self, at: Mark, message: &str) -> RdfError {
        RdfError::Syntax {
            line: at.line,
            column: at.col,
            message: message.to_string(),
        }
    }
}

pub(crate) const LOCAL_ESCAPES: &str = "_~.-!$&'()*+,;=/?#@%";

fn is_local_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | ':' | '-' | '%' | '\\')
}

fn has_scheme(value: &str) -> bool {
    match value.find(':') {
        Some(i) if i > 0 => {
            let scheme = &value[..i];
            scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        _ => false,
    }
}

fn xsd(local: &str) -> Iri {
    Iri::new(format!("{XSD}{local}")).expect("xsd datatype IRI")
}
