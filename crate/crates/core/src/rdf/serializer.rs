use super::term::{escape_string, Iri, Literal, Subject, Term, XSD_STRING};
use super::{Dataset, PrefixMap};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Canonical TriG: prefixes sorted by label, graphs in IRI order, quads in
/// canonical order grouped by subject and predicate.
pub fn serialize_trig(d: &Dataset) -> String {
    let mut out = String::new();
    for (label, ns) in d.prefixes.iter() {
        out.push_str("@prefix ");
        out.push_str(label);
        out.push_str(": <");
        out.push_str(ns.as_str());
        out.push_str("> .\n");
    }
    let writer = TermWriter { prefixes: &d.prefixes };
    let mut current_graph: Option<&Iri> = None;
    let mut current_subject: Option<&Subject> = None;
    let mut current_predicate: Option<&Iri> = None;
    for q in d.iter() {
        if current_graph != Some(&q.graph) {
            if current_graph.is_some() {
                out.push_str(" .\n}\n");
            }
            if !out.is_empty() {
                out.push('\n');
            }
            writer.iri(&mut out, &q.graph);
            out.push_str(" {\n");
            current_graph = Some(&q.graph);
            current_subject = None;
            current_predicate = None;
        }
        if current_subject != Some(&q.subject) {
            if current_subject.is_some() {
                out.push_str(" .\n");
            }
            out.push_str("  ");
            writer.subject(&mut out, &q.subject);
            out.push(' ');
            writer.predicate(&mut out, &q.predicate);
            out.push(' ');
            current_subject = Some(&q.subject);
            current_predicate = Some(&q.predicate);
        } else if current_predicate != Some(&q.predicate) {
            out.push_str(" ;\n    ");
            writer.predicate(&mut out, &q.predicate);
            out.push(' ');
            current_predicate = Some(&q.predicate);
        } else {
            out.push_str(", ");
        }
        writer.term(&mut out, &q.object);
    }
    if current_graph.is_some() {
        out.push_str(" .\n}\n");
    }
    out
}

struct TermWriter<'a> {
    prefixes: &'a PrefixMap,
}

impl TermWriter<'_> {
    fn iri(&self, out: &mut String, iri: &Iri) {
        match self.compact(iri.as_str()) {
            Some((label, local)) => {
                out.push_str(label);
                out.push(':');
                out.push_str(&local);
            }
            None => {
                out.push('<');
                out.push_str(iri.as_str());
                out.push('>');
            }
        }
    }

    fn predicate(&self, out: &mut String, p: &Iri) {
        if p.as_str() == RDF_TYPE {
            out.push('a');
        } else {
            self.iri(out, p);
        }
    }

    fn subject(&self, out: &mut String, s: &Subject) {
        match s {
            Subject::Iri(i) => self.iri(out, i),
            Subject::Blank(b) => {
                out.push_str("_:");
                out.push_str(b.label());
            }
        }
    }

    fn term(&self, out: &mut String, t: &Term) {
        match t {
            Term::Iri(i) => self.iri(out, i),
            Term::Blank(b) => {
                out.push_str("_:");
                out.push_str(b.label());
            }
            Term::Literal(l) => self.literal(out, l),
        }
    }

    fn literal(&self, out: &mut String, l: &Literal) {
        out.push('"');
        escape_string(out, l.lexical());
        out.push('"');
        if let Some(lang) = l.language() {
            out.push('@');
            out.push_str(lang);
        } else if l.datatype().as_str() != XSD_STRING {
            out.push_str("^^");
            self.iri(out, l.datatype());
        }
    }

    /// Longest matching namespace whose remainder is a writable local name;
    /// ties go to the smallest label.
    fn compact(&self, iri: &str) -> Option<(&str, String)> {
        let mut best: Option<(&str, usize, String)> = None;
        for (label, ns) in self.prefixes.iter() {
            let ns = ns.as_str();
            let Some(rest) = iri.strip_prefix(ns) else { continue };
            if best.as_ref().is_some_and(|(_, len, _)| *len >= ns.len()) {
                continue;
            }
            if let Some(local) = write_local(rest) {
                best = Some((label, ns.len(), local));
            }
        }
        best.map(|(label, _, local)| (label, local))
    }
}

/// Local names that would need a backslash escape are written as full IRIs
/// instead; several common parsers reject `\.` and friends.
fn write_local(rest: &str) -> Option<String> {
    let chars: Vec<char> = rest.chars().collect();
    let last = chars.len().saturating_sub(1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '%' if i + 2 < chars.len() && chars[i + 1].is_ascii_hexdigit() && chars[i + 2].is_ascii_hexdigit() => {
                i += 3;
                continue;
            }
            '.' if i == 0 || i == last => return None,
            '-' if i == 0 => return None,
            c if c.is_alphanumeric() || matches!(c, '_' | ':' | '-' | '.') => {}
            _ => return None,
        }
        i += 1;
    }
    Some(rest.to_string())
}
