use std::collections::{BTreeSet, HashMap};
use std::ops::Bound;

use crate::rdf::{Iri, Quad, Subject, Term};

type Id = u32;
type Key = (Id, Id, Id, Id);

/// Interned quads under three orderings (SPO, POS, OSP, each suffixed by
/// the graph), so any pattern with a bound position is a range scan.
#[derive(Debug, Clone, Default)]
pub struct QuadIndex {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
    spo: BTreeSet<Key>,
    pos: BTreeSet<Key>,
    osp: BTreeSet<Key>,
}

impl QuadIndex {
    fn intern(&mut self, t: Term) -> Id {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = Id::try_from(self.terms.len()).expect("term count fits u32");
        self.terms.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    fn id(&self, t: &Term) -> Option<Id> {
        self.ids.get(t).copied()
    }

    pub fn insert(&mut self, q: &Quad) {
        let s = self.intern(subject_term(&q.subject));
        let p = self.intern(Term::Iri(q.predicate.clone()));
        let o = self.intern(q.object.clone());
        let g = self.intern(Term::Iri(q.graph.clone()));
        self.spo.insert((s, p, o, g));
        self.pos.insert((p, o, s, g));
        self.osp.insert((o, s, p, g));
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    /// All quads matching the pattern; `None` is a wildcard.
    pub fn matching(&self, s: Option<&Subject>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Quad> {
        let lookup = |t: Option<Term>| -> Result<Option<Id>, ()> {
            match t {
                None => Ok(None),
                Some(t) => self.id(&t).map(Some).ok_or(()),
            }
        };
        let (Ok(s), Ok(p), Ok(o)) = (
            lookup(s.map(subject_term)),
            lookup(p.map(|p| Term::Iri(p.clone()))),
            lookup(o.cloned()),
        ) else {
            return Vec::new();
        };
        let keys: Vec<(Id, Id, Id, Id)> = match (s, p, o) {
            (Some(s), p, o) => scan(&self.spo, s, p)
                .filter(|k| o.is_none_or(|o| k.2 == o))
                .collect(),
            (None, Some(p), o) => scan(&self.pos, p, o).map(|(p, o, s, g)| (s, p, o, g)).collect(),
            (None, None, Some(o)) => scan(&self.osp, o, None).map(|(o, s, p, g)| (s, p, o, g)).collect(),
            (None, None, None) => self.spo.iter().copied().collect(),
        };
        keys.into_iter().map(|k| self.quad(k)).collect()
    }

    fn quad(&self, (s, p, o, g): Key) -> Quad {
        let term = |id: Id| &self.terms[id as usize];
        Quad {
            subject: term(s).as_subject().expect("subject position holds a subject"),
            predicate: term(p).as_iri().expect("predicate is an IRI").clone(),
            object: term(o).clone(),
            graph: term(g).as_iri().expect("graph is an IRI").clone(),
        }
    }
}

fn subject_term(s: &Subject) -> Term {
    match s {
        Subject::Iri(i) => Term::Iri(i.clone()),
        Subject::Blank(b) => Term::Blank(b.clone()),
    }
}

/// Keys whose first component is `a` (and second is `b`, when bound).
fn scan(set: &BTreeSet<Key>, a: Id, b: Option<Id>) -> impl Iterator<Item = Key> + '_ {
    let (lo, hi) = match b {
        Some(b) => ((a, b, 0, 0), (a, b, Id::MAX, Id::MAX)),
        None => ((a, 0, 0, 0), (a, Id::MAX, Id::MAX, Id::MAX)),
    };
    set.range((Bound::Included(lo), Bound::Included(hi))).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn every_pattern_matches_a_linear_scan() {
        let g = iri("http://g");
        let quads: Vec<Quad> = (0..4)
            .flat_map(|i| {
                let g = g.clone();
                (0..3).map(move |j| {
                    let o: Term = if j == 2 { Literal::string(format!("{i}")).into() } else { iri(&format!("http://o{j}")).into() };
                    Quad::new(iri(&format!("http://s{}", i % 2)), iri(&format!("http://p{}", (i + j) % 3)), o, g.clone())
                })
            })
            .collect();
        let mut ix = QuadIndex::default();
        for q in &quads {
            ix.insert(q);
        }
        let subjects = [None, Some(Subject::Iri(iri("http://s0"))), Some(Subject::Iri(iri("http://nope")))];
        let preds = [None, Some(iri("http://p1"))];
        let objects = [None, Some(Term::Iri(iri("http://o1"))), Some(Literal::string("3").into())];
        for s in &subjects {
            for p in &preds {
                for o in &objects {
                    let mut got = ix.matching(s.as_ref(), p.as_ref(), o.as_ref());
                    got.sort();
                    let mut want: Vec<Quad> = quads
                        .iter()
                        .filter(|q| s.as_ref().is_none_or(|s| &q.subject == s))
                        .filter(|q| p.as_ref().is_none_or(|p| &q.predicate == p))
                        .filter(|q| o.as_ref().is_none_or(|o| &q.object == o))
                        .cloned()
                        .collect();
                    want.sort();
                    want.dedup();
                    assert_eq!(got, want, "{s:?} {p:?} {o:?}");
                }
            }
        }
    }
}
