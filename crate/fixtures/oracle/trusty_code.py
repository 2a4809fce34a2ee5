"""Independent artifact-code oracle: parse TriG with rdflib, replace the
nanopub's own URI by urn:trusty:self, write sorted N-Quads, hash.

    python3 trusty_code.py ../relation-001.trig [--nquads]
"""
import argparse
import base64
import hashlib
import re
import sys

import rdflib
from rdflib import BNode, Dataset, Literal, URIRef
from rdflib.namespace import RDF, XSD

NP = "http://www.nanopub.org/nschema#Nanopublication"
SENTINEL = "urn:trusty:self"


def self_uri(ds):
    for s, p, o, g in ds.quads((None, RDF.type, URIRef(NP), None)):
        return str(s)
    sys.exit("no nanopublication declared")


def sub(term, me):
    if isinstance(term, URIRef):
        t = str(term)
        if t == me or t.startswith(me + "#"):
            return URIRef(SENTINEL + t[len(me):])
    return term


def escape(s):
    out = []
    for ch in s:
        out.append({'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r"}.get(ch, ch))
    return "".join(out)


def nq(term, me):
    term = sub(term, me)
    if isinstance(term, URIRef):
        return "<%s>" % term
    if isinstance(term, BNode):
        return "_:%s" % term
    assert isinstance(term, Literal)
    text = '"%s"' % escape(str(term))
    if term.language:
        return text + "@" + term.language.lower()
    if term.datatype and str(term.datatype) != str(XSD.string):
        return text + "^^<%s>" % sub(term.datatype, me)
    return text


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("trig")
    ap.add_argument("--nquads", action="store_true", help="print the digest input instead of the code")
    args = ap.parse_args()
    # hash the lexical form as written, not a canonicalized value
    rdflib.NORMALIZE_LITERALS = False
    ds = Dataset()
    ds.parse(args.trig, format="trig")
    me = self_uri(ds)
    rows = []
    for s, p, o, g in ds.quads((None, None, None, None)):
        gname = str(sub(g.identifier if hasattr(g, "identifier") else g, me))
        rows.append((gname, nq(s, me), nq(p, me), nq(o, me)))
    # graph by raw IRI, then subject, predicate, object by N-Quads form
    rows.sort()
    text = "".join("%s %s %s <%s> .\n" % (s, p, o, g) for g, s, p, o in rows)
    if args.nquads:
        sys.stdout.write(text)
        return
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    code = "RA" + base64.urlsafe_b64encode(digest).decode("ascii").rstrip("=")
    if not re.fullmatch(r"RA[A-Za-z0-9_-]{43}", code):
        sys.exit("malformed code " + code)
    print(code)


if __name__ == "__main__":
    main()
