"""Presentation DSL: a small text format for group presentations.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    document := "group" IDENT "{" "rank" INT ";" baseline+ relline* "}"
    baseline := "base" IDENT ":" charexpr ";"
    charexpr := "Z" | term ("*" term)*
    term     := PRIME "^" (INT | "inf")
    relline  := "rel" "(" intcomb ")" "/" INT ";"
    intcomb  := signed integer-coefficient identifiers joined by "+"/"-"

Parse errors carry line and column.  Printing is canonical and
parse(print(doc)) is the identity on canonical documents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import INF
from .groups import Group
from .typesys import Characteristic, char_to_jsonable, char_from_jsonable

DOCUMENT_SCHEMA = "tfab.presentation/1"


class ParseError(Exception):
    def __init__(self, line, col, expected, found):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{col}: expected {expected}, found {found}")


class UnknownIdentifier(ParseError):
    def __init__(self, line, col, name):
        self.name = name
        ParseError.__init__(self, line, col, "a declared identifier", repr(name))


@dataclass
class Token:
    kind: str  # IDENT, INT, SYM, EOF
    text: str
    line: int
    col: int


_SYMBOLS = set("{}():;/*^+-,")


def _tokenize(text: str):
    out = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _SYMBOLS:
            out.append(Token("SYM", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(line, col, "a token", repr(ch))
    out.append(Token("EOF", "", line, col))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, expected):
        t = self.peek()
        found = repr(t.text) if t.kind != "EOF" else "end of input"
        raise ParseError(t.line, t.col, expected, found)

    def expect_sym(self, s):
        t = self.peek()
        if t.kind == "SYM" and t.text == s:
            return self.next()
        self.fail(f"'{s}'")

    def expect_kw(self, kw):
        t = self.peek()
        if t.kind == "IDENT" and t.text == kw:
            return self.next()
        self.fail(f"'{kw}'")

    def expect_int(self) -> int:
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return int(t.text)
        self.fail("an integer")

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind == "IDENT":
            return self.next()
        self.fail("an identifier")


@dataclass
class PresentationDocument:
    name: str
    rank: int
    base: list  # [(ident, Characteristic)]
    relations: list  # [({ident: coeff}, modulus)]
    spans: dict = field(default_factory=dict)

    @property
    def idents(self):
        return [name for name, _ in self.base]

    def to_group(self) -> Group:
        order = self.idents
        chars = [c for _, c in self.base]
        rels = []
        for coeffs, m in self.relations:
            rels.append((tuple(coeffs.get(x, 0) for x in order), m))
        return Group.standard(chars, rels)

    def to_jsonable(self) -> dict:
        return {
            "schema": DOCUMENT_SCHEMA,
            "name": self.name,
            "rank": self.rank,
            "base": [
                {"name": n, "char": char_to_jsonable(c)} for n, c in self.base
            ],
            "relations": [
                {"coeffs": dict(sorted(coeffs.items())), "modulus": m}
                for coeffs, m in self.relations
            ],
        }

    @classmethod
    def from_jsonable(cls, data) -> "PresentationDocument":
        base = [(b["name"], char_from_jsonable(b["char"])) for b in data["base"]]
        rels = [
            ({k: int(v) for k, v in r["coeffs"].items()}, int(r["modulus"]))
            for r in data.get("relations", [])
        ]
        return cls(data.get("name", "G"), int(data["rank"]), base, rels)


def _parse_charexpr(p: _Parser) -> Characteristic:
    t = p.peek()
    if t.kind == "IDENT" and t.text == "Z":
        p.next()
        return Characteristic()
    entries = {}
    while True:
        prime = p.expect_int()
        p.expect_sym("^")
        t = p.peek()
        if t.kind == "IDENT" and t.text == "inf":
            p.next()
            e = INF
        elif t.kind == "INT":
            e = int(p.next().text)
        else:
            p.fail("an exponent (integer or 'inf')")
        if prime in entries:
            raise ParseError(t.line, t.col, "distinct primes", str(prime))
        entries[prime] = e
        t = p.peek()
        if t.kind == "SYM" and t.text == "*":
            p.next()
            continue
        break
    return Characteristic(entries)


def _parse_intcomb(p: _Parser, declared) -> dict:
    coeffs = {}
    sign = 1
    t = p.peek()
    if t.kind == "SYM" and t.text in "+-":
        sign = -1 if t.text == "-" else 1
        p.next()
    while True:
        coef = sign
        t = p.peek()
        if t.kind == "INT":
            coef = sign * int(p.next().text)
            t = p.peek()
            if t.kind == "SYM" and t.text == "*":
                p.next()
        ident_tok = p.expect_ident()
        if ident_tok.text not in declared:
            raise UnknownIdentifier(ident_tok.line, ident_tok.col, ident_tok.text)
        coeffs[ident_tok.text] = coeffs.get(ident_tok.text, 0) + coef
        t = p.peek()
        if t.kind == "SYM" and t.text in "+-":
            sign = -1 if t.text == "-" else 1
            p.next()
            continue
        break
    return coeffs


def parse_presentation(text: str) -> PresentationDocument:
    p = _Parser(text)
    p.expect_kw("group")
    name = p.expect_ident().text
    p.expect_sym("{")
    p.expect_kw("rank")
    rank = p.expect_int()
    p.expect_sym(";")
    base = []
    declared = set()
    while True:
        t = p.peek()
        if t.kind == "IDENT" and t.text == "base":
            p.next()
            ident = p.expect_ident()
            if ident.text in declared:
                raise ParseError(ident.line, ident.col, "a fresh identifier", repr(ident.text))
            p.expect_sym(":")
            char = _parse_charexpr(p)
            p.expect_sym(";")
            declared.add(ident.text)
            base.append((ident.text, char))
            continue
        break
    if not base:
        p.fail("'base'")
    rels = []
    while True:
        t = p.peek()
        if t.kind == "IDENT" and t.text == "rel":
            p.next()
            p.expect_sym("(")
            coeffs = _parse_intcomb(p, declared)
            p.expect_sym(")")
            p.expect_sym("/")
            m = p.expect_int()
            p.expect_sym(";")
            rels.append((coeffs, m))
            continue
        break
    p.expect_sym("}")
    t = p.peek()
    if t.kind != "EOF":
        p.fail("end of input")
    if rank != len(base):
        raise ParseError(1, 1, f"rank {rank} to match {len(base)} base lines", str(rank))
    return PresentationDocument(name, rank, base, rels)


def _coeff_text(coef: int, ident: str, first: bool) -> str:
    sign = "-" if coef < 0 else "+"
    mag = abs(coef)
    body = ident if mag == 1 else f"{mag}{ident}"
    if first:
        return body if coef > 0 else f"-{body}"
    return f" {sign} {body}"


def print_presentation(doc: PresentationDocument) -> str:
    lines = [f"group {doc.name} {{", f"  rank {doc.rank};"]
    for name, char in doc.base:
        lines.append(f"  base {name} : {char};")
    order = doc.idents
    for coeffs, m in doc.relations:
        parts = ""
        first = True
        for ident in order:
            c = coeffs.get(ident, 0)
            if not c:
                continue
            parts += _coeff_text(c, ident, first)
            first = False
        lines.append(f"  rel ({parts})/{m};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def document_from_group(G: Group, name: str = "G") -> PresentationDocument:
    """Standard-basis document for a group; non-standard presentations are
    re-coordinatized to their abstract form (the embedding is dropped)."""
    std, _ = G.reindexed()
    idents = [f"e{i+1}" for i in range(std.rank)]
    base = list(zip(idents, std.chars))
    rels = []
    for w, m in std.relations:
        rels.append(({idents[i]: w[i] for i in range(std.rank) if w[i]}, m))
    return PresentationDocument(name, std.rank, base, rels)


# ---------------------------------------------------------------------------
# Element expressions:  "(e1 - e2)/3", "e1/8", "3/5 e1 + 2*e2"
# ---------------------------------------------------------------------------

def parse_element(text: str, doc: PresentationDocument):
    """Ambient vector of a rational combination of declared identifiers."""
    p = _Parser(text)
    declared = set(doc.idents)
    order = {name: i for i, name in enumerate(doc.idents)}
    n = len(order)

    def parse_comb() -> list:
        coeffs = [Fraction(0)] * n
        sign = 1
        t = p.peek()
        if t.kind == "SYM" and t.text in "+-":
            sign = -1 if t.text == "-" else 1
            p.next()
        while True:
            coef = Fraction(sign)
            t = p.peek()
            if t.kind == "INT":
                num = int(p.next().text)
                den = 1
                t = p.peek()
                if t.kind == "SYM" and t.text == "/":
                    nxt = _peek_after(p)
                    if nxt is not None and nxt.kind == "INT":
                        p.next()
                        den = p.expect_int()
                coef = Fraction(sign * num, den)
                t = p.peek()
                if t.kind == "SYM" and t.text == "*":
                    p.next()
            ident_tok = p.expect_ident()
            if ident_tok.text not in declared:
                raise UnknownIdentifier(ident_tok.line, ident_tok.col, ident_tok.text)
            t = p.peek()
            if t.kind == "SYM" and t.text == "/":
                nxt = _peek_after(p)
                if nxt is not None and nxt.kind == "INT":
                    p.next()
                    coef /= p.expect_int()
            coeffs[order[ident_tok.text]] += coef
            t = p.peek()
            if t.kind == "SYM" and t.text in "+-":
                sign = -1 if t.text == "-" else 1
                p.next()
                continue
            break
        return coeffs

    t = p.peek()
    if t.kind == "SYM" and t.text == "(":
        p.next()
        coeffs = parse_comb()
        p.expect_sym(")")
        p.expect_sym("/")
        m = p.expect_int()
        coeffs = [c / m for c in coeffs]
    else:
        coeffs = parse_comb()
    t = p.peek()
    if t.kind != "EOF":
        p.fail("end of input")
    return tuple(coeffs)


def _peek_after(p: _Parser):
    if p.pos + 1 < len(p.toks):
        return p.toks[p.pos + 1]
    return None
