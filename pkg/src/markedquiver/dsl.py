"""A small line-oriented language for marked quivers.

Example::

    # two arrows out of d
    quiver  { vertices: d, c, b ; arrows: beta: d -> c, gamma: d -> b }
    marking { d: k ; c: k_2 ; b: k^2 + k }
    field   { p: 3 }
    plane W {
      dims: d = 4, c = 1 1, b = 2 2 ;
      base gamma = 1 0 0 0 0 0 / 0 0 1 0 1 0 / 0 1 0 0 1 0 / 0 0 0 1 0 1 ;
      lam gamma = 0 0 0 0 0 1 / 0 0 0 0 0 0 / 0 0 0 0 0 0 / 0 0 0 0 0 0
    }

Vectroid forms: ``k``, ``k_N``, ``k^N``, ``kP{ a, b ; rel: a < b }``,
``half{ a, b, a* ; rel: a < b < a* ; same: {a, a*} }``, sums with ``+``,
``op(FORM)`` and parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, SpecNotHalflinear, ValidationError
from .exactlin import GF
from .quiver import MarkedQuiver, Quiver
from .vectroid import HalflinearSpec, Poset, build_from_recipe

_TOKEN = re.compile(r"\s+|#[^\n]*|(->|[{}();:,+<^=/])|([A-Za-z0-9_*'.~]+)")
_LINEAR = re.compile(r"k_(\d+)$")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", line, pos - start + 1, text[pos])
        tok = m.group(1) or m.group(2)
        if tok:
            out.append(Token(tok, line, pos - start + 1))
        chunk = m.group(0)
        nl = chunk.count("\n")
        if nl:
            line += nl
            start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return out


@dataclass
class PlaneBlock:
    dims: dict  # vertex -> tuple of multiplicities
    base: dict = field(default_factory=dict)  # arrow id -> tuple of rows
    lam: dict = field(default_factory=dict)
    mu: dict = field(default_factory=dict)


@dataclass
class SpecDocument:
    vertices: tuple
    arrows: tuple  # (id, source, target)
    marking: dict  # vertex -> vectroid recipe
    p: int | None = None
    planes: dict = field(default_factory=dict)

    @property
    def field(self) -> GF:
        return GF(self.p or 2)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else Token("", 1, 0)
            raise ParseError(f"{msg}, found end of input", last.line, last.col + len(last.text), None)
        raise ParseError(msg, tok.line, tok.col, tok.text)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            self.error(f"expected {text!r}")
        return self.next()

    def at(self, text) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def name(self) -> Token:
        tok = self.peek()
        if tok is None or not re.match(r"[A-Za-z0-9_*'.~]+$", tok.text):
            self.error("expected a name")
        return self.next()

    def integer(self) -> int:
        tok = self.name()
        if not tok.text.isdigit():
            self.error("expected an integer", tok)
        return int(tok.text)

    # document
    def document(self) -> SpecDocument:
        quiver = marking = None
        p = None
        planes = {}
        while self.peek() is not None:
            head = self.name()
            if head.text == "quiver":
                if quiver is not None:
                    self.error("duplicate quiver block", head)
                quiver = self.quiver()
            elif head.text == "marking":
                if marking is not None:
                    self.error("duplicate marking block", head)
                marking = self.marking()
            elif head.text == "field":
                if p is not None:
                    self.error("duplicate field block", head)
                p = self.field_block()
            elif head.text == "plane":
                nm = self.name()
                if nm.text in planes:
                    self.error("duplicate plane name", nm)
                planes[nm.text] = self.plane()
            else:
                self.error("unknown block", head)
        if quiver is None:
            raise ParseError("missing quiver block", 1, 1, None)
        if marking is None:
            raise ParseError("missing marking block", 1, 1, None)
        vertices, arrows = quiver
        for v in vertices:
            if v not in marking:
                raise ParseError(f"vertex {v} has no marking", 1, 1, v)
        for v, (tok, _) in marking.items():
            if v not in vertices:
                raise ParseError("marking for an undeclared vertex", tok.line, tok.col, v)
        ordered = {v: marking[v][1] for v in vertices}
        return SpecDocument(tuple(vertices), tuple(arrows), ordered, p, planes)

    def quiver(self):
        self.expect("{")
        self.expect("vertices")
        self.expect(":")
        vertices = []
        while not self.at(";"):
            tok = self.name()
            if tok.text in vertices:
                self.error("duplicate vertex label", tok)
            vertices.append(tok.text)
            if not self.at(";"):
                self.expect(",")
        self.expect(";")
        self.expect("arrows")
        self.expect(":")
        arrows, ids = [], set()
        while not self.at("}") and not self.at(";"):
            aid = self.name()
            if aid.text in ids:
                self.error("duplicate arrow id", aid)
            ids.add(aid.text)
            self.expect(":")
            s = self.name()
            self.expect("->")
            t = self.name()
            for end in (s, t):
                if end.text not in vertices:
                    self.error("arrow endpoint is not a declared vertex", end)
            arrows.append((aid.text, s.text, t.text))
            if not self.at("}") and not self.at(";"):
                self.expect(",")
        if self.at(";"):
            self.next()
        self.expect("}")
        return vertices, arrows

    def marking(self):
        self.expect("{")
        out = {}
        while not self.at("}"):
            v = self.name()
            if v.text in out:
                self.error("vertex marked twice", v)
            self.expect(":")
            out[v.text] = (v, self.form())
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        return out

    def field_block(self) -> int:
        self.expect("{")
        self.expect("p")
        self.expect(":")
        tok = self.peek()
        p = self.integer()
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            self.error("p must be a prime", tok)
        if self.at(";"):
            self.next()
        self.expect("}")
        return p

    def plane(self) -> PlaneBlock:
        self.expect("{")
        self.expect("dims")
        self.expect(":")
        dims = {}
        while True:
            v = self.name()
            self.expect("=")
            vals = []
            while self.peek() is not None and self.peek().text.isdigit():
                vals.append(self.integer())
            if not vals:
                self.error("expected multiplicities")
            dims[v.text] = tuple(vals)
            if not self.at(","):
                break
            self.next()
        block = PlaneBlock(dims)
        while self.at(";"):
            self.next()
            if self.at("}"):
                break
            kind = self.name()
            if kind.text not in ("base", "lam", "mu"):
                self.error("expected base, lam or mu", kind)
            aid = self.name().text
            self.expect("=")
            rows, row = [], []
            while self.peek() is not None and (self.peek().text.isdigit() or self.at("/")):
                if self.at("/"):
                    self.next()
                    rows.append(tuple(row))
                    row = []
                else:
                    row.append(self.integer())
            rows.append(tuple(row))
            if len({len(r) for r in rows}) != 1:
                self.error("matrix rows have different lengths", kind)
            getattr(block, kind.text)[aid] = tuple(rows)
        self.expect("}")
        return block

    # vectroid forms
    def form(self):
        left = self.term()
        while self.at("+"):
            self.next()
            left = ("union", left, self.term())
        return left

    def term(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a vectroid form")
        if tok.text == "(":
            self.next()
            f = self.form()
            self.expect(")")
            return f
        if tok.text == "op":
            self.next()
            self.expect("(")
            f = self.form()
            self.expect(")")
            return ("op", f)
        if tok.text == "kP":
            self.next()
            return ("poset", self.poset_body(half=False)[0])
        if tok.text == "half":
            self.next()
            poset, same = self.poset_body(half=True)
            return ("half", HalflinearSpec(poset, same))
        if tok.text == "k":
            self.next()
            if self.at("^"):
                self.next()
                n = self.integer()
                if n < 1:
                    self.error("exponent must be positive", tok)
                return ("linear", 1) if n == 1 else ("nilpotent", n)
            return ("linear", 1)
        m = _LINEAR.match(tok.text)
        if m:
            self.next()
            n = int(m.group(1))
            if n < 1:
                self.error("k_N needs N >= 1", tok)
            return ("linear", n)
        self.error("unknown vectroid form", tok)

    def poset_body(self, half: bool):
        open_tok = self.expect("{")
        elems = []
        while not self.at(";") and not self.at("}"):
            e = self.name()
            if e.text in elems:
                self.error("duplicate element", e)
            elems.append(e.text)
            if not self.at(";") and not self.at("}"):
                self.expect(",")
        rels, same = [], []
        while self.at(";"):
            self.next()
            key = self.name()
            self.expect(":")
            if key.text == "rel":
                while True:
                    chain = [self.name()]
                    while self.at("<"):
                        self.next()
                        chain.append(self.name())
                    for a in chain:
                        if a.text not in elems:
                            self.error("relation mentions an unknown element", a)
                    rels.extend((a.text, b.text) for a, b in zip(chain, chain[1:]))
                    if not self.at(","):
                        break
                    self.next()
            elif key.text == "same" and half:
                while True:
                    self.expect("{")
                    grp = [self.name()]
                    while self.at(","):
                        self.next()
                        grp.append(self.name())
                    self.expect("}")
                    for a in grp:
                        if a.text not in elems:
                            self.error("unknown element in same-object group", a)
                    same.append(tuple(a.text for a in grp))
                    if not self.at(","):
                        break
                    self.next()
            else:
                self.error("unknown key", key)
        self.expect("}")
        try:
            poset = Poset.from_relations(elems, rels)
        except ValueError as exc:
            raise ParseError(str(exc), open_tok.line, open_tok.col, "{") from exc
        return poset, tuple(same)


def parse_spec(text: str) -> SpecDocument:
    return _Parser(text).document()


def load_spec(path) -> SpecDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# ---------------------------------------------------------------- building


def build_marked_quiver(doc: SpecDocument) -> MarkedQuiver:
    F = doc.field
    marking = {}
    for v, recipe in doc.marking.items():
        try:
            marking[v] = build_from_recipe(recipe, F)
        except (SpecNotHalflinear, ValueError) as exc:
            raise ValidationError(f"marking of {v}: {exc}") from exc
    return MarkedQuiver(Quiver(doc.vertices, doc.arrows), marking, F)


def plane_spec(doc: SpecDocument, name: str, mq: MarkedQuiver):
    from .classify import PlaneSpec
    from .rep import DimAssignment
    if name not in doc.planes:
        raise ValidationError(f"no plane named {name!r}")
    blk = doc.planes[name]
    dims = DimAssignment.of(mq, blk.dims)
    as_lists = lambda d: {k: [list(r) for r in v] for k, v in d.items()}
    return PlaneSpec(dims, as_lists(blk.base), as_lists(blk.lam), as_lists(blk.mu))


# ---------------------------------------------------------------- serialization


def _covers(P: Poset):
    strict = {(a, b) for a, b in P.leq if a != b}
    return [(a, b) for a, b in sorted(strict, key=lambda r: (P.elements.index(r[0]), P.elements.index(r[1])))
            if not any((a, c) in strict and (c, b) in strict for c in P.elements)]


def _poset_text(P: Poset) -> str:
    body = ", ".join(P.elements)
    cov = _covers(P)
    if cov:
        body += " ; rel: " + ", ".join(f"{a} < {b}" for a, b in cov)
    return body


def format_vectroid(recipe) -> str:
    kind = recipe[0]
    if kind == "linear":
        return "k" if recipe[1] == 1 else f"k_{recipe[1]}"
    if kind == "nilpotent":
        return "k" if recipe[1] == 1 else f"k^{recipe[1]}"
    if kind == "poset":
        return "kP{ " + _poset_text(recipe[1]) + " }"
    if kind == "half":
        spec = recipe[1]
        body = _poset_text(spec.poset)
        if spec.same:
            body += " ; same: " + ", ".join("{" + ", ".join(g) + "}" for g in spec.same)
        return "half{ " + body + " }"
    if kind == "union":
        right = format_vectroid(recipe[2])
        if recipe[2][0] == "union":
            right = f"({right})"
        return f"{format_vectroid(recipe[1])} + {right}"
    if kind == "op":
        return f"op({format_vectroid(recipe[1])})"
    raise ValueError(f"unknown recipe {kind!r}")


def _matrix_text(rows) -> str:
    return " / ".join(" ".join(str(int(v)) for v in r) for r in rows)


def serialize_spec(doc: SpecDocument) -> str:
    arrows = ", ".join(f"{a}: {s} -> {t}" for a, s, t in doc.arrows)
    lines = [f"quiver {{ vertices: {', '.join(doc.vertices)} ; arrows: {arrows} }}"]
    lines.append("marking { " + " ; ".join(f"{v}: {format_vectroid(r)}" for v, r in doc.marking.items()) + " }")
    if doc.p is not None:
        lines.append(f"field {{ p: {doc.p} }}")
    for name, blk in doc.planes.items():
        lines.append(f"plane {name} {{")
        dims = ", ".join(f"{v} = {' '.join(map(str, m))}" for v, m in blk.dims.items())
        stmts = [f"  dims: {dims}"]
        for kind in ("base", "lam", "mu"):
            for aid, rows in getattr(blk, kind).items():
                stmts.append(f"  {kind} {aid} = {_matrix_text(rows)}")
        lines.append(" ;\n".join(stmts))
        lines.append("}")
    return "\n".join(lines) + "\n"


def document_from_marked_quiver(mq: MarkedQuiver, p: int | None = None) -> SpecDocument:
    marking = {}
    for v, vec in mq.marking.items():
        if vec.recipe is None:
            raise ValidationError(f"marking of {v} has no constructor form")
        marking[v] = vec.recipe
    arrows = tuple((a.id, a.source, a.target) for a in mq.arrows)
    return SpecDocument(tuple(mq.vertices), arrows, marking, p)
