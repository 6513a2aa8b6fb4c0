"""Quivers, markings, underlying graphs and Dynkin recognition."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .errors import NotHalflinearMarking, ValidationError
from .exactlin import GF
from .vectroid import Vectroid, kind_of


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


class Quiver:
    def __init__(self, vertices, arrows):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex label")
        self.arrows = tuple(a if isinstance(a, Arrow) else Arrow(*map(str, a)) for a in arrows)
        ids = [a.id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate arrow id")
        known = set(self.vertices)
        for a in self.arrows:
            if a.source not in known or a.target not in known:
                raise ValidationError(f"arrow {a.id} has an undeclared endpoint")

    def arrow(self, aid) -> Arrow:
        for a in self.arrows:
            if a.id == aid:
                return a
        raise KeyError(aid)

    def __repr__(self):
        arr = ", ".join(f"{a.id}: {a.source}->{a.target}" for a in self.arrows)
        return f"Quiver({list(self.vertices)}; {arr})"


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: tuple  # (u, v) pairs; repeated pairs are parallel edges, (u, u) a loop

    def neighbours(self, v):
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            if b == v and a != v:
                out.append(a)
        return out

    def degree(self, v) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)


def underlying_graph(q: Quiver) -> Graph:
    return Graph(q.vertices, tuple((a.source, a.target) for a in q.arrows))


def degree(q: Quiver, z) -> int:
    if z not in q.vertices:
        raise KeyError(f"unknown vertex {z!r}")
    return underlying_graph(q).degree(z)


def is_connected(g: Graph) -> bool:
    if not g.vertices:
        return False
    seen = {g.vertices[0]}
    stack = [g.vertices[0]]
    while stack:
        v = stack.pop()
        for w in g.neighbours(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.vertices)


# ---------------------------------------------------------------- marked quivers


class MarkedQuiver:
    """A quiver with a vectroid at every vertex, all over one prime field."""

    def __init__(self, quiver: Quiver, marking: dict, field: GF | None = None, strict: bool = True):
        self.quiver = quiver
        missing = [v for v in quiver.vertices if v not in marking]
        if missing:
            raise ValidationError(f"unmarked vertices {missing}")
        self.marking = {v: marking[v] for v in quiver.vertices}
        fields = {m.field for m in self.marking.values()}
        if field is None:
            if len(fields) != 1:
                raise ValidationError("vectroids over different fields")
            field = fields.pop()
        elif fields - {field}:
            raise ValidationError("vectroids over different fields")
        self.field = field
        if strict:
            if not quiver.arrows:
                raise ValidationError("a marked quiver needs at least one arrow")
            if not is_connected(underlying_graph(quiver)):
                raise ValidationError("quiver is not connected")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def vertices(self):
        return self.quiver.vertices

    @property
    def arrows(self):
        return self.quiver.arrows

    def over(self, field: GF) -> "MarkedQuiver":
        return MarkedQuiver(self.quiver, {v: m.over(field) for v, m in self.marking.items()}, field,
                            strict=False)

    @cached_property
    def kinds(self) -> dict:
        return {v: kind_of(m) for v, m in self.marking.items()}

    def relabel(self, vmap: dict, amap: dict | None = None) -> "MarkedQuiver":
        amap = amap or {}
        q = Quiver([vmap[v] for v in self.vertices],
                   [Arrow(amap.get(a.id, a.id), vmap[a.source], vmap[a.target]) for a in self.arrows])
        return MarkedQuiver(q, {vmap[v]: m for v, m in self.marking.items()}, self.field, strict=False)

    def __repr__(self):
        marks = ", ".join(f"{v}={m.labels}" for v, m in self.marking.items())
        return f"MarkedQuiver({self.quiver!r}; {marks}; p={self.p})"


def augmented_graph(mq: MarkedQuiver) -> Graph:
    """``G(Q)`` plus a pendant chain of ``n - 1`` vertices at each ``k_n`` vertex
    and two pendant leaves at each halflinear vertex."""
    g = underlying_graph(mq.quiver)
    vertices = list(g.vertices)
    edges = list(g.edges)
    for x in mq.vertices:
        kind = mq.kinds[x]
        if kind == "linear":
            prev = x
            for i in range(2, len(mq.marking[x]) + 1):
                new = f"{x}.a{i}"
                vertices.append(new)
                edges.append((prev, new))
                prev = new
        elif kind == "halflinear":
            for i in (1, 2):
                new = f"{x}.b{i}"
                vertices.append(new)
                edges.append((x, new))
        elif kind == "other":
            raise NotHalflinearMarking(f"vertex {x} is neither linearly nor halflinearly marked")
    return Graph(tuple(vertices), tuple(edges))


# ---------------------------------------------------------------- Dynkin diagrams


@dataclass(frozen=True)
class DiagramClass:
    kind: str  # 'A', 'D', 'E' or 'NotDynkin'
    n: int | None = None
    extended: bool = False

    @property
    def is_dynkin(self) -> bool:
        return self.kind != "NotDynkin" and not self.extended

    @property
    def is_extended_dynkin(self) -> bool:
        return self.kind != "NotDynkin" and self.extended

    def __str__(self):
        if self.kind == "NotDynkin":
            return "NotDynkin"
        tilde = "̃" if self.extended else ""
        return f"{self.kind}{tilde}_{self.n}"


NOT_DYNKIN = DiagramClass("NotDynkin")


def _legs(g: Graph, centre):
    """Lengths of the paths hanging off ``centre`` in a tree."""
    legs = []
    for start in g.neighbours(centre):
        length, prev, cur = 1, centre, start
        while True:
            nxt = [w for w in g.neighbours(cur) if w != prev]
            if not nxt:
                break
            if len(nxt) > 1:
                return None
            prev, cur = cur, nxt[0]
            length += 1
        legs.append(length)
    return sorted(legs)


def classify_diagram(g: Graph) -> DiagramClass:
    if not is_connected(g):
        raise ValueError("classify_diagram needs a connected graph")
    n = len(g.vertices)
    m = len(g.edges)
    if any(a == b for a, b in g.edges):
        # a single loop is the Jordan normal form problem
        return DiagramClass("A", 0, True) if n == 1 and m == 1 else NOT_DYNKIN
    mult = Counter(frozenset(e) for e in g.edges)
    if any(c > 1 for c in mult.values()):
        if n == 2 and m == 2:
            return DiagramClass("A", 1, True)
        return NOT_DYNKIN
    deg = {v: g.degree(v) for v in g.vertices}
    if m == n:
        if all(d == 2 for d in deg.values()):
            return DiagramClass("A", n - 1, True)
        return NOT_DYNKIN
    if m != n - 1:
        return NOT_DYNKIN
    branch = [v for v in g.vertices if deg[v] >= 3]
    if not branch:
        return DiagramClass("A", n)
    if len(branch) == 1:
        c = branch[0]
        legs = _legs(g, c)
        if deg[c] == 4:
            return DiagramClass("D", 4, True) if legs == [1, 1, 1, 1] else NOT_DYNKIN
        if deg[c] > 4:
            return NOT_DYNKIN
        a, b, t = legs
        if a == 1 and b == 1:
            return DiagramClass("D", n)
        table = {(1, 2, 2): ("E", 6, False), (1, 2, 3): ("E", 7, False), (1, 2, 4): ("E", 8, False),
                 (2, 2, 2): ("E", 6, True), (1, 3, 3): ("E", 7, True), (1, 2, 5): ("E", 8, True)}
        hit = table.get((a, b, t))
        return DiagramClass(*hit) if hit else NOT_DYNKIN
    if len(branch) == 2 and all(deg[v] == 3 for v in branch):
        for v in branch:
            leaves = [w for w in g.neighbours(v) if deg[w] == 1]
            if len(leaves) != 2:
                return NOT_DYNKIN
        return DiagramClass("D", n - 1, True)
    return NOT_DYNKIN


# ---------------------------------------------------------------- canonical forms


def _refine(g: Graph, colours: dict) -> dict:
    adj = {v: Counter() for v in g.vertices}
    for a, b in g.edges:
        adj[a][b] += 1
        if a != b:
            adj[b][a] += 1
    while True:
        sig = {v: (colours[v], tuple(sorted((colours[w], c) for w, c in adj[v].items()))) for v in g.vertices}
        keys = sorted(set(sig.values()))
        new = {v: keys.index(sig[v]) for v in g.vertices}
        if len(set(new.values())) == len(set(colours.values())):
            return new
        colours = new


def canonical_form(g: Graph, colours: dict | None = None):
    """A labelling-independent encoding of a (coloured) multigraph.

    Colour refinement followed by individualisation of the first
    non-singleton cell, minimising the edge encoding over all branches.
    """
    init = colours or {v: 0 for v in g.vertices}
    keys = sorted(set(init.values()), key=repr)
    start = {v: keys.index(init[v]) for v in g.vertices}
    best = None

    def encode(col):
        order = sorted(g.vertices, key=lambda v: col[v])
        pos = {v: i for i, v in enumerate(order)}
        edges = tuple(sorted(tuple(sorted((pos[a], pos[b]))) for a, b in g.edges))
        labels = tuple(repr(init[v]) for v in order)
        return (len(order), labels, edges)

    def search(col):
        nonlocal best
        col = _refine(g, col)
        cells = Counter(col.values())
        multi = sorted(c for c, k in cells.items() if k > 1)
        if not multi:
            enc = encode(col)
            if best is None or enc < best:
                best = enc
            return
        target = multi[0]
        for v in sorted((v for v in g.vertices if col[v] == target), key=str):
            nxt = {w: 2 * c for w, c in col.items()}
            nxt[v] = 2 * target - 1
            search(nxt)

    if not g.vertices:
        return (0, (), ())
    search(start)
    return best


def graphs_isomorphic(g1: Graph, g2: Graph) -> bool:
    return canonical_form(g1) == canonical_form(g2)
