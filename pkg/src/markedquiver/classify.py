"""Representation type of marked quivers: wild patterns, the diagram criterion,
and empirical corroboration by counting indecomposables over several fields."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import SearchSpaceTooLarge, TooLarge
from .exactlin import GF
from .quiver import (Arrow, DiagramClass, MarkedQuiver, Quiver, augmented_graph, classify_diagram,
                     underlying_graph)
from .rep import (DimAssignment, Representation, are_isomorphic, dim_assignments, indecomposability,
                  indecomposables_at)
from .vectroid import Vectroid, disjoint_union, make_linear, opposite, vectroids_isomorphic

FINITE, TAME, WILD, REDUCED, UNKNOWN = "Finite", "Tame", "Wild", "ReducedToVectroid", "Unknown"


@dataclass(frozen=True)
class Lemma6Pattern:
    case: int
    vertices: tuple
    merged: tuple = ()  # arrows contracted (vertex merging) before the pattern appeared

    def __str__(self):
        via = f" after merging along {', '.join(self.merged)}" if self.merged else ""
        return f"wild pattern {self.case} at {', '.join(self.vertices)}{via}"


@dataclass
class VectroidProblem:
    vectroid: Vectroid
    linear_part: int  # s in V + k_s
    source_vertex: str
    opposite: bool

    def __str__(self):
        base = f"V_{self.source_vertex}" + ("°" if self.opposite else "")
        return f"{base} + k_{self.linear_part}" if self.linear_part else base


@dataclass
class Verdict:
    kind: str
    witness: object = None
    note: str = ""

    def __str__(self):
        if self.witness is None:
            return self.kind
        return f"{self.kind} ({self.witness})"


# ---------------------------------------------------------------- wild patterns


def _graph_data(mq: MarkedQuiver):
    nbrs = {v: [] for v in mq.vertices}
    for a in mq.arrows:
        if a.source != a.target:
            nbrs[a.source].append(a.target)
            nbrs[a.target].append(a.source)
    return {v: sorted(set(n)) for v, n in nbrs.items()}


def _cycle_vertex_sets(mq: MarkedQuiver):
    """Vertex sets of the cycles of ``G(Q)``: loops, parallel pairs and simple cycles."""
    out = []
    for a in mq.arrows:
        if a.source == a.target:
            out.append((a.source,))
    pairs = {}
    for a in mq.arrows:
        if a.source != a.target:
            key = tuple(sorted((a.source, a.target)))
            pairs[key] = pairs.get(key, 0) + 1
    out.extend(k for k, c in pairs.items() if c > 1)
    nbrs = _graph_data(mq)
    verts = list(mq.vertices)
    seen = set()
    for start in verts:
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            for w in nbrs[v]:
                if w == start and len(path) >= 3:
                    key = frozenset(path)
                    if key not in seen:
                        seen.add(key)
                        out.append(tuple(path))
                elif w not in path and verts.index(w) > verts.index(start):
                    stack.append((w, path + [w]))
    return out


def _scan(mq: MarkedQuiver, kinds: dict):
    nbrs = _graph_data(mq)
    for x in mq.vertices:
        kx = kinds[x]
        if kx in ("halflinear", "other"):
            # case 1: a path u - x - y with V_y != k
            for y in nbrs[x]:
                if kinds[y] != "unmarked" and any(u != y for u in nbrs[x]):
                    u = next(u for u in nbrs[x] if u != y)
                    return Lemma6Pattern(1, (u, x, y))
        if kx == "other":
            if len(nbrs[x]) >= 2:
                return Lemma6Pattern(2, (nbrs[x][0], x, nbrs[x][1]))
            for y in nbrs[x]:
                if kinds[y] in ("halflinear", "other"):
                    return Lemma6Pattern(3, (x, y))
    for cyc in _cycle_vertex_sets(mq):
        for a in cyc:
            if kinds[a] != "unmarked":
                return Lemma6Pattern(4, tuple(cyc))
    return None


def _same_marking(v1: Vectroid, v2: Vectroid, k1: str, k2: str) -> bool:
    if v1 is v2:
        return True
    if v1.recipe is not None and v1.recipe == v2.recipe:
        return True
    if k1 != k2 or k1 == "other":
        return False
    try:
        return vectroids_isomorphic(v1, v2, check=False)
    except TooLarge:
        return False


def merge_vertices(mq: MarkedQuiver, arrow_id) -> MarkedQuiver:
    """Drop an arrow ``x -> y`` with ``V_x = V_y`` and identify its ends."""
    a = mq.quiver.arrow(arrow_id)
    x, y = a.source, a.target
    ren = {v: (x if v == y else v) for v in mq.vertices}
    verts = [v for v in mq.vertices if v != y]
    arrows = [Arrow(b.id, ren[b.source], ren[b.target]) for b in mq.arrows if b.id != arrow_id]
    return MarkedQuiver(Quiver(verts, arrows), {v: mq.marking[v] for v in verts}, mq.field, strict=False)


def detect_wild_pattern(mq: MarkedQuiver, max_merges: int = 3):
    """First wild pattern found in ``mq`` or in quivers obtained by merging equal-marked ends."""
    kinds = dict(mq.kinds)
    found = _scan(mq, kinds)
    if found:
        return found
    frontier = [(mq, ())]
    seen = set()
    for _ in range(max_merges):
        nxt = []
        for q, path in frontier:
            for a in q.arrows:
                if a.source == a.target:
                    continue
                if not _same_marking(q.marking[a.source], q.marking[a.target],
                                     kinds[a.source], kinds[a.target]):
                    continue
                m = merge_vertices(q, a.id)
                key = (tuple(m.vertices), tuple(sorted((b.source, b.target) for b in m.arrows)))
                if key in seen:
                    continue
                seen.add(key)
                hit = _scan(m, {v: kinds[v] for v in m.vertices})
                if hit:
                    return Lemma6Pattern(hit.case, hit.vertices, path + (a.id,))
                nxt.append((m, path + (a.id,)))
        frontier = nxt
    return None


# ---------------------------------------------------------------- the criterion


def _path_order(mq: MarkedQuiver, start):
    """Vertices of ``G(Q)`` in path order from ``start``, or ``None`` if not a simple path."""
    g = underlying_graph(mq.quiver)
    if any(a == b for a, b in g.edges):
        return None
    if len({frozenset(e) for e in g.edges}) != len(g.edges) or len(g.edges) != len(g.vertices) - 1:
        return None
    nbrs = _graph_data(mq)
    if len(nbrs[start]) != 1 or any(len(n) > 2 for n in nbrs.values()):
        return None
    order, prev = [start], None
    while True:
        nxt = [w for w in nbrs[order[-1]] if w != prev]
        if not nxt:
            break
        prev = order[-1]
        order.append(nxt[0])
    return order if len(order) == len(mq.vertices) else None


def _linear_length(v: Vectroid, kind: str):
    if kind == "unmarked":
        return 1
    if kind == "linear":
        return len(v)
    return None


def classify(mq: MarkedQuiver) -> Verdict:
    """Representation type from the markings and the augmented graph.

    ``Unknown`` is only returned when analysing a vectroid exceeds the
    enumeration limits.
    """
    try:
        return _classify(mq)
    except TooLarge as exc:
        return Verdict(UNKNOWN, None, str(exc))


def _classify(mq: MarkedQuiver) -> Verdict:
    kinds = mq.kinds
    others = [v for v in mq.vertices if kinds[v] == "other"]
    pattern = detect_wild_pattern(mq)
    if len(others) >= 2:
        return Verdict(WILD, pattern, "" if pattern else "two vertices neither linear nor halflinear")
    if len(others) == 1:
        a = others[0]
        order = _path_order(mq, a)
        if order is not None:
            interior_ok = all(kinds[v] == "unmarked" for v in order[1:-1])
            m = _linear_length(mq.marking[order[-1]], kinds[order[-1]])
            if interior_ok and m is not None:
                arrow = next(b for b in mq.arrows if a in (b.source, b.target))
                is_op = arrow.source == a
                va = opposite(mq.marking[a]) if is_op else mq.marking[a]
                s = m + len(order) - 3
                v = disjoint_union(va, make_linear(s, mq.field)) if s > 0 else va
                return Verdict(REDUCED, VectroidProblem(v, s, a, is_op))
        return Verdict(WILD, pattern, "" if pattern else "non-halflinear vertex outside the admissible shape")
    diagram = classify_diagram(augmented_graph(mq))
    if diagram.is_dynkin:
        return Verdict(FINITE, diagram)
    if diagram.is_extended_dynkin:
        return Verdict(TAME, diagram)
    return Verdict(WILD, pattern or diagram)


# ---------------------------------------------------------------- empirical evidence


@dataclass
class EvidenceRecord:
    fields: tuple
    dim_bound: int
    counts: dict  # DimAssignment -> {p: count}
    finite: bool
    tame: bool
    wild: bool
    top_level_empty: bool
    pattern: Lemma6Pattern | None = None
    notes: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def totals(self) -> dict:
        return {p: sum(c[p] for c in self.counts.values()) for p in self.fields}

    def growing(self) -> list:
        return [d for d, c in self.counts.items() if _increasing(c, self.fields)]

    @property
    def flags(self) -> list:
        return [n for n, on in (("FiniteEvidence", self.finite), ("TameEvidence", self.tame),
                                ("WildEvidence", self.wild)) if on]


def _increasing(c, fields):
    return any(c[q] > c[p] for p, q in zip(fields, fields[1:]))


def _wild_growth(dims: DimAssignment, c: dict, fields) -> bool:
    """Count growth that outpaces any one-parameter family at a primitive dimension vector."""
    flat = [v for m in dims.mult for v in m if v]
    if not flat or len(fields) < 2:
        return False
    g = 0
    for v in flat:
        g = gcd(g, v)
    if g != 1:
        return False
    p, q = fields[0], fields[-1]
    lo, hi = c[p], c[q]
    return lo > 0 and hi - lo >= q * q - p * p and hi * p * p >= 0.8 * lo * q * q


def empirical_type_report(mq: MarkedQuiver, dim_bound: int, fields=(2, 3),
                          limit: int = 10**7) -> EvidenceRecord:
    fields = tuple(sorted(fields))
    per_field = {p: mq.over(GF(p)) for p in fields}
    dims_list = dim_assignments(per_field[fields[0]], dim_bound)
    counts, skipped = {}, []
    for d in dims_list:
        try:
            counts[d] = {p: len(indecomposables_at(per_field[p], d, limit)) for p in fields}
        except SearchSpaceTooLarge:
            skipped.append(d)
    base = per_field[fields[0]]
    top = [d for d in dims_list if d.size(base) >= dim_bound - 1]
    top_empty = all(d in counts and counts[d][p] == 0 for d in top for p in fields)
    p_independent = not skipped and all(len(set(c.values())) == 1 for c in counts.values())
    tame = any(_increasing(c, fields) for c in counts.values())
    wild = any(_wild_growth(d, c, fields) for d, c in counts.items())
    rec = EvidenceRecord(fields, dim_bound, counts, p_independent, tame and not wild, wild, top_empty,
                         detect_wild_pattern(mq))
    if p_independent and not top_empty:
        rec.notes.append("counts are field-independent but the top levels are not empty")
    rec.skipped = skipped
    if skipped:
        rec.notes.append(f"{len(skipped)} dimension vectors skipped (search space over {limit})")
    return rec


def null_root(g) -> dict:
    """The minimal positive radical vector of an extended Dynkin graph."""
    idx = {v: i for i, v in enumerate(g.vertices)}
    n = len(idx)
    c = 2 * np.eye(n)
    for a, b in g.edges:
        if a == b:
            c[idx[a], idx[a]] -= 2
        else:
            c[idx[a], idx[b]] -= 1
            c[idx[b], idx[a]] -= 1
    _, sv, vt = np.linalg.svd(c)
    if sv[-1] > 1e-8 or (n > 1 and sv[-2] < 1e-8):
        raise ValueError("graph has no one-dimensional radical")
    vec = vt[-1] / vt[-1][np.argmin(np.abs(vt[-1]) + (np.abs(vt[-1]) < 1e-9) * 1e9)]
    for scale in range(1, 13):
        cand = vec * scale
        if np.allclose(cand, np.round(cand), atol=1e-6):
            out = np.round(cand).astype(int)
            if (out < 0).all():
                out = -out
            return {v: int(out[idx[v]]) for v in g.vertices}
    raise ValueError("null root is not integral")


def _chain(g, x):
    out, prev, cur = [x], None, x
    while True:
        nxt = [w for w in g.neighbours(cur) if w != prev and str(w).startswith(f"{x}.a")]
        if not nxt:
            return out
        prev, cur = cur, nxt[0]
        out.append(cur)


def _null_root_dims(mq: MarkedQuiver):
    """Dimension assignments of ``mq`` realising the null root of its augmented graph."""
    g = augmented_graph(mq)
    try:
        delta = null_root(g)
    except ValueError:
        return []
    options = []
    for x in mq.vertices:
        v, kind = mq.marking[x], mq.kinds[x]
        if kind == "linear":
            ch = [delta[c] for c in _chain(g, x)] + [0]
            diff = tuple(a - b for a, b in zip(ch, ch[1:]))
            if any(d < 0 for d in diff):
                return []
            options.append(sorted({diff, diff[::-1]}))
        else:
            target = delta[x]
            ranges = [range(target // d + 1) for d in v.dims]
            options.append([m for m in itertools.product(*ranges)
                            if sum(c * d for c, d in zip(m, v.dims)) == target])
    return [DimAssignment(tuple(c)) for c in itertools.product(*options)]


def null_root_probe(mq: MarkedQuiver, fields=(2, 3), limit: int = 10**7):
    """Look for field-dependent counts at the null root of a tame augmented graph.

    Returns ``(dims, counts)`` for the first dimension assignment whose count
    grows with the field, or ``None``.  Assignments whose search space exceeds
    ``limit`` are skipped.
    """
    fields = tuple(sorted(fields))
    per_field = {p: mq.over(GF(p)) for p in fields}
    for d in _null_root_dims(mq):
        try:
            c = {p: len(indecomposables_at(per_field[p], d, limit)) for p in fields}
        except SearchSpaceTooLarge:
            continue
        if _increasing(c, fields):
            return d, c
    return None


# ---------------------------------------------------------------- wild planes


@dataclass
class PlaneSpec:
    dims: DimAssignment
    base: dict  # arrow id -> matrix
    lam: dict  # arrow id -> matrix (coefficient of lambda)
    mu: dict  # arrow id -> matrix (coefficient of mu)

    def point(self, mq: MarkedQuiver, lam: int, mu: int) -> Representation:
        maps = {}
        for a in mq.arrows:
            m = np.array(self.base.get(a.id, 0), dtype=np.int64)
            if a.id in self.lam:
                m = m + lam * np.array(self.lam[a.id], dtype=np.int64)
            if a.id in self.mu:
                m = m + mu * np.array(self.mu[a.id], dtype=np.int64)
            maps[a.id] = m % mq.p
        return Representation(mq, self.dims, maps)


@dataclass
class PlaneReport:
    p: int
    points: int
    indecomposable: int
    pairs: int
    non_isomorphic: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_wild_plane(mq: MarkedQuiver, plane: PlaneSpec, field: GF | None = None) -> PlaneReport:
    if field is not None and field != mq.field:
        mq = mq.over(field)
    p = mq.p
    pts = [((lam, mu), plane.point(mq, lam, mu)) for lam in range(p) for mu in range(p)]
    failures = []
    ind = 0
    for (lam, mu), u in pts:
        res = indecomposability(u)
        if res.indecomposable:
            ind += 1
        else:
            failures.append(f"W({lam},{mu}) is decomposable")
    noniso = 0
    pairs = list(itertools.combinations(pts, 2))
    for (c1, u), (c2, w) in pairs:
        if are_isomorphic(u, w):
            failures.append(f"W{c1} is isomorphic to W{c2}")
        else:
            noniso += 1
    return PlaneReport(p, len(pts), ind, len(pairs), noniso, failures)


# ---------------------------------------------------------------- witness search


@dataclass
class WildWitness:
    pattern: Lemma6Pattern
    steps: tuple  # moves applied before the pattern appeared

    def __str__(self):
        if not self.steps:
            return str(self.pattern)
        return f"{self.pattern} after " + " ; ".join(self.steps)


def _expand_linear(mq: MarkedQuiver, x) -> MarkedQuiver:
    """Replace ``k_m`` at ``x`` by ``k`` plus a new leaf marked ``k_{m-1}``.

    Reducing the new leaf gives back ``mq``, so ``mq`` is not tame when the
    expansion is wild.
    """
    m = len(mq.marking[x])
    leaf = f"{x}+"
    while leaf in mq.vertices:
        leaf += "+"
    aid = f"{x}>{leaf}"
    q = Quiver(list(mq.vertices) + [leaf], list(mq.arrows) + [Arrow(aid, x, leaf)])
    marking = dict(mq.marking)
    marking[x] = make_linear(1, mq.field)
    marking[leaf] = make_linear(m - 1, mq.field)
    return MarkedQuiver(q, marking, mq.field, strict=False)


def _moves(mq: MarkedQuiver):
    from .errors import NotPendant, NotReducible
    from .reduce import lemma7_fast_path
    kinds = mq.kinds
    for a in mq.arrows:
        if a.source != a.target and _same_marking(mq.marking[a.source], mq.marking[a.target],
                                                  kinds[a.source], kinds[a.target]):
            yield f"merge along {a.id}", merge_vertices(mq, a.id)
    if len(mq.arrows) > 1:
        for a in mq.arrows:
            try:
                res = lemma7_fast_path(mq, a.id)
            except (NotPendant, NotReducible):
                continue
            yield f"reduce {a.id} (case {res.direction['case']})", res.reduced
    for x in mq.vertices:
        if kinds[x] == "linear" and len(mq.marking[x]) > 1:
            yield f"expand {x}", _expand_linear(mq, x)


def find_wild_witness(mq: MarkedQuiver, depth: int = 3):
    """Search merges, reducible-arrow reductions and linear expansions for a wild pattern.

    Each move preserves wildness in the needed direction: merging exhibits a
    full subcategory, reductions reflect wildness back, and an expansion whose
    reduction is ``mq`` cannot be wild while ``mq`` is tame.
    """
    hit = _scan(mq, dict(mq.kinds))
    if hit:
        return WildWitness(hit, ())
    frontier = [(mq, ())]
    for _ in range(depth):
        nxt = []
        for q, steps in frontier:
            for label, m in _moves(q):
                hit = _scan(m, dict(m.kinds))
                if hit:
                    return WildWitness(hit, steps + (label,))
                if len(m.vertices) <= 6:
                    nxt.append((m, steps + (label,)))
        frontier = nxt
    return None
