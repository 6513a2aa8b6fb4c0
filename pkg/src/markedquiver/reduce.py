"""Reductions of marked quivers.

Subproblems with finitely many indecomposables are enumerated and collapsed
to a single vertex whose new vectroid is read off from the surviving
indecomposables: objects are their components at the attaching vertex, and
hom spaces are the components of the morphism spaces between them.
Indecomposables vanishing at the attaching vertex become kernel objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import independent_basis
from .errors import (IndPossiblyInfinite, NotPendant, NotPreliminary, NotReducible,
                     PartitionInvalid, ShapeMismatch)
from .exactlin import invert, rank, rref
from .quiver import Arrow, MarkedQuiver, Quiver, degree
from .rep import (DimAssignment, Representation, enumerate_indecomposables, hom_space)
from .vectroid import (HalflinearSpec, Poset, Vectroid, disjoint_union, is_halflinear,
                       make_halflinear, make_linear, make_poset_linearization, opposite,
                       structure_poset)

DEFAULT_CAP = 6


@dataclass
class ReductionResult:
    reduced: MarkedQuiver
    kernel_objects: list  # indecomposables killed by the component functor
    object_table: dict  # (vertex, new object label) -> source indecomposable
    direction: dict  # what was eliminated: arrows, removed vertices, kept vertex per part
    weights: dict = field(default_factory=dict)  # (vertex, object index) -> source total dimension

    def transported_size(self, u: Representation) -> int:
        return u.dims.size(self.reduced, self.weights)


# ---------------------------------------------------------------- kernel quotients


def _certified_ind(sub: MarkedQuiver, cap: int) -> list:
    """Enumerate ``ind`` of a subproblem and require two empty levels at the cap."""
    ind = enumerate_indecomposables(sub, cap)
    top = max((u.total_dim for u in ind), default=0)
    if top > cap - 2:
        raise IndPossiblyInfinite(
            f"indecomposables of total dimension {top} found with cap {cap}; "
            "need two empty levels below the cap")
    return ind


def kernel_quotient(sub: MarkedQuiver, vertex, cap: int = DEFAULT_CAP, prefix: str = "T"):
    """Collapse ``sub`` onto ``vertex``.

    Returns ``(vectroid, kernel, survivors, labels)``.
    """
    ind = _certified_ind(sub, cap)
    kernel = [u for u in ind if u.total(vertex) == 0]
    surv = [u for u in ind if u.total(vertex) > 0]
    labels = [f"{prefix}{i + 1}" for i in range(len(surv))]
    objects = [(lab, u.total(vertex)) for lab, u in zip(labels, surv)]
    hom = {}
    p = sub.p
    for i, u in enumerate(surv):
        for j, w in enumerate(surv):
            comps = hom_space(u, w).stacked(vertex)
            if comps.shape[0]:
                b = independent_basis(comps, p)
                if b.shape[0]:
                    hom[(i, j)] = b
    return Vectroid(sub.field, objects, hom), kernel, surv, labels


def _induced(mq: MarkedQuiver, verts) -> MarkedQuiver:
    verts = [v for v in mq.vertices if v in set(verts)]
    arrows = [a for a in mq.arrows if a.source in verts and a.target in verts]
    return MarkedQuiver(Quiver(verts, arrows), {v: mq.marking[v] for v in verts}, mq.field, strict=False)


def contract_subquivers(mq: MarkedQuiver, partition, cap: int = DEFAULT_CAP) -> ReductionResult:
    """Contract each part of a vertex partition to one vertex.

    Arrows inside a part belong to its subproblem; every other arrow
    survives.  A part with more than one vertex must meet the surviving
    arrows in a single vertex, which keeps its name and receives the
    kernel-quotient vectroid of the part.
    """
    parts = [list(dict.fromkeys(p)) for p in partition]
    flat = [v for p in parts for v in p]
    if sorted(flat) != sorted(mq.vertices) or len(set(flat)) != len(flat):
        raise PartitionInvalid("parts must cover the vertices disjointly")
    part_of = {v: i for i, p in enumerate(parts) for v in p}
    crossing = [a for a in mq.arrows if part_of[a.source] != part_of[a.target]]
    keep_vertex, marking, kernel, table, weights = {}, {}, [], {}, {}
    removed = []
    for i, part in enumerate(parts):
        if len(part) == 1:
            v = part[0]
            keep_vertex[i] = v
            marking[v] = mq.marking[v]
            continue
        sub = _induced(mq, part)
        if not sub.arrows or not _connected(sub):
            raise PartitionInvalid(f"part {part} does not induce a connected subquiver")
        touch = {a.source for a in crossing if part_of[a.source] == i} | \
                {a.target for a in crossing if part_of[a.target] == i}
        if len(touch) > 1:
            raise PartitionInvalid(f"part {part} meets the remaining arrows in {sorted(touch)}")
        v = touch.pop() if touch else part[0]
        keep_vertex[i] = v
        removed.extend(x for x in part if x != v)
        new, kern, surv, labels = kernel_quotient(sub, v, cap)
        marking[v] = new
        kernel.extend(kern)
        for idx, (lab, u) in enumerate(zip(labels, surv)):
            table[(v, lab)] = u
            weights[(v, idx)] = u.total_dim
    verts = [keep_vertex[i] for i in range(len(parts))]
    order = [v for v in mq.vertices if v in set(verts)]
    q = Quiver(order, crossing)
    reduced = MarkedQuiver(q, {v: marking[v] for v in order}, mq.field, strict=False)
    return ReductionResult(reduced, kernel, table,
                           {"arrows": [a.id for a in mq.arrows if a not in crossing],
                            "removed": removed, "kept": verts}, weights)


def _connected(mq):
    from .quiver import is_connected, underlying_graph
    return is_connected(underlying_graph(mq.quiver))


def _pendant(mq: MarkedQuiver, arrow_id):
    a = mq.quiver.arrow(arrow_id)
    ends = [a.source, a.target]
    if a.source == a.target:
        raise NotPendant(f"arrow {arrow_id} is a loop")
    zs = [z for z in ends if degree(mq.quiver, z) == 1]
    if not zs:
        raise NotPendant(f"neither end of {arrow_id} has degree 1")
    # prefer removing the target when both ends are leaves
    z = zs[-1]
    w = a.source if z == a.target else a.target
    return a, w, z


def reduce_pendant_arrow(mq: MarkedQuiver, arrow_id, cap: int = DEFAULT_CAP, remove=None) -> ReductionResult:
    """Eliminate a pendant arrow ``w - z`` (``z`` a leaf) by collapsing ``{w, z}`` onto ``w``."""
    a, w, z = _pendant(mq, arrow_id)
    if remove is not None:
        if remove not in (a.source, a.target) or degree(mq.quiver, remove) != 1:
            raise NotPendant(f"{remove} is not a leaf end of {arrow_id}")
        z = remove
        w = a.source if z == a.target else a.target
    partition = [[w, z]] + [[v] for v in mq.vertices if v not in (w, z)]
    res = contract_subquivers(mq, partition, cap)
    res.direction = {"arrow": arrow_id, "removed": z, "kept": w}
    return res


def lemma3_counts(mq: MarkedQuiver, res: ReductionResult, bound: int) -> tuple:
    """``(|ind Q <= B|, |ind Q' <= B| under transported sizes, |kernel <= B|)``."""
    left = len(enumerate_indecomposables(mq, bound))
    right = len(enumerate_indecomposables(res.reduced, bound, weights=res.weights))
    kern = sum(1 for u in res.kernel_objects if u.total_dim <= bound)
    return left, right, kern


# ---------------------------------------------------------------- fast path


def _vectroid_kind(v: Vectroid):
    from .vectroid import kind_of
    return kind_of(v)


def _linear_size(v: Vectroid):
    """``n`` if ``v`` is (isomorphic to) ``k_n``, else ``None``."""
    if any(d != 1 for d in v.dims):
        return None
    if _vectroid_kind(v) not in ("linear", "unmarked"):
        return None
    sp = structure_poset(v)
    return len(v) if sp.poset.is_chain() else None


def _levels(P: Poset):
    """Split ``P`` into an ordinal sum of levels of size 1 or 2, or return ``None``."""
    rest = list(P.elements)
    levels = []
    while rest:
        mins = [e for e in rest if not any(f != e and P.le(f, e) for f in rest)]
        if len(mins) > 2:
            return None
        others = [e for e in rest if e not in mins]
        if not all(P.le(m, o) for m in mins for o in others):
            return None
        levels.append(mins)
        rest = others
    return levels


def _case2_vectroid(vz: Vectroid, field) -> Vectroid:
    sp = structure_poset(vz)
    levels = _levels(sp.poset)
    if levels is None:
        raise NotReducible("structure poset is not an ordinal sum of 1- and 2-antichains")
    out_levels = []
    same = []
    for lev in levels:
        if len(lev) == 1:
            t = lev[0]
            out_levels.append([f"{t}_1"])
            if t in sp.big:
                out_levels.append([f"{t}~"])
        else:
            c, d = sorted(lev)
            out_levels.append([f"({c},{d})"])
            out_levels.append([f"{c}_1", f"{d}_1"])
    out_levels.append(["w0"])
    # big points of the new vectroid: the bar copies of each big class
    for cls in sp.same():
        if len(cls) > 1:
            same.append(tuple(f"{t}~" for t in cls))
    elements = [e for lev in out_levels for e in lev]
    rel = []
    for i, lo in enumerate(out_levels):
        for hi in out_levels[i + 1:]:
            rel.extend((a, b) for a in lo for b in hi)
    P = Poset.from_relations(elements, rel)
    return make_halflinear(HalflinearSpec(P, tuple(same)), field)


def diamond_poset() -> Poset:
    return Poset.from_relations(["p1", "p2", "p3", "p4"],
                                [("p1", "p2"), ("p1", "p3"), ("p2", "p4"), ("p3", "p4")])


def reducible_case(mq: MarkedQuiver, arrow_id):
    """Which reducible case (1, 2 or 3) the pendant arrow falls under, with ``(w, z)``."""
    a, w, z = _pendant(mq, arrow_id)
    cands = [(w, z)]
    if degree(mq.quiver, w) == 1:
        cands.append((z, w))
    for w, z in cands:
        vw, vz = mq.marking[w], mq.marking[z]
        nw, nz = _linear_size(vw), _linear_size(vz)
        if nw == 1 and nz is not None:
            return 1, w, z
        if nw == 1 and _vectroid_kind(vz) == "halflinear":
            return 2, w, z
        if nz == 1 and nw == 2:
            return 3, w, z
    raise NotReducible(f"arrow {arrow_id} is not reducible")


def lemma7_fast_path(mq: MarkedQuiver, arrow_id) -> ReductionResult:
    """Reduce a reducible pendant arrow from the case table, without enumeration."""
    case, w, z = reducible_case(mq, arrow_id)
    a = mq.quiver.arrow(arrow_id)
    vz = mq.marking[z]
    if case == 1:
        new = make_linear(len(vz) + 1, mq.field)
    elif case == 2:
        new = _case2_vectroid(vz, mq.field)
    else:
        new = make_poset_linearization(diamond_poset(), mq.field)
    rest = [v for v in mq.vertices if v != z]
    q = Quiver(rest, [b for b in mq.arrows if b.id != arrow_id])
    marking = {v: (new if v == w else mq.marking[v]) for v in rest}
    reduced = MarkedQuiver(q, marking, mq.field, strict=False)
    from .rep import simple_representation
    sub = _induced(mq, [w, z])
    kernel = [simple_representation(sub, z, lab) for lab in vz.labels]
    return ReductionResult(reduced, kernel, {}, {"arrow": arrow_id, "removed": z, "kept": w, "case": case})


# ---------------------------------------------------------------- one-source transfer


def prop8_vectroid_problem(mq: MarkedQuiver):
    """``(V_y + k_{m-1}, m)`` for ``x -> y`` with ``V_x = k_m``, ``m > 1``."""
    if len(mq.vertices) != 2 or len(mq.arrows) != 1 or mq.arrows[0].source == mq.arrows[0].target:
        raise ShapeMismatch("expected a single arrow x -> y")
    a = mq.arrows[0]
    m = _linear_size(mq.marking[a.source])
    if m is None or m < 2:
        raise ShapeMismatch("source must be marked by k_m with m > 1")
    return disjoint_union(mq.marking[a.target], make_linear(m - 1, mq.field)), m


def prop8_matrix_problem(mq: MarkedQuiver) -> MarkedQuiver:
    """The one-source problem ``x' -> y'`` with ``V_x' = k`` and ``V_y' = V_y + k_{m-1}``."""
    v, _ = prop8_vectroid_problem(mq)
    a = mq.arrows[0]
    q = Quiver([a.source, a.target], [a])
    return MarkedQuiver(q, {a.source: make_linear(1, mq.field), a.target: v}, mq.field)


def _strips(v: Vectroid, mult, n_tail):
    """Column ranges of the last ``n_tail`` objects (the ``k_{m-1}`` strips), in order."""
    out, off = [], 0
    n = len(v)
    for i, c in enumerate(mult):
        width = c * v.dims[i]
        if i >= n - n_tail:
            out.append((off, off + width))
        off += width
    return out, sum(c * v.dims[i] for i, c in enumerate(mult) if i < n - n_tail)


def preliminary_form(u: Representation, m: int):
    """Row-reduce a representation of the one-source problem into staircase shape.

    Strip ``t`` of ``k_{m-1}`` is brought to ``[U_tt; 0]`` on the rows left
    below the earlier strips, with ``U_tt`` of full row rank.  Returns the
    new representation, the row counts ``(r_1, ..., r_m)`` and the row
    transformation (an isomorphism at the source).
    """
    mq = u.mq
    a = mq.arrows[0]
    x, y = a.source, a.target
    p = u.p
    mat = u.maps[a.id].copy()
    rows = mat.shape[0]
    strips, _ = _strips(mq.marking[y], u.dims.at(mq, y), m - 1)
    if len(strips) != m - 1:
        raise ShapeMismatch("representation does not belong to a one-source transfer problem")
    g = np.eye(rows, dtype=np.int64)
    start = 0
    counts = []
    for lo, hi in strips:
        block = mat[start:, lo:hi]
        # row echelon on the remaining rows via a left-multiplying transform
        aug = np.concatenate([block, np.eye(rows - start, dtype=np.int64)], axis=1)
        r, rk, piv = rref(aug, p)
        rk_block = sum(1 for c in piv if c < hi - lo)
        t = r[:, hi - lo:]
        full = np.eye(rows, dtype=np.int64)
        full[start:, start:] = t
        mat = (full @ mat) % p
        g = (full @ g) % p
        counts.append(rk_block)
        start += rk_block
    counts.append(rows - start)
    w = Representation(mq, u.dims, {a.id: mat})
    return w, tuple(counts), g


def is_preliminary(u: Representation, m: int):
    """Row counts ``(r_1..r_m)`` if ``u`` is in preliminary form, else ``None``."""
    mq = u.mq
    a = mq.arrows[0]
    p = u.p
    mat = u.maps[a.id]
    strips, _ = _strips(mq.marking[a.target], u.dims.at(mq, a.target), m - 1)
    start = 0
    counts = []
    for lo, hi in strips:
        block = mat[start:, lo:hi]
        rk = rank(block, p)
        if rk and rank(block[:rk], p) != rk:
            return None
        if block[rk:].any():
            return None
        counts.append(rk)
        start += rk
    counts.append(mat.shape[0] - start)
    return tuple(counts)


def prop8_F(u: Representation, m: int, target: MarkedQuiver) -> Representation:
    """Stack the ``V_y`` columns of the row blocks ``U_1..U_m`` over ``k_m``.

    Block ``t`` becomes the copies of object ``o_t`` of ``k_m``, so rows of
    higher blocks may be added to lower ones, as in the source problem.
    """
    counts = is_preliminary(u, m)
    if counts is None:
        raise NotPreliminary("representation is not in preliminary form")
    mq = u.mq
    a = mq.arrows[0]
    y = a.target
    vy = mq.marking[y]
    n_y = len(vy) - (m - 1)
    _, width = _strips(vy, u.dims.at(mq, y), m - 1)
    mat = u.maps[a.id][:, :width]
    ta = target.arrows[0]
    dims = DimAssignment.of(target, {ta.source: counts, ta.target: u.dims.at(mq, y)[:n_y]})
    return Representation(target, dims, {ta.id: mat})


def prop8_kernel_objects(problem: MarkedQuiver, m: int) -> list:
    from .rep import simple_representation
    a = problem.arrows[0]
    v = problem.marking[a.target]
    return [simple_representation(problem, a.target, lab) for lab in v.labels[len(v) - (m - 1):]]


def prop8_size(u: Representation, m: int) -> int:
    """Total dimension of ``F(u)``: everything except the ``k_{m-1}`` columns."""
    mq = u.mq
    y = mq.arrows[0].target
    v = mq.marking[y]
    mult = u.dims.at(mq, y)
    tail = sum(c * v.dims[i] for i, c in enumerate(mult) if i >= len(v) - (m - 1))
    return u.total_dim - tail
