"""Concrete vectroids and their structure posets.

A vectroid is a finite family of based vector spaces (objects) together
with a chosen basis of matrices for every morphism space.  Morphism
matrices follow the row-vector convention of :mod:`markedquiver.exactlin`:
an element ``x`` of ``X`` is sent by ``phi in hom(X, Y)`` to ``x @ phi``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .errors import NotHalflinear, SpecNotHalflinear, TooLarge, Unsupported
from .exactlin import GF, batch_rank, in_row_span, rank, rref

ENUMERATION_LIMIT = 10**6


# ---------------------------------------------------------------- posets


@dataclass(frozen=True)
class Poset:
    elements: tuple
    leq: frozenset  # reflexive-transitive closure, as (a, b) pairs

    def __post_init__(self):
        els = set(self.elements)
        if len(els) != len(self.elements):
            raise ValueError("duplicate poset elements")
        for a, b in self.leq:
            if a not in els or b not in els:
                raise ValueError(f"relation {a}<={b} mentions an unknown element")
        for a in self.elements:
            if (a, a) not in self.leq:
                raise ValueError(f"relation is not reflexive at {a}")
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                raise ValueError(f"relation is not antisymmetric: {a}, {b}")
        for a, b in self.leq:
            for c in self.elements:
                if (b, c) in self.leq and (a, c) not in self.leq:
                    raise ValueError(f"relation is not transitive: {a}<={b}<={c}")

    @classmethod
    def from_relations(cls, elements, relations=()):
        """Build a poset from generating relations ``a < b``."""
        elements = tuple(elements)
        leq = {(a, a) for a in elements} | {tuple(r) for r in relations}
        changed = True
        while changed:
            changed = False
            for a, b in list(leq):
                for c, d in list(leq):
                    if b == c and (a, d) not in leq:
                        leq.add((a, d))
                        changed = True
        return cls(elements, frozenset(leq))

    @classmethod
    def chain(cls, elements):
        elements = tuple(elements)
        return cls.from_relations(elements, zip(elements, elements[1:]))

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def comparable(self, a, b) -> bool:
        return (a, b) in self.leq or (b, a) in self.leq

    def is_chain(self) -> bool:
        return all(self.comparable(a, b) for a, b in itertools.combinations(self.elements, 2))

    def covers(self):
        """Hasse diagram edges ``(a, b)`` with ``a < b`` and nothing between."""
        out = []
        for a, b in sorted(self.leq, key=lambda r: (self.elements.index(r[0]), self.elements.index(r[1]))):
            if a == b:
                continue
            if not any(c not in (a, b) and self.le(a, c) and self.le(c, b) for c in self.elements):
                out.append((a, b))
        return out

    def relabel(self, mapping):
        return Poset(tuple(mapping[e] for e in self.elements),
                     frozenset((mapping[a], mapping[b]) for a, b in self.leq))


def poset_isomorphism(p1: Poset, p2: Poset, colour1=None, colour2=None, pairing1=None, pairing2=None):
    """Order isomorphism ``p1 -> p2`` preserving optional colours and a partition.

    ``pairing`` maps each element to a class key; the bijection must send
    classes onto classes.  Returns a dict or ``None``.
    """
    e1, e2 = list(p1.elements), list(p2.elements)
    if len(e1) != len(e2) or len(p1.leq) != len(p2.leq):
        return None
    colour1 = colour1 or {}
    colour2 = colour2 or {}
    pairing1 = pairing1 or {e: e for e in e1}
    pairing2 = pairing2 or {e: e for e in e2}

    def sig(p, col, pair, e):
        down = sum(1 for a in p.elements if p.le(a, e))
        up = sum(1 for b in p.elements if p.le(e, b))
        mates = sum(1 for a in p.elements if pair[a] == pair[e])
        return (down, up, col.get(e), mates)

    s1 = {e: sig(p1, colour1, pairing1, e) for e in e1}
    s2 = {e: sig(p2, colour2, pairing2, e) for e in e2}
    if sorted(map(repr, s1.values())) != sorted(map(repr, s2.values())):
        return None
    e1.sort(key=lambda e: repr(s1[e]))
    used = set()
    phi = {}

    def ok(a, b):
        for x, y in phi.items():
            if p1.le(a, x) != p2.le(b, y) or p1.le(x, a) != p2.le(y, b):
                return False
            if (pairing1[a] == pairing1[x]) != (pairing2[b] == pairing2[y]):
                return False
        return True

    def search(i):
        if i == len(e1):
            return True
        a = e1[i]
        for b in e2:
            if b in used or s2[b] != s1[a] or not ok(a, b):
                continue
            phi[a] = b
            used.add(b)
            if search(i + 1):
                return True
            del phi[a]
            used.discard(b)
        return False

    return dict(phi) if search(0) else None


# ---------------------------------------------------------------- vectroids


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)  # (condition, witness) pairs

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(f"{cond}: {wit}" for cond, wit in self.failures)


class Vectroid:
    """Objects ``(label, dim)`` and hom bases ``hom[(i, j)]`` of shape ``(k, dim_i, dim_j)``.

    ``recipe`` records how a vectroid was built from the named constructors;
    it lets the same vectroid be rebuilt over another prime and printed in
    the ``.mq`` language.  Vectroids computed by reductions carry no recipe.
    """

    def __init__(self, field: GF, objects, hom, recipe=None):
        self.field = field
        self.objects = tuple((str(l), int(d)) for l, d in objects)
        labels = [l for l, _ in self.objects]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate object labels {labels}")
        if any(d < 1 for _, d in self.objects):
            raise ValueError("object dimensions must be positive")
        self._hom = {}
        for (i, j), mats in hom.items():
            i, j = self.index(i), self.index(j)
            arr = np.array(mats, dtype=np.int64).reshape(-1, self.objects[i][1], self.objects[j][1])
            arr %= field.p
            if arr.shape[0]:
                self._hom[(i, j)] = arr
        self.recipe = recipe

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def labels(self):
        return [l for l, _ in self.objects]

    @property
    def dims(self):
        return [d for _, d in self.objects]

    def __len__(self):
        return len(self.objects)

    def index(self, obj) -> int:
        if isinstance(obj, (int, np.integer)):
            return int(obj)
        return self.labels.index(obj)

    def hom(self, a, b) -> np.ndarray:
        i, j = self.index(a), self.index(b)
        got = self._hom.get((i, j))
        if got is None:
            return np.zeros((0, self.objects[i][1], self.objects[j][1]), dtype=np.int64)
        return got

    def hom_dim(self, a, b) -> int:
        return self.hom(a, b).shape[0]

    def over(self, field: GF) -> "Vectroid":
        if field == self.field:
            return self
        if self.recipe is None:
            raise Unsupported("vectroid has no constructor recipe; cannot change the field")
        return build_from_recipe(self.recipe, field)

    def restrict(self, keep) -> "Vectroid":
        keep = [self.index(k) for k in keep]
        objects = [self.objects[i] for i in keep]
        hom = {(a, b): self._hom[(i, j)]
               for a, i in enumerate(keep) for b, j in enumerate(keep) if (i, j) in self._hom}
        return Vectroid(self.field, objects, hom)

    def __repr__(self):
        objs = ", ".join(f"{l}:{d}" for l, d in self.objects)
        return f"Vectroid(p={self.p}, [{objs}])"


def build_from_recipe(recipe, field: GF) -> Vectroid:
    kind = recipe[0]
    if kind == "linear":
        return make_linear(recipe[1], field)
    if kind == "nilpotent":
        return make_nilpotent(recipe[1], field)
    if kind == "poset":
        return make_poset_linearization(recipe[1], field)
    if kind == "half":
        return make_halflinear(recipe[1], field)
    if kind == "union":
        return disjoint_union(build_from_recipe(recipe[1], field), build_from_recipe(recipe[2], field))
    if kind == "op":
        return opposite(build_from_recipe(recipe[1], field))
    raise ValueError(f"unknown recipe {kind!r}")


# ---------------------------------------------------------------- constructors


def make_linear(n: int, field: GF) -> Vectroid:
    """The linear vectroid ``k_n``: a chain ``o1 <= ... <= on`` of lines."""
    if n < 1:
        raise ValueError("k_n needs n >= 1")
    if n == 1:
        return Vectroid(field, [("k", 1)], {(0, 0): [[[1]]]}, recipe=("linear", 1))
    labels = [f"o{i}" for i in range(1, n + 1)]
    v = make_poset_linearization(Poset.chain(labels), field)
    v.recipe = ("linear", n)
    return v


def make_nilpotent(n: int, field: GF) -> Vectroid:
    """``k^n``: one ``n``-dimensional object with ``End = k[r]/r^n``, ``a_i r = a_{i+1}``."""
    if n < 1:
        raise ValueError("k^n needs n >= 1")
    shift = np.eye(n, k=1, dtype=np.int64)
    powers = [np.linalg.matrix_power(shift, i) for i in range(n)]
    label = "k" if n == 1 else "A"
    return Vectroid(field, [(label, n)], {(0, 0): powers},
                    recipe=("linear", 1) if n == 1 else ("nilpotent", n))


def make_poset_linearization(poset: Poset, field: GF) -> Vectroid:
    objects = [(str(e), 1) for e in poset.elements]
    hom = {}
    for i, a in enumerate(poset.elements):
        for j, b in enumerate(poset.elements):
            if poset.le(a, b):
                hom[(i, j)] = [[[1]]]
    return Vectroid(field, objects, hom, recipe=("poset", poset))


@dataclass(frozen=True)
class HalflinearSpec:
    poset: Poset
    same: tuple  # tuple of tuples: the classes of objects; size-2 classes are big

    def classes(self):
        seen = {e for c in self.same for e in c}
        rest = tuple((e,) for e in self.poset.elements if e not in seen)
        return tuple(tuple(c) for c in self.same) + rest


def check_halflinear_spec(spec: HalflinearSpec):
    """Raise ``SpecNotHalflinear`` unless objects have dimension <= 2, big points are comparable to
    everything, small points miss at most one point, and the result is not linear."""
    P = spec.poset
    classes = spec.classes()
    flat = [e for c in classes for e in c]
    if sorted(map(str, flat)) != sorted(map(str, P.elements)) or len(flat) != len(set(flat)):
        raise SpecNotHalflinear("object classes must partition the poset")
    big = set()
    for c in classes:
        if len(c) > 2:
            raise SpecNotHalflinear(f"class {c} gives an object of dimension > 2")
        if len(c) == 2:
            if not P.comparable(*c):
                raise SpecNotHalflinear(f"the two points {c} of one object must be comparable")
            big.update(c)
    for a in P.elements:
        bad = [b for b in P.elements if not P.comparable(a, b)]
        if a in big and bad:
            raise SpecNotHalflinear(f"big point {a} is incomparable to {bad[0]}")
        if a not in big and len(bad) > 1:
            raise SpecNotHalflinear(f"small point {a} is incomparable to {bad}")
    if not big and P.is_chain():
        raise SpecNotHalflinear("a chain without big points is linear, not halflinear")


def _object_label(cls, taken):
    lo = str(cls[0])
    lab = lo.upper() if lo.upper() not in taken else lo
    while lab in taken:
        lab += "'"
    return lab


def _realize(P: Poset, classes, field: GF, labels=None):
    """One object per class; basis vector i of an object is its i-th point from below.

    ``hom(X, Y)`` for ``X != Y`` is spanned by the matrix units ``E_ij``
    with ``point(X, i) <= point(Y, j)``; a two-dimensional object gets
    ``End = span{1, r}``.
    """
    ordered = []
    for c in classes:
        c = tuple(c)
        if len(c) == 2 and P.le(c[1], c[0]):
            c = (c[1], c[0])
        ordered.append(c)
    if labels is None:
        taken = set()
        labels = []
        for c in ordered:
            lab = _object_label(c, taken)
            taken.add(lab)
            labels.append(lab)
    objects = [(lab, len(c)) for lab, c in zip(labels, ordered)]
    hom = {}
    for i, ci in enumerate(ordered):
        for j, cj in enumerate(ordered):
            if i == j:
                mats = [np.eye(len(ci), dtype=np.int64)]
                if len(ci) == 2:
                    mats.append(np.array([[0, 1], [0, 0]], dtype=np.int64))
            else:
                mats = []
                for a, x in enumerate(ci):
                    for b, y in enumerate(cj):
                        if P.le(x, y):
                            m = np.zeros((len(ci), len(cj)), dtype=np.int64)
                            m[a, b] = 1
                            mats.append(m)
            if mats:
                hom[(i, j)] = mats
    return Vectroid(field, objects, hom)


def make_halflinear(spec: HalflinearSpec, field: GF) -> Vectroid:
    check_halflinear_spec(spec)
    v = _realize(spec.poset, spec.classes(), field)
    v.recipe = ("half", spec)
    return v


def disjoint_union(v1: Vectroid, v2: Vectroid) -> Vectroid:
    if v1.field != v2.field:
        raise ValueError("disjoint union needs a common field")
    taken = set(v1.labels)
    objects = list(v1.objects)
    for lab, d in v2.objects:
        while lab in taken:
            lab += "'"
        taken.add(lab)
        objects.append((lab, d))
    n1 = len(v1)
    hom = {k: m for k, m in v1._hom.items()}
    hom.update({(i + n1, j + n1): m for (i, j), m in v2._hom.items()})
    recipe = ("union", v1.recipe, v2.recipe) if v1.recipe and v2.recipe else None
    return Vectroid(v1.field, objects, hom, recipe=recipe)


def opposite(v: Vectroid) -> Vectroid:
    """Transpose every morphism: ``hom°(B, A) = hom(A, B)^T``."""
    hom = {(j, i): np.transpose(m, (0, 2, 1)) for (i, j), m in v._hom.items()}
    if v.recipe is None:
        recipe = None
    elif v.recipe[0] == "op":
        recipe = v.recipe[1]
    else:
        recipe = ("op", v.recipe)
    return Vectroid(v.field, v.objects, hom, recipe=recipe)


# ---------------------------------------------------------------- validation


def _span_data(stack, p):
    k = stack.shape[0]
    if k == 0:
        return None, []
    r, rk, piv = rref(stack.reshape(k, -1), p)
    return r[:rk], piv


def validate_spectroid(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> ValidationReport:
    p = v.p
    rep = ValidationReport()
    n = len(v)
    spans = {}
    for i in range(n):
        for j in range(n):
            h = v.hom(i, j)
            if h.shape[0] and rank(h.reshape(h.shape[0], -1), p) < h.shape[0]:
                rep.failures.append(("hom basis not linearly independent", (v.labels[i], v.labels[j])))
            spans[(i, j)] = _span_data(h, p)
    for i in range(n):
        basis, piv = spans[(i, i)]
        eye = np.eye(v.dims[i], dtype=np.int64).reshape(-1)
        if basis is None or not in_row_span(eye, basis, piv, p):
            rep.failures.append(("identity not in End", v.labels[i]))
    for i, j, l in itertools.product(range(n), repeat=3):
        hf, hg = v.hom(i, j), v.hom(j, l)
        if not hf.shape[0] or not hg.shape[0]:
            continue
        basis, piv = spans[(i, l)]
        for a, f in enumerate(hf):
            for b, g in enumerate(hg):
                prod = (f @ g) % p
                if not prod.any():
                    continue
                if basis is None or not in_row_span(prod.reshape(-1), basis, piv, p):
                    rep.failures.append(("composition leaves the span",
                                         (v.labels[i], v.labels[j], v.labels[l], a, b)))
    for i in range(n):
        end = v.hom(i, i)
        if end.shape[0] == 0:
            continue
        res = algebra.find_nonlocal_witness(end, p, limit=limit)
        if res.witness is not None:
            rep.failures.append(("End not local", (v.labels[i], res.witness.tolist())))
    for i, j in itertools.combinations(range(n), 2):
        if v.dims[i] != v.dims[j]:
            continue
        for f in v.hom(i, j):
            for g in v.hom(j, i):
                if rank((f @ g) % p, p) == v.dims[i]:
                    rep.failures.append(("objects isomorphic", (v.labels[i], v.labels[j])))
                    break
            else:
                continue
            break
    return rep


# ---------------------------------------------------------------- structure poset


@dataclass(frozen=True)
class StructurePoset:
    poset: Poset
    class_of: dict  # point -> object label
    big: frozenset

    def same(self):
        groups = {}
        for e in self.poset.elements:
            groups.setdefault(self.class_of[e], []).append(e)
        return tuple(tuple(g) for g in groups.values())


def _nonzero_vectors(d, p):
    digits = algebra.coefficient_digits(p**d, d, p)
    return digits[1:]


def _span_elements(basis, p):
    k = basis.shape[0]
    if k == 0:
        return np.zeros((0, basis.shape[1]), dtype=np.int64)
    coeffs = algebra.coefficient_digits(p**k, k, p)
    return (coeffs @ basis) % p


def structure_poset(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> StructurePoset:
    """Points are classes of nonzero elements under mutual reachability by morphisms."""
    p = v.p
    if sum(p**d for d in v.dims) > limit:
        raise TooLarge("too many elements to enumerate the structure poset")
    elems = []
    code = {}
    for i, d in enumerate(v.dims):
        for vec in _nonzero_vectors(d, p):
            code[(i, tuple(vec))] = len(elems)
            elems.append((i, vec))
    n = len(elems)
    reach = np.zeros((n, n), dtype=bool)
    for a, (i, x) in enumerate(elems):
        for j in range(len(v)):
            h = v.hom(i, j)
            if not h.shape[0]:
                continue
            images = np.einsum("a,kab->kb", x, h) % p
            r, rk, _ = rref(images, p)
            for y in _span_elements(r[:rk], p):
                if y.any():
                    reach[a, code[(j, tuple(y))]] = True
    mutual = reach & reach.T
    cls = [-1] * n
    reps = []
    for a in range(n):
        if cls[a] < 0:
            members = np.nonzero(mutual[a])[0]
            for b in members:
                cls[b] = len(reps)
            reps.append(a)
    by_obj = {}
    for c, a in enumerate(reps):
        by_obj.setdefault(elems[a][0], []).append(c)
    names = {}
    for i, cs in by_obj.items():
        # points of one object, lowest first
        members = [reps[d] for d in cs]
        cs.sort(key=lambda c: -int(reach[reps[c]][members].sum()))
        lab = v.labels[i]
        for t, c in enumerate(cs):
            names[c] = lab + "*" * t
    order = sorted(range(len(reps)), key=lambda c: (elems[reps[c]][0], names[c]))
    elements = tuple(names[c] for c in order)
    leq = frozenset((names[c], names[d]) for c in range(len(reps)) for d in range(len(reps))
                    if reach[reps[c], reps[d]])
    class_of = {names[c]: v.labels[elems[reps[c]][0]] for c in range(len(reps))}
    big = frozenset(names[c] for i, cs in by_obj.items() if len(cs) > 1 for c in cs)
    return StructurePoset(Poset(elements, leq), class_of, big)


def structure_posets_isomorphic(s1: StructurePoset, s2: StructurePoset):
    colour1 = {e: e in s1.big for e in s1.poset.elements}
    colour2 = {e: e in s2.big for e in s2.poset.elements}
    return poset_isomorphism(s1.poset, s2.poset, colour1, colour2, s1.class_of, s2.class_of)


# ---------------------------------------------------------------- invariants


def vectroid_dim(v: Vectroid) -> int:
    return max(v.dims, default=0)


def _hom_elements(h, p, limit):
    k = h.shape[0]
    if p**k > limit:
        raise TooLarge("hom space too large to enumerate")
    coeffs = algebra.coefficient_digits(p**k, k, p)
    return np.tensordot(coeffs, h, axes=(1, 0)) % p


def vectroid_rank(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> int:
    """Largest rank of a noninvertible, additively indecomposable morphism (0 if none)."""
    p = v.p
    best = 0
    for i in range(len(v)):
        for j in range(len(v)):
            h = v.hom(i, j)
            if not h.shape[0]:
                continue
            els = _hom_elements(h, p, limit)
            ranks = batch_rank(els, p)
            inv = (ranks == v.dims[i]) & (ranks == v.dims[j]) if i == j else np.zeros(len(els), bool)
            for idx in np.argsort(-ranks, kind="stable"):
                r = int(ranks[idx])
                if r <= best:
                    break
                if inv[idx]:
                    continue
                phi = els[idx]
                diffs = (phi[None] - els) % p
                dr = batch_rank(diffs, p)
                decomposable = np.any((ranks < r) & (dr < r))
                if not decomposable:
                    best = r
                    break
    return best


def is_linear(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> bool:
    if any(d != 1 for d in v.dims):
        return False
    return structure_poset(v, limit).poset.is_chain()


def _halflinear_conditions(v, sp):
    P = sp.poset
    for a in P.elements:
        bad = [b for b in P.elements if not P.comparable(a, b)]
        if a in sp.big and bad:
            return False
        if a not in sp.big and len(bad) > 1:
            return False
    return True


def is_halflinear(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> bool:
    if vectroid_dim(v) > 2:
        return False
    if is_linear(v, limit):
        return False
    if vectroid_rank(v, limit) != 1:
        return False
    return _halflinear_conditions(v, structure_poset(v, limit))


def kind_of(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> str:
    """``'unmarked'``, ``'linear'``, ``'halflinear'`` or ``'other'``."""
    if len(v) == 1 and v.dims == [1]:
        return "unmarked"
    if is_linear(v, limit):
        return "linear"
    if is_halflinear(v, limit):
        return "halflinear"
    return "other"


def vectroids_isomorphic(v1: Vectroid, v2: Vectroid, limit: int = ENUMERATION_LIMIT, check: bool = True) -> bool:
    """Isomorphism of linear/halflinear vectroids via ``(S, <=, ~)``."""
    if check:
        for v in (v1, v2):
            if kind_of(v, limit) == "other":
                raise Unsupported("isomorphism is decided only for linear and halflinear vectroids")
    if sorted(v1.dims) != sorted(v2.dims):
        return False
    s1, s2 = structure_poset(v1, limit), structure_poset(v2, limit)
    return structure_posets_isomorphic(s1, s2) is not None


def minus(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> Vectroid:
    """Drop the lines whose point is comparable to every other point."""
    if not is_halflinear(v, limit):
        raise NotHalflinear("minus() is defined for halflinear vectroids")
    sp = structure_poset(v, limit)
    P = sp.poset
    drop = set()
    for e in P.elements:
        if e in sp.big:
            continue
        if all(P.comparable(e, b) for b in P.elements):
            drop.add(sp.class_of[e])
    return v.restrict([l for l in v.labels if l not in drop])


def almost_equivalent(v1: Vectroid, v2: Vectroid, limit: int = ENUMERATION_LIMIT) -> bool:
    return vectroids_isomorphic(minus(v1, limit), minus(v2, limit), limit, check=False)


def halflinear_spec_of(v: Vectroid, limit: int = ENUMERATION_LIMIT) -> HalflinearSpec:
    sp = structure_poset(v, limit)
    return HalflinearSpec(sp.poset, tuple(c for c in sp.same() if len(c) > 1))


def realize_structure(sp: StructurePoset, field: GF) -> Vectroid:
    """Rebuild a linear/halflinear vectroid from its structure poset."""
    labels = []
    classes = []
    for c in sp.same():
        classes.append(c)
        labels.append(sp.class_of[c[0]])
    return _realize(sp.poset, classes, field, labels=labels)
