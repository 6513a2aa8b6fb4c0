"""Representations of marked quivers: morphisms, endomorphisms, enumeration.

A representation assigns to every vertex ``x`` a multiplicity vector over the
objects of ``V_x``.  The space ``U(x)`` is the concatenation of the object
copies in declaration order (object 0 repeated ``m_0`` times, then object 1,
...), and each arrow ``x -> y`` carries a ``totalDim(x) x totalDim(y)``
matrix.  Morphisms ``f: U -> W`` are families of structured block matrices
with ``f(x) W(a) = U(a) f(y)`` for every arrow ``a: x -> y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import (EXHAUSTIVE_LIMIT, coefficient_digits, find_nonlocal_witness,
                      independent_basis, primitive_idempotents)
from .errors import SearchSpaceTooLarge, ShapeMismatch, Unsupported, ValidationError
from .exactlin import batch_rank, block_diag, express_in_basis, invert, rank, solve_nullspace
from .quiver import MarkedQuiver
from .vectroid import Vectroid

SEARCH_LIMIT = 10**8
_CHUNK = 1 << 16


# ---------------------------------------------------------------- dimensions


@dataclass(frozen=True, order=True)
class DimAssignment:
    """Multiplicity vectors, one per vertex, in the quiver's vertex order."""

    mult: tuple

    @classmethod
    def of(cls, mq: MarkedQuiver, spec) -> "DimAssignment":
        """Build from a dict ``vertex -> multiplicities`` (missing vertices are zero)."""
        if isinstance(spec, DimAssignment):
            return spec
        out = []
        for x in mq.vertices:
            n = len(mq.marking[x])
            m = spec.get(x, (0,) * n) if isinstance(spec, dict) else spec[mq.vertices.index(x)]
            if isinstance(m, (int, np.integer)):
                m = (int(m),)
            m = tuple(int(v) for v in m)
            if len(m) != n:
                raise ValidationError(f"vertex {x}: expected {n} multiplicities, got {len(m)}")
            if any(v < 0 for v in m):
                raise ValidationError("multiplicities must be non-negative")
            out.append(m)
        return cls(tuple(out))

    def at(self, mq: MarkedQuiver, x) -> tuple:
        return self.mult[mq.vertices.index(x)]

    def total(self, mq: MarkedQuiver, x) -> int:
        return _total(mq.marking[x], self.at(mq, x))

    def totals(self, mq: MarkedQuiver) -> dict:
        return {x: _total(mq.marking[x], m) for x, m in zip(mq.vertices, self.mult)}

    def size(self, mq: MarkedQuiver, weights: dict | None = None) -> int:
        """Total dimension, or a weighted size when ``weights[(x, obj_index)]`` is given."""
        s = 0
        for x, m in zip(mq.vertices, self.mult):
            dims = mq.marking[x].dims
            for i, c in enumerate(m):
                w = dims[i] if weights is None else weights.get((x, i), dims[i])
                s += c * w
        return s

    def is_zero(self) -> bool:
        return not any(any(m) for m in self.mult)

    def __add__(self, other: "DimAssignment") -> "DimAssignment":
        return DimAssignment(tuple(tuple(a + b for a, b in zip(m1, m2))
                                   for m1, m2 in zip(self.mult, other.mult)))

    def describe(self, mq: MarkedQuiver) -> str:
        parts = []
        for x, m in zip(mq.vertices, self.mult):
            parts.append(f"{x}: " + " ".join(str(c) for c in m))
        return "; ".join(parts)


def _total(v: Vectroid, m) -> int:
    return int(sum(c * d for c, d in zip(m, v.dims)))


def _copies(v: Vectroid, m):
    """``(object index, offset)`` for each object copy in the concatenated space."""
    out, off = [], 0
    for i, c in enumerate(m):
        for _ in range(c):
            out.append((i, off))
            off += v.dims[i]
    return out


def structured_block_basis(v: Vectroid, m, m2) -> np.ndarray:
    """Basis of ``(+V)(X, X')`` as a stack of ``total(m) x total(m2)`` matrices.

    Each hom-basis matrix of ``V`` is placed in each (copy, copy) block; the
    order is by copy pair, then hom-basis element.
    """
    m, m2 = tuple(m), tuple(m2)
    cache = v.__dict__.setdefault("_sbb_cache", {})
    key = (m, m2)
    if key in cache:
        return cache[key]
    r, c = _total(v, m), _total(v, m2)
    mats = []
    for i, oi in _copies(v, m):
        for j, oj in _copies(v, m2):
            h = v.hom(i, j)
            for b in h:
                e = np.zeros((r, c), dtype=np.int64)
                e[oi:oi + b.shape[0], oj:oj + b.shape[1]] = b
                mats.append(e)
    out = np.array(mats, dtype=np.int64).reshape(len(mats), r, c)
    out.flags.writeable = False
    cache[key] = out
    return out


def rep_space_dim(mq: MarkedQuiver, dims) -> int:
    dims = DimAssignment.of(mq, dims)
    t = dims.totals(mq)
    return sum(t[a.source] * t[a.target] for a in mq.arrows)


# ---------------------------------------------------------------- representations


@dataclass
class Representation:
    mq: MarkedQuiver
    dims: DimAssignment
    maps: dict  # arrow id -> matrix

    def __post_init__(self):
        self.dims = DimAssignment.of(self.mq, self.dims)
        t = self.dims.totals(self.mq)
        p = self.mq.p
        fixed = {}
        for a in self.mq.arrows:
            want = (t[a.source], t[a.target])
            m = self.maps.get(a.id)
            m = np.zeros(want, dtype=np.int64) if m is None else np.array(m, dtype=np.int64).reshape(want) % p
            fixed[a.id] = m
        extra = set(self.maps) - set(fixed)
        if extra:
            raise ValidationError(f"unknown arrows {sorted(extra)}")
        self.maps = fixed

    @property
    def p(self) -> int:
        return self.mq.p

    def total(self, x) -> int:
        return self.dims.total(self.mq, x)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.totals(self.mq).values())

    def flat(self) -> np.ndarray:
        parts = [self.maps[a.id].ravel() for a in self.mq.arrows]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def key(self):
        return (self.total_dim, self.dims, tuple(int(v) for v in self.flat()))

    def __eq__(self, other):
        return isinstance(other, Representation) and self.mq is other.mq and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Representation({self.dims.describe(self.mq)}; {self.flat().tolist()})"


def zero_representation(mq: MarkedQuiver) -> Representation:
    return Representation(mq, DimAssignment.of(mq, {}), {})


def simple_representation(mq: MarkedQuiver, x, obj) -> Representation:
    """The one-vertex representation ``U_T`` with one copy of ``obj`` at ``x``."""
    v = mq.marking[x]
    m = [0] * len(v)
    m[v.index(obj)] = 1
    return Representation(mq, DimAssignment.of(mq, {x: tuple(m)}), {})


def direct_sum(u: Representation, w: Representation) -> Representation:
    """Sum with multiplicities added; copies of each object are interleaved so that
    the layout stays in declaration order, so the arrow matrices are block-diagonal
    up to that fixed permutation."""
    _same_quiver(u, w)
    mq = u.mq
    dims = u.dims + w.dims
    perms = {}
    for x in mq.vertices:
        v = mq.marking[x]
        mu, mw = u.dims.at(mq, x), w.dims.at(mq, x)
        cu, cw = _copies(v, mu), _copies(v, mw)
        su = _total(v, mu)
        order = []  # target position -> source coordinate in U(x) (+) W(x)
        for i in range(len(v)):
            for obj, off in cu:
                if obj == i:
                    order.extend(range(off, off + v.dims[i]))
            for obj, off in cw:
                if obj == i:
                    order.extend(range(su + off, su + off + v.dims[i]))
        perms[x] = np.array(order, dtype=np.int64)
    maps = {}
    for a in mq.arrows:
        m = block_diag([u.maps[a.id], w.maps[a.id]])
        maps[a.id] = m[np.ix_(perms[a.source], perms[a.target])]
    return Representation(mq, dims, maps)


def _same_quiver(u, w):
    if u.mq is not w.mq and (u.mq.quiver is not w.mq.quiver or u.mq.p != w.mq.p):
        raise ShapeMismatch("representations of different marked quivers")


# ---------------------------------------------------------------- morphisms


@dataclass
class MorphismBasis:
    source: Representation
    target: Representation
    basis: list  # list of dicts vertex -> matrix

    def __len__(self):
        return len(self.basis)

    def stacked(self, x) -> np.ndarray:
        r, c = self.source.total(x), self.target.total(x)
        return np.array([f[x] for f in self.basis], dtype=np.int64).reshape(len(self.basis), r, c)

    def block_diagonal(self) -> np.ndarray:
        """Each basis morphism as one block-diagonal matrix over all vertices."""
        verts = self.source.mq.vertices
        return np.array([block_diag([f[x] for x in verts]) for f in self.basis], dtype=np.int64).reshape(
            len(self.basis), sum(self.source.total(x) for x in verts), sum(self.target.total(x) for x in verts))


def is_morphism(u: Representation, w: Representation, f: dict) -> bool:
    p = u.p
    for a in u.mq.arrows:
        lhs = (f[a.source] @ w.maps[a.id]) % p
        rhs = (u.maps[a.id] @ f[a.target]) % p
        if not np.array_equal(lhs, rhs):
            return False
    return True


def hom_space(u: Representation, w: Representation) -> MorphismBasis:
    """Basis of ``Hom(u, w)`` from the left nullspace of the commutation equations."""
    _same_quiver(u, w)
    mq, p = u.mq, u.p
    bases, offsets, k = {}, {}, 0
    for x in mq.vertices:
        b = structured_block_basis(mq.marking[x], u.dims.at(mq, x), w.dims.at(mq, x))
        bases[x] = b
        offsets[x] = k
        k += b.shape[0]
    if k == 0:
        return MorphismBasis(u, w, [])
    blocks = []
    for a in mq.arrows:
        x, y = a.source, a.target
        r, c = u.total(x), w.total(y)
        if r == 0 or c == 0:
            continue
        eq = np.zeros((k, r * c), dtype=np.int64)
        bx, by = bases[x], bases[y]
        if bx.shape[0]:
            eq[offsets[x]:offsets[x] + bx.shape[0]] += np.matmul(bx, w.maps[a.id]).reshape(bx.shape[0], -1)
        if by.shape[0]:
            eq[offsets[y]:offsets[y] + by.shape[0]] -= np.matmul(u.maps[a.id], by).reshape(by.shape[0], -1)
        blocks.append(eq % p)
    if blocks:
        coeffs = solve_nullspace(np.concatenate(blocks, axis=1), p)
    else:
        coeffs = np.eye(k, dtype=np.int64)
    out = []
    for c in coeffs:
        f = {}
        for x in mq.vertices:
            b = bases[x]
            cx = c[offsets[x]:offsets[x] + b.shape[0]]
            f[x] = np.tensordot(cx, b, axes=(0, 0)) % p if b.shape[0] else np.zeros(
                (u.total(x), w.total(x)), dtype=np.int64)
        out.append(f)
    return MorphismBasis(u, w, out)


@dataclass
class EndAlgebra:
    morphisms: MorphismBasis
    p: int

    @property
    def dim(self) -> int:
        return len(self.morphisms)

    @property
    def basis(self) -> np.ndarray:
        if not hasattr(self, "_bd"):
            self._bd = self.morphisms.block_diagonal()
        return self._bd

    def table(self) -> np.ndarray:
        """``T[i, j]`` holds the coefficients of ``b_i b_j`` in the basis."""
        b = self.basis
        k = b.shape[0]
        flat = b.reshape(k, -1)
        out = np.zeros((k, k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                c = express_in_basis(((b[i] @ b[j]) % self.p).ravel(), flat, self.p)
                if c is None:
                    raise ArithmeticError("endomorphism basis is not closed under composition")
                out[i, j] = c
        return out


def end_algebra(u: Representation) -> EndAlgebra:
    return EndAlgebra(hom_space(u, u), u.p)


# ---------------------------------------------------------------- indecomposability


@dataclass
class IndecomposabilityResult:
    indecomposable: bool
    witness: np.ndarray | None  # a non-local endomorphism (block-diagonal) when decomposable
    heuristic: bool  # True when the verdict relied on the non-exhaustive search

    def __bool__(self):
        return self.indecomposable


def indecomposability(u: Representation, limit: int = EXHAUSTIVE_LIMIT) -> IndecomposabilityResult:
    if u.total_dim == 0:
        return IndecomposabilityResult(False, None, False)
    end = end_algebra(u)
    res = find_nonlocal_witness(end.basis, u.p, limit=limit)
    return IndecomposabilityResult(res.local, res.witness, not res.exhaustive)


def is_indecomposable(u: Representation, limit: int = EXHAUSTIVE_LIMIT) -> bool:
    return indecomposability(u, limit).indecomposable


@dataclass
class Summand:
    """The summand of ``rep`` cut out by the block-diagonal idempotent ``proj``."""

    rep: Representation
    proj: np.ndarray

    @property
    def dim(self) -> int:
        return rank(self.proj, self.rep.p)


def decompose(u: Representation, limit: int = EXHAUSTIVE_LIMIT) -> list:
    if u.total_dim == 0:
        return []
    end = end_algebra(u)
    dec = primitive_idempotents(end.basis, u.p, limit)
    return [Summand(u, e) for e in dec.idempotents]


def _split(mat, rep):
    """Cut a block-diagonal matrix back into per-vertex blocks."""
    out, off = {}, 0
    for x in rep.mq.vertices:
        t = rep.total(x)
        out[x] = mat[off:off + t]
        off += t
    return out


def summands_isomorphic(s: Summand, t: Summand) -> bool:
    """Isomorphism of indecomposable summands by the pairing test.

    With ``P``, ``Q`` the idempotents, the summands are isomorphic iff some
    ``f`` in ``P Hom Q`` and ``g`` in ``Q Hom P`` compose to an invertible
    element of the local corner ``P End P``; bilinearity lets us check basis
    pairs only.
    """
    p = s.rep.p
    if s.dim != t.dim:
        return False
    fwd = hom_space(s.rep, t.rep).block_diagonal()
    bwd = hom_space(t.rep, s.rep).block_diagonal()
    if fwd.shape[0] == 0 or bwd.shape[0] == 0:
        return False
    fs = np.matmul(np.matmul(s.proj[None], fwd), t.proj[None]) % p
    gs = np.matmul(np.matmul(t.proj[None], bwd), s.proj[None]) % p
    fs = independent_basis(fs, p)
    gs = independent_basis(gs, p)
    if fs.shape[0] == 0 or gs.shape[0] == 0:
        return False
    prods = np.matmul(fs[:, None], gs[None]).reshape(-1, *s.proj.shape) % p
    return bool(np.any(batch_rank(prods, p) == s.dim))


def _match_multisets(left: list, right: list) -> bool:
    if len(left) != len(right):
        return False
    used = [False] * len(right)
    for s in left:
        for j, t in enumerate(right):
            if not used[j] and summands_isomorphic(s, t):
                used[j] = True
                break
        else:
            return False
    return True


@dataclass
class IsoResult:
    isomorphic: bool
    witness: dict | None = None  # per-vertex invertible matrices when found
    exhaustive: bool = True

    def __bool__(self):
        return self.isomorphic


def isomorphism(u: Representation, w: Representation, limit: int = EXHAUSTIVE_LIMIT) -> IsoResult:
    _same_quiver(u, w)
    if u.dims != w.dims:
        return IsoResult(False)
    if u.total_dim == 0:
        return IsoResult(True, {x: np.zeros((0, 0), dtype=np.int64) for x in u.mq.vertices})
    if u.key() == w.key():
        return IsoResult(True, {x: np.eye(u.total(x), dtype=np.int64) for x in u.mq.vertices})
    hom = hom_space(u, w)
    k = len(hom)
    if k == 0:
        return IsoResult(False)
    p = u.p
    bd = hom.block_diagonal()
    n = bd.shape[1]
    for b in range(k):
        if rank(bd[b], p) == n:
            return IsoResult(True, _split_morphism(bd[b], u, w))
    if p**k <= limit:
        total = p**k
        for start in range(0, total, _CHUNK):
            cnt = min(_CHUNK, total - start)
            elems = np.tensordot(coefficient_digits(cnt, k, p, start), bd, axes=(1, 0)) % p
            hit = np.nonzero(batch_rank(elems, p) == n)[0]
            if hit.size:
                return IsoResult(True, _split_morphism(elems[hit[0]], u, w))
        return IsoResult(False)
    return IsoResult(_match_multisets(decompose(u, limit), decompose(w, limit)), None, False)


def _split_morphism(mat, u, w):
    out, r, c = {}, 0, 0
    for x in u.mq.vertices:
        a, b = u.total(x), w.total(x)
        out[x] = mat[r:r + a, c:c + b]
        r += a
        c += b
    return out


def are_isomorphic(u: Representation, w: Representation, limit: int = EXHAUSTIVE_LIMIT) -> bool:
    return isomorphism(u, w, limit).isomorphic


def summand_multiplicities(u: Representation, indecs: list, limit: int = EXHAUSTIVE_LIMIT) -> list:
    """How often each (pairwise non-isomorphic, indecomposable) ``indecs[i]`` occurs in ``u``.

    Uses the pairing ``Hom(T, u) x Hom(u, T) -> End(T) / rad``: its rank over
    the residue field is the multiplicity of ``T``.
    """
    p = u.p
    out = []
    for t in indecs:
        end = end_algebra(t).basis
        n = end.shape[1]
        rad = [e for e in end if rank(np.linalg.matrix_power(e, max(n, 1)) % p, p) == 0] if n else []
        rad = independent_basis(np.array(rad, dtype=np.int64).reshape(-1, n, n), p) if rad else np.zeros(
            (0, n, n), dtype=np.int64)
        d = end.shape[0] - rad.shape[0]
        fwd = hom_space(t, u).block_diagonal()
        bwd = hom_space(u, t).block_diagonal()
        if fwd.shape[0] == 0 or bwd.shape[0] == 0:
            out.append(0)
            continue
        prods = np.matmul(fwd[:, None], bwd[None]) % p  # (i, j, n, n)
        # reduce modulo the radical: coordinates in End, projected away from rad
        quot = _quotient_coords(end, rad, p)
        mat = np.zeros((fwd.shape[0], bwd.shape[0] * quot.shape[1]), dtype=np.int64)
        flat_end = end.reshape(end.shape[0], -1)
        for i in range(fwd.shape[0]):
            row = []
            for j in range(bwd.shape[0]):
                c = express_in_basis(prods[i, j].ravel(), flat_end, p)
                row.append((c @ quot) % p)
            mat[i] = np.concatenate(row)
        out.append(rank(mat, p) // max(d, 1))
    return out


def _quotient_coords(end, rad, p):
    """A matrix sending End-coordinates to coordinates of End / rad."""
    k = end.shape[0]
    if rad.shape[0] == 0:
        return np.eye(k, dtype=np.int64)
    flat = end.reshape(k, -1)
    rc = np.array([express_in_basis(r.ravel(), flat, p) for r in rad], dtype=np.int64)
    # complement of rad coordinates: map with kernel exactly span(rc)
    from .exactlin import right_nullspace
    ann = right_nullspace(rc, p)  # vectors v with rc @ v = 0
    return ann.T % p


# ---------------------------------------------------------------- group action


def _radical_basis(v: Vectroid, i: int) -> np.ndarray:
    """Basis of the radical of ``End(X_i)``; requires ``End/rad = GF(p)``."""
    p = v.p
    h = v.hom(i, i)
    d = v.dims[i]
    eye = np.eye(d, dtype=np.int64)
    rad = []
    for b in h:
        for lam in range(p):
            e = (b - lam * eye) % p
            if rank(np.linalg.matrix_power(e, d) % p, p) == 0:
                rad.append(e)
                break
        else:
            raise Unsupported("residue field of an endomorphism ring is larger than GF(p)")
    if rad:
        return independent_basis(np.array(rad), p)
    return np.zeros((0, d, d), dtype=np.int64)


def _filtered_radical_basis(v: Vectroid, m) -> np.ndarray:
    """Basis of rad of the structured algebra ``(+V)(X, X)`` adapted to its power filtration."""
    p = v.p
    t = _total(v, m)
    copies = _copies(v, m)
    mats = []
    for i, oi in copies:
        for j, oj in copies:
            hb = _radical_basis(v, i) if i == j else v.hom(i, j)
            for h in hb:
                e = np.zeros((t, t), dtype=np.int64)
                e[oi:oi + h.shape[0], oj:oj + h.shape[1]] = h
                mats.append(e)
    if not mats:
        return np.zeros((0, t, t), dtype=np.int64)
    j1 = independent_basis(np.array(mats), p)
    layers = [j1]
    while True:
        prod = np.matmul(layers[-1][:, None], j1[None]).reshape(-1, t, t) % p
        nxt = independent_basis(prod, p)
        if nxt.shape[0] == 0:
            break
        layers.append(nxt)
    chosen = np.zeros((0, t * t), dtype=np.int64)
    for layer in reversed(layers):
        for e in layer.reshape(layer.shape[0], -1):
            cand = np.concatenate([chosen, e[None]])
            if rank(cand, p) > chosen.shape[0]:
                chosen = cand
    return chosen.reshape(-1, t, t)


def unit_group_generators(v: Vectroid, m) -> list:
    """Generators of the unit group of the structured algebra at one vertex.

    The units are ``prod GL_{m_i}(p)`` (acting on the copies of each object)
    times ``1 + rad``.  For ``GL`` we take a transvection, a transposition, a
    cycle and a scaling.  For ``1 + rad`` we take ``1 + b`` over a basis of the
    radical of the one-copy-per-object algebra adapted to the radical
    filtration, placed on first copies; conjugating by copy permutations
    reaches every other block.
    """
    p = v.p
    m = tuple(m)
    t = _total(v, m)
    if t == 0:
        return []
    eye = np.eye(t, dtype=np.int64)
    copies = _copies(v, m)
    by_obj = {}
    for i, off in copies:
        by_obj.setdefault(i, []).append(off)
    gens = []
    omega = _primitive_root(p)

    def perm(i, order):
        d = v.dims[i]
        offs = by_obj[i]
        g = eye.copy()
        for a in offs:
            g[a:a + d, a:a + d] = 0
        for src, dst in zip(offs, order):
            g[src:src + d, dst:dst + d] = np.eye(d, dtype=np.int64)
        return g

    for i, offs in by_obj.items():
        d = v.dims[i]
        if p > 2:
            g = eye.copy()
            g[offs[0]:offs[0] + d, offs[0]:offs[0] + d] *= omega
            gens.append(g % p)
        if len(offs) >= 2:
            g = eye.copy()
            g[offs[0]:offs[0] + d, offs[1]:offs[1] + d] = np.eye(d, dtype=np.int64)
            gens.append(g)
            gens.append(perm(i, [offs[1], offs[0]] + offs[2:]))
            if len(offs) >= 3:
                gens.append(perm(i, offs[1:] + offs[:1]))

    present = tuple(1 if c else 0 for c in m)
    small = _filtered_radical_basis(v, present)
    small_off = {i: off for i, off in _copies(v, present)}
    first = {i: offs[0] for i, offs in by_obj.items()}
    for r in small:
        g = eye.copy()
        for i, si in small_off.items():
            for j, sj in small_off.items():
                blk = r[si:si + v.dims[i], sj:sj + v.dims[j]]
                if blk.any():
                    g[first[i]:first[i] + v.dims[i], first[j]:first[j] + v.dims[j]] += blk
        gens.append(g % p)
    return gens


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    raise ArithmeticError("no primitive root")


def _prime_factors(n):
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


class _Codec:
    """Integer codes for arrow-matrix tuples: base-``p`` digits, first entry most significant."""

    def __init__(self, mq: MarkedQuiver, dims: DimAssignment):
        self.mq = mq
        self.p = mq.p
        t = dims.totals(mq)
        self.shapes = [(t[a.source], t[a.target]) for a in mq.arrows]
        self.sizes = [r * c for r, c in self.shapes]
        self.n = sum(self.sizes)
        self.count = self.p ** self.n
        self.weights = self.p ** np.arange(self.n - 1, -1, -1, dtype=np.int64)

    def decode(self, codes: np.ndarray, split: bool = True):
        codes = np.asarray(codes, dtype=np.int64)
        digits = (codes[:, None] // self.weights[None, :]) % self.p
        if not split:
            return digits
        out, off = [], 0
        for (r, cc), s in zip(self.shapes, self.sizes):
            out.append(digits[:, off:off + s].reshape(codes.size, r, cc))
            off += s
        return out

    def encode(self, mats: list) -> np.ndarray:
        if not mats:
            return np.zeros(0, dtype=np.int64)
        flat = np.concatenate([m.reshape(m.shape[0], -1) for m in mats], axis=1)
        return flat @ self.weights

    def representation(self, dims, code: int) -> Representation:
        mats = self.decode(np.array([code]))
        return Representation(self.mq, dims, {a.id: m[0] for a, m in zip(self.mq.arrows, mats)})


def _apply(mq, act, mats):
    x, g, gi = act
    p = mq.p
    out = []
    for a, m in zip(mq.arrows, mats):
        if a.source == x:
            m = np.matmul(gi, m) % p
        if a.target == x:
            m = np.matmul(m, g) % p
        out.append(m)
    return out


def _action_matrices(mq: MarkedQuiver, dims: DimAssignment, codec: "_Codec") -> list:
    """Each generator's action as an ``N x N`` matrix on the digit vector of a point.

    ``g`` at vertex ``x`` sends ``U(a)`` to ``g^-1 U(a)`` for arrows leaving
    ``x`` and to ``U(a) g`` for arrows entering it.
    """
    eye = np.eye(codec.n, dtype=np.int64)
    mats = []
    for x, m in zip(mq.vertices, dims.mult):
        for g in unit_group_generators(mq.marking[x], m):
            act = (x, g, invert(g, mq.p))
            parts, off = [], 0
            for (r, c), sz in zip(codec.shapes, codec.sizes):
                parts.append(eye[:, off:off + sz].reshape(codec.n, r, c))
                off += sz
            img = _apply(mq, act, parts)
            mats.append(np.concatenate([q.reshape(codec.n, -1) for q in img], axis=1))
    return mats


def orbit_minima(mq: MarkedQuiver, dims: DimAssignment, codec: _Codec | None = None) -> np.ndarray:
    """Lex-least code of every orbit of the automorphism group of ``dims``.

    Labels start as the identity and are repeatedly lowered along generator
    edges, with pointer jumping, until they are constant on every orbit.
    """
    codec = codec or _Codec(mq, dims)
    total = codec.count
    label = np.arange(total, dtype=np.int64)
    if total == 1 or codec.n == 0:
        return label
    acts = [a.astype(np.float64) for a in _action_matrices(mq, dims, codec)]
    if not acts:
        return label
    p = codec.p
    wts = codec.weights.astype(np.float64)
    cache_ok = total * len(acts) <= 4 * 10**7
    cache = {}

    def images(s, e):
        if (s, e) in cache:
            return cache[(s, e)]
        digits = codec.decode(np.arange(s, e, dtype=np.int64), split=False).astype(np.float64)
        out = [(np.fmod(digits @ a, p) @ wts).astype(np.int64) for a in acts]
        if cache_ok:
            cache[(s, e)] = out
        return out

    while True:
        changed = False
        for s in range(0, total, _CHUNK):
            e = min(total, s + _CHUNK)
            for img in images(s, e):
                a, b = label[s:e].copy(), label[img]
                lo = np.minimum(a, b)
                if np.any(lo != a) or np.any(lo != b):
                    changed = True
                    np.minimum.at(label, a, lo)
                    np.minimum.at(label, b, lo)
                    np.minimum.at(label, img, lo)
                    label[s:e] = np.minimum(label[s:e], lo)
        while True:
            jumped = label[label]
            if np.array_equal(jumped, label):
                break
            label = jumped
        if not changed:
            break
    return np.unique(label)


# ---------------------------------------------------------------- enumeration


def dim_assignments(mq: MarkedQuiver, bound: int, weights: dict | None = None,
                    connected_support: bool = True):
    """All nonzero assignments with (weighted) size ``<= bound``."""
    per_vertex = []
    for x in mq.vertices:
        v = mq.marking[x]
        w = [v.dims[i] if weights is None else weights.get((x, i), v.dims[i]) for i in range(len(v))]
        opts = []

        def rec(i, acc, used):
            if i == len(w):
                opts.append((tuple(acc), used))
                return
            c = 0
            while used + c * w[i] <= bound:
                rec(i + 1, acc + [c], used + c * w[i])
                if w[i] == 0:
                    break
                c += 1

        rec(0, [], 0)
        per_vertex.append(opts)
    out = []
    for combo in itertools.product(*per_vertex):
        if sum(s for _, s in combo) > bound:
            continue
        d = DimAssignment(tuple(m for m, _ in combo))
        if d.is_zero():
            continue
        if connected_support and not _support_connected(mq, d):
            continue
        out.append(d)
    return sorted(out, key=lambda d: (d.size(mq, weights), d))


def _support_connected(mq, d):
    t = d.totals(mq)
    sup = [x for x in mq.vertices if t[x] > 0]
    if len(sup) <= 1:
        return True
    seen, stack = {sup[0]}, [sup[0]]
    while stack:
        x = stack.pop()
        for a in mq.arrows:
            for u, v in ((a.source, a.target), (a.target, a.source)):
                if u == x and t[v] > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
    return len(seen) == len(sup)


def indecomposables_at(mq: MarkedQuiver, dims, limit: int = SEARCH_LIMIT) -> list:
    """Pairwise non-isomorphic indecomposables with exactly this dimension assignment."""
    dims = DimAssignment.of(mq, dims)
    if dims.is_zero():
        return []
    codec = _Codec(mq, dims)
    if codec.count > limit:
        raise SearchSpaceTooLarge(f"p^{codec.n} points at dims {dims.describe(mq)}", dims)
    try:
        minima = orbit_minima(mq, dims, codec)
    except Unsupported:
        return _indecomposables_pairwise(mq, dims, codec)
    out = []
    for c in minima:
        u = codec.representation(dims, int(c))
        if is_indecomposable(u):
            out.append(u)
    return out


def _indecomposables_pairwise(mq, dims, codec):
    out = []
    for c in range(codec.count):
        u = codec.representation(dims, c)
        if is_indecomposable(u) and not any(are_isomorphic(u, w) for w in out):
            out.append(u)
    return out


def enumerate_indecomposables(mq: MarkedQuiver, max_total_dim: int, weights: dict | None = None,
                              limit: int = SEARCH_LIMIT) -> list:
    """All indecomposables of (weighted) size ``<= max_total_dim`` up to isomorphism.

    Sorted by total dimension, then dimension assignment, then lexicographic
    matrix order.
    """
    out = []
    for d in dim_assignments(mq, max_total_dim, weights):
        out.extend(indecomposables_at(mq, d, limit))
    return sorted(out, key=lambda u: u.key())


def count_indecomposables_by_dim(mq: MarkedQuiver, dims, fields, limit: int = SEARCH_LIMIT) -> dict:
    from .exactlin import GF
    out = {}
    for p in fields:
        m = mq.over(GF(p))
        d = DimAssignment.of(m, dims if not isinstance(dims, DimAssignment) else dims)
        out[p] = len(indecomposables_at(m, d, limit))
    return out


# ---------------------------------------------------------------- text format


def format_representation(u: Representation) -> str:
    lines = ["dims { " + " ; ".join(
        f"{x}: " + " ".join(map(str, m)) for x, m in zip(u.mq.vertices, u.dims.mult)) + " }"]
    for a in u.mq.arrows:
        m = u.maps[a.id]
        lines.append(f"arrow {a.id} {m.shape[0]}x{m.shape[1]}")
        for row in m:
            lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def parse_representation(mq: MarkedQuiver, text: str) -> Representation:
    from .errors import ParseError
    lines = [(i + 1, l.strip()) for i, l in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l and not l.startswith("#")]
    if not lines or not lines[0][1].startswith("dims"):
        raise ParseError("expected 'dims { ... }'", lines[0][0] if lines else 1, 1, None)
    n0, head = lines[0]
    body = head[head.find("{") + 1: head.rfind("}")]
    spec = {}
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ParseError("expected 'vertex: multiplicities'", n0, 1, part)
        v, ms = part.split(":", 1)
        try:
            spec[v.strip()] = tuple(int(t) for t in ms.split())
        except ValueError as exc:
            raise ParseError("multiplicities must be integers", n0, 1, ms.strip()) from exc
    dims = DimAssignment.of(mq, spec)
    maps = {}
    i = 1
    while i < len(lines):
        n, l = lines[i]
        toks = l.split()
        if len(toks) != 3 or toks[0] != "arrow" or "x" not in toks[2]:
            raise ParseError("expected 'arrow ID RxC'", n, 1, l)
        r, c = (int(t) for t in toks[2].split("x"))
        rows = []
        body_rows = r if c else 0
        for j in range(body_rows):
            if i + 1 + j >= len(lines):
                raise ParseError("matrix ended early", n, 1, None)
            rows.append([int(t) for t in lines[i + 1 + j][1].split()])
            if len(rows[-1]) != c:
                raise ParseError(f"row should have {c} entries", lines[i + 1 + j][0], 1, lines[i + 1 + j][1])
        maps[toks[1]] = np.array(rows, dtype=np.int64).reshape(r, c)
        i += 1 + body_rows
    try:
        return Representation(mq, dims, maps)
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from exc
