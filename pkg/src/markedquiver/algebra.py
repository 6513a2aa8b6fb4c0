"""Finite-dimensional matrix algebras over GF(p): locality and idempotent splitting.

An algebra is given by a stack of square basis matrices ``(k, n, n)``.  A
corner ``P A P`` for an idempotent ``P`` is handled by passing ``proj``;
"invertible" then means invertible on the image of ``P``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exactlin import batch_matpow, batch_rank, invert, rank, row_basis, solve_nullspace

EXHAUSTIVE_LIMIT = 10**6
_CHUNK = 4096


@dataclass
class LocalityResult:
    local: bool
    witness: np.ndarray | None  # an element neither nilpotent nor invertible
    exhaustive: bool


def _classify_batch(stack, p, full_rank):
    """0 = nilpotent, 1 = invertible (on the corner), 2 = neither."""
    n = stack.shape[1]
    powered = batch_matpow(stack, max(n, 1), p)
    r = batch_rank(powered, p)
    out = np.full(len(stack), 2, dtype=np.int64)
    out[r == 0] = 0
    out[r == full_rank] = 1
    return out


def coefficient_digits(count: int, k: int, p: int, start: int = 0) -> np.ndarray:
    codes = np.arange(start, start + count, dtype=np.int64)
    digits = np.zeros((count, k), dtype=np.int64)
    for i in range(k - 1, -1, -1):
        digits[:, i] = codes % p
        codes //= p
    return digits


def independent_basis(stack: np.ndarray, p: int) -> np.ndarray:
    k = stack.shape[0]
    if k == 0:
        return stack
    shape = stack.shape[1:]
    flat = row_basis(stack.reshape(k, -1), p)
    return flat.reshape((flat.shape[0],) + shape)


def find_nonlocal_witness(basis: np.ndarray, p: int, proj: np.ndarray | None = None,
                          limit: int = EXHAUSTIVE_LIMIT) -> LocalityResult:
    """Search for an element that is neither nilpotent nor invertible.

    Cheap candidates are tried first (basis elements, their shifts by
    scalars, pairwise sums).  If none splits, every element is enumerated
    when ``p**k <= limit``; otherwise the answer is heuristic.
    """
    k, n, _ = basis.shape
    unit = np.eye(n, dtype=np.int64) if proj is None else proj
    full = n if proj is None else rank(proj, p)
    if full == 0:
        return LocalityResult(False, None, True)
    if k == 0:
        return LocalityResult(False, None, True)

    cands = [b for b in basis]
    for b in basis:
        for lam in range(1, p):
            cands.append((b - lam * unit) % p)
    for i, j in itertools.combinations(range(k), 2):
        cands.append((basis[i] + basis[j]) % p)
    stack = np.array(cands, dtype=np.int64)
    for s in range(0, len(stack), _CHUNK):
        chunk = stack[s:s + _CHUNK]
        kinds = _classify_batch(chunk, p, full)
        hit = np.nonzero(kinds == 2)[0]
        if hit.size:
            return LocalityResult(False, chunk[hit[0]], True)

    total = p**k
    if total > limit:
        return LocalityResult(True, None, False)
    for start in range(0, total, _CHUNK):
        cnt = min(_CHUNK, total - start)
        coeffs = coefficient_digits(cnt, k, p, start)
        elems = np.tensordot(coeffs, basis, axes=(1, 0)) % p
        kinds = _classify_batch(elems, p, full)
        hit = np.nonzero(kinds == 2)[0]
        if hit.size:
            return LocalityResult(False, elems[hit[0]], True)
    return LocalityResult(True, None, True)


def fitting_projection(e: np.ndarray, p: int) -> np.ndarray:
    """Idempotent onto ``im e^N`` along ``ker e^N`` (row-vector convention)."""
    n = e.shape[0]
    m = np.eye(n, dtype=np.int64)
    base = e % p
    e_pow = n
    while e_pow:
        if e_pow & 1:
            m = (m @ base) % p
        e_pow >>= 1
        if e_pow:
            base = (base @ base) % p
    im = row_basis(m, p)
    ker = solve_nullspace(m, p)
    t = np.concatenate([im, ker], axis=0)
    d = np.zeros((n, n), dtype=np.int64)
    d[: im.shape[0], : im.shape[0]] = np.eye(im.shape[0], dtype=np.int64)
    return (invert(t, p) @ d @ t) % p


def corner_basis(basis: np.ndarray, proj: np.ndarray, p: int) -> np.ndarray:
    corner = np.matmul(np.matmul(proj[None], basis), proj[None]) % p
    return independent_basis(corner, p)


@dataclass
class Decomposition:
    idempotents: list
    exhaustive: bool


def primitive_idempotents(basis: np.ndarray, p: int, limit: int = EXHAUSTIVE_LIMIT) -> Decomposition:
    """Split the identity of the algebra into orthogonal primitive idempotents."""
    n = basis.shape[1]
    todo = [np.eye(n, dtype=np.int64)]
    done = []
    exhaustive = True
    while todo:
        proj = todo.pop()
        cb = corner_basis(basis, proj, p)
        res = find_nonlocal_witness(cb, p, proj=proj, limit=limit)
        if res.witness is None:
            exhaustive &= res.exhaustive
            done.append(proj)
            continue
        pi = fitting_projection(res.witness, p)
        rest = (proj - pi) % p
        todo.append(rest)
        todo.append(pi)
    return Decomposition(done, exhaustive)
