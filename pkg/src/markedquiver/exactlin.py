"""Dense linear algebra over GF(p).

Matrices are plain ``numpy`` int64 arrays holding residues in ``[0, p)``.
Vectors are rows and act on the left: a map ``A -> B`` is a
``dim A x dim B`` matrix, and "first f, then g" is the product ``f @ g``.
Empty shapes (``0 x n``, ``n x 0``) are legal everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotInvertible(ArithmeticError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class GF:
    """The prime field of order ``p``."""

    p: int

    def __post_init__(self):
        if not (2 <= self.p <= 1 << 16) or not _is_prime(self.p):
            raise ValueError(f"p must be a prime in [2, 65536], got {self.p}")

    # construction

    def matrix(self, rows, shape=None) -> np.ndarray:
        a = np.array(rows, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        elif a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        return a % self.p

    def zeros(self, r: int, c: int) -> np.ndarray:
        return np.zeros((r, c), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def inv_scalar(self, a: int) -> int:
        return pow(int(a) % self.p, -1, self.p)

    # arithmetic

    def mul(self, *ms: np.ndarray) -> np.ndarray:
        out = ms[0]
        for m in ms[1:]:
            out = (out @ m) % self.p
        return out

    def rref(self, m: np.ndarray):
        return rref(m, self.p)

    def rank(self, m: np.ndarray) -> int:
        return rref(m, self.p)[1]

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        return solve_nullspace(m, self.p)

    def inv(self, m: np.ndarray) -> np.ndarray:
        return invert(m, self.p)


def rref(m: np.ndarray, p: int):
    """Reduced row echelon form. Returns ``(R, rank, pivot_columns)``."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, r, pivots


def rank(m: np.ndarray, p: int) -> int:
    return rref(m, p)[1]


def right_nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : m @ x = 0}``."""
    rows, cols = m.shape
    r, rk, piv = rref(m, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for j, pc in enumerate(piv):
            basis[i, pc] = (-r[j, f]) % p
    return basis


def solve_nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of the left nullspace ``{v : v @ m = 0}``."""
    m = np.asarray(m, dtype=np.int64)
    return right_nullspace(m.T, p)


def invert(m: np.ndarray, p: int) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    n, c = m.shape
    if n != c:
        raise NotInvertible(f"non-square {n}x{c} matrix")
    if n == 0:
        return m.copy()
    aug = np.concatenate([m % p, np.eye(n, dtype=np.int64)], axis=1)
    r, rk, piv = rref(aug, p)
    if rk < n or piv[n - 1] != n - 1:
        raise NotInvertible("singular matrix")
    return r[:, n:].copy()


def row_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Nonzero rows of the rref: a canonical basis of the row space."""
    r, rk, _ = rref(m, p)
    return r[:rk]


def in_row_span(v: np.ndarray, basis_rref: np.ndarray, pivots, p: int) -> bool:
    """Membership test against a basis already in rref with known pivots."""
    v = np.array(v, dtype=np.int64) % p
    for row, c in zip(basis_rref, pivots):
        if v[c]:
            v = (v - v[c] * row) % p
    return not v.any()


def express_in_basis(v: np.ndarray, basis: np.ndarray, p: int):
    """Coefficients ``c`` with ``c @ basis == v``, or ``None``."""
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    if k == 0:
        return np.zeros(0, dtype=np.int64) if not np.any(v) else None
    aug = np.concatenate([basis.T, np.asarray(v, dtype=np.int64).reshape(-1, 1)], axis=1)
    r, rk, piv = rref(aug, p)
    if piv and piv[-1] == k:
        return None
    c = np.zeros(k, dtype=np.int64)
    for j, pc in enumerate(piv):
        c[pc] = r[j, k]
    return c


def batch_rank(stack: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices, shape ``(B, n, m)``, by vectorised elimination."""
    a = np.array(stack, dtype=np.int64) % p
    b, n, m = a.shape
    ranks = np.zeros(b, dtype=np.int64)
    if b == 0 or n == 0 or m == 0:
        return ranks
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    idx = np.arange(b)
    for c in range(m):
        # rows >= current rank that carry a nonzero in column c
        row_ids = np.arange(n)[None, :]
        cand = (a[:, :, c] != 0) & (row_ids >= ranks[:, None])
        has = cand.any(axis=1) & (ranks < n)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = idx[has]
        pr = piv[has]
        rr = ranks[has]
        rowp = a[sel, pr].copy()
        rowr = a[sel, rr].copy()
        a[sel, rr] = rowp
        a[sel, pr] = rowr
        prow = (a[sel, rr] * inv[a[sel, rr, c]][:, None]) % p
        a[sel, rr] = prow
        factors = a[sel, :, c].copy()
        factors[np.arange(sel.size), rr] = 0
        a[sel] = (a[sel] - factors[:, :, None] * prow[:, None, :]) % p
        ranks[has] += 1
    return ranks


def batch_matpow(stack: np.ndarray, e: int, p: int) -> np.ndarray:
    b, n, _ = stack.shape
    result = np.broadcast_to(np.eye(n, dtype=np.int64), (b, n, n)).copy()
    base = stack % p
    while e:
        if e & 1:
            result = np.matmul(result, base) % p
        e >>= 1
        if e:
            base = np.matmul(base, base) % p
    return result


def block_diag(blocks) -> np.ndarray:
    r = sum(b.shape[0] for b in blocks)
    c = sum(b.shape[1] for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out
