import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markedquiver.exactlin import (GF, NotInvertible, batch_rank, express_in_basis, invert, rank, rref,
                                   solve_nullspace)
from oracle import rank_mod


def matrices(max_r=4, max_c=4):
    return st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, max_r), st.integers(1, max_c)).flatmap(
        lambda t: st.tuples(st.just(t[0]), st.lists(st.integers(0, t[0] - 1), min_size=t[1] * t[2],
                                                     max_size=t[1] * t[2]).map(
            lambda xs, r=t[1], c=t[2]: np.array(xs, dtype=np.int64).reshape(r, c))))


@given(matrices())
def test_rank_matches_span_size(data):
    p, m = data
    # the row space has p**rank elements
    rows = {tuple(((np.array(c) @ m) % p).tolist()) for c in itertools.product(range(p), repeat=m.shape[0])}
    assert p ** rank(m, p) == len(rows)
    assert rank(m, p) == rank_mod(m, p)


@given(matrices())
def test_rref_is_reduced(data):
    p, m = data
    r, rk, piv = rref(m, p)
    assert len(piv) == rk
    for i, c in enumerate(piv):
        col = r[:, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1
    assert not r[rk:].any()


@given(matrices())
def test_left_nullspace(data):
    p, m = data
    ns = solve_nullspace(m, p)
    assert ns.shape[0] == m.shape[0] - rank(m, p)
    assert not ((ns @ m) % p).any()


@given(matrices(4, 4))
def test_invert_or_singular(data):
    p, m = data
    if m.shape[0] != m.shape[1]:
        with pytest.raises(NotInvertible):
            invert(m, p)
        return
    if rank_mod(m, p) < m.shape[0]:
        with pytest.raises(NotInvertible):
            invert(m, p)
    else:
        inv = invert(m, p)
        assert np.array_equal((m @ inv) % p, np.eye(m.shape[0], dtype=np.int64))


@settings(max_examples=30)
@given(matrices(3, 3))
def test_batch_rank_agrees(data):
    p, m = data
    stack = np.stack([m, (2 * m) % p, np.zeros_like(m)])
    assert batch_rank(stack, p).tolist() == [rank_mod(x, p) for x in stack]


def test_express_in_basis():
    p = 3
    basis = np.array([[1, 0, 2], [0, 1, 1]])
    v = (2 * basis[0] + basis[1]) % p
    assert express_in_basis(v, basis, p).tolist() == [2, 1]
    assert express_in_basis(np.array([0, 0, 1]), basis, p) is None


def test_gf_rejects_composite():
    with pytest.raises(ValueError):
        GF(4)
    assert GF(7).inv_scalar(3) == 5
