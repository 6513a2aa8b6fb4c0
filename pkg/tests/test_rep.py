import itertools
import random

import numpy as np
import pytest

from markedquiver import GF
from markedquiver.exactlin import invert, rank
from markedquiver.rep import (DimAssignment, Representation, are_isomorphic, decompose, direct_sum,
                              dim_assignments, end_algebra, enumerate_indecomposables, format_representation,
                              hom_space, indecomposables_at, is_indecomposable, is_morphism, isomorphism,
                              parse_representation, simple_representation, structured_block_basis,
                              summand_multiplicities, summands_isomorphic, unit_group_generators)

from conftest import EX6, K, K2, N2, marked
from oracle import brute_indecomposable_count, rank_mod, structured_maps

KRON = (["x", "y"], [("a", "x", "y"), ("b", "x", "y")], {"x": K, "y": K})
A2 = (["x", "y"], [("a", "x", "y")], {"x": K, "y": K})
CHAIN = (["x", "y"], [("a", "x", "y")], {"x": K2, "y": K})
NIL_OUT = (["x", "y"], [("a", "x", "y")], {"x": N2, "y": K})
NIL_IN = (["x", "y"], [("a", "x", "y")], {"x": K, "y": N2})
LOOP = (["x"], [("a", "x", "x")], {"x": K})
HALF = (["w", "z"], [("b", "w", "z")], {"w": K, "z": EX6})
D4 = (["c", "p", "q", "r"], [("1", "p", "c"), ("2", "q", "c"), ("3", "r", "c")],
      {"c": K, "p": K, "q": K, "r": K})


def build(shape, p):
    return marked(*shape, GF(p))


def random_auto(v, m, rng, p):
    basis = structured_block_basis(v, m, m)
    t = basis.shape[1]
    while True:
        c = np.array([rng.randrange(p) for _ in range(basis.shape[0])], dtype=np.int64)
        g = np.tensordot(c, basis, axes=(0, 0)) % p if basis.shape[0] else np.eye(t, dtype=np.int64)
        if rank(g, p) == t:
            return g


def conjugate(u, rng):
    """An isomorphic copy of ``u`` under a random structured automorphism."""
    mq, p = u.mq, u.p
    g = {x: random_auto(mq.marking[x], u.dims.at(mq, x), rng, p) for x in mq.vertices}
    maps = {a.id: (invert(g[a.source], p) @ u.maps[a.id] @ g[a.target]) % p for a in mq.arrows}
    return Representation(mq, u.dims, maps)


def random_rep(mq, dims, rng):
    t = DimAssignment.of(mq, dims).totals(mq)
    maps = {a.id: np.array([[rng.randrange(mq.p) for _ in range(t[a.target])] for _ in range(t[a.source])],
                           dtype=np.int64).reshape(t[a.source], t[a.target]) for a in mq.arrows}
    return Representation(mq, dims, maps)


# ---------------------------------------------------------------- counts against the oracle


ORACLE_CASES = [
    (KRON, {"x": (1,), "y": (1,)}), (KRON, {"x": (1,), "y": (2,)}), (KRON, {"x": (2,), "y": (1,)}),
    (A2, {"x": (2,), "y": (1,)}), (CHAIN, {"x": (1, 1), "y": (1,)}), (CHAIN, {"x": (0, 1), "y": (1,)}),
    (CHAIN, {"x": (1, 0), "y": (2,)}), (NIL_OUT, {"x": (1,), "y": (1,)}), (NIL_OUT, {"x": (1,), "y": (2,)}),
    (NIL_IN, {"x": (2,), "y": (1,)}), (NIL_IN, {"x": (1,), "y": (1,)}), (LOOP, {"x": (1,)}), (LOOP, {"x": (2,)}),
    (HALF, {"w": (1,), "z": (1, 0, 0, 0)}), (HALF, {"w": (2,), "z": (1, 0, 0, 0)}),
    (HALF, {"w": (1,), "z": (0, 0, 1, 1)}),
]


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("shape,dims", ORACLE_CASES)
def test_counts_match_brute_force(shape, dims, p):
    mq = build(shape, p)
    got = len(indecomposables_at(mq, DimAssignment.of(mq, dims)))
    assert got == brute_indecomposable_count(mq, dims)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kronecker_one_one_has_p_plus_one_classes(p):
    mq = build(KRON, p)
    assert len(indecomposables_at(mq, DimAssignment.of(mq, {"x": 1, "y": 1}))) == p + 1


def test_dynkin_counts_are_positive_roots():
    # positive roots: A_2 has 3, D_4 has 12
    assert len(enumerate_indecomposables(build(A2, 2), 4)) == 3
    assert len(enumerate_indecomposables(build(D4, 2), 6)) == 12


def test_d_to_c_problem_has_five_classes():
    assert len(enumerate_indecomposables(build((["d", "c"], [("beta", "d", "c")], {"d": K, "c": K2}), 2), 3)) == 5


# ---------------------------------------------------------------- morphisms


SHAPES = [KRON, A2, CHAIN, NIL_OUT, NIL_IN, LOOP, HALF, D4]


def test_hom_spaces_commute_on_random_instances():
    rng = random.Random(11)
    for _ in range(200):
        shape = rng.choice(SHAPES)
        p = rng.choice([2, 3])
        mq = build(shape, p)
        dims = [{x: tuple(rng.randint(0, 2 if len(mq.marking[x]) == 1 else 1) for _ in mq.marking[x].labels)
                 for x in mq.vertices} for _ in range(2)]
        u, w = random_rep(mq, dims[0], rng), random_rep(mq, dims[1], rng)
        hs = hom_space(u, w)
        for f in hs.basis:
            assert is_morphism(u, w, f)
        if len(hs):
            flat = np.stack([np.concatenate([f[x].ravel() for x in mq.vertices]) for f in hs.basis])
            assert rank(flat, p) == len(hs)


def test_hom_dimension_matches_enumeration():
    rng = random.Random(3)
    for shape in (KRON, CHAIN, NIL_IN, HALF):
        mq = build(shape, 2)
        for _ in range(6):
            dims = {x: tuple(rng.randint(0, 1) for _ in mq.marking[x].labels) for x in mq.vertices}
            u, w = random_rep(mq, dims, rng), random_rep(mq, dims, rng)
            choices = [structured_maps(mq.marking[x], dims[x], dims[x], 2) for x in mq.vertices]
            count = sum(1 for combo in itertools.product(*choices)
                        if is_morphism(u, w, dict(zip(mq.vertices, combo))))
            assert count == 2 ** len(hom_space(u, w))


# ---------------------------------------------------------------- isomorphism


@pytest.mark.parametrize("shape", [KRON, CHAIN, NIL_IN, HALF])
def test_isomorphism_is_an_equivalence(shape):
    rng = random.Random(7)
    mq = build(shape, 3 if shape is KRON else 2)
    ind = enumerate_indecomposables(mq, 3)
    pool = ind + [conjugate(u, rng) for u in ind[:6]]
    rel = [[are_isomorphic(a, b) for b in pool] for a in pool]
    n = len(pool)
    for i in range(n):
        assert rel[i][i]
        for j in range(n):
            assert rel[i][j] == rel[j][i]
            for k in range(n):
                if rel[i][j] and rel[j][k]:
                    assert rel[i][k]
    # enumerated classes are pairwise distinct
    assert not any(rel[i][j] for i in range(len(ind)) for j in range(len(ind)) if i != j)


def test_isomorphism_witness_is_invertible():
    rng = random.Random(2)
    mq = build(KRON, 3)
    for u in enumerate_indecomposables(mq, 3):
        w = conjugate(u, rng)
        res = isomorphism(u, w)
        assert res.isomorphic
        f = res.witness
        assert is_morphism(u, w, f)
        assert all(rank_mod(f[x], 3) == u.total(x) for x in mq.vertices)


# ---------------------------------------------------------------- decomposition


def test_krull_schmidt_on_random_sums():
    rng = random.Random(19)
    pools = {}
    for shape in (KRON, CHAIN, NIL_IN, A2):
        for p in (2, 3):
            mq = build(shape, p)
            pools[(id(shape), p)] = (mq, enumerate_indecomposables(mq, 3))
    keys = sorted(pools)
    for _ in range(100):
        mq, ind = pools[rng.choice(keys)]
        parts = [rng.randrange(len(ind)) for _ in range(rng.randint(2, 3))]
        s = ind[parts[0]]
        for j in parts[1:]:
            s = direct_sum(s, ind[j])
        s = conjugate(s, rng)
        want = [parts.count(i) for i in range(len(ind))]
        assert summand_multiplicities(s, ind) == want
        summands = decompose(s)
        assert len(summands) == len(parts)
        assert sum(t.dim for t in summands) == s.total_dim


def test_summands_isomorphic_pairing():
    mq = build(KRON, 2)
    ind = enumerate_indecomposables(mq, 2)
    u = direct_sum(ind[0], ind[0])
    a, b = decompose(u)
    assert summands_isomorphic(a, b)
    v = direct_sum(ind[0], ind[1])
    a, b = decompose(v)
    assert not summands_isomorphic(a, b)


def test_indecomposability_of_simples_and_sums():
    mq = build(CHAIN, 2)
    s = simple_representation(mq, "x", "o1")
    assert is_indecomposable(s)
    assert not is_indecomposable(direct_sum(s, s))
    assert end_algebra(s).basis.shape[0] == 1


# ---------------------------------------------------------------- group generators


@pytest.mark.parametrize("factory,m,p", [(K, (2,), 2), (K, (3,), 2), (K, (2,), 3), (K2, (2, 1), 2),
                                         (N2, (2,), 2), (N2, (1,), 3), (EX6, (1, 1, 0, 1), 2)])
def test_unit_group_generators_generate(factory, m, p):
    v = factory(GF(p))
    gens = unit_group_generators(v, m)
    t = sum(c * d for c, d in zip(m, v.dims))
    want = sum(1 for g in structured_maps(v, m, m, p) if rank_mod(g, p) == t)
    seen = {np.eye(t, dtype=np.int64).tobytes()}
    frontier = [np.eye(t, dtype=np.int64)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = (a @ g) % p
                key = b.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(b)
        frontier = nxt
    assert len(seen) == want


# ---------------------------------------------------------------- misc


def test_dim_assignments_respect_bound_and_weights():
    mq = build(CHAIN, 2)
    ds = dim_assignments(mq, 2)
    assert all(0 < d.size(mq) <= 2 for d in ds)
    heavy = dim_assignments(mq, 2, weights={("x", 0): 2})
    assert all(d.size(mq, {("x", 0): 2}) <= 2 for d in heavy)
    assert len(heavy) < len(ds)


def test_text_round_trip():
    rng = random.Random(1)
    mq = build(HALF, 2)
    for u in enumerate_indecomposables(mq, 3):
        assert parse_representation(mq, format_representation(u)) == u
    u = conjugate(enumerate_indecomposables(build(KRON, 3), 3)[-1], rng)
    assert parse_representation(u.mq, format_representation(u)) == u
