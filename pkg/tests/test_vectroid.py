import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markedquiver import GF, HalflinearSpec, Poset, Vectroid
from markedquiver.errors import NotHalflinear, SpecNotHalflinear
from markedquiver.vectroid import (almost_equivalent, disjoint_union, halflinear_spec_of, kind_of,
                                   make_halflinear, make_linear, make_nilpotent, make_poset_linearization,
                                   minus, opposite, poset_isomorphism, realize_structure, structure_poset,
                                   structure_posets_isomorphic, validate_spectroid, vectroid_dim,
                                   vectroid_rank, vectroids_isomorphic)

from conftest import ex6_poset, ex6_vectroid


@st.composite
def posets(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    elems = [f"e{i}" for i in range(n)]
    # relations only from lower to higher index keep the order acyclic
    pairs = [(a, b) for i, a in enumerate(elems) for b in elems[i + 1:]]
    rel = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return Poset.from_relations(elems, rel)


# ---------------------------------------------------------------- constructors


@pytest.mark.parametrize("p", [2, 3])
def test_constructors_validate(p):
    F = GF(p)
    vs = [make_linear(1, F), make_linear(3, F), make_nilpotent(2, F), make_nilpotent(3, F),
          make_poset_linearization(Poset.from_relations(["a", "b", "c"], [("a", "b")]), F),
          ex6_vectroid(F), disjoint_union(make_nilpotent(2, F), make_linear(1, F)),
          opposite(ex6_vectroid(F))]
    for v in vs:
        assert validate_spectroid(v).ok, v


@settings(max_examples=25, deadline=None)
@given(posets())
def test_poset_linearization_validates_and_recovers_poset(P):
    v = make_poset_linearization(P, GF(2))
    assert validate_spectroid(v).ok
    assert poset_isomorphism(structure_poset(v).poset, P) is not None


def test_seeded_violations_rejected():
    F = GF(2)
    e11 = [[1, 0], [0, 0]]
    nonlocal_end = Vectroid(F, [("A", 2)], {(0, 0): [np.eye(2, dtype=int), e11]})
    iso_objects = Vectroid(F, [("A", 1), ("B", 1)], {(0, 0): [[[1]]], (1, 1): [[[1]]],
                                                     (0, 1): [[[1]]], (1, 0): [[[1]]]})
    open_composition = Vectroid(F, [("A", 1), ("B", 1), ("C", 1)],
                                {(0, 0): [[[1]]], (1, 1): [[[1]]], (2, 2): [[[1]]],
                                 (0, 1): [[[1]]], (1, 2): [[[1]]]})
    reasons = []
    for v in (nonlocal_end, iso_objects, open_composition):
        rep = validate_spectroid(v)
        assert not rep.ok
        reasons.append({c for c, _ in rep.failures})
    assert "End not local" in reasons[0]
    assert "objects isomorphic" in reasons[1]
    assert "composition leaves the span" in reasons[2]


def test_missing_identity_rejected():
    v = Vectroid(GF(3), [("A", 1)], {})
    assert "identity not in End" in {c for c, _ in validate_spectroid(v).failures}


def test_bad_halflinear_spec():
    P = Poset.from_relations(["a", "b", "c"], [])
    with pytest.raises(SpecNotHalflinear):
        make_halflinear(HalflinearSpec(P, (("a", "b"),)), GF(2))


# ---------------------------------------------------------------- invariants


def test_dim_and_rank():
    F = GF(2)
    assert (vectroid_dim(make_linear(3, F)), vectroid_rank(make_linear(3, F))) == (1, 1)
    assert (vectroid_dim(make_nilpotent(2, F)), vectroid_rank(make_nilpotent(2, F))) == (2, 1)
    assert vectroid_rank(make_nilpotent(3, F)) == 2
    assert vectroid_rank(make_poset_linearization(Poset.from_relations(["p", "q"]), F)) == 0
    assert vectroid_dim(ex6_vectroid(F)) == 2


def test_kinds():
    F = GF(2)
    assert kind_of(make_linear(1, F)) == "unmarked"
    assert kind_of(make_linear(2, F)) == "linear"
    assert kind_of(make_nilpotent(2, F)) == "halflinear"
    assert kind_of(ex6_vectroid(F)) == "halflinear"
    assert kind_of(make_nilpotent(3, F)) == "other"  # dimension 3
    # the point of k is incomparable with both points of k^2
    assert kind_of(disjoint_union(make_nilpotent(2, F), make_linear(1, F))) == "other"


def test_nilpotent_structure_poset_is_a_big_chain():
    sp = structure_poset(make_nilpotent(2, GF(3)))
    assert len(sp.poset.elements) == 2 and sp.poset.is_chain() and len(sp.big) == 2


def test_halflinear_fixture_structure_poset():
    sp = structure_poset(ex6_vectroid(GF(2)))
    colours = {e: e in sp.big for e in sp.poset.elements}
    want = {e: e in ("a", "a*") for e in ex6_poset().elements}
    assert poset_isomorphism(sp.poset, ex6_poset(), colours, want) is not None
    assert len(sp.big) == 2


@pytest.mark.parametrize("p", [2, 3])
def test_structure_poset_round_trip(p):
    F = GF(p)
    for v in (make_linear(3, F), make_nilpotent(2, F), ex6_vectroid(F)):
        sp = structure_poset(v)
        back = realize_structure(sp, F)
        assert structure_posets_isomorphic(sp, structure_poset(back)) is not None
        assert vectroids_isomorphic(v, back)


def test_halflinear_spec_round_trip():
    F = GF(2)
    v = ex6_vectroid(F)
    again = make_halflinear(halflinear_spec_of(v), F)
    assert vectroids_isomorphic(v, again)


def test_opposite_is_an_involution():
    F = GF(3)
    v = ex6_vectroid(F)
    vv = opposite(opposite(v))
    for i, j in itertools.product(range(len(v)), repeat=2):
        assert np.array_equal(v.hom(i, j), vv.hom(i, j))
    assert vv.recipe == v.recipe


def test_linear_isomorphism_classes():
    F = GF(2)
    assert vectroids_isomorphic(make_linear(3, F), make_poset_linearization(
        Poset.from_relations(["x", "y", "z"], [("x", "y"), ("y", "z")]), F))
    assert not vectroids_isomorphic(make_linear(3, F), make_linear(2, F))


def test_minus_drops_fully_comparable_lines():
    F = GF(2)
    v = ex6_vectroid(F)
    # b is comparable with every point; c and d are not comparable with each other
    assert sorted(minus(v).labels) == ["A", "C", "D"]
    assert almost_equivalent(v, v)
    with pytest.raises(NotHalflinear):
        minus(make_linear(2, F))


def test_disjoint_union_relabels_clashes():
    F = GF(2)
    u = disjoint_union(make_linear(2, F), make_linear(2, F))
    assert len(set(u.labels)) == 4
    assert u.hom_dim(0, 2) == 0 and u.hom_dim(2, 0) == 0
