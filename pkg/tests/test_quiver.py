import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markedquiver import GF, MarkedQuiver, Quiver
from markedquiver.errors import NotHalflinearMarking, ValidationError
from markedquiver.quiver import (Graph, augmented_graph, canonical_form, classify_diagram, degree,
                                 graphs_isomorphic, underlying_graph)
from markedquiver.vectroid import make_linear, make_nilpotent

from conftest import EX6, K, K2, K3, N2, marked
from graphs import oracle, shapes


def test_quiver_validation():
    with pytest.raises(ValidationError):
        Quiver(["a", "a"], [])
    with pytest.raises(ValidationError):
        Quiver(["a"], [("x", "a", "b")])
    with pytest.raises(ValidationError):
        Quiver(["a", "b"], [("x", "a", "b"), ("x", "b", "a")])


def test_marked_quiver_needs_arrows_and_connectivity(F2):
    k = make_linear(1, F2)
    with pytest.raises(ValidationError):
        MarkedQuiver(Quiver(["a"], []), {"a": k})
    with pytest.raises(ValidationError):
        MarkedQuiver(Quiver(["a", "b", "c"], [("x", "a", "b")]), {"a": k, "b": k, "c": k})
    with pytest.raises(ValidationError):
        MarkedQuiver(Quiver(["a", "b"], [("x", "a", "b")]), {"a": k, "b": make_linear(1, GF(3))})


def test_degree_counts_loops_twice(F2):
    q = Quiver(["a", "b"], [("x", "a", "b"), ("l", "a", "a")])
    assert degree(q, "a") == 3 and degree(q, "b") == 1
    with pytest.raises(KeyError):
        degree(q, "zz")


@pytest.mark.parametrize("name,n,edges,ext", shapes())
def test_every_shape_is_recognised(name, n, edges, ext):
    c = classify_diagram(Graph(tuple(range(n)), tuple(edges)))
    assert (c.kind, c.n, c.extended) == (name[0], name[1], ext)


def test_some_non_dynkin_shapes():
    for n, edges in [(6, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]),  # five legs
                     (3, [(0, 1), (0, 1), (1, 2)]),  # double edge plus a tail
                     (2, [(0, 1), (0, 0)]),  # a loop with a tail
                     (9, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (4, 8)])]:  # T(2,4,5)-ish
        assert classify_diagram(Graph(tuple(range(n)), tuple(edges))).kind == "NotDynkin"
        assert oracle(n, edges)[0] == "NotDynkin" if n <= 8 else True


def test_augmented_graph_examples(F2):
    # the Gelfand quiver: a halflinear centre gets two leaves, giving extended D_4
    mq = marked(["x", "b", "y"], [("s", "x", "b"), ("t", "y", "b")], {"x": K, "b": N2, "y": K}, F2)
    c = classify_diagram(augmented_graph(mq))
    assert str(c) == "D̃_4"
    mq = marked(["x", "y"], [("a", "x", "y")], {"x": K3, "y": K2}, F2)
    assert str(classify_diagram(augmented_graph(mq))) == "A_5"


def test_augmented_graph_rejects_other_markings(F2):
    from markedquiver.vectroid import disjoint_union
    mq = MarkedQuiver(Quiver(["x", "y"], [("a", "x", "y")]),
                      {"x": make_linear(1, F2), "y": disjoint_union(make_nilpotent(2, F2), make_linear(1, F2))})
    with pytest.raises(NotHalflinearMarking):
        augmented_graph(mq)


MARKS = {"k": K, "k2": K2, "k3": K3, "k^2": N2, "ex6": EX6}


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.sampled_from(sorted(MARKS)), min_size=n, max_size=n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=max(n - 1, 1), max_size=4))))
def test_augmented_vertex_count(data):
    n, marks, extra = data
    verts = [f"v{i}" for i in range(n)]
    arrows = [(f"t{i}", verts[i], verts[i + 1]) for i in range(n - 1)]
    arrows += [(f"e{i}", verts[a], verts[b]) for i, (a, b) in enumerate(extra)]
    mq = marked(verts, arrows, {v: MARKS[m] for v, m in zip(verts, marks)}, GF(2))
    g = augmented_graph(mq)
    want = n + sum(len(mq.marking[v]) - 1 for v in verts if mq.kinds[v] == "linear") + \
        2 * sum(1 for v in verts if mq.kinds[v] == "halflinear")
    assert len(g.vertices) == want
    assert len(g.edges) == len(arrows) + (want - n)


def test_canonical_form_is_label_independent():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 7)
        edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 9))]
        perm = list(range(n))
        rng.shuffle(perm)
        g1 = Graph(tuple(range(n)), tuple(edges))
        g2 = Graph(tuple(f"w{perm[i]}" for i in range(n)), tuple((f"w{perm[a]}", f"w{perm[b]}") for a, b in edges))
        assert canonical_form(g1) == canonical_form(g2)


def test_graphs_isomorphic_distinguishes():
    path = Graph((0, 1, 2, 3), ((0, 1), (1, 2), (2, 3)))
    star = Graph((0, 1, 2, 3), ((0, 1), (0, 2), (0, 3)))
    assert not graphs_isomorphic(path, star)
    assert graphs_isomorphic(underlying_graph(Quiver(["a", "b"], [("x", "a", "b")])),
                             Graph(("p", "q"), (("q", "p"),)))
