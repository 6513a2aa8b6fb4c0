import pytest
from hypothesis import given, settings, strategies as st

from markedquiver import GF, Poset
from markedquiver.dsl import (build_marked_quiver, document_from_marked_quiver, format_vectroid, parse_spec,
                              plane_spec, serialize_spec, tokenize)
from markedquiver.cli import fixture_text
from markedquiver.errors import ParseError, ValidationError
from markedquiver.vectroid import validate_spectroid

FIXTURES = ["example5.mq", "example6.mq", "gelfand.mq", "prop8_chain.mq", "prop8_antichain.mq"]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    doc = parse_spec(fixture_text(name))
    again = parse_spec(serialize_spec(doc))
    assert again == doc
    mq = build_marked_quiver(again)
    assert all(validate_spectroid(mq.marking[v]).ok for v in mq.vertices)


def test_document_from_built_quiver():
    doc = parse_spec(fixture_text("example6.mq"))
    mq = build_marked_quiver(doc)
    assert document_from_marked_quiver(mq, 2) == doc


def test_plane_block():
    doc = parse_spec(fixture_text("example5.mq"))
    mq = build_marked_quiver(doc)
    plane = plane_spec(doc, "W", mq)
    assert plane.dims.describe(mq)
    u = plane.point(mq, 1, 2 % mq.p)
    assert u.maps["gamma"].shape == (4, 6)
    with pytest.raises(ValidationError):
        plane_spec(doc, "missing", mq)


# ---------------------------------------------------------------- generated documents


def posets():
    @st.composite
    def build(draw):
        n = draw(st.integers(1, 4))
        names = [f"p{i}" for i in range(n)]
        rel = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
        return Poset.from_relations(names, rel)
    return build()


leaf = st.one_of(
    st.integers(1, 4).map(lambda n: ("linear", n)),
    st.integers(1, 3).map(lambda n: ("nilpotent", n)),
    posets().map(lambda P: ("poset", P)),
)
recipes = st.recursive(leaf, lambda inner: st.one_of(
    st.tuples(st.just("union"), inner, inner), st.tuples(st.just("op"), inner)), max_leaves=3)


@st.composite
def documents(draw):
    n = draw(st.integers(1, 4))
    vs = tuple(f"v{i}" for i in range(n))
    arrows = []
    for i in range(1, n):
        ends = (vs[draw(st.integers(0, i - 1))], vs[i])
        arrows.append(ends if draw(st.booleans()) else ends[::-1])
    for _ in range(draw(st.integers(0 if n > 1 else 1, 2))):
        arrows.append((draw(st.sampled_from(vs)), draw(st.sampled_from(vs))))
    arrows = tuple((f"a{j}", s, t) for j, (s, t) in enumerate(arrows))
    marking = {v: draw(recipes) for v in vs}
    p = draw(st.sampled_from([None, 2, 3, 5]))
    from markedquiver.dsl import SpecDocument
    return SpecDocument(vs, arrows, marking, p)


@settings(max_examples=60, deadline=None)
@given(documents())
def test_generated_round_trip(doc):
    text = serialize_spec(doc)
    again = parse_spec(text)
    assert serialize_spec(again) == text
    a, b = build_marked_quiver(doc), build_marked_quiver(again)
    for v in doc.vertices:
        assert a.marking[v].dims == b.marking[v].dims
        assert len(a.marking[v]) == len(b.marking[v])


# ---------------------------------------------------------------- errors


def test_tokenizer_tracks_positions():
    toks = tokenize("quiver {\n  vertices: x }")
    v = [t for t in toks if t.text == "vertices"][0]
    assert (v.line, v.col) == (2, 3)


@pytest.mark.parametrize("text,line", [
    ("quiver { vertices: x, x ; arrows: a: x -> x }\nmarking { x: k }\n", 1),
    ("quiver { vertices: x ; arrows: a: x -> y }\nmarking { x: k }\n", 1),
    ("quiver { vertices: x ; arrows: a: x -> x }\nmarking { x: k_ }\n", 2),
    ("quiver { vertices: x ; arrows: a: x -> x }\nmarking { x: k ; x: k }\n", 2),
    ("quiver { vertices: x ; arrows: a: x -> x }\nmarking { x: k }\nfield { p: 4 }\n", 3),
    ("quiver { vertices: x ; arrows: a: x -> x }\nmarking { x: k }\n  bogus { }\n", 3),
    ("quiver { vertices: x ; arrows: a: x -> x }\nmarking { x: kP{p, q ; rel: p < } }\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_spec(text)
    assert exc.value.line == line
    assert exc.value.col is not None


def test_missing_marking_is_an_error():
    with pytest.raises(ParseError):
        parse_spec("quiver { vertices: x, y ; arrows: a: x -> y }\nmarking { x: k }\n")


def test_quiver_without_arrows_is_invalid():
    doc = parse_spec("quiver { vertices: x ; arrows: }\nmarking { x: k }\n")
    with pytest.raises(ValidationError):
        build_marked_quiver(doc)


def test_bad_halflinear_spec_is_invalid():
    # the paired points must be comparable
    doc = parse_spec("quiver { vertices: x ; arrows: a: x -> x }\n"
                     "marking { x: half{ a, b ; same: {a, b} } }\n")
    with pytest.raises(ValidationError):
        build_marked_quiver(doc)


def test_format_vectroid_forms(F2):
    assert format_vectroid(("linear", 1)) == "k"
    assert format_vectroid(("linear", 3)) == "k_3"
    assert format_vectroid(("nilpotent", 2)) == "k^2"
    assert format_vectroid(("union", ("linear", 1), ("linear", 2))) == "k + k_2"
    assert format_vectroid(("op", ("linear", 2))) == "op(k_2)"
