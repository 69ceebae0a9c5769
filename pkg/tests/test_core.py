import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsmc.core import (
    KripkeStructure,
    Track,
    format_kripke,
    induced_label,
    parse_kripke,
    transpose,
    validate,
)
from hsmc.errors import (
    IndexOutOfRange,
    InvalidTrack,
    KripkeSyntaxError,
    LabelOutsideAP,
    NotLeftTotal,
    UnknownState,
)

from strategies import kripke_structures


def test_from_names_indexes_states(k2):
    assert k2.names == ("v0", "v1")
    assert k2.initial == 0
    assert k2.successors == ((0, 1), (0, 1))
    assert k2.labels[0] == frozenset({"p"})


def test_validate_rejects_dead_end():
    k = KripkeStructure.from_names(["a", "b"], [("a", "b")], {}, "a")
    with pytest.raises(NotLeftTotal) as exc:
        validate(k)
    assert exc.value.args and "b" in str(exc.value)


def test_unknown_state_and_letter():
    with pytest.raises(UnknownState):
        KripkeStructure.from_names(["a"], [("a", "z")], {}, "a")
    with pytest.raises(UnknownState):
        KripkeStructure.from_names(["a"], [("a", "a")], {}, "zz")
    with pytest.raises(LabelOutsideAP):
        KripkeStructure.from_names(["a"], [("a", "a")], {"a": ["r"]}, "a", ap=["p"])


def test_track_accessors(chain3):
    t = chain3.track(["a", "b", "c", "c"])
    assert (t.fst, t.lst, len(t)) == (0, 2, 4)
    assert t.at(2) == 1
    assert t.sub(2, 3).state_names() == ["b", "c"]
    assert [len(p) for p in t.prefixes()] == [1, 2, 3]
    assert [len(s) for s in t.suffixes()] == [3, 2, 1]
    assert str(t) == "a b c c"
    with pytest.raises(IndexOutOfRange):
        t.at(5)
    with pytest.raises(IndexOutOfRange):
        t.sub(3, 2)


def test_track_must_follow_edges(chain3):
    with pytest.raises(InvalidTrack):
        chain3.track(["a", "c"])
    with pytest.raises(InvalidTrack):
        Track(chain3, ())


def test_induced_label_is_intersection(chain3):
    assert induced_label(chain3.track(["a", "b"])) == {"p"}
    assert induced_label(chain3.track(["b", "c"])) == {"q"}
    assert induced_label(chain3.track(["a", "b", "c"])) == set()
    assert induced_label(chain3.track(["b"])) == {"p", "q"}


def test_transpose_reverses_edges(chain3):
    kt = transpose(chain3)
    assert kt.edges == {(b, a) for a, b in chain3.edges}
    t = chain3.track(["a", "b", "c"])
    assert t.reversed(kt).state_names() == ["c", "b", "a"]


def test_text_roundtrip(ksched):
    again = parse_kripke(format_kripke(ksched))
    assert again == ksched


@pytest.mark.parametrize(
    "text, line",
    [
        ("states: a\n", 1),
        ("kripke\nstates: a\ninit: a\nedges: a-b\n", 4),
        ("kripke\nstates: a\ninit: a\nbogus: 1\n", 4),
        ("kripke\nstates: a\nedges: a->a\n", 3),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(KripkeSyntaxError) as exc:
        parse_kripke(text)
    assert exc.value.line == line


def test_parse_checks_left_totality():
    with pytest.raises(NotLeftTotal):
        parse_kripke("kripke\nstates: a b\ninit: a\nedges: a->b\n")


def test_k2_is_valid_and_labels(k2):
    validate(k2)
    assert induced_label(k2.track(["v0"])) == {"p"}
    assert induced_label(k2.track(["v0", "v1"])) == set()
    assert induced_label(k2.track(["v1", "v1", "v1"])) == {"q"}


def test_single_state_without_edges_is_not_left_total():
    with pytest.raises(NotLeftTotal):
        validate(KripkeStructure.from_names(["a"], [], {}, "a"))


def test_point_track_has_no_proper_views(chain3):
    t = chain3.track(["a"])
    assert t.prefixes() == [] and t.suffixes() == []


def test_transpose_examples(k2):
    assert transpose(k2) == k2
    chain = KripkeStructure.from_names(["a", "b"], [("a", "b"), ("b", "b")], {}, "a")
    assert transpose(chain).edges == {(1, 0), (1, 1)}
    assert transpose(transpose(chain)) == chain


@settings(max_examples=100, deadline=None)
@given(kripke_structures(), st.data())
def test_label_decomposition_and_monotonicity(k, data):
    from hsmc.semantics import enumerate_tracks

    t = data.draw(st.sampled_from(list(enumerate_tracks(k, 5))))
    n = len(t)
    i = data.draw(st.integers(1, n))
    j = data.draw(st.integers(i, n))
    whole = induced_label(t)
    assert whole <= induced_label(t.sub(i, j))
    assert whole == induced_label(t.sub(1, i)) & induced_label(t.sub(i, n))
    for view in t.prefixes() + t.suffixes():
        Track(k, view.states)
