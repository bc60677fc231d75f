import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from d3g3.degree_sets import (
    INF,
    DegreeSet,
    Monotonicity,
    Regime,
    classify,
    parse_degree_set,
    predicted_order_monotonicity,
)

# membership is compared against python sets on a bounded window; co-finite
# sets are truncated there, so the window must exceed every finite bound used
WINDOW = 40


def _to_py(s: DegreeSet) -> set:
    return {k for k in range(WINDOW) if k in s}


@st.composite
def degree_sets(draw):
    kind = draw(st.sampled_from(["empty", "nat", "finite", "segment", "cofinite", "mixed"]))
    if kind == "empty":
        return DegreeSet.empty()
    if kind == "nat":
        return DegreeSet.naturals()
    if kind == "finite":
        return DegreeSet.finite(draw(st.sets(st.integers(0, 25), min_size=1, max_size=8)))
    if kind == "segment":
        m = draw(st.integers(0, 20))
        return DegreeSet.segment(m, m + draw(st.integers(0, 8)))
    if kind == "cofinite":
        return DegreeSet.at_least(draw(st.integers(0, 25)))
    vals = draw(st.sets(st.integers(0, 20), min_size=1, max_size=5))
    return DegreeSet.finite(vals) | DegreeSet.at_least(draw(st.integers(22, 30)))


@pytest.mark.parametrize(
    "text,expected",
    [
        ("empty", DegreeSet.empty()),
        ("{}", DegreeSet.empty()),
        ("NAT", DegreeSet.naturals()),
        ("[0,inf]", DegreeSet.naturals()),
        ("[2,5]", DegreeSet.segment(2, 5)),
        ("{0,3,7}", DegreeSet.finite([0, 3, 7])),
        ("{3,4,5}", DegreeSet.segment(3, 5)),
        ("[4,inf]", DegreeSet.at_least(4)),
        ("{0}|[5,inf]", DegreeSet(((0, 0), (5, INF)))),
    ],
)
def test_parse(text, expected):
    assert parse_degree_set(text) == expected


@pytest.mark.parametrize("bad", ["[5,2]", "{-1}", "[a,b]", "", "{1,}"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_degree_set(bad)


@given(degree_sets())
def test_roundtrip_str(s):
    assert parse_degree_set(str(s)) == s


@given(degree_sets(), degree_sets())
def test_algebra_matches_python_sets(a, b):
    assert _to_py(a | b) == _to_py(a) | _to_py(b)
    assert _to_py(a & b) == _to_py(a) & _to_py(b)
    assert _to_py(a.complement()) == set(range(WINDOW)) - _to_py(a)
    assert a.complement().complement() == a


@given(degree_sets(), st.lists(st.integers(0, 60), max_size=30))
def test_mask_matches_membership(s, degs):
    arr = np.array(degs, dtype=np.int64)
    assert s.mask(arr).tolist() == [k in s for k in degs]


def test_contains_rejects_negative():
    with pytest.raises(ValueError):
        -1 in DegreeSet.naturals()


def test_constructor_errors():
    with pytest.raises(ValueError):
        DegreeSet.finite([])
    with pytest.raises(ValueError):
        DegreeSet.segment(3, 2)


def test_shape_predicates():
    assert DegreeSet.segment(2, 2).is_segment and DegreeSet.segment(2, 2).is_finite
    assert not DegreeSet.finite([1, 3]).is_segment
    assert DegreeSet.at_least(3).kind == "cofinite"
    assert DegreeSet.naturals().kind == "nat"
    assert DegreeSet.finite([1, 3]).elements() == [1, 3]


@pytest.mark.parametrize(
    "ss,sc,regime",
    [
        ("nat", "nat", Regime.NAT_NAT),
        ("nat", "{1,2}", Regime.NAT_FINITE),
        ("nat", "empty", Regime.NAT_EMPTY),
        ("[0,3]", "nat", Regime.FINITE_NAT),
        ("{2}", "empty", Regime.FINITE_EMPTY),
        ("empty", "nat", Regime.EMPTY_NAT),
        ("empty", "[0,4]", Regime.EMPTY_FINITE),
        ("empty", "empty", Regime.EMPTY_EMPTY),
        ("[2,5]", "[2,5]", Regime.EQUAL_SEGMENTS),
        ("[0,3]", "[4,inf]", Regime.PARTITION),
        ("{1}", "{2}", Regime.DISJOINT),
        ("[0,5]", "[3,inf]", Regime.COVERING),
        ("[0,3]", "[2,6]", Regime.UNCOVERED),
    ],
)
def test_classify(ss, sc, regime):
    r = classify(parse_degree_set(ss), parse_degree_set(sc))
    assert r is regime
    assert r.sustainability and r.behaviour


def test_table_behaviours():
    assert Regime.NAT_NAT.sustainability == "sustainable"
    assert Regime.EMPTY_EMPTY.sustainability == "non sustainable"
    assert Regime.EMPTY_FINITE.sustainability == "depends on the parameters"
    assert not Regime.NAT_EMPTY.is_general and Regime.UNCOVERED.is_general


@given(degree_sets(), degree_sets())
def test_predicted_monotonicity_consistent(a, b):
    pred = predicted_order_monotonicity(a, b)
    pa, pb = _to_py(a), _to_py(b)
    if pred is Monotonicity.CONSTANT:
        assert not (pa & pb) and (pa | pb) == set(range(WINDOW))
    elif pred is Monotonicity.NON_INCREASING:
        assert not (pa & pb)
    elif pred is Monotonicity.NON_DECREASING:
        assert (pa | pb) == set(range(WINDOW))
