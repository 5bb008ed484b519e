import numpy as np
import pytest
from hypothesis import given, strategies as st

from continlab import CheckConfig, Verdict
from continlab.corpus import load_example
from continlab.functions import constant, linear, min_affine
from continlab.geometry import Box, Segment
from continlab.relations import (Comparison, Tabulated, UtilityInduced, check_algebraic,
                                 check_convexity, check_monotonicity, check_order_density,
                                 check_order_property, compare, predicate, relation_from_dict,
                                 restrict)

unit = Box([0.0, 0.0], [1.0, 1.0], cone=True)
sum_rel = UtilityInduced(unit, linear([1.0, 1.0]))


def V(rep):
    return rep.verdict


def test_compare_examples():
    assert compare(sum_rel, [1, 1], [0, 0]) is Comparison.STRICT
    assert compare(sum_rel, [0, 0], [1, 1]) is Comparison.STRICT_REVERSED
    assert compare(sum_rel, [0.3, 0.4], [0.3, 0.4]) is Comparison.INDIFFERENT
    disk = load_example("ex1-disk").subject
    assert compare(disk, [-0.5, 0.0], [0.5, 0.0]) is Comparison.STRICT      # left class over right
    assert compare(disk, [-0.5, 0.0], [-0.2, 0.3]) is Comparison.INCOMPARABLE
    with pytest.raises(ValueError):
        compare(sum_rel, [2, 2], [0, 0])


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_both_matches_weak(a, b, c, d):
    X, Y = np.array([[a, b]]), np.array([[c, d]])
    xy, yx = sum_rel.both(X, Y, 1e-9)
    assert xy[0] == sum_rel.weak(X, Y, 1e-9)[0] and yx[0] == sum_rel.weak(Y, X, 1e-9)[0]


def test_order_properties(light):
    for p in ("complete", "transitive", "reflexive", "negatively-transitive", "transitive-indifference"):
        assert V(check_order_property(sum_rel, p, light)) is Verdict.HOLDS, p
    assert V(check_order_property(sum_rel, "non-trivial", light)) is Verdict.HOLDS
    assert V(check_order_property(sum_rel, "anti-symmetric", light)) is Verdict.FAILS
    disk = load_example("ex1-disk").subject
    rep = check_order_property(disk, "complete", light)
    assert V(rep) is Verdict.FAILS and len(rep.witnesses[0].points) == 2
    flat = UtilityInduced(unit, constant(0.0, 2))
    assert V(check_order_property(flat, "non-trivial", light)) is Verdict.UNRESOLVED
    with pytest.raises(ValueError):
        check_order_property(sum_rel, "acyclic", light)


def test_two_class_is_not_transitive(light):
    rel = load_example("two-class-threshold").subject
    assert V(check_order_property(rel, "transitive", light)) is Verdict.FAILS


def test_convexity(light):
    mn = UtilityInduced(unit, min_affine([[1, 0], [0, 1]], [0, 0]))
    assert V(check_convexity(mn, "convex-upper-sections", light)) is Verdict.HOLDS
    ex3 = load_example("ex3-integer-additive").subject
    assert V(check_convexity(ex3, "convex-upper-sections", light)) is Verdict.FAILS
    ex4 = load_example("ex4-locally-convex-set").subject
    assert V(check_convexity(ex4, "locally-convex-upper-sections", light)) is Verdict.FAILS


def test_monotonicity(light):
    assert V(check_monotonicity(sum_rel, "strong", light)) is Verdict.HOLDS
    ex2 = load_example("ex2-monotone").subject
    assert V(check_monotonicity(ex2, "weak", light)) is Verdict.HOLDS
    rep = check_monotonicity(ex2, "strong", light)
    assert V(rep) is Verdict.FAILS


def test_algebraic(light):
    ex3 = load_example("ex3-integer-additive").subject
    assert V(check_algebraic(ex3, "additive", light)) is Verdict.HOLDS
    assert V(check_algebraic(sum_rel, "independent", light)) is Verdict.HOLDS
    quad = Box([0.0, 0.0], [2.0, 2.0], cone=True)
    mn = UtilityInduced(quad, min_affine([[1, 0], [0, 1]], [0, 0]))
    assert V(check_algebraic(mn, "additive", light)) is Verdict.FAILS


def test_order_density(light):
    assert V(check_order_density(UtilityInduced(unit, linear([1.0, 0.0])), light)) is Verdict.HOLDS
    assert V(check_order_density(load_example("ex2-monotone").subject, light)) is Verdict.FAILS
    flat = UtilityInduced(unit, constant(1.0, 2))
    assert V(check_order_density(flat, light)) is Verdict.HOLDS


def test_restriction_modes():
    ex5 = load_example("ex5-restriction").subject
    line = Segment((0.5, 0.5), (-0.5, -0.5))
    r = restrict(ex5, line, "sections")
    assert r.mode == "sections"
    assert restrict(ex5, line, "pairs").mode == "pairs"
    with pytest.raises(ValueError):
        restrict(ex5, line, "other")
    with pytest.raises(ValueError):
        restrict(sum_rel, Segment((5.0, 5.0), (6.0, 6.0)))


def test_tabulated_and_dict_roundtrip():
    pts = [[0.0, 0.0], [1.0, 1.0]]
    t = Tabulated(unit, pts, [[True, False], [True, True]])
    assert compare(t, [1, 1], [0, 0]) is Comparison.STRICT
    rel = relation_from_dict({"variant": "utility", "utility": "x1 + 2*x2",
                              "domain": unit.to_dict()})
    assert compare(rel, [0, 1], [1, 0]) is Comparison.STRICT
    p = relation_from_dict({"variant": "predicate", "builtin": "two-class",
                            "domain": Box([0.0], [1.0]).to_dict()})
    assert p.id == "two-class"
    with pytest.raises(KeyError):
        predicate(unit, "no-such-predicate")
