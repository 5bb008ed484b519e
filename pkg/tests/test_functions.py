import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from continlab import CheckConfig, Verdict
from continlab.corpus import load_example
from continlab.expr import ExprError, parse
from continlab.functions import (check_function_continuity, check_function_convexity, constant,
                                 crosscheck_linear_joint, eval_named, expression, function_from_dict,
                                 genocchi_peano, max_affine, min_affine, nonzero_indicator, quadratic)
from continlab.geometry import Box

sq = Box([-1.0, -1.0], [1.0, 1.0])
unit = Box([0.0, 0.0], [1.0, 1.0])


def test_gp_values():
    gp = genocchi_peano()
    assert eval_named(gp, [0, 0]) == 0.0
    assert eval_named(gp, [1, 1]) == 1.0
    t = np.geomspace(1e-6, 1, 50)
    assert np.allclose(gp(np.column_stack([t * t, t])), 1.0)   # hand-simplified: 2t^4/(2t^4)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=5),
       st.floats(-3, 3), st.floats(-3, 3))
def test_min_max_affine_brute_force(rows, x1, x2):
    A = np.array([r[:2] for r in rows])
    b = np.array([r[2] for r in rows])
    vals = [a[0] * x1 + a[1] * x2 + c for a, c in zip(A, b)]
    assert min_affine(A, b)(np.array([[x1, x2]]))[0] == pytest.approx(min(vals))
    assert max_affine(A, b)(np.array([[x1, x2]]))[0] == pytest.approx(max(vals))


def test_expression_functions():
    f = expression("x1^2 + sin(x2)", 2)
    assert f(np.array([[2.0, 0.0]]))[0] == pytest.approx(4.0)
    with pytest.raises(ExprError):
        expression("x3 + 1", 2)
    with pytest.raises(ExprError):
        parse("1 +")
    assert function_from_dict({"name": "min-affine", "A": [[1, 0], [0, 1]], "b": [0, 0]}, 2)(
        np.array([[0.3, 0.7]]))[0] == pytest.approx(0.3)


def test_constant_holds_everywhere(light):
    c = constant(3.0, 2)
    for mode in ("joint", "separate", "linear", "arc"):
        assert check_function_continuity(c, unit, mode, light).verdict is Verdict.HOLDS


def test_indicator_joint_fails_at_origin(light):
    rep = check_function_continuity(nonzero_indicator(2), sq, "joint", light)
    assert rep.verdict is Verdict.FAILS
    assert np.linalg.norm(rep.witnesses[0].points[0]) < 1e-9


def test_gp_linear_holds_joint_fails(light):
    gp = genocchi_peano()
    assert check_function_continuity(gp, sq, "linear", light).verdict is Verdict.HOLDS
    joint = check_function_continuity(gp, sq, "joint", light)
    assert joint.verdict is Verdict.FAILS
    assert min(np.linalg.norm(w.points[0]) for w in joint.witnesses) < 0.05


def test_convexity_kinds(light):
    m = min_affine([[1, 0], [0, 1]], [0, 0])
    assert check_function_convexity(m, unit, "concave", light).verdict is Verdict.HOLDS
    assert check_function_convexity(m, unit, "quasi-concave", light).verdict is Verdict.HOLDS
    assert check_function_convexity(m, unit, "convex", light).verdict is Verdict.FAILS
    bowl = quadratic(np.eye(2))
    assert check_function_convexity(bowl, sq, "convex", light).verdict is Verdict.HOLDS
    gp = check_function_convexity(genocchi_peano(), unit, "quasi-concave", light)
    assert gp.verdict is Verdict.FAILS and len(gp.witnesses[0].points) == 3


def test_ex7_function(light):
    e = load_example("ex7-parabola")
    assert check_function_convexity(e.subject, e.domain, "quasi-convex", light).verdict is Verdict.HOLDS


def test_crosscheck_refusals(light):
    e = load_example("ex7-parabola")
    r = crosscheck_linear_joint(e.subject, e.domain, light)
    assert r.status == "refused" and "property C" in r.explanation
    r = crosscheck_linear_joint(genocchi_peano(), sq, light)
    assert r.status == "refused" and "quasi" in r.explanation


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**31))
def test_crosscheck_agrees_on_concave(seed):
    cfg = CheckConfig(grid_resolution=41, lambda_resolution=81, sample_count=60)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    r = crosscheck_linear_joint(min_affine(rng.normal(size=(k, 2)), rng.normal(size=k)), unit, cfg)
    assert r.status == "agree" and not r.toolkit_bug
    assert r.linear.verdict is r.joint.verdict is Verdict.HOLDS


def test_unknown_mode():
    with pytest.raises(ValueError):
        check_function_continuity(constant(1, 2), unit, "uniform", CheckConfig())
