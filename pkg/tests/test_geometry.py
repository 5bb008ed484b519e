import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from continlab import CheckConfig, Verdict
from continlab.corpus import load_example
from continlab.geometry import (Ball, Box, Halfspace, Polyhedron, PositiveOrthant, Simplex,
                                affine_basis, classify_set_properties, domain_from_dict, grid_nodes,
                                relative_interior_point, ri_certificate, rockafellar_probe,
                                sample_boundary_points, sample_segments, sample_smooth_arcs)

CFG = CheckConfig()
unit = Box([0.0, 0.0], [1.0, 1.0])
diag = Polyhedron([Halfspace([1, -1], 0), Halfspace([-1, 1], 0),
                   Halfspace([1, 0], 1), Halfspace([-1, 0], 0)])


def test_membership_examples():
    assert unit.contains([0.5, 0.5]) and unit.contains([1.0, 1.0])
    tri = Polyhedron([Halfspace([1, 1], 1), Halfspace([-1, 0], 0), Halfspace([0, -1], 0)])
    assert not tri.contains([0.7, 0.7])
    open_top = Box([0.0, 0.0], [1.0, 1.0], open_faces=[[False, False], [False, True]])
    assert open_top.contains([0.5, 0.9]) and not open_top.contains([0.5, 1.0])
    with pytest.raises(ValueError):
        unit.contains([0.5, 0.5, 0.5])


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_simplex_matches_triangle_oracle(a, b):
    tri = Simplex([[0, 0], [1, 0], [0, 1]])
    assert tri.contains([a, b], 1e-12) == (a >= -1e-12 and b >= -1e-12 and a + b <= 1 + 1e-12)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_ball_matches_norm_oracle(a, b):
    ball = Ball([0.0, 0.0], 1.0)
    r = np.hypot(a, b)
    if abs(r - 1) > 1e-6:
        assert ball.contains([a, b]) == (r < 1)


def test_affine_dimensions():
    assert affine_basis(unit, CFG).dim == 2
    assert affine_basis(diag, CFG).dim == 1
    point = Box([0.0, 0.0], [0.0, 0.0])
    assert affine_basis(point, CFG).dim == 0


def test_relative_interior():
    basis = affine_basis(unit, CFG)
    assert ri_certificate(unit, np.array([[0.5, 0.5]]), basis, CFG).all()
    assert not ri_certificate(unit, np.array([[1.0, 0.5]]), basis, CFG).any()
    s3 = Simplex(np.eye(3))
    assert ri_certificate(s3, np.full((1, 3), 1 / 3), affine_basis(s3, CFG), CFG).all()
    dbasis = affine_basis(diag, CFG)
    assert ri_certificate(diag, np.array([[0.5, 0.5]]), dbasis, CFG).all()
    p = relative_interior_point(diag, CFG)
    assert abs(p[0] - p[1]) < 1e-9


def test_set_properties():
    orth = classify_set_properties(PositiveOrthant(2), CFG)
    assert orth.property_C is Verdict.HOLDS and orth.property_B is Verdict.HOLDS
    seg = classify_set_properties(load_example("ex6-no-propertyB").domain, CFG)
    assert seg.property_B is Verdict.FAILS and seg.property_B_witness is not None
    wedge = classify_set_properties(load_example("ex7-parabola").domain, CFG)
    assert (wedge.is_polyhedron, wedge.is_open, wedge.property_C) == (Verdict.FAILS,) * 3
    assert classify_set_properties(Ball([0, 0], 1, open=True), CFG).property_C_prime is Verdict.HOLDS
    assert classify_set_properties(Ball([0, 0], 1), CFG).property_C_prime is Verdict.FAILS


def test_segments():
    first = sample_segments(unit, 1, CFG)[0]
    assert {first.x, first.y} == {(0.0, 0.0), (1.0, 1.0)}
    assert sample_segments(unit, 0, CFG) == []
    for s in sample_segments(diag, 20, CFG):
        pts = s.at(np.linspace(0, 1, 11))
        assert np.allclose(pts[:, 0], pts[:, 1])
    segs = sample_segments(unit, 50, CFG)
    assert len(segs) == 50
    for s in segs:
        assert unit.contains(s.at(np.linspace(0, 1, 21))).all()


def test_smooth_arcs_stay_inside():
    ball = Ball([0.0, 0.0], 1.0)
    arcs = sample_smooth_arcs(ball, [0.5, 0.0], [-0.5, 0.2], 5, CFG)
    assert len(arcs) == 5
    lam = np.linspace(0, 1, 201)
    for a in arcs:
        c = a.coef
        pts = c[0] + lam[:, None] * (c[1] + lam[:, None] * (c[2] + lam[:, None] * c[3]))
        assert ball.contains(pts).all()
        assert np.allclose(pts[0], [-0.5, 0.2]) and np.allclose(pts[-1], [0.5, 0.0])
    first = sample_smooth_arcs(unit, [1, 1], [0, 0], 1, CFG)[0].coef
    assert np.allclose(first[2:], 0)   # arc 0 is the straight segment


def test_rockafellar_examples():
    assert rockafellar_probe(unit, [0.5, 0.5], [1, 1], CFG).verdict is Verdict.HOLDS
    point = Box([0.3, 0.3], [0.3, 0.3])
    assert rockafellar_probe(point, [0.3, 0.3], [0.3, 0.3], CFG).verdict is Verdict.HOLDS
    # boundary x_ri is refused, not judged
    assert rockafellar_probe(unit, [1.0, 0.5], [0, 0], CFG).verdict is Verdict.UNRESOLVED


@pytest.mark.parametrize("dom", [unit, Simplex(np.eye(3)), PositiveOrthant(3, 2.0)],
                         ids=["box", "simplex", "orthant"])
def test_rockafellar_on_boundary_points(dom):
    x = relative_interior_point(dom, CFG)
    ys = sample_boundary_points(dom, 25, CFG)
    assert all(rockafellar_probe(dom, x, y, CFG).verdict is Verdict.HOLDS for y in ys)


def test_grid_nodes_cover_box():
    g = grid_nodes(unit, 11, CFG)
    assert g.member.all() and len(g.points) == 121 and abs(g.spacing - 0.1) < 1e-12


@settings(max_examples=25)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2), st.lists(st.floats(0.1, 3), min_size=2, max_size=2))
def test_box_roundtrip(lo, width):
    b = Box(lo, np.add(lo, width))
    again = domain_from_dict(b.to_dict())
    P = b.sample(np.random.default_rng(0), 20)
    assert again.contains(P).all()
