import dataclasses

import numpy as np
import pytest

from continlab import CheckConfig, Verdict
from continlab.continuity import (_approach, check_archimedean, check_arc_and_strong,
                                  check_graph_continuity, check_linear_continuity,
                                  check_mixture_continuity, check_section_continuity,
                                  check_section_kinds, check_wold)
from continlab.corpus import load_example
from continlab.functions import constant, linear
from continlab.geometry import Box
from continlab.relations import UtilityInduced

unit = Box([0.0, 0.0], [1.0, 1.0])
smooth = UtilityInduced(unit, linear([1.0, 0.0]))


def V(rep):
    return rep.verdict


def test_continuous_utility_holds_everywhere(light):
    assert V(check_section_continuity(smooth, light)) is Verdict.HOLDS
    assert V(check_graph_continuity(smooth, light)) is Verdict.HOLDS
    assert V(check_linear_continuity(smooth, light)) is Verdict.HOLDS
    for side in ("upper", "lower", "both"):
        assert V(check_mixture_continuity(smooth, side, light)) is Verdict.HOLDS
        for variant in ("plain", "strict"):
            assert V(check_archimedean(smooth, variant, side, light)) is Verdict.HOLDS
    assert V(check_wold(smooth, "weak", light)) is Verdict.HOLDS
    assert V(check_arc_and_strong(smooth, "arc-continuous", light)) is Verdict.HOLDS


def test_constant_relation_mixture(light):
    flat = UtilityInduced(unit, constant(0.0, 2))
    assert V(check_mixture_continuity(flat, "both", light)) is Verdict.HOLDS


def test_gp_relation(light):
    gp = load_example("gp-relation").subject
    assert V(check_mixture_continuity(gp, "both", light)) is Verdict.HOLDS
    rep = check_section_continuity(gp, light)
    assert V(rep) is Verdict.FAILS
    assert V(check_linear_continuity(gp, light)) is Verdict.HOLDS


def test_ex2_open_lower_section_fails(light):
    rep = check_section_kinds(load_example("ex2-monotone").subject, light)
    assert V(rep["open-strict-lower"]) is Verdict.FAILS


def test_section_cache_returns_copies(light):
    rel = load_example("ex2-monotone").subject
    a = check_section_kinds(rel, light)
    a.clear()
    assert len(check_section_kinds(rel, light)) == 4


def test_sin_relation(light):
    rel = load_example("sin-reciprocal-relation").subject
    assert V(check_archimedean(rel, "plain", "both", light)) is Verdict.HOLDS
    rep = check_mixture_continuity(rel, "both", light)
    assert V(rep) is Verdict.FAILS


def test_two_class_graph_vs_wold(light):
    rel = load_example("two-class-threshold").subject
    assert V(check_graph_continuity(rel, light)) is Verdict.HOLDS
    assert V(check_wold(rel, "weak", light)) is Verdict.FAILS


def test_approach_stays_interior():
    # deep geometric steps round to 1.0 in floating point; those are not interior
    lam = _approach(501, 60)
    assert lam.max() < 1.0 and lam.min() >= 0.0


def test_coarse_lambda_grid_never_decides_wold_wrongly():
    rel = load_example("sin-reciprocal-relation").subject
    coarse = dataclasses.replace(CheckConfig(), lambda_resolution=3)
    assert V(check_wold(rel, "weak", coarse)) is not Verdict.FAILS


def test_coarse_lambda_holds_becomes_unresolved():
    coarse = CheckConfig(grid_resolution=41, lambda_resolution=5, sample_count=60)
    rep = check_linear_continuity(smooth, coarse)
    assert V(rep) is Verdict.UNRESOLVED and "below" in rep.notes


def test_unknown_variants(light):
    with pytest.raises(ValueError):
        check_wold(smooth, "strong", light)
