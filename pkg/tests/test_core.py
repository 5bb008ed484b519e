import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from continlab.core import (CheckConfig, PropertyReport, Reason, Robustness, Verdict, Witness,
                            combine, fails, holds, lambda_floor, rng_for, unresolved)


def test_defaults():
    c = CheckConfig()
    assert (c.cmp_tolerance, c.grid_resolution, c.lambda_resolution, c.sample_count, c.seed) == \
        (1e-9, 201, 501, 500, 42)


def test_config_is_hashable_and_frozen():
    c = CheckConfig()
    assert hash(c) == hash(CheckConfig())
    with pytest.raises(dataclasses.FrozenInstanceError):
        c.seed = 1


@pytest.mark.parametrize("bad", [
    {"cmp_tolerance": 0.0}, {"grid_resolution": 2}, {"lambda_resolution": 1},
    {"sample_count": 0}, {"seed": -1}, {"seed": 2**64}, {"oscillation_ratio": 1.0},
    {"density_pattern": "other"},
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        CheckConfig(**bad)


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(ValueError, match="unknown config fields"):
        CheckConfig.from_dict({"grid": 3})


@given(st.integers(3, 1000), st.integers(3, 1000), st.integers(1, 5000), st.integers(0, 2**64 - 1))
def test_config_roundtrip(n, m, k, seed):
    c = CheckConfig(grid_resolution=n, lambda_resolution=m, sample_count=k, seed=seed)
    assert CheckConfig.from_dict(c.to_dict()) == c


def test_refined_doubles_grids():
    r = CheckConfig(grid_resolution=11, lambda_resolution=21).refined()
    assert (r.grid_resolution, r.lambda_resolution) == (21, 41)


def test_report_invariants():
    cfg = CheckConfig()
    w = Witness.make([[0.0, 1.0]], [0.5], "w")
    with pytest.raises(ValueError):
        PropertyReport("p", Verdict.FAILS, (), 0, cfg)
    with pytest.raises(ValueError):
        PropertyReport("p", Verdict.HOLDS, (w,), 0, cfg)
    assert PropertyReport("p", Verdict.UNRESOLVED).reason is Reason.INSUFFICIENT_SAMPLES
    assert fails("p", cfg, 1, [w]).robust_failure
    raw = Witness.make([[0.0]], robustness=Robustness.RAW_GRID)
    assert not fails("p", cfg, 1, [raw]).robust_failure


def test_combine_precedence():
    cfg = CheckConfig()
    h = holds("a", cfg, 3)
    u = unresolved("b", cfg, 2, Reason.TOLERANCE_AMBIGUITY)
    f = fails("c", cfg, 1, [Witness.make([[1.0]])])
    assert combine("x", cfg, [h, u]).verdict is Verdict.UNRESOLVED
    assert combine("x", cfg, [h, u]).reason is Reason.TOLERANCE_AMBIGUITY
    assert combine("x", cfg, [h, u, f]).verdict is Verdict.FAILS
    assert combine("x", cfg, [h, h]).samples_used == 6


def test_streams_are_keyed_not_sequential():
    cfg = CheckConfig()
    a = rng_for(cfg, "mixture", 0).random(4)
    rng_for(cfg, "other", 0).random(100)          # consuming another stream changes nothing
    assert np.array_equal(a, rng_for(cfg, "mixture", 0).random(4))
    assert not np.array_equal(a, rng_for(cfg, "mixture", 1).random(4))
    assert not np.array_equal(a, rng_for(CheckConfig(seed=43), "mixture", 0).random(4))


def test_lambda_floor():
    coarse = CheckConfig(lambda_resolution=5)
    assert lambda_floor(holds("p", coarse, 1)).verdict is Verdict.UNRESOLVED
    assert lambda_floor(holds("p", CheckConfig(), 1)).verdict is Verdict.HOLDS
    f = fails("p", coarse, 1, [Witness.make([[0.0]])])
    assert lambda_floor(f) is f
