import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from continlab import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba path disabled")


@needs_numba
@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 20), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_osc_levels_parity(C, S, nlev, seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=(C, S))
    vals[rng.random((C, S)) < 0.2] = np.nan
    lev = np.sort(rng.integers(0, nlev, size=S))
    center = rng.normal(size=C)
    a = K.osc_levels(vals, lev, center, nlev, backend="numpy")
    b = K.osc_levels(vals, lev, center, nlev, backend="numba")
    assert np.array_equal(a, b)


@needs_numba
@settings(max_examples=60, deadline=None)
@given(arrays(np.int8, st.tuples(st.integers(1, 5), st.integers(1, 12)), elements=st.integers(-1, 1)))
def test_flip_parity(rows):
    assert np.array_equal(K.flip_nodes(rows, "numpy"), K.flip_nodes(rows, "numba"))


def test_osc_oracle():
    # one row, levels 0,0,1: oscillation over level >= j with the center included
    vals = np.array([[3.0, -1.0, 0.5]])
    out = K.osc_levels(vals, np.array([0, 0, 1]), np.array([0.0]), 2, backend="numpy")
    assert out.tolist() == [[4.0, 0.5]]


def test_flip_oracle():
    rows = np.array([[0, 0, 1, -1, 1, 0]], dtype=np.int8)
    assert K.flip_nodes(rows, "numpy").tolist() == [[False, True, True, False, True, True]]
