"""Hot loops of the probe engine, compiled with numba when available.

Set ``CONTINLAB_NUMBA=0`` before import to force the pure-numpy path; the
two paths return identical arrays (see tests/test_kernels.py).
"""
from __future__ import annotations

import os

import numpy as np

_WANT = os.environ.get("CONTINLAB_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _WANT:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# oscillation per nested scale level

@njit(cache=True)
def _osc_levels_nb(vals, lev, center, nlev):
    C, S = vals.shape
    out = np.zeros((C, nlev))
    for c in range(C):
        hi = np.full(nlev, -np.inf)
        lo = np.full(nlev, np.inf)
        for s in range(S):
            v = vals[c, s]
            if v != v:
                continue
            j = lev[s]
            if v > hi[j]:
                hi[j] = v
            if v < lo[j]:
                lo[j] = v
        run_hi = center[c]
        run_lo = center[c]
        for j in range(nlev - 1, -1, -1):
            if hi[j] > run_hi:
                run_hi = hi[j]
            if lo[j] < run_lo:
                run_lo = lo[j]
            out[c, j] = run_hi - run_lo
    return out


def _osc_levels_np(vals, lev, center, nlev):
    C = vals.shape[0]
    hi = np.full((C, nlev), -np.inf)
    lo = np.full((C, nlev), np.inf)
    filled_hi = np.where(np.isnan(vals), -np.inf, vals)
    filled_lo = np.where(np.isnan(vals), np.inf, vals)
    for j in range(nlev):
        m = lev == j
        if m.any():
            hi[:, j] = filled_hi[:, m].max(axis=1)
            lo[:, j] = filled_lo[:, m].min(axis=1)
    hi = np.maximum.accumulate(hi[:, ::-1], axis=1)[:, ::-1]
    lo = np.minimum.accumulate(lo[:, ::-1], axis=1)[:, ::-1]
    hi = np.maximum(hi, center[:, None])
    lo = np.minimum(lo, center[:, None])
    return hi - lo


def osc_levels(vals: np.ndarray, lev: np.ndarray, center: np.ndarray, nlev: int,
               backend: str | None = None) -> np.ndarray:
    """Oscillation of each row over samples at level >= j, center included.

    ``vals`` is (C, S) with NaN marking dropped samples, ``lev`` is the
    (S,) scale level of each sample column, ``center`` the (C,) center values.
    Returns (C, nlev); column j is the oscillation inside the j-th ball.
    """
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    lev = np.ascontiguousarray(lev, dtype=np.int64)
    center = np.ascontiguousarray(center, dtype=np.float64)
    if (backend or BACKEND) == "numba" and HAVE_NUMBA:
        return _osc_levels_nb(vals, lev, center, int(nlev))
    return _osc_levels_np(vals, lev, center, int(nlev))


# indicator boundaries along rows

@njit(cache=True)
def _flips_nb(rows):
    R, M = rows.shape
    out = np.zeros((R, M), dtype=np.bool_)
    for r in range(R):
        prev = -1
        prev_k = -1
        for k in range(M):
            v = rows[r, k]
            if v < 0:
                prev = -1
                continue
            if prev >= 0 and v != prev:
                out[r, k] = True
                out[r, prev_k] = True
            prev = v
            prev_k = k
    return out


def _flips_np(rows):
    valid = rows >= 0
    pair = valid[:, 1:] & valid[:, :-1] & (rows[:, 1:] != rows[:, :-1])
    out = np.zeros(rows.shape, dtype=bool)
    out[:, 1:] |= pair
    out[:, :-1] |= pair
    return out


def flip_nodes(rows: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Mark entries whose value differs from an adjacent valid entry.

    ``rows`` is an int8 array (R, M) with values 0/1 and -1 for nodes outside
    the domain; a -1 breaks adjacency.
    """
    rows = np.ascontiguousarray(rows, dtype=np.int8)
    if (backend or BACKEND) == "numba" and HAVE_NUMBA:
        return _flips_nb(rows)
    return _flips_np(rows)


def grid_flip_nodes(field: np.ndarray, backend: str | None = None) -> np.ndarray:
    """n-D version of :func:`flip_nodes` over axis neighbours."""
    out = np.zeros(field.shape, dtype=bool)
    for ax in range(field.ndim):
        moved = np.moveaxis(field, ax, -1)
        shape = moved.shape
        flags = flip_nodes(moved.reshape(-1, shape[-1]), backend).reshape(shape)
        out |= np.moveaxis(flags, -1, ax)
    return out
