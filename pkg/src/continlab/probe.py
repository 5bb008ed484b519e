"""Nested-scale oscillation probes.

A candidate point is probed along a fixed family of curves through it
(axis lines, diagonals and power curves ``x_j = u, x_i = s u^k``) at radii
``rho * 2**(-m / q)``.  The oscillation inside the j-th ball is compared
across levels: a continuity point shows contraction, a discontinuity keeps
its oscillation down to the finest level.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .core import CheckConfig
from .geometry import Ball, Domain


@dataclass(frozen=True)
class Ladder:
    levels: int      # finest level index J
    per_octave: int  # samples per halving
    extra: int = 0   # octaves sampled beyond the finest level
    track_worst: bool = False   # record the worst finest-level sample (needed for witnesses only)

    def offsets(self) -> tuple[np.ndarray, np.ndarray]:
        m = np.arange((self.levels + self.extra) * self.per_octave + 1)
        t = 2.0 ** (-m / self.per_octave)
        lev = np.minimum(m // self.per_octave, self.levels)
        return t, lev


COARSE = Ladder(3, 1)
FULL = Ladder(30, 2, 6)
FINE = Ladder(30, 4, 7, track_worst=True)


def families(n: int, power: bool = True, diagonals: bool = True
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(linear part, power part, exponent) rows; displacement = lin*u + pw*u^k."""
    lin, pw, ks = [], [], []
    eye = np.eye(n)
    if power:
        for k in (2, 3):
            for j in range(n):
                for i in range(n):
                    if i == j:
                        continue
                    for s in (1.0, -1.0):
                        lin.append(eye[j])
                        pw.append(s * eye[i])
                        ks.append(k)
    for j in range(n):
        lin.append(eye[j])
        pw.append(np.zeros(n))
        ks.append(1)
    for i in range(n if diagonals else 0):
        for j in range(i + 1, n):
            for s in (1.0, -1.0):
                lin.append((eye[i] + s * eye[j]) / np.sqrt(2))
                pw.append(np.zeros(n))
                ks.append(1)
    return np.array(lin).reshape(-1, n), np.array(pw).reshape(-1, n), np.array(ks)


def family_label(lin: np.ndarray, pw: np.ndarray, k: int, sigma: float) -> str:
    def name(v):
        idx = np.flatnonzero(np.abs(v) > 0)
        return " + ".join(f"{'-' if v[i] < 0 else ''}e{i + 1}" for i in idx)
    if not np.any(pw):
        return f"line u*({name(lin)}), side {'+' if sigma > 0 else '-'}"
    j = int(np.flatnonzero(lin)[0])
    i = int(np.flatnonzero(pw)[0])
    sign = "" if pw[i] > 0 else "-"
    return f"curve x{i + 1} = {sign}x{j + 1}^{k} through the point, side {'+' if sigma > 0 else '-'}"


class _Labels:
    """Path descriptions looked up on demand; only confirmed hits ever need them."""

    def __init__(self, names: list, cols: np.ndarray):
        self.names, self.cols = names, cols

    def __len__(self):
        return len(self.cols)

    def __getitem__(self, r):
        c = self.cols[r]
        return self.names[c] if np.ndim(c) == 0 else [self.names[i] for i in c]


@dataclass
class ProbeResult:
    osc: np.ndarray           # (C, L) or (C, K, L)
    center: np.ndarray        # (C,) or (C, K)
    worst_point: np.ndarray   # (C, n) or (C, K, n); 1-D probes store the parameter
    worst_label: Sequence     # per center (per field) path description


def _osc(vals: np.ndarray, lev: np.ndarray, center: np.ndarray, nlev: int) -> np.ndarray:
    return _kernels.osc_levels(vals, lev, center, nlev)


def persistent(osc: np.ndarray, cfg: CheckConfig) -> np.ndarray:
    """True where oscillation stays above budget and fails to contract."""
    J = osc.shape[-1] - 1
    ok = osc[..., J] > cfg.continuity_modulus_budget
    for r in range(cfg.refinement_rounds):
        num = osc[..., J - r]
        den = osc[..., J - r - 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ok &= (den > 0) & (num / np.where(den > 0, den, 1.0) > cfg.oscillation_ratio)
    return ok


def _ball_paths(domain: Domain, centers: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Circles about a ball's center through each probe center: (C, 2n, len(u), n)."""
    c = domain.center
    v = centers - c
    r = np.linalg.norm(v, axis=1)
    C, n = centers.shape
    out = np.full((C, 2 * n, len(u), n), np.nan)
    good = r > 1e-12
    vhat = np.zeros_like(v)
    vhat[good] = v[good] / r[good, None]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        w = e - (vhat @ e)[:, None] * vhat
        wn = np.linalg.norm(w, axis=1)
        ok = good & (wn > 1e-9)
        w[ok] /= wn[ok, None]
        for si, s in enumerate((1.0, -1.0)):
            theta = s * u[None, :] / np.where(ok, r, 1.0)[:, None]
            pts = (c + r[:, None, None] * (np.cos(theta)[..., None] * vhat[:, None, :]
                                           + np.sin(theta)[..., None] * w[:, None, :]))
            out[ok, 2 * j + si] = pts[ok]
    return out


def probe_points(evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray], centers: np.ndarray,
                 rho: float, ladder: Ladder, domain: Domain, tol: float,
                 power: bool = True, nfields: int = 0, chunk: int = 1_500_000,
                 diagonals: bool = True, circles: bool = True) -> ProbeResult:
    """Probe ``evaluate`` around each row of ``centers``.

    ``evaluate(P, rows)`` receives a (B, n) batch and the center index of
    each point and returns (B,) values, or (B, nfields) when nfields > 0.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    C, n = centers.shape
    lin, pw, ks = families(n, power, diagonals)
    t, lev1 = ladder.offsets()
    nb = 2 * len(lin)
    u = rho * t
    # branch displacements (nb, T, n)
    D = np.empty((nb, len(t), n))
    labels = []
    for f in range(len(lin)):
        for si, sigma in enumerate((1.0, -1.0)):
            uu = sigma * u
            D[2 * f + si] = uu[:, None] * lin[f] + (uu ** ks[f])[:, None] * pw[f]
            labels.append(family_label(lin[f], pw[f], int(ks[f]), sigma))
    use_ball = circles and isinstance(domain, Ball)
    if use_ball:
        labels += [f"circle about the ball center, plane {j + 1}, side {'+' if s > 0 else '-'}"
                   for j in range(n) for s in (1.0, -1.0)]
    nbranch = len(labels)
    S = nbranch * len(t)
    lev = np.tile(lev1, nbranch)
    K = max(nfields, 1)
    L = ladder.levels + 1
    osc = np.zeros((C, K, L))
    cvals = np.zeros((C, K))
    worst = np.zeros((C, K, n))
    worst_col = np.zeros((C, K), dtype=np.int64)
    finest = lev == ladder.levels
    step = max(1, chunk // max(S, 1))
    for a in range(0, C, step):
        b = min(C, a + step)
        cc = centers[a:b]
        P = cc[:, None, None, :] + D[None, :, :, :]
        if use_ball:
            extra = _ball_paths(domain, cc, u)
            P = np.concatenate([P, extra], axis=1)
        P = P.reshape(b - a, S, n)
        flat = P.reshape(-1, n)
        if use_ball:
            inside = np.isfinite(flat).all(axis=1)
            inside[inside] = domain.contains(flat[inside], tol)
        else:
            inside = domain.contains(flat, tol)
        vals = np.full((len(flat), K), np.nan)
        if inside.all():
            got = evaluate(flat, np.repeat(np.arange(a, b), S))
            vals[:] = np.asarray(got, dtype=float).reshape(-1, K)
        elif inside.any():
            rows = np.repeat(np.arange(a, b), inside.reshape(b - a, S).sum(axis=1))
            got = np.asarray(evaluate(flat[inside], rows), dtype=float)
            vals[inside] = got.reshape(-1, K)
        cv = np.asarray(evaluate(cc, np.arange(a, b)), dtype=float).reshape(-1, K)
        vals = vals.reshape(b - a, S, K)
        for k in range(K):
            osc[a:b, k] = _osc(vals[:, :, k], lev, cv[:, k], L)
            if not ladder.track_worst:
                continue
            dev = np.abs(vals[:, :, k] - cv[:, k, None])
            dev = np.where(np.isnan(dev) | ~finest[None, :], -1.0, dev)
            arg = dev.argmax(axis=1)
            worst[a:b, k] = P[np.arange(b - a), arg]
            worst_col[a:b, k] = arg // len(t)
        cvals[a:b] = cv
    if nfields == 0:
        return ProbeResult(osc[:, 0], cvals[:, 0], worst[:, 0], _Labels(labels, worst_col[:, 0]))
    return ProbeResult(osc, cvals, worst, _Labels(labels, worst_col))


def probe_params(evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray], lam: np.ndarray,
                 rho: float, ladder: Ladder, nfields: int = 0) -> ProbeResult:
    """One-dimensional probe on [0, 1]; ``evaluate(lam, rows)`` like probe_points."""
    lam = np.asarray(lam, dtype=float)
    C = len(lam)
    t, lev1 = ladder.offsets()
    off = np.concatenate([rho * t, -rho * t])
    lev = np.concatenate([lev1, lev1])
    S = len(off)
    K = max(nfields, 1)
    L = ladder.levels + 1
    P = lam[:, None] + off[None, :]
    flat = P.ravel()
    rows = np.repeat(np.arange(C), S)
    inside = (flat >= 0.0) & (flat <= 1.0)
    vals = np.full((len(flat), K), np.nan)
    if inside.any():
        vals[inside] = np.asarray(evaluate(flat[inside], rows[inside]), dtype=float).reshape(-1, K)
    cv = np.asarray(evaluate(lam, np.arange(C)), dtype=float).reshape(-1, K)
    vals = vals.reshape(C, S, K)
    osc = np.zeros((C, K, L))
    worst = np.zeros((C, K, 1))
    finest = lev == ladder.levels
    for k in range(K):
        osc[:, k] = _osc(vals[:, :, k], lev, cv[:, k], L)
        if not ladder.track_worst:
            continue
        dev = np.abs(vals[:, :, k] - cv[:, k, None])
        dev = np.where(np.isnan(dev) | ~finest[None, :], -1.0, dev)
        arg = dev.argmax(axis=1)
        worst[:, k, 0] = P[np.arange(C), arg]
    if nfields == 0:
        return ProbeResult(osc[:, 0], cv[:, 0], worst[:, 0], ["parameter"] * C)
    return ProbeResult(osc, cv, worst, [["parameter"] * K] * C)   # shared row, never mutated


@dataclass
class Hits:
    idx: np.ndarray        # candidate indices that survived refinement
    field: np.ndarray      # field index per hit
    point: np.ndarray      # worst sample at the finest level (point or parameter)
    label: list            # probe path of that sample
    center: np.ndarray     # center value per hit
    raw_idx: np.ndarray    # failed the full probe but not the refined one
    raw_field: np.ndarray

    def __len__(self) -> int:
        return len(self.idx)


def _flag(res: ProbeResult, cfg: CheckConfig, want) -> np.ndarray:
    osc = res.osc if res.osc.ndim == 3 else res.osc[:, None, :]
    cv = res.center if res.center.ndim == 2 else res.center[:, None]
    hit = persistent(osc, cfg)
    if want is not None:
        w = np.asarray(want, dtype=float)
        need = ~np.isnan(w)
        hit &= ~need[None, :] | (np.abs(cv - np.where(need, w, 0.0)[None, :]) < 0.5)
    return hit


def screen(run: Callable[[np.ndarray, float, Ladder], ProbeResult], idx: np.ndarray, rho: float,
           cfg: CheckConfig, want=None, chunk: int = 512) -> Hits:
    """Coarse, full and refined probes over candidate indices.

    ``run(sub_idx, rho, ladder)`` probes the given candidates.  ``want`` is
    an optional (K,) array of required center values (NaN = any).
    """
    idx = np.asarray(idx, dtype=int)
    none = np.zeros(0, int)
    empty = Hits(none, none, np.zeros((0, 1)), [], np.zeros(0), none, none)
    if len(idx) == 0:
        return empty
    coarse_cfg = CheckConfig(cmp_tolerance=cfg.cmp_tolerance, refinement_rounds=1,
                             continuity_modulus_budget=cfg.continuity_modulus_budget,
                             oscillation_ratio=cfg.oscillation_ratio)
    hit0 = _flag(run(idx, rho, COARSE), coarse_cfg, want)
    flagged = hit0.any(axis=1)
    stage1, hit0 = idx[flagged], hit0[flagged]
    if len(stage1) == 0:
        return empty
    # confirm in chunks; once a field has a confirmed hit, candidates flagged
    # only for confirmed fields are skipped (verdicts are unaffected)
    done = np.zeros(hit0.shape[1], dtype=bool)
    parts = []
    pos = 0
    while pos < len(stage1):
        todo = np.flatnonzero((hit0[pos:] & ~done[None, :]).any(axis=1))[:chunk] + pos
        if len(todo) == 0:
            break
        parts.append(_confirm(run, stage1[todo], rho, cfg, want))
        done |= np.isin(np.arange(len(done)), parts[-1].field)
        pos = todo[-1] + 1
    parts = [h for h in parts if len(h.idx) or len(h.raw_idx)]
    if not parts:
        return empty
    return Hits(np.concatenate([h.idx for h in parts]), np.concatenate([h.field for h in parts]),
                np.concatenate([h.point for h in parts]), sum((h.label for h in parts), []),
                np.concatenate([h.center for h in parts]), np.concatenate([h.raw_idx for h in parts]),
                np.concatenate([h.raw_field for h in parts]))


def _confirm(run, stage1: np.ndarray, rho: float, cfg: CheckConfig, want) -> Hits:
    none = np.zeros(0, int)
    hit1 = _flag(run(stage1, rho, FULL), cfg, want)
    keep = hit1.any(axis=1)
    stage2, hit1 = stage1[keep], hit1[keep]
    if len(stage2) == 0:
        return Hits(none, none, np.zeros((0, 1)), [], np.zeros(0), none, none)
    res2 = run(stage2, rho / 2, FINE)
    hit2 = _flag(res2, cfg, want) & hit1
    rows, fields = np.nonzero(hit2)
    raw_rows, raw_fields = np.nonzero(hit1 & ~hit2)
    wp = res2.worst_point if res2.worst_point.ndim == 3 else res2.worst_point[:, None, :]
    cv = res2.center if res2.center.ndim == 2 else res2.center[:, None]
    labs = [res2.worst_label[r] if isinstance(res2.worst_label[r], str) else res2.worst_label[r][f]
            for r, f in zip(rows, fields)]
    return Hits(stage2[rows], fields, wp[rows, fields], labs, cv[rows, fields],
                stage2[raw_rows], raw_fields)
