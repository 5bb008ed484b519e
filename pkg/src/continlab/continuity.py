"""Continuity postulates for relations: sections, graph, lines, mixtures,
Archimedean variants, Wold solvability and their smooth-arc versions.

Closedness and openness are tested the same way throughout: an indicator
field (membership of a moving point in a section of a reference point) is
probed at nested scales around its flip nodes.  A point outside a section
that keeps seeing members at every scale breaks closedness; a point inside a
strict section that keeps seeing non-members breaks openness.
"""
from __future__ import annotations

import functools
import itertools
import weakref
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (CheckConfig, PropertyReport, Reason, Robustness, Witness, combine, fails,
                   holds, lambda_floor, rng_for, unresolved)
from .functions import arc_family
from .geometry import (Ball, Domain, affine_basis, grid_nodes, sample_segments,
                       sample_smooth_arcs)
from .probe import probe_params, probe_points, screen
from .relations import Relation, check_order_density, reference_points

POSTULATES = (
    "closed-upper-sections", "closed-lower-sections", "open-strict-upper", "open-strict-lower",
    "continuous", "graph-continuous", "linear-continuous",
    "upper-mixture-continuous", "lower-mixture-continuous", "mixture-continuous",
    "upper-archimedean", "lower-archimedean", "archimedean",
    "upper-strict-archimedean", "lower-strict-archimedean", "strict-archimedean",
    "wold-continuous", "weak-wold-continuous",
    "arc-continuous", "strong-mixture-continuous", "strong-archimedean", "strong-strict-archimedean",
)

# section fields of a moving point P against a reference z
FIELDS = ("upper", "lower", "strict-upper", "strict-lower")
SECTION_IDS = dict(zip(FIELDS, POSTULATES[:4]))
WANT = {"upper": 0.0, "lower": 0.0, "strict-upper": 1.0, "strict-lower": 1.0}
REF_LIMIT = 24


def fields_at(rel: Relation, P: np.ndarray, Z: np.ndarray, tol: float,
              names=FIELDS, zidx: np.ndarray | None = None) -> np.ndarray:
    """(B, len(names)) indicator matrix.

    Z is broadcast against P, or, with ``zidx``, is a table indexed row-wise.
    """
    if zidx is not None:
        up, lo = rel.both_indexed(P, Z, zidx, tol)
    else:
        up, lo = rel.both(P, np.broadcast_to(Z, P.shape), tol)
    table = {"upper": up, "lower": lo, "strict-upper": up & ~lo, "strict-lower": lo & ~up}
    return np.stack([table[k] for k in names], axis=1).astype(float)


def _refs(rel: Relation, cfg: CheckConfig, tag: str) -> np.ndarray:
    return reference_points(rel.domain, cfg, tag, 8, rel)[:REF_LIMIT]


def _raw_note(hits) -> str:
    return f"{len(hits.raw_idx)} candidates cleared by refinement" if len(hits.raw_idx) else ""


# section continuity

_SECTION_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def check_section_kinds(rel: Relation, cfg: CheckConfig) -> dict[str, PropertyReport]:
    """One report per section kind (closed weak sections, open strict sections).

    Results are cached per (relation, config) since continuity, graph
    continuity and the four kinds all start from them.
    """
    per_rel = _SECTION_CACHE.setdefault(rel, {})
    if cfg not in per_rel:
        per_rel[cfg] = _section_kinds(rel, cfg)
    return dict(per_rel[cfg])


def _section_kinds(rel: Relation, cfg: CheckConfig) -> dict[str, PropertyReport]:
    dom = rel.domain
    tol = cfg.cmp_tolerance
    refs = _refs(rel, cfg, "sections")
    grid = grid_nodes(dom, cfg.grid_resolution, cfg)
    nodes = grid.points[grid.member]
    h = max(grid.spacing, 1e-6)
    lm = dom.landmarks()
    cand_ref, cand_pt = [], []
    for r, z in enumerate(refs):
        F = fields_at(rel, nodes, z, tol)
        flips = np.zeros(len(nodes), dtype=bool)
        for k in range(len(FIELDS)):
            full = np.full(len(grid.points), -1, dtype=np.int8)
            full[grid.member] = F[:, k].astype(np.int8)
            flips |= _kernels.grid_flip_nodes(full.reshape(grid.shape)).ravel()[grid.member]
        pts = np.vstack([lm, nodes[flips]])
        cand_ref.append(np.full(len(pts), r))
        cand_pt.append(pts)
    cand_ref = np.concatenate(cand_ref)
    cand_pt = np.vstack(cand_pt)
    want = np.array([WANT[k] for k in FIELDS])

    def run(sub, rho, ladder):
        zr = refs[cand_ref[sub]]
        return probe_points(lambda P, rows: fields_at(rel, P, zr[rows], tol),
                            cand_pt[sub], rho, ladder, dom, tol, nfields=len(FIELDS))

    hits = screen(run, np.arange(len(cand_pt)), h, cfg, want=want)
    out = {}
    for k, name in enumerate(FIELDS):
        pid = SECTION_IDS[name]
        sel = np.flatnonzero(hits.field == k)
        if len(sel) == 0:
            out[pid] = holds(pid, cfg, len(cand_pt), _raw_note(hits))
            continue
        order = sorted(sel, key=lambda s: (int(cand_ref[hits.idx[s]]), int(hits.idx[s])))
        wits = []
        for s in order[:3]:
            i = hits.idx[s]
            z, p = refs[cand_ref[i]], cand_pt[i]
            if name in ("upper", "lower"):
                what = (f"{name} section of the first point is not closed: the second point is a limit "
                        f"of members reached along {hits.label[s]}; the third point is a member nearby")
            else:
                what = (f"{name} section of the first point is not open: the second point is a member "
                        f"but non-members accumulate along {hits.label[s]}; the third point is one of them")
            wits.append(Witness.make([z, p, hits.point[s]], [], what))
        out[pid] = fails(pid, cfg, len(cand_pt), wits)
    return out


def check_section_continuity(rel: Relation, cfg: CheckConfig,
                             kinds: dict[str, PropertyReport] | None = None) -> PropertyReport:
    kinds = kinds or check_section_kinds(rel, cfg)
    return combine("continuous", cfg, list(kinds.values()))


# graph continuity

class _Product(Domain):
    """X x X as a 2n-dimensional membership test (probe support only)."""

    def __init__(self, base: Domain):
        self.base = base
        self.n = 2 * base.n

    def _member(self, P, tol):
        n = self.base.n
        return self.base.contains(P[:, :n], tol) & self.base.contains(P[:, n:], tol)


GRAPH_CAP = 3000


def check_graph_continuity(rel: Relation, cfg: CheckConfig,
                           kinds: dict[str, PropertyReport] | None = None) -> PropertyReport:
    """Closed graph of the weak part and open graph of the strict part.

    A section failure is already a graph failure (fix the reference point),
    so it is reported directly; otherwise joint perturbations of both
    coordinates are probed around pairs near the graph boundary.
    """
    pid = "graph-continuous"
    sec = check_section_continuity(rel, cfg, kinds)
    if sec.verdict.value == "Fails":
        return fails(pid, cfg, sec.samples_used, sec.witnesses,
                     "a section failure fixes one argument of a graph failure")
    dom = rel.domain
    n = dom.n
    tol = cfg.cmp_tolerance
    refs = _refs(rel, cfg, "graph")
    grid = grid_nodes(dom, cfg.grid_resolution, cfg)
    nodes = grid.points[grid.member]
    h = max(grid.spacing, 1e-6)
    pairs = []
    for z in refs:
        F = fields_at(rel, nodes, z, tol, ("upper", "strict-upper"))
        flips = np.zeros(len(nodes), dtype=bool)
        for k in range(2):
            full = np.full(len(grid.points), -1, dtype=np.int8)
            full[grid.member] = F[:, k].astype(np.int8)
            flips |= _kernels.grid_flip_nodes(full.reshape(grid.shape)).ravel()[grid.member]
        for p in nodes[flips]:
            pairs.append(np.concatenate([p, z]))
            pairs.append(np.concatenate([z, p]))
    for a, b in itertools.product(dom.landmarks()[:6], repeat=2):
        pairs.append(np.concatenate([a, b]))
    cand = np.array(pairs)
    if len(cand) > GRAPH_CAP:
        cand = cand[np.linspace(0, len(cand) - 1, GRAPH_CAP).astype(int)]
    prod = _Product(dom)

    def ev(P, rows):
        up = rel.weak(P[:, :n], P[:, n:], tol)
        st = up & ~rel.weak(P[:, n:], P[:, :n], tol)
        return np.stack([up, st], axis=1).astype(float)

    def run(sub, rho, ladder):
        return probe_points(ev, cand[sub], rho, ladder, prod, tol, nfields=2, circles=False)

    hits = screen(run, np.arange(len(cand)), h, cfg, want=np.array([0.0, 1.0]))
    used = sec.samples_used + len(cand)
    if not len(hits):
        return holds(pid, cfg, used, _raw_note(hits))
    wits = []
    for s in range(min(3, len(hits))):
        c = cand[hits.idx[s]]
        q = hits.point[s]
        part = "weak part is not closed" if hits.field[s] == 0 else "strict part is not open"
        wits.append(Witness.make([c[:n], c[n:], q[:n], q[n:]], [],
                                 f"graph test: {part} at the pair (first, second); "
                                 f"the last two points are a nearby pair along {hits.label[s]}"))
    return fails(pid, cfg, used, wits)


# one-dimensional engine over curves

@dataclass
class LambdaSet:
    """Indicator samples of a section of ``reference`` along a parametrised curve."""

    coef: np.ndarray        # (4, n) cubic, m(0) = start, m(1) = end
    reference: np.ndarray
    lam: np.ndarray
    indicator: np.ndarray   # (M, 4) over FIELDS

    @classmethod
    def build(cls, rel: Relation, coef: np.ndarray, reference, cfg: CheckConfig) -> "LambdaSet":
        lam = np.linspace(0.0, 1.0, cfg.lambda_resolution)
        P = _curve_at(coef[None], np.zeros(len(lam), int), lam)
        return cls(coef, np.asarray(reference, float), lam,
                   fields_at(rel, P, np.asarray(reference, float), cfg.cmp_tolerance))


def _curve_at(coefs: np.ndarray, rows: np.ndarray, lam: np.ndarray) -> np.ndarray:
    c = coefs[rows]
    l = lam[:, None]
    return c[:, 0] + l * (c[:, 1] + l * (c[:, 2] + l * c[:, 3]))


@dataclass
class CurveHits:
    rows: np.ndarray
    field: np.ndarray
    lam: np.ndarray
    near: np.ndarray
    raw: int
    candidates: int


def _curve_screen(rel: Relation, coefs: np.ndarray, refs: np.ndarray, names, cfg: CheckConfig,
                  chunk_rows: int = 2000) -> CurveHits:
    """Probe section fields of refs[r] along coefs[r] for every row r.

    Rows are handled in chunks; the scan stops after the first chunk with a
    confirmed hit, since one witness settles the verdict.
    """
    tol = cfg.cmp_tolerance
    M = cfg.lambda_resolution
    lam = np.linspace(0.0, 1.0, M)
    K = len(names)
    want = np.array([WANT[k] for k in names])
    raw = seen = 0
    empty = np.zeros(0, int)
    for a in range(0, len(coefs), chunk_rows):
        b = min(len(coefs), a + chunk_rows)
        rows = np.repeat(np.arange(a, b), M)
        lams = np.tile(lam, b - a)
        P = _curve_at(coefs, rows, lams)
        F = fields_at(rel, P, refs, tol, names, zidx=rows).reshape(b - a, M, K)
        mask = np.zeros((b - a, M), dtype=bool)
        for k in range(K):
            mask |= _kernels.flip_nodes(F[:, :, k].astype(np.int8))
        mask[:, 0] = mask[:, -1] = True
        r, c = np.nonzero(mask)
        cand_rows, cand_lam = r + a, lam[c]
        seen += len(cand_rows)

        def run(sub, rho, ladder, cand_rows=cand_rows, cand_lam=cand_lam):
            rr = cand_rows[sub]

            def ev(l, local):
                row = rr[local]
                return fields_at(rel, _curve_at(coefs, row, l), refs, tol, names, zidx=row)
            return probe_params(ev, cand_lam[sub], rho, ladder, nfields=K)

        hits = screen(run, np.arange(len(cand_rows)), 1.0 / (M - 1), cfg, want=want)
        raw += len(hits.raw_idx)
        if len(hits):
            return CurveHits(cand_rows[hits.idx], hits.field, cand_lam[hits.idx],
                             np.asarray(hits.point)[:, 0], raw, seen)
    return CurveHits(empty, empty, np.zeros(0), np.zeros(0), raw, seen)


def _curve_witnesses(h: CurveHits, coefs, refs, names, what: str, limit: int = 3) -> list[Witness]:
    out = []
    for s in range(min(limit, len(h.rows))):
        r = h.rows[s]
        c = coefs[r]
        l0, l1 = float(h.lam[s]), float(h.near[s])
        pt = lambda l: c[0] + l * (c[1] + l * (c[2] + l * c[3]))
        field = names[h.field[s]]
        kind = "not closed" if WANT[field] == 0 else "not open"
        out.append(Witness.make(
            [c.sum(axis=0), c[0], refs[r], pt(l0), pt(l1)], [l0, l1],
            f"{what}: {field} parameter set of the third point is {kind} at the first "
            f"parameter (curve end, curve start, reference, point, nearby sample)"))
    return out


def _segment_coefs(X, Y) -> np.ndarray:
    """Cubic coefficients of lam -> lam*X + (1 - lam)*Y."""
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    c = np.zeros((len(X), 4, X.shape[1]))
    c[:, 0] = Y
    c[:, 1] = X - Y
    return c


def _curve_report(pid: str, rel: Relation, coefs, refs, names, cfg, what: str, note: str = "") -> PropertyReport:
    if len(coefs) == 0:
        return holds(pid, cfg, 0, "vacuous: no curves")
    h = _curve_screen(rel, coefs, refs, names, cfg)
    extra = f"{h.raw} candidates cleared by refinement" if h.raw else ""
    notes = "; ".join(x for x in (note, extra) if x)
    if not len(h.rows):
        return holds(pid, cfg, len(coefs), notes)
    return fails(pid, cfg, len(coefs), _curve_witnesses(h, coefs, refs, names, what), notes)


# linear continuity

def _check_linear_continuity(rel: Relation, cfg: CheckConfig, mode: str = "sections") -> PropertyReport:
    """Section continuity of the restriction to every sampled segment.

    ``mode="sections"`` intersects sections of every point of X with the
    segment; ``mode="pairs"`` only compares points of the segment itself.
    """
    pid = "linear-continuous"
    dom = rel.domain
    if affine_basis(dom, cfg).dim < 1:
        raise ValueError("linear continuity needs a domain of affine dimension >= 1")
    segs = sample_segments(dom, cfg.sample_count, cfg)
    S = np.array([s.coefficients() for s in segs])
    if mode == "sections":
        refs = _refs(rel, cfg, "linear")
        coefs = np.repeat(S, len(refs), axis=0)
        R = np.tile(refs, (len(S), 1))
    elif mode == "pairs":
        on = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        coefs = np.repeat(S, len(on), axis=0)
        R = np.vstack([_curve_at(S, np.full(len(on), i), on) for i in range(len(S))])
    else:
        raise ValueError("mode must be 'sections' or 'pairs'")
    rep = _curve_report(pid, rel, coefs, R, FIELDS, cfg, f"segment restriction ({mode})",
                        f"{len(segs)} segments")
    return rep


# mixture continuity

def _triples(rel: Relation, cfg: CheckConfig, tag: str, count: int):
    """Landmark pairs against every pool point, then seeded triples over the pool."""
    pool = reference_points(rel.domain, cfg, tag, 32, rel)
    lm = rel.domain.landmarks()
    k = min(len(lm), 5)
    ij = np.array([(i, j) for i in range(k) for j in range(k) if i != j]).reshape(-1, 2)
    bx = np.repeat(lm[ij[:, 0]], len(pool), axis=0)
    by = np.repeat(lm[ij[:, 1]], len(pool), axis=0)
    bz = np.tile(pool, (len(ij), 1))
    rng = rng_for(cfg, tag, 1)
    rand = rng.integers(0, len(pool), size=(count, 3))
    X = np.vstack([bx, pool[rand[:, 0]]])
    Y = np.vstack([by, pool[rand[:, 1]]])
    Z = np.vstack([bz, pool[rand[:, 2]]])
    keep = np.any(np.abs(X - Y) > 1e-12, axis=1)
    return X[keep], Y[keep], Z[keep]


SIDES = {"upper": ("upper",), "lower": ("lower",), "both": ("upper", "lower")}


def _check_mixture_continuity(rel: Relation, side: str, cfg: CheckConfig) -> PropertyReport:
    if side not in SIDES:
        raise ValueError(f"unknown side {side!r}")
    pid = "mixture-continuous" if side == "both" else f"{side}-mixture-continuous"
    X, Y, Z = _triples(rel, cfg, "mixture", 2 * cfg.sample_count)
    return _curve_report(pid, rel, _segment_coefs(X, Y), Z, SIDES[side], cfg,
                         "mixture set", f"{len(X)} triples")


# Archimedean family

def _approach(M: int, depth: int) -> np.ndarray:
    """Interior λ-grid plus a geometric approach to 1."""
    grid = np.linspace(0.0, 1.0, M)[1:-1]
    geo = 1.0 - 2.0 ** (-np.arange(1, 8 * depth + 1) / 8.0)
    lam = np.unique(np.concatenate([grid, geo]))
    return lam[lam < 1.0]  # deep steps round to 1.0, which is not interior


def _strict_pairs(rel: Relation, cfg: CheckConfig, tag: str):
    X, Y, Z = _triples(rel, cfg, tag, 2 * cfg.sample_count)
    s = rel.strict(X, Y, cfg.cmp_tolerance)
    return X[s], Y[s], Z[s]


def _plain_side(rel: Relation, side: str, cfg: CheckConfig, coefs_of) -> PropertyReport:
    pid = f"{side}-archimedean"
    X, Y, Z = _strict_pairs(rel, cfg, "archimedean")
    if len(X) == 0:
        return holds(pid, cfg, 0, "vacuous: no strict pairs among samples")
    tol = cfg.cmp_tolerance

    def found(rows, lams):
        ok = np.zeros(len(rows), dtype=bool)
        for a in range(0, len(rows), 256):
            r = rows[a:a + 256]
            L = len(lams)
            rr = np.repeat(r, L)
            ll = np.tile(lams, len(r))
            if side == "upper":
                P = lams_point(X[rr], Z[rr], ll)
                hit = rel.strict(P, Y[rr], tol)
            else:
                P = lams_point(Y[rr], Z[rr], ll)
                hit = rel.strict(X[rr], P, tol)
            ok[a:a + 256] = hit.reshape(len(r), L).any(axis=1)
        return ok

    lams_point = coefs_of
    rows = np.arange(len(X))
    ok = found(rows, _approach(cfg.lambda_resolution, 30))
    bad = rows[~ok]
    if len(bad):
        bad = bad[~found(bad, _approach(cfg.refined().lambda_resolution, 60))]
    if len(bad):
        r = bad[0]
        what = ("x > y but no mixture of x with z (the third point) is strictly above y" if side == "upper"
                else "x > y but x is strictly above no mixture of y with z")
        return fails(pid, cfg, len(X), [Witness.make([X[r], Y[r], Z[r]], [], what + " on the refined λ-grid")])
    return holds(pid, cfg, len(X))


def _mix(A, B, lam):
    return lam[:, None] * A + (1 - lam[:, None]) * B


def _check_archimedean(rel: Relation, variant: str, side: str, cfg: CheckConfig) -> PropertyReport:
    if side not in SIDES:
        raise ValueError(f"unknown side {side!r}")
    if variant == "plain":
        parts = [_plain_side(rel, s, cfg, _mix) for s in SIDES[side]]
        pid = "archimedean" if side == "both" else f"{side}-archimedean"
    elif variant == "strict":
        pid = "strict-archimedean" if side == "both" else f"{side}-strict-archimedean"
        X, Y, Z = _triples(rel, cfg, "strict-archimedean", 2 * cfg.sample_count)
        names = tuple(f"strict-{s}" for s in SIDES[side])
        return _curve_report(pid, rel, _segment_coefs(X, Y), Z, names, cfg,
                             "strict mixture set", f"{len(X)} triples")
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if len(parts) == 1:
        return parts[0]
    return combine(pid, cfg, parts)


# Wold family

def bisect_indifference(rel: Relation, coefs: np.ndarray, Z: np.ndarray, tol: float,
                        iters: int = 80) -> tuple[np.ndarray, np.ndarray]:
    """Search m_r(λ) ~ z_r on every row given m_r(1) > z_r > m_r(0).

    Returns (status, λ) with status 1 = found, 0 = missed, -1 = met an
    incomparable point.
    """
    R = len(coefs)
    lo, hi = np.zeros(R), np.ones(R)
    status = np.zeros(R, dtype=int)
    at = np.full(R, 0.5)
    rows = np.arange(R)
    for _ in range(iters):
        live = status == 0
        if not live.any():
            break
        r = rows[live]
        mid = 0.5 * (lo[r] + hi[r])
        P = _curve_at(coefs, r, mid)
        a = rel.weak(P, Z[r], tol)
        b = rel.weak(Z[r], P, tol)
        at[r] = mid
        status[r[a & b]] = 1
        status[r[~a & ~b]] = -1
        up = a & ~b
        dn = b & ~a
        hi[r[up]] = mid[up]
        lo[r[dn]] = mid[dn]
    return status, at


SCAN_FLOOR = 4097


def _scan_solve(rel: Relation, coef: np.ndarray, z: np.ndarray, tol: float, M: int) -> bool:
    """Dense fallback: bisect inside every bracket where the comparison with z flips."""
    # a miss here is reported as Fails, so the scan never gets coarser than SCAN_FLOOR
    lam = np.unique(np.concatenate([np.linspace(0.0, 1.0, max(M, SCAN_FLOOR)), 2.0 ** -np.arange(1, 200, 0.25),
                                    1.0 - 2.0 ** -np.arange(1, 50, 0.25)]))
    P = _curve_at(coef[None], np.zeros(len(lam), int), lam)
    a = rel.weak(P, z[None, :], tol)
    b = rel.weak(z[None, :], P, tol)
    if (a & b).any():
        return True
    sgn = np.where(a & ~b, 1, np.where(b & ~a, -1, 0))
    k = np.flatnonzero((sgn[:-1] * sgn[1:]) < 0)[:64]
    if len(k) == 0:
        return False
    for i in k:
        lo, hi = (lam[i], lam[i + 1]) if sgn[i] < 0 else (lam[i + 1], lam[i])
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            p = _curve_at(coef[None], np.zeros(1, int), np.array([mid]))
            wa = bool(rel.weak(p, z[None, :], tol)[0])
            wb = bool(rel.weak(z[None, :], p, tol)[0])
            if wa and wb:
                return True
            if wa:
                hi = mid
            elif wb:
                lo = mid
            else:
                break
    return False


def _solvability(rel: Relation, cfg: CheckConfig, full: bool) -> PropertyReport:
    pid = "wold-solvable" if full else "weak-wold-solvable"
    tol = cfg.cmp_tolerance
    X, Y, Z = _triples(rel, cfg, "wold", 2 * cfg.sample_count)
    ok = rel.strict(X, Z, tol) & rel.strict(Z, Y, tol)
    X, Y, Z = X[ok], Y[ok], Z[ok]
    if len(X) == 0:
        return holds(pid, cfg, 0, "vacuous: no triple x > z > y among samples")
    if full:
        keep = np.unique(np.round(np.hstack([X, Y]), 12), axis=0, return_index=True)[1]
        keep = np.sort(keep)[:40]
        coefs, zs, owner = [], [], []
        for t in keep:
            arcs = sample_smooth_arcs(rel.domain, X[t], Y[t], 8, cfg, tag="wold")
            coefs += [a.coef for a in arcs]
            owner += [t] * len(arcs)
        owner = np.array(owner)
        # every z seen with this (x, y) pair
        C, Zr, T = [], [], []
        for c, t in zip(coefs, owner):
            same = np.flatnonzero(np.all(X == X[t], axis=1) & np.all(Y == Y[t], axis=1))[:8]
            for s in same:
                C.append(c)
                Zr.append(Z[s])
                T.append(s)
        coefs, Zr, T = np.array(C), np.array(Zr), np.array(T)
    else:
        coefs, Zr, T = _segment_coefs(X, Y), Z, np.arange(len(X))
    status, lam = bisect_indifference(rel, coefs, Zr, tol)
    if (status == -1).any():
        return unresolved(pid, cfg, len(coefs), Reason.TOLERANCE_AMBIGUITY,
                          "bisection met an incomparable point; solvability is ill-posed here")
    miss = np.flatnonzero(status == 0)
    if len(miss):
        still = [r for r in miss if not _scan_solve(rel, coefs[r], Zr[r], tol, cfg.lambda_resolution)]
        still = [r for r in still if not _scan_solve(rel, coefs[r], Zr[r], tol / 2,
                                                     cfg.refined().lambda_resolution)]
        if len(still):
            r = still[0]
            t = T[r]
            pt = _curve_at(coefs, np.array([r]), lam[r:r + 1])[0]
            return fails(pid, cfg, len(coefs), [Witness.make(
                [X[t], Z[t], Y[t], pt], [float(lam[r])],
                "the curve from the third point to the first never meets the indifference "
                "class of the second; the last point is where bisection closed in")])
    return holds(pid, cfg, len(coefs))


def _check_wold(rel: Relation, variant: str, cfg: CheckConfig) -> PropertyReport:
    if variant not in ("weak", "full"):
        raise ValueError(f"unknown Wold variant {variant!r}")
    pid = "weak-wold-continuous" if variant == "weak" else "wold-continuous"
    dense = check_order_density(rel, cfg)
    solv = _solvability(rel, cfg, variant == "full")
    return combine(pid, cfg, [dense, solv])


# smooth-arc family

ARC_KINDS = ("arc-continuous", "strong-mixture", "strong-archimedean", "strong-strict-archimedean")


def _arc_coefs(rel: Relation, cfg: CheckConfig, tag: str, X, Y, per_pair: int = 6) -> np.ndarray:
    out = []
    for x, y in zip(X, Y):
        try:
            arcs = sample_smooth_arcs(rel.domain, x, y, per_pair, cfg, tag=tag)
        except ValueError:
            continue
        out += [a.coef for a in arcs]
    return np.array(out).reshape(-1, 4, rel.domain.n)


def _arc_triples(rel: Relation, cfg: CheckConfig, tag: str, per_pair: int = 6, extra: int = 60):
    """Arcs between landmark pairs against every reference point, then
    arcs of seeded triples."""
    dom = rel.domain
    n = dom.n
    refs = _refs(rel, cfg, tag)
    lm = dom.landmarks()[:5]
    C, Zs = [], []
    for i, j in itertools.permutations(range(len(lm)), 2):
        c = _arc_coefs(rel, cfg, tag, [lm[i]], [lm[j]], per_pair)
        C.append(np.repeat(c, len(refs), axis=0))
        Zs.append(np.tile(refs, (len(c), 1)))
    X, Y, Z = _triples(rel, cfg, tag, extra)
    for x, y, z in zip(X[-extra:], Y[-extra:], Z[-extra:]):
        c = _arc_coefs(rel, cfg, tag, [x], [y], per_pair)
        C.append(c)
        Zs.append(np.repeat(z[None], len(c), axis=0))
    return np.vstack(C).reshape(-1, 4, n), np.vstack(Zs).reshape(-1, n)


def _check_arc_and_strong(rel: Relation, kind: str, cfg: CheckConfig) -> PropertyReport:
    if kind not in ARC_KINDS:
        raise ValueError(f"unknown arc kind {kind!r}")
    dom = rel.domain
    if affine_basis(dom, cfg).dim < 1:
        raise ValueError("arc checks need a domain of affine dimension >= 1")
    if kind == "arc-continuous":
        refs = _refs(rel, cfg, "arc")
        lm = dom.landmarks()
        anchors = lm[:1]
        coefs = np.array(arc_family(dom, cfg, anchors, tag="arc-family"))
        segs = np.array([s.coefficients() for s in sample_segments(dom, min(cfg.sample_count, 100), cfg)])
        coefs = np.vstack([segs, coefs.reshape(-1, 4, dom.n)])
        C = np.repeat(coefs, len(refs), axis=0)
        R = np.tile(refs, (len(coefs), 1))
        return _curve_report(kind, rel, C, R, FIELDS, cfg, "arc restriction", f"{len(coefs)} curves")
    if kind == "strong-mixture":
        pid = "strong-mixture-continuous"
        C, Z = _arc_triples(rel, cfg, "strong-mixture")
        return _curve_report(pid, rel, C, Z, ("upper", "lower"), cfg, "arc mixture set", f"{len(C)} arcs")
    if kind == "strong-strict-archimedean":
        C, Z = _arc_triples(rel, cfg, "strong-strict")
        return _curve_report(kind, rel, C, Z, ("strict-upper", "strict-lower"), cfg,
                             "arc strict mixture set", f"{len(C)} arcs")
    # strong Archimedean: along every arc from z to x (resp. y) some interior
    # point keeps the strict comparison
    tol = cfg.cmp_tolerance
    X, Y, Z = _strict_pairs(rel, cfg, "strong-archimedean")
    X, Y, Z = X[:80], Y[:80], Z[:80]
    if len(X) == 0:
        return holds(kind, cfg, 0, "vacuous: no strict pairs among samples")
    used = 0
    lams = _approach(cfg.lambda_resolution, 30)
    lams2 = _approach(cfg.refined().lambda_resolution, 60)
    for x, y, z in zip(X, Y, Z):
        for side, (end, fixed) in (("upper", (x, y)), ("lower", (y, x))):
            if np.max(np.abs(end - z)) <= 1e-12:
                continue
            try:
                arcs = sample_smooth_arcs(dom, end, z, 6, cfg, tag="strong-arch")
            except ValueError:
                continue
            for a in arcs:
                used += 1
                for ls in (lams, lams2):
                    P = _curve_at(a.coef[None], np.zeros(len(ls), int), ls)
                    F = np.broadcast_to(fixed, P.shape)
                    hit = rel.strict(P, F, tol) if side == "upper" else rel.strict(F, P, tol)
                    if hit.any():
                        break
                else:
                    return fails(kind, cfg, used, [Witness.make(
                        [x, y, z], [], f"{side} side: no interior point of the {a.label} arc keeps "
                                       "the strict comparison on the refined λ-grid")])
    return holds(kind, cfg, used)


def _floored(fn):
    @functools.wraps(fn)
    def wrapped(*args, **kwargs):
        return lambda_floor(fn(*args, **kwargs))
    return wrapped


check_linear_continuity = _floored(_check_linear_continuity)
check_mixture_continuity = _floored(_check_mixture_continuity)
check_archimedean = _floored(_check_archimedean)
check_wold = _floored(_check_wold)
check_arc_and_strong = _floored(_check_arc_and_strong)
