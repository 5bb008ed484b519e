"""Binary relations on convex domains and their order, convexity, monotonicity
and algebraic postulates."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (CheckConfig, PropertyReport, Reason, Robustness, Witness, fails, holds,
                   rng_for, unresolved)
from .expr import Compiled
from .functions import RealFunction, function_from_dict
from .geometry import (Domain, Segment, affine_basis, domain_from_dict, grid_nodes, power_arc,
                       power_exponents)

ORDER_PROPERTIES = ("reflexive", "non-trivial", "complete", "symmetric", "asymmetric",
                    "anti-symmetric", "transitive", "negatively-transitive", "semi-transitive",
                    "transitive-indifference")
CONVEXITY_KINDS = ("convex-upper-sections", "convex-strict-sections", "convex-indifference",
                   "star-convex", "strictly-star-convex", "locally-convex-upper-sections",
                   "locally-convex-sections")
ALGEBRAIC_KINDS = ("additive", "homothetic", "independent")


class Comparison(str, enum.Enum):
    STRICT = "Strict"
    STRICT_REVERSED = "StrictReversed"
    INDIFFERENT = "Indifferent"
    INCOMPARABLE = "Incomparable"


class Relation:
    """``weak(X, Y, tol)`` answers X >= Y row-wise for (B, n) batches."""

    variant = "abstract"

    def __init__(self, domain: Domain, rid: str):
        self.domain = domain
        self.id = rid

    def weak(self, X: np.ndarray, Y: np.ndarray, tol: float) -> np.ndarray:
        raise NotImplementedError

    def both(self, X, Y, tol) -> tuple[np.ndarray, np.ndarray]:
        """(X >= Y, Y >= X) in one call."""
        return self.weak(X, Y, tol), self.weak(Y, X, tol)

    def both_indexed(self, X, refs, idx, tol) -> tuple[np.ndarray, np.ndarray]:
        """``both(X, refs[idx])`` for a small table of reference points."""
        return self.both(X, refs[idx], tol)

    def strict(self, X, Y, tol):
        a, b = self.both(X, Y, tol)
        return a & ~b

    def indifferent(self, X, Y, tol):
        a, b = self.both(X, Y, tol)
        return a & b

    @property
    def complete_by_construction(self) -> bool:
        return False

    def pool_hint(self) -> np.ndarray | None:
        """Extra points the samplers should include (e.g. tabulated nodes)."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


class UtilityInduced(Relation):
    variant = "utility"

    def __init__(self, domain: Domain, u: RealFunction, rid: str | None = None):
        super().__init__(domain, rid or f"utility:{u.id}")
        self.u = u

    def weak(self, X, Y, tol):
        return self.u(X) >= self.u(Y) - tol

    def both(self, X, Y, tol):
        ux, uy = self.u(X), self.u(Y)
        return ux >= uy - tol, uy >= ux - tol

    def both_indexed(self, X, refs, idx, tol):
        ux, uy = self.u(X), self.u(refs)[idx]
        return ux >= uy - tol, uy >= ux - tol

    @property
    def complete_by_construction(self):
        return True

    def to_dict(self):
        return {"variant": "utility", "utility": self.u.to_dict(), "domain": self.domain.to_dict()}


class PredicatePair(Relation):
    """A weak-relation oracle W(x, y); strict, indifferent and incomparable
    parts are derived from it."""

    variant = "predicate"

    def __init__(self, domain: Domain, W: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 rid: str, source: dict | None = None):
        super().__init__(domain, rid)
        self.W = W
        self.source = source or {"builtin": rid}

    def weak(self, X, Y, tol):
        X = np.atleast_2d(X)
        Y = np.atleast_2d(Y)
        X, Y = np.broadcast_arrays(X, Y)
        return np.asarray(self.W(X, Y), dtype=bool)

    def to_dict(self):
        return {"variant": "predicate", **self.source, "domain": self.domain.to_dict()}


class Tabulated(Relation):
    variant = "table"

    def __init__(self, domain: Domain, points, matrix, rid: str = "table"):
        super().__init__(domain, rid)
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.matrix = np.asarray(matrix, dtype=bool)
        if self.matrix.shape != (len(self.points),) * 2:
            raise ValueError("table matrix must be square over the point list")

    def _index(self, X):
        d = np.abs(X[:, None, :] - self.points[None, :, :]).max(axis=2)
        i = d.argmin(axis=1)
        return i, d[np.arange(len(X)), i] <= 1e-9

    def weak(self, X, Y, tol):
        X, Y = np.broadcast_arrays(np.atleast_2d(X), np.atleast_2d(Y))
        i, oki = self._index(X)
        j, okj = self._index(Y)
        return oki & okj & self.matrix[i, j]

    def pool_hint(self):
        return self.points

    def to_dict(self):
        return {"variant": "table", "table": {"points": self.points.tolist(),
                                              "matrix": self.matrix.astype(int).tolist()},
                "domain": self.domain.to_dict()}


def compare(rel: Relation, x, y, tol: float = 1e-9) -> Comparison:
    x = np.asarray(x, float)[None, :]
    y = np.asarray(y, float)[None, :]
    for p in (x, y):
        if not rel.domain.contains(p[0], tol):
            raise ValueError(f"point {p[0].tolist()} is outside the domain")
    a = bool(rel.weak(x, y, tol)[0])
    b = bool(rel.weak(y, x, tol)[0])
    if a and b:
        return Comparison.INDIFFERENT
    if a:
        return Comparison.STRICT
    if b:
        return Comparison.STRICT_REVERSED
    return Comparison.INCOMPARABLE


# builtin predicates used by the corpus

ON_CIRCLE = 1e-12


def _disk_classes(X, Y):
    def side(P, sign):
        a, b = P[:, 0], P[:, 1]
        off_circle = np.abs(a * a + b * b - 1.0) > ON_CIRCLE
        pole = (np.abs(a - sign) <= 1e-15) & (np.abs(b) <= 1e-15)
        return ((sign * a > 0) & off_circle) | pole
    return side(X, -1.0) & side(Y, 1.0)


def _open_anti_diagonal(P):
    a, b = P[:, 0], P[:, 1]
    return (np.abs(a + b - 1.0) <= 1e-12) & (a > 0) & (b > 0)


def _origin_anti_diagonal(X, Y):
    zx = (X[:, 0] == 0) & (X[:, 1] == 0)
    zy = (Y[:, 0] == 0) & (Y[:, 1] == 0)
    return (zx & _open_anti_diagonal(Y)) | (_open_anti_diagonal(X) & zy)


def _integer_difference(X, Y):
    d = X[:, 0] - Y[:, 0]
    return np.abs(d - np.round(d)) <= 1e-9


def _reciprocal_bands(P):
    """Members of (0, 1] whose reciprocal has fractional part in (1/4, 3/4)."""
    t = P[:, 0]
    safe = np.where(t > 0, t, 1.0)
    frac = np.mod(1.0 / safe, 1.0)
    return (t > 0) & (frac > 0.25) & (frac < 0.75)


def _band_upper_sets(X, Y):
    return _reciprocal_bands(X)


def _open_parabola(P):
    a, b = P[:, 0], P[:, 1]
    return (a > 0) & (a < 1) & (np.abs(b - a * a) <= 1e-12 * a * a)


def _parabola_pairs(X, Y):
    return _open_parabola(X) & _open_parabola(Y)


def _two_class(X, Y):
    return ~((X[:, 0] < 0.5) & (Y[:, 0] > 0.5))


PREDICATES: dict[str, Callable] = {
    "disk-classes": _disk_classes,
    "origin-anti-diagonal": _origin_anti_diagonal,
    "integer-difference": _integer_difference,
    "band-upper-sets": _band_upper_sets,
    "parabola-pairs": _parabola_pairs,
    "two-class": _two_class,
}


def predicate(domain: Domain, name: str) -> PredicatePair:
    return PredicatePair(domain, PREDICATES[name], name, {"builtin": name})


def predicate_expression(domain: Domain, src: str, rid: str | None = None) -> PredicatePair:
    comp = Compiled(src, domain.n, "xy")
    return PredicatePair(domain, lambda X, Y: comp(x=X, y=Y).astype(bool), rid or src,
                         {"predicate": src})


def relation_from_dict(d: dict, oracles: dict | None = None) -> Relation:
    domain = domain_from_dict(d["domain"], oracles)
    kind = d.get("variant")
    if kind == "utility":
        u = d["utility"]
        fn = function_from_dict({"source": u} if isinstance(u, str) else u, domain.n)
        return UtilityInduced(domain, fn, d.get("id"))
    if kind == "predicate":
        if "builtin" in d:
            return predicate(domain, d["builtin"])
        return predicate_expression(domain, d["predicate"], d.get("id"))
    if kind == "table":
        t = d["table"]
        return Tabulated(domain, t["points"], t["matrix"], d.get("id", "table"))
    raise ValueError(f"unknown relation variant {kind!r}")


# restriction

def _on_segment(seg: Segment, P: np.ndarray, tol: float) -> np.ndarray:
    x, y = np.asarray(seg.x), np.asarray(seg.y)
    d = x - y
    lam = (P - y) @ d / (d @ d)
    proj = y + lam[:, None] * d
    return (np.linalg.norm(P - proj, axis=1) <= tol) & (lam >= -tol) & (lam <= 1 + tol)


@dataclass(frozen=True, eq=False)
class RestrictedRelation:
    """Sections of every x in X intersected with S.

    ``mode="pairs"`` switches to the narrower reading where only pairs
    inside S x S are compared.
    """

    base: Relation
    restriction_set: object
    mode: str = "sections"

    def in_set(self, P, tol: float = 1e-9) -> np.ndarray:
        P = np.atleast_2d(P)
        S = self.restriction_set
        if isinstance(S, Segment):
            return _on_segment(S, P, max(tol, 1e-12))
        return S.contains(P, tol)

    def upper_member(self, x, Y, tol: float = 1e-9) -> np.ndarray:
        Y = np.atleast_2d(Y)
        X = np.broadcast_to(np.asarray(x, float), Y.shape)
        ok = self.base.weak(Y, X, tol) & self.in_set(Y, tol)
        if self.mode == "pairs":
            ok &= self.in_set(np.asarray(x, float)[None, :], tol)[0]
        return ok

    def lower_member(self, x, Y, tol: float = 1e-9) -> np.ndarray:
        Y = np.atleast_2d(Y)
        X = np.broadcast_to(np.asarray(x, float), Y.shape)
        ok = self.base.weak(X, Y, tol) & self.in_set(Y, tol)
        if self.mode == "pairs":
            ok &= self.in_set(np.asarray(x, float)[None, :], tol)[0]
        return ok


def restrict(rel: Relation, S, mode: str = "sections") -> RestrictedRelation:
    if mode not in ("sections", "pairs"):
        raise ValueError("restriction mode must be 'sections' or 'pairs'")
    if isinstance(S, Segment):
        if not (rel.domain.contains(np.asarray(S.x)) or rel.domain.contains(np.asarray(S.y))):
            raise ValueError("segment does not meet the domain")
    elif isinstance(S, Domain):
        lm = S.landmarks()
        if not rel.domain.contains(lm).any():
            raise ValueError("restriction set does not meet the domain")
    return RestrictedRelation(rel, S, mode)


# shared point pools

def reference_points(domain: Domain, cfg: CheckConfig, tag: str, count: int = 8,
                     rel: Relation | None = None) -> np.ndarray:
    """Landmarks, points on power curves between landmarks, then seeded samples."""
    lm = domain.landmarks()
    pts = [lm]
    anchors = lm[: min(len(lm), 5)]
    curve = []
    for i, j in itertools.combinations(range(len(anchors)), 2):
        for p in power_exponents(domain.n, limit=2 * domain.n):
            c = power_arc(anchors[j], anchors[i], p)
            m = c[0] + 0.5 * c[1] + 0.25 * c[2] + 0.125 * c[3]
            curve.append(m)
    if curve:
        curve = np.array(curve)
        pts.append(curve[domain.contains(curve, cfg.cmp_tolerance)])
    pts.append(domain.sample(rng_for(cfg, tag, 7), count))
    if rel is not None and rel.pool_hint() is not None:
        pts.append(rel.pool_hint())
    out = np.vstack(pts)
    keep = np.unique(np.round(out, 12), axis=0, return_index=True)[1]
    return out[np.sort(keep)]


def _pool(rel: Relation, cfg: CheckConfig, tag: str, extra: int = 64) -> np.ndarray:
    if rel.pool_hint() is not None:
        return rel.pool_hint()
    return reference_points(rel.domain, cfg, tag, extra, rel)


def _grid_pool(rel: Relation, cfg: CheckConfig, cap: int = 4000) -> np.ndarray:
    """Grid members (thinned to ``cap``) plus the reference pool."""
    if rel.pool_hint() is not None:
        return rel.pool_hint()
    grid = grid_nodes(rel.domain, cfg.grid_resolution, cfg)
    nodes = grid.points[grid.member]
    if len(nodes) > cap:
        nodes = nodes[np.linspace(0, len(nodes) - 1, cap).astype(int)]
    return np.vstack([_pool(rel, cfg, "grid-pool"), nodes])


def _pairs(pool: np.ndarray, cfg: CheckConfig, tag: str, count: int):
    m = len(pool)
    if m * m <= 4 * count:
        i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        return i.ravel(), j.ravel()
    rng = rng_for(cfg, tag)
    lm = min(m, 12)
    i0, j0 = np.meshgrid(np.arange(lm), np.arange(lm), indexing="ij")
    i = np.concatenate([i0.ravel(), rng.integers(0, m, count)])
    j = np.concatenate([j0.ravel(), rng.integers(0, m, count)])
    return i, j


def _triples(pool: np.ndarray, cfg: CheckConfig, tag: str, count: int):
    m = len(pool)
    rng = rng_for(cfg, tag)
    lm = min(m, 6)
    base = np.array(list(itertools.product(range(lm), repeat=3))).reshape(-1, 3)
    rand = rng.integers(0, m, size=(count, 3))
    t = np.vstack([base, rand])
    return t[:, 0], t[:, 1], t[:, 2]


# order properties

def _order_violations(rel: Relation, prop: str, P: np.ndarray, idx, tol: float) -> np.ndarray:
    W = lambda a, b: rel.weak(P[a], P[b], tol)
    if prop == "reflexive":
        (i,) = idx
        return ~W(i, i)
    if prop == "complete":
        i, j = idx
        return ~(W(i, j) | W(j, i))
    if prop == "symmetric":
        i, j = idx
        return W(i, j) & ~W(j, i)
    if prop == "asymmetric":
        i, j = idx
        return W(i, j) & W(j, i)
    if prop == "anti-symmetric":
        i, j = idx
        same = np.all(np.abs(P[i] - P[j]) <= 1e-12, axis=1)
        return W(i, j) & W(j, i) & ~same
    i, j, k = idx
    if prop == "transitive":
        return W(i, j) & W(j, k) & ~W(i, k)
    if prop == "negatively-transitive":
        return ~W(i, j) & ~W(j, k) & W(i, k)
    if prop == "semi-transitive":
        s = lambda a, b: W(a, b) & ~W(b, a)
        e = lambda a, b: W(a, b) & W(b, a)
        return ((s(i, j) & e(j, k)) | (e(i, j) & s(j, k))) & ~s(i, k)
    if prop == "transitive-indifference":
        e = lambda a, b: W(a, b) & W(b, a)
        return e(i, j) & e(j, k) & ~e(i, k)
    raise ValueError(prop)


def check_order_property(rel: Relation, prop: str, cfg: CheckConfig) -> PropertyReport:
    if prop not in ORDER_PROPERTIES:
        raise ValueError(f"unknown order property {prop!r}")
    P = _pool(rel, cfg, f"order:{prop}")
    tol = cfg.cmp_tolerance
    if prop == "non-trivial":
        i, j = _pairs(P, cfg, prop, cfg.sample_count)
        s = rel.strict(P[i], P[j], tol)
        if s.any():
            return holds(prop, cfg, int(np.argmax(s)) + 1,
                         f"strict pair found: {P[i[np.argmax(s)]].tolist()} over {P[j[np.argmax(s)]].tolist()}")
        return unresolved(prop, cfg, len(i), Reason.INSUFFICIENT_SAMPLES, "no strict pair among samples")
    if prop == "reflexive":
        idx = (np.arange(len(P)),)
    elif prop in ("complete", "symmetric", "asymmetric", "anti-symmetric"):
        idx = _pairs(P, cfg, prop, cfg.sample_count)
    else:
        idx = _triples(P, cfg, prop, 2 * cfg.sample_count)
    bad = _order_violations(rel, prop, P, idx, tol)
    # tolerance chaining: a genuine counterexample survives at half the slack
    if bad.any():
        sub = tuple(a[bad] for a in idx)
        again = _order_violations(rel, prop, P, sub, tol / 2)
        if again.any():
            k = int(np.argmax(again))
            pts = [P[a[k]] for a in sub]
            notes = ""
            if prop == "reflexive" and rel.id == "parabola-pairs":
                notes = "relation compares only points of the open parabola; reflexive there only"
            return fails(prop, cfg, len(idx[0]), [Witness.make(pts, [], f"{prop} violated by the tuple")], notes)
        return holds(prop, cfg, len(idx[0]), f"{int(bad.sum())} tolerance-chaining artefacts cleared at half slack")
    return holds(prop, cfg, len(idx[0]))


# convexity

def _section_fields(rel: Relation, x: np.ndarray, Q: np.ndarray, tol: float) -> dict[str, np.ndarray]:
    X = np.broadcast_to(x, Q.shape)
    up = rel.weak(Q, X, tol)
    lo = rel.weak(X, Q, tol)
    return {"upper": up, "lower": lo, "strict-upper": up & ~lo, "strict-lower": lo & ~up}


def _convex_sections(rel: Relation, cfg: CheckConfig, kind: str, fields: Sequence[str]) -> PropertyReport:
    tol = cfg.cmp_tolerance
    refs = _pool(rel, cfg, kind)[:48]
    Q = _grid_pool(rel, cfg, cap=1500)
    rng = rng_for(cfg, kind, 1)
    lams = np.array([0.25, 0.5, 0.75])
    used = 0
    for r, x in enumerate(refs):
        F = _section_fields(rel, x, Q, tol)
        for name in fields:
            mem = np.flatnonzero(F[name])
            if len(mem) < 2:
                continue
            a = rng.choice(mem, size=min(200, len(mem) ** 2), replace=True)
            b = rng.choice(mem, size=len(a), replace=True)
            ok = np.any(np.abs(Q[a] - Q[b]) > 1e-12, axis=1)
            a, b = a[ok], b[ok]
            for lam in lams:
                Z = lam * Q[a] + (1 - lam) * Q[b]
                z = _section_fields(rel, x, Z, tol)[name]
                used += len(Z)
                if not z.all():
                    k = int(np.argmin(z))
                    again = _section_fields(rel, x, Z[k:k + 1], tol / 2)[name][0]
                    rob = Robustness.SURVIVED_REFINEMENT if not again else Robustness.RAW_GRID
                    if rob is Robustness.RAW_GRID:
                        continue
                    return fails(kind, cfg, used, [Witness.make(
                        [x, Q[a[k]], Q[b[k]], Z[k]], [lam],
                        f"{name} section of the first point contains the next two but not their mixture",
                        rob)])
    return holds(kind, cfg, used)


def _mine_indifferent(rel: Relation, cfg: CheckConfig, tag: str, want: int = 200):
    """Pairs (x, y), x != y, with x ~ y: direct hits from a grid scan plus
    bisection between points ranked on opposite sides of a reference."""
    tol = cfg.cmp_tolerance
    P = _grid_pool(rel, cfg, cap=600)
    rng = rng_for(cfg, tag)
    i = rng.integers(0, len(P), 4 * want)
    j = rng.integers(0, len(P), 4 * want)
    ok = np.any(np.abs(P[i] - P[j]) > 1e-12, axis=1) & rel.indifferent(P[i], P[j], tol)
    X, Y = list(P[i[ok]][:want]), list(P[j[ok]][:want])
    refs = _pool(rel, cfg, tag)[:24]
    for x in refs:
        if len(X) >= 2 * want:
            break
        a = rng.integers(0, len(P), 40)
        b = rng.integers(0, len(P), 40)
        up_a = rel.strict(P[a], np.broadcast_to(x, P[a].shape), tol)
        dn_b = rel.strict(np.broadcast_to(x, P[b].shape), P[b], tol)
        for p, q in zip(P[a][up_a][:5], P[b][dn_b][:5]):
            lo, hi = 0.0, 1.0  # p at 1, q at 0
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                m = (mid * p + (1 - mid) * q)[None, :]
                if rel.weak(m, x[None, :], tol)[0]:
                    hi = mid
                else:
                    lo = mid
            m = hi * p + (1 - hi) * q
            if rel.indifferent(m[None, :], x[None, :], tol)[0] and np.max(np.abs(m - x)) > 1e-9:
                X.append(x)
                Y.append(m)
    return np.array(X).reshape(-1, rel.domain.n), np.array(Y).reshape(-1, rel.domain.n)


def _star(rel: Relation, cfg: CheckConfig, kind: str) -> PropertyReport:
    tol = cfg.cmp_tolerance
    lams = np.linspace(0.1, 0.9, 9)
    if kind == "star-convex":
        P = _grid_pool(rel, cfg, cap=800)
        i, j = _pairs(P, cfg, kind, 4 * cfg.sample_count)
        ok = rel.weak(P[i], P[j], tol) & np.any(np.abs(P[i] - P[j]) > 1e-12, axis=1)
        X, Y = P[i[ok]], P[j[ok]]
    else:
        X, Y = _mine_indifferent(rel, cfg, kind)
    if len(X) == 0:
        return unresolved(kind, cfg, 0, Reason.INSUFFICIENT_SAMPLES, "no qualifying pairs found")
    used = 0
    for lam in lams:
        Z = lam * X + (1 - lam) * Y
        used += len(Z)
        if kind == "star-convex":
            ok, ok2 = rel.weak(Z, Y, tol), rel.weak(Z, Y, tol / 2)
            what = "the mixture is not weakly above y"
        elif kind == "strictly-star-convex":
            ok, ok2 = rel.strict(Z, Y, tol), rel.strict(Z, Y, tol / 2)
            what = "x ~ y but the mixture is not strictly above y"
        else:
            ok, ok2 = rel.indifferent(X, Z, tol), rel.indifferent(X, Z, tol / 2)
            what = "x ~ y but x is not indifferent to the mixture"
        bad = ~ok & ~ok2
        if bad.any():
            k = int(np.argmax(bad))
            return fails(kind, cfg, used, [Witness.make([X[k], Y[k], Z[k]], [lam], what)])
    return holds(kind, cfg, used, f"{len(X)} pairs")


LOCAL_LEVELS = 7


def _local_convexity(rel: Relation, cfg: CheckConfig, kind: str, fields: Sequence[str]) -> PropertyReport:
    """Non-convexity of section-ball intersections that persists at every
    probed radius around a closure point."""
    from .probe import families
    tol = cfg.cmp_tolerance
    dom = rel.domain
    n = dom.n
    grid = grid_nodes(dom, min(cfg.grid_resolution, 101), cfg)
    h = max(grid.spacing, 1e-6) * 2
    refs = _pool(rel, cfg, kind)[:24]
    lin, pw, ks = families(n)
    per_oct = 4
    m = np.arange(LOCAL_LEVELS * per_oct + 1)
    t = 2.0 ** (-m / per_oct)
    lev = np.minimum(m // per_oct, LOCAL_LEVELS)
    cl = np.linspace(0.05, 0.95, 19)
    used = 0
    lm = dom.landmarks()
    for x in refs:
        nodes = grid.points[grid.member]
        F = _section_fields(rel, x, nodes, tol)
        for name in fields:
            field = F[name]
            cand = np.vstack([lm, nodes[_near_flip(field, grid)]])
            for p in cand[:400]:
                pts, lv = [], []
                for f in range(len(lin)):
                    for sg in (1.0, -1.0):
                        u = sg * h * t
                        pts.append(p + u[:, None] * lin[f] + (u ** ks[f])[:, None] * pw[f])
                        lv.append(lev)
                S = np.vstack(pts)
                L = np.concatenate(lv)
                ok = dom.contains(S, tol)
                S, L = S[ok], L[ok]
                if len(S) < 2:
                    continue
                inA = _section_fields(rel, x, S, tol)[name]
                used += len(S)
                bad_levels = 0
                witness = None
                for j in range(LOCAL_LEVELS):
                    sel = np.flatnonzero(inA & (L >= j) & (L <= j + 1))
                    if len(sel) < 2:
                        break
                    a, b = np.meshgrid(sel, sel, indexing="ij")
                    a, b = a.ravel(), b.ravel()
                    keep = a < b
                    a, b = a[keep][:400], b[keep][:400]
                    Z = (cl[None, :, None] * S[a][:, None, :] + (1 - cl[None, :, None]) * S[b][:, None, :])
                    Zf = Z.reshape(-1, n)
                    zin = _section_fields(rel, x, Zf, tol)[name] | ~dom.contains(Zf, tol)
                    zin = zin.reshape(len(a), len(cl))
                    broken = ~zin.all(axis=1)
                    if not broken.any():
                        break
                    bad_levels += 1
                    k = int(np.argmax(broken))
                    c = int(np.argmin(zin[k]))
                    witness = (S[a[k]], S[b[k]], Z[k, c], cl[c])
                if bad_levels == LOCAL_LEVELS and witness is not None:
                    return fails(kind, cfg, used, [Witness.make(
                        [x, p, witness[0], witness[1], witness[2]], [witness[3]],
                        f"{name} section meets every small ball around the second point in a non-convex set")])
    return holds(kind, cfg, used)


def _near_flip(field: np.ndarray, grid) -> np.ndarray:
    from ._kernels import grid_flip_nodes
    full = np.full(len(grid.points), -1, dtype=np.int8)
    full[grid.member] = field.astype(np.int8)
    flips = grid_flip_nodes(full.reshape(grid.shape)).ravel()
    return flips[grid.member]


def check_convexity(rel: Relation, kind: str, cfg: CheckConfig) -> PropertyReport:
    if kind not in CONVEXITY_KINDS:
        raise ValueError(f"unknown convexity kind {kind!r}")
    if kind == "convex-upper-sections":
        return _convex_sections(rel, cfg, kind, ["upper"])
    if kind == "convex-strict-sections":
        return _convex_sections(rel, cfg, kind, ["strict-upper"])
    if kind in ("star-convex", "strictly-star-convex", "convex-indifference"):
        return _star(rel, cfg, kind)
    if kind == "locally-convex-upper-sections":
        return _local_convexity(rel, cfg, kind, ["upper", "strict-upper"])
    return _local_convexity(rel, cfg, kind, ["upper", "lower", "strict-upper", "strict-lower"])


# monotonicity

def _ordered_pairs(rel: Relation, cfg: CheckConfig, tag: str):
    dom = rel.domain
    rng = rng_for(cfg, tag)
    lo, hi = dom.bounding_box()
    Y = np.vstack([dom.landmarks(), dom.sample(rng, cfg.sample_count)])
    span = hi - lo
    D = rng.uniform(0, 1, size=Y.shape) * span * rng.uniform(0, 1, size=(len(Y), 1))
    D *= rng.uniform(size=Y.shape) < 0.7
    X = Y + D
    ok = dom.contains(X) & np.any(D > 1e-12, axis=1)
    return X[ok], Y[ok]


def check_monotonicity(rel: Relation, kind: str, cfg: CheckConfig) -> PropertyReport:
    if kind not in ("weak", "strong"):
        raise ValueError(f"unknown monotonicity kind {kind!r}")
    pid = f"{kind}ly-monotone"
    X, Y = _ordered_pairs(rel, cfg, pid)
    if len(X) == 0:
        return holds(pid, cfg, 0, "vacuous: the domain has no componentwise ordered pairs")
    tol = cfg.cmp_tolerance
    test = rel.weak if kind == "weak" else rel.strict
    bad = ~test(X, Y, tol) & ~test(X, Y, tol / 2)
    if bad.any():
        k = int(np.argmax(bad))
        need = "x >= y" if kind == "weak" else "x > y strictly"
        return fails(pid, cfg, len(X), [Witness.make([X[k], Y[k]], [],
                                                     f"x dominates y componentwise but not {need}")])
    return holds(pid, cfg, len(X))


# algebraic postulates

def check_algebraic(rel: Relation, kind: str, cfg: CheckConfig) -> PropertyReport:
    if kind not in ALGEBRAIC_KINDS:
        raise ValueError(f"unknown algebraic kind {kind!r}")
    dom = rel.domain
    if kind in ("additive", "homothetic") and not dom.is_cone:
        return unresolved(kind, cfg, 0, Reason.PRECONDITION, "domain is not a declared convex cone")
    tol = cfg.cmp_tolerance
    rng = rng_for(cfg, kind)
    P = _grid_pool(rel, cfg, cap=2000)
    m = 6 * cfg.sample_count
    i, j, k = rng.integers(0, len(P), m), rng.integers(0, len(P), m), rng.integers(0, len(P), m)
    X, Y, Z = P[i], P[j], P[k]
    lam = rng.uniform(0.05, 0.95, size=(m, 1))
    if kind == "additive":
        X2, Y2 = X + Z, Y + Z
        ok = dom.contains(X2) & dom.contains(Y2)
    elif kind == "homothetic":
        X2, Y2 = lam * X * 2, lam * Y * 2
        ok = dom.contains(X2) & dom.contains(Y2)
    else:
        X2, Y2 = lam * X + (1 - lam) * Z, lam * Y + (1 - lam) * Z
        ok = np.ones(m, dtype=bool)
    X, Y, Z, X2, Y2, lam = X[ok], Y[ok], Z[ok], X2[ok], Y2[ok], lam[ok]
    if len(X) == 0:
        return unresolved(kind, cfg, 0, Reason.INSUFFICIENT_SAMPLES, "no admissible tuples inside the window")

    def bad(t):
        a = rel.weak(X, Y, t)
        b = rel.weak(X2, Y2, t)
        if kind == "homothetic":
            return a & ~b
        return a != b
    viol = bad(tol) & bad(tol / 2)
    if viol.any():
        q = int(np.argmax(viol))
        return fails(kind, cfg, len(X), [Witness.make([X[q], Y[q], Z[q], X2[q], Y2[q]], [float(lam[q, 0])],
                                                      f"{kind} law broken: comparison of the first pair differs "
                                                      "from that of the transformed pair")])
    return holds(kind, cfg, len(X))


# order density

def check_order_density(rel: Relation, cfg: CheckConfig, max_pairs: int = 60) -> PropertyReport:
    pid = "order-dense"
    tol = cfg.cmp_tolerance
    P = _pool(rel, cfg, pid)
    i, j = _pairs(P, cfg, pid, cfg.sample_count)
    s = rel.strict(P[i], P[j], tol)
    i, j = i[s][:max_pairs], j[s][:max_pairs]
    if len(i) == 0:
        return holds(pid, cfg, 0, "vacuous: no strict pairs among samples")
    between = cfg.density_pattern == "between"

    def search(Z):
        bad = []
        for a, b in zip(i, j):
            x, y = P[a][None, :], P[b][None, :]
            X = np.broadcast_to(x, Z.shape)
            Y = np.broadcast_to(y, Z.shape)
            if between:
                hit = rel.strict(X, Z, tol) & rel.strict(Z, Y, tol)
            else:
                hit = rel.strict(Y, Z, tol)
            if not hit.any():
                bad.append((a, b))
        return bad

    grid = grid_nodes(rel.domain, cfg.grid_resolution, cfg)
    Z = np.vstack([P, grid.points[grid.member]])
    bad = search(Z)
    if not bad:
        return holds(pid, cfg, len(i) * len(Z), f"pattern={cfg.density_pattern}")
    fine = grid_nodes(rel.domain, cfg.refined().grid_resolution, cfg)
    Z2 = np.vstack([P, fine.points[fine.member]])
    i, j = np.array([a for a, _ in bad]), np.array([b for _, b in bad])
    bad = search(Z2)
    if not bad:
        return holds(pid, cfg, len(Z2), f"pattern={cfg.density_pattern}; coarse misses cleared on the refined grid")
    a, b = bad[0]
    what = "no z with x > z > y" if between else "no z with y > z"
    return fails(pid, cfg, len(Z2), [Witness.make([P[a], P[b]], [], f"{what} on the refined grid")],
                 f"pattern={cfg.density_pattern}")
