"""Convex domains in R^n, their set-level properties, segments and smooth arcs."""
from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import (CheckConfig, PropertyReport, Reason, UnresolvedError, Verdict, Witness,
                   fails, holds, rng_for, unresolved)

DEFAULT_TOL = 1e-9


def _pts(P, n: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(P, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != n:
        raise ValueError(f"dimension mismatch: expected {n}, got {arr.shape[-1]}")
    return arr, single


def _finite_rows(arr: np.ndarray) -> np.ndarray:
    ok = np.isfinite(arr[:, 0]) if arr.shape[1] else np.ones(len(arr), dtype=bool)
    for j in range(1, arr.shape[1]):
        ok &= np.isfinite(arr[:, j])
    return ok


def _dedupe(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep: list[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in keep):
            keep.append(p)
    return np.array(keep) if keep else np.zeros((0, points.shape[1]))


@dataclass(frozen=True)
class Halfspace:
    """{x : a.x <= b}, or {x : a.x < b} when strict."""

    normal: tuple[float, ...]
    offset: float
    strict: bool = False

    def __post_init__(self):
        if not np.any(np.asarray(self.normal, dtype=float) != 0):
            raise ValueError("halfspace normal must be nonzero")


class Domain:
    """Base class; subclasses are the concrete convex variants."""

    variant = "abstract"
    n: int

    # membership

    def contains(self, P, tol: float = DEFAULT_TOL):
        arr, single = _pts(P, self.n)
        ok = np.isfinite(arr).all(axis=1) if arr.shape[1] > 8 else _finite_rows(arr)
        ok &= self._member(arr, tol)
        return bool(ok[0]) if single else ok

    def _member(self, P: np.ndarray, tol: float) -> np.ndarray:
        raise NotImplementedError

    # structure

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def landmarks(self) -> np.ndarray:
        """Deterministic member points: corners, vertices, centers."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """k members drawn with the given generator."""
        raise NotImplementedError

    @property
    def is_cone(self) -> bool:
        return False

    def structural_open(self) -> Verdict:
        return Verdict.FAILS

    def structural_polyhedron(self) -> Verdict:
        return Verdict.FAILS

    def center_guess(self) -> np.ndarray:
        return self.landmarks().mean(axis=0)

    def to_dict(self) -> dict:
        raise NotImplementedError

    # shared helpers

    def _rejection(self, rng: np.random.Generator, k: int, lo, hi, tries: int = 200) -> np.ndarray:
        out = np.zeros((0, self.n))
        for _ in range(tries):
            cand = rng.uniform(lo, hi, size=(max(4 * k, 16), self.n))
            out = np.vstack([out, cand[self.contains(cand)]])
            if len(out) >= k:
                return out[:k]
        raise UnresolvedError("rejection sampling found too few members", Reason.INSUFFICIENT_SAMPLES)

    def _dirichlet(self, rng: np.random.Generator, k: int, verts: np.ndarray) -> np.ndarray:
        w = rng.dirichlet(np.ones(len(verts)), size=k)
        return w @ verts


class Box(Domain):
    variant = "box"

    def __init__(self, lower, upper, open_faces=None, cone: bool = False):
        self.lower = np.asarray(lower, dtype=float).ravel()
        self.upper = np.asarray(upper, dtype=float).ravel()
        if self.lower.shape != self.upper.shape or np.any(self.lower > self.upper):
            raise ValueError("box needs lower <= upper of equal length")
        self.n = len(self.lower)
        if open_faces is None:
            open_faces = np.zeros((self.n, 2), dtype=bool)
        self.open_faces = np.asarray(open_faces, dtype=bool).reshape(self.n, 2)
        self.cone = bool(cone)

    def _member(self, P, tol):
        ok = np.ones(len(P), dtype=bool)
        for j in range(self.n):
            c = P[:, j]
            ok &= (c - self.lower[j] > tol) if self.open_faces[j, 0] else (c >= self.lower[j] - tol)
            ok &= (self.upper[j] - c > tol) if self.open_faces[j, 1] else (c <= self.upper[j] + tol)
        return ok

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def landmarks(self):
        c = 0.5 * (self.lower + self.upper)
        pts = [c]
        if self.n <= 6:
            for bits in itertools.product((0, 1), repeat=self.n):
                pts.append(np.where(np.array(bits) == 1, self.upper, self.lower))
        for i in range(self.n):
            for v in (self.lower[i], self.upper[i]):
                q = c.copy()
                q[i] = v
                pts.append(q)
        pts = np.array(pts)
        inside = self.contains(pts)
        # open faces: pull the dropped landmarks slightly toward the center
        pulled = c + (1 - 1e-6) * (pts[~inside] - c)
        pts = np.vstack([pts[inside], pulled[self.contains(pulled)]])
        order = np.lexsort(pts.T[::-1])
        # center first, then lexicographic
        first = np.argmin(np.linalg.norm(pts - c, axis=1))
        rest = [i for i in order if i != first]
        return _dedupe(pts[[first] + rest])

    def sample(self, rng, k):
        if k <= 0:
            return np.zeros((0, self.n))
        pts = rng.uniform(self.lower, self.upper, size=(k, self.n))
        bad = ~self.contains(pts)
        if bad.any():
            c = 0.5 * (self.lower + self.upper)
            pts[bad] = c + (1 - 1e-6) * (pts[bad] - c)
        return pts

    @property
    def is_cone(self):
        return self.cone

    def structural_open(self):
        if np.all(self.open_faces) and np.all(self.upper > self.lower):
            return Verdict.HOLDS
        return Verdict.FAILS

    def structural_polyhedron(self):
        return Verdict.FAILS if np.any(self.open_faces) else Verdict.HOLDS

    def center_guess(self):
        return 0.5 * (self.lower + self.upper)

    def to_dict(self):
        return {"variant": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist(),
                "open_faces": self.open_faces.tolist(), "cone": self.cone}


class PositiveOrthant(Box):
    """The nonnegative orthant, observed through the window [0, scale]^n."""

    variant = "orthant"

    def __init__(self, n: int, scale: float = 1.0):
        super().__init__(np.zeros(n), np.full(n, float(scale)), cone=True)
        self.scale = float(scale)

    def to_dict(self):
        return {"variant": "orthant", "n": self.n, "bounding_box": [[0.0] * self.n, [self.scale] * self.n]}


class Polyhedron(Domain):
    variant = "polyhedron"

    def __init__(self, halfspaces: Sequence[Halfspace], bounding_box=None, cone: bool = False):
        if not halfspaces:
            raise ValueError("polyhedron needs at least one halfspace")
        self.halfspaces = tuple(halfspaces)
        self.A = np.array([h.normal for h in halfspaces], dtype=float)
        self.b = np.array([h.offset for h in halfspaces], dtype=float)
        self.strict = np.array([h.strict for h in halfspaces], dtype=bool)
        self.n = self.A.shape[1]
        self.cone = bool(cone)
        self._declared_box = None if bounding_box is None else (
            np.asarray(bounding_box[0], float), np.asarray(bounding_box[1], float))
        self._verts = self._lp_extremes()

    def _lp(self, c):
        box = None
        if self._declared_box is not None:
            box = list(zip(self._declared_box[0], self._declared_box[1]))
        res = linprog(c, A_ub=self.A, b_ub=self.b, bounds=box or [(None, None)] * self.n,
                      method="highs")
        return res

    def _lp_extremes(self) -> np.ndarray:
        dirs = []
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = 1.0
            dirs += [e, -e]
        dirs += [np.ones(self.n), -np.ones(self.n)]
        if self.n >= 2:
            alt = np.where(np.arange(self.n) % 2 == 0, 1.0, -1.0)
            dirs += [alt, -alt]
        pts = []
        for d in dirs:
            res = self._lp(d)
            if res.status == 2:
                raise ValueError("polyhedron is empty")
            if res.status == 3:
                raise ValueError("polyhedron is unbounded; declare a bounding_box")
            if res.status == 0:
                pts.append(res.x)
        return _dedupe(np.array(pts), 1e-9)

    def _member(self, P, tol):
        slack = P @ self.A.T - self.b
        ok = np.where(self.strict, slack < -tol, slack <= tol)
        ok = np.all(ok, axis=1)
        if self._declared_box is not None:
            ok &= np.all((P >= self._declared_box[0] - tol) & (P <= self._declared_box[1] + tol), axis=1)
        return ok

    def bounding_box(self):
        return self._verts.min(axis=0), self._verts.max(axis=0)

    def landmarks(self):
        c = self._verts.mean(axis=0)
        pts = np.vstack([c[None, :], self._verts])
        pts = np.vstack([pts[self.contains(pts)],
                         (c + (1 - 1e-6) * (pts - c))[~self.contains(pts)]])
        return _dedupe(pts[self.contains(pts)])

    def sample(self, rng, k):
        if k <= 0:
            return np.zeros((0, self.n))
        pts = self._dirichlet(rng, k, self._verts)
        bad = ~self.contains(pts)
        if bad.any():
            c = self._verts.mean(axis=0)
            pts[bad] = c + 0.5 * (pts[bad] - c)
        return pts

    @property
    def is_cone(self):
        return self.cone

    def structural_open(self):
        return Verdict.FAILS

    def structural_polyhedron(self):
        return Verdict.FAILS if self.strict.any() else Verdict.HOLDS

    def to_dict(self):
        d = {"variant": "polyhedron",
             "halfspaces": [{"normal": list(h.normal), "offset": h.offset,
                             "sense": "<" if h.strict else "<="} for h in self.halfspaces],
             "cone": self.cone}
        if self._declared_box is not None:
            d["bounding_box"] = [self._declared_box[0].tolist(), self._declared_box[1].tolist()]
        return d


class Ball(Domain):
    variant = "ball"

    def __init__(self, center, radius: float, open: bool = False):
        self.center = np.asarray(center, dtype=float).ravel()
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        self.open = bool(open)
        self.n = len(self.center)

    def _member(self, P, tol):
        r = np.linalg.norm(P - self.center, axis=1)
        return r < self.radius - tol if self.open else r <= self.radius + tol

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def landmarks(self):
        pts = [self.center]
        shrink = (1 - 1e-6) if self.open else 1.0
        for i in range(self.n):
            for s in (-1.0, 1.0):
                q = self.center.copy()
                q[i] += s * self.radius * shrink
                pts.append(q)
        return np.array(pts)

    def sample(self, rng, k):
        if k <= 0:
            return np.zeros((0, self.n))
        g = rng.normal(size=(k, self.n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.uniform(size=(k, 1)) ** (1.0 / self.n)
        return self.center + (r * (1 - 1e-9)) * g

    def structural_open(self):
        return Verdict.HOLDS if self.open else Verdict.FAILS

    def structural_polyhedron(self):
        # a closed ball in R^1 is an interval
        return Verdict.HOLDS if (self.n == 1 and not self.open) else Verdict.FAILS

    def center_guess(self):
        return self.center.copy()

    def to_dict(self):
        return {"variant": "ball", "center": self.center.tolist(), "radius": self.radius,
                "open": self.open}


class Simplex(Domain):
    variant = "simplex"

    def __init__(self, vertices):
        self.vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        self.n = self.vertices.shape[1]
        k = len(self.vertices)
        # barycentric solve: [V^T; 1] w = [p; 1]
        self._M = np.vstack([self.vertices.T, np.ones((1, k))])
        self._pinv = np.linalg.pinv(self._M)

    def _member(self, P, tol):
        rhs = np.vstack([P.T, np.ones((1, len(P)))])
        w = self._pinv @ rhs
        resid = np.abs(self._M @ w - rhs).max(axis=0)
        return (resid <= tol) & np.all(w >= -tol, axis=0)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def landmarks(self):
        c = self.vertices.mean(axis=0)
        pts = [c, *self.vertices]
        for i, j in itertools.combinations(range(len(self.vertices)), 2):
            pts.append(0.5 * (self.vertices[i] + self.vertices[j]))
        return _dedupe(np.array(pts))

    def sample(self, rng, k):
        if k <= 0:
            return np.zeros((0, self.n))
        return self._dirichlet(rng, k, self.vertices)

    def structural_polyhedron(self):
        return Verdict.HOLDS

    def center_guess(self):
        return self.vertices.mean(axis=0)

    def to_dict(self):
        return {"variant": "simplex", "vertices": self.vertices.tolist()}


class OracleDomain(Domain):
    """Membership predicate plus declared convexity and a bounding box.

    ``predicate`` maps an (B, n) array to a boolean array; ``is_open`` and
    ``is_polyhedron`` are self-declared facts (None leaves them Unresolved).
    """

    variant = "oracle"

    def __init__(self, predicate: Callable[[np.ndarray], np.ndarray], bounding_box,
                 declared_convex: bool = True, is_open: bool | None = None,
                 is_polyhedron: bool | None = None, landmarks=None, name: str = "oracle",
                 spot_checks: int = 1000, seed: int = 0):
        if not declared_convex:
            raise ValueError("oracle domains must declare convexity")
        self.predicate = predicate
        self.box_lo = np.asarray(bounding_box[0], dtype=float)
        self.box_hi = np.asarray(bounding_box[1], dtype=float)
        self.n = len(self.box_lo)
        self.is_open = is_open
        self.is_polyhedron = is_polyhedron
        self.name = name
        self._landmarks = None if landmarks is None else np.atleast_2d(np.asarray(landmarks, float))
        self._spot_check(spot_checks, seed)

    def _member(self, P, tol):
        ok = np.all((P >= self.box_lo - tol) & (P <= self.box_hi + tol), axis=1)
        out = np.zeros(len(P), dtype=bool)
        if ok.any():
            out[ok] = np.asarray(self.predicate(P[ok]), dtype=bool)
        return out

    def _spot_check(self, pairs: int, seed: int):
        if pairs <= 0:
            return
        rng = np.random.default_rng(seed)
        pts = self._rejection(rng, 2 * pairs, self.box_lo, self.box_hi)
        mid = 0.5 * (pts[:pairs] + pts[pairs:])
        bad = ~self.contains(mid)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(f"oracle domain '{self.name}' is not convex: midpoint of "
                             f"{pts[i].tolist()} and {pts[pairs + i].tolist()} is outside")

    def bounding_box(self):
        return self.box_lo.copy(), self.box_hi.copy()

    def landmarks(self):
        if self._landmarks is not None:
            return self._landmarks[self.contains(self._landmarks)]
        c = 0.5 * (self.box_lo + self.box_hi)
        pts = [c] + [np.where(np.array(b) == 1, self.box_hi, self.box_lo)
                     for b in itertools.product((0, 1), repeat=min(self.n, 6))]
        pts = np.array(pts)
        found = pts[self.contains(pts)]
        if len(found) == 0:
            found = self._rejection(np.random.default_rng(1), 1, self.box_lo, self.box_hi)
        return found

    def sample(self, rng, k):
        if k <= 0:
            return np.zeros((0, self.n))
        return self._rejection(rng, k, self.box_lo, self.box_hi)

    def structural_open(self):
        return {None: Verdict.UNRESOLVED, True: Verdict.HOLDS, False: Verdict.FAILS}[self.is_open]

    def structural_polyhedron(self):
        return {None: Verdict.UNRESOLVED, True: Verdict.HOLDS, False: Verdict.FAILS}[self.is_polyhedron]

    def to_dict(self):
        return {"variant": "oracle", "name": self.name,
                "bounding_box": [self.box_lo.tolist(), self.box_hi.tolist()],
                "is_open": self.is_open, "is_polyhedron": self.is_polyhedron}


# JSON round trip

def domain_from_dict(d: dict, oracles: dict | None = None) -> Domain:
    kind = d.get("variant")
    if kind == "box":
        return Box(d["lower"], d["upper"], d.get("open_faces"), d.get("cone", False))
    if kind == "orthant":
        box = d.get("bounding_box")
        scale = float(box[1][0]) if box else float(d.get("scale", 1.0))
        return PositiveOrthant(int(d["n"]), scale)
    if kind == "polyhedron":
        hs = [Halfspace(tuple(h["normal"]), float(h["offset"]), h.get("sense", "<=") == "<")
              for h in d["halfspaces"]]
        return Polyhedron(hs, d.get("bounding_box"), d.get("cone", False))
    if kind == "ball":
        return Ball(d["center"], d["radius"], d.get("open", False))
    if kind == "simplex":
        return Simplex(d["vertices"])
    if kind == "oracle":
        name = d.get("name")
        if not oracles or name not in oracles:
            raise ValueError(f"unknown oracle domain '{name}'")
        return oracles[name]()
    raise ValueError(f"unknown domain variant {kind!r}")


# affine hull and relative interior

@dataclass(frozen=True)
class AffineBasis:
    dim: int
    origin: np.ndarray
    directions: np.ndarray  # (dim, n), orthonormal rows


def member_cloud(domain: Domain, cfg: CheckConfig, k: int = 64) -> np.ndarray:
    pts = [domain.landmarks()]
    try:
        pts.append(domain.sample(rng_for(cfg, "member-cloud"), k))
    except UnresolvedError:
        pass
    cloud = np.vstack(pts)
    if len(cloud) == 0:
        raise UnresolvedError("no member found", Reason.INSUFFICIENT_SAMPLES)
    return cloud


def affine_basis(domain: Domain, cfg: CheckConfig) -> AffineBasis:
    cloud = member_cloud(domain, cfg)
    origin = cloud[0]
    diffs = cloud - origin
    scale = max(1.0, float(np.abs(cloud).max()))
    if len(cloud) == 1 or np.abs(diffs).max() <= 1e-12 * scale:
        return AffineBasis(0, origin, np.zeros((0, domain.n)))
    _, s, vt = np.linalg.svd(diffs, full_matrices=False)
    rank = int(np.sum(s > 1e-8 * s[0]))
    return AffineBasis(rank, origin, vt[:rank])


def _certificate_dirs(basis: AffineBasis, cfg: CheckConfig) -> np.ndarray:
    if basis.dim == 0:
        return np.zeros((0, len(basis.origin)))
    rng = rng_for(cfg, "ri-certificate")
    coeffs = rng.normal(size=(4 * basis.dim, basis.dim))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    dirs = np.vstack([basis.directions, coeffs @ basis.directions])
    return np.vstack([dirs, -dirs])


def ri_certificate(domain: Domain, P, basis: AffineBasis, cfg: CheckConfig) -> np.ndarray:
    """True where every sampled +-eps step inside aff X stays in the domain."""
    arr, single = _pts(P, domain.n)
    eps = 10 * cfg.cmp_tolerance
    ok = domain.contains(arr, cfg.cmp_tolerance)
    dirs = _certificate_dirs(basis, cfg)
    if len(dirs):
        steps = arr[:, None, :] + eps * dirs[None, :, :]
        inside = domain.contains(steps.reshape(-1, domain.n), cfg.cmp_tolerance)
        ok &= inside.reshape(len(arr), len(dirs)).all(axis=1)
    return bool(ok[0]) if single else ok


def relative_interior_point(domain: Domain, cfg: CheckConfig) -> np.ndarray:
    basis = affine_basis(domain, cfg)
    cands = [domain.center_guess(), domain.landmarks().mean(axis=0)]
    cloud = member_cloud(domain, cfg)
    rng = rng_for(cfg, "ri-search")
    for _ in range(64):
        idx = rng.choice(len(cloud), size=min(len(cloud), basis.dim + 1), replace=False)
        cands.append(cloud[idx].mean(axis=0))
    cands = np.array(cands)
    ok = ri_certificate(domain, cands, basis, cfg)
    if not ok.any():
        raise UnresolvedError("relative-interior certificate not found", Reason.INSUFFICIENT_SAMPLES)
    return cands[int(np.argmax(ok))]


def ray_exit(domain: Domain, p: np.ndarray, d: np.ndarray, tmax: float, iters: int = 60) -> float:
    """Largest t in [0, tmax] (to bisection accuracy) with p + t d in the domain."""
    if domain.contains(p + tmax * d):
        return tmax
    lo, hi = 0.0, tmax
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if domain.contains(p + mid * d):
            lo = mid
        else:
            hi = mid
    return lo


def sample_boundary_points(domain: Domain, k: int, cfg: CheckConfig) -> np.ndarray:
    """Points of the relative boundary reached by rays from a relative-interior point."""
    basis = affine_basis(domain, cfg)
    if basis.dim == 0:
        return np.repeat(basis.origin[None, :], k, axis=0)
    p = relative_interior_point(domain, cfg)
    lo, hi = domain.bounding_box()
    tmax = 2.0 * float(np.linalg.norm(hi - lo)) + 1.0
    rng = rng_for(cfg, "boundary-points")
    coeffs = rng.normal(size=(k, basis.dim))
    dirs = coeffs @ basis.directions
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return np.array([p + ray_exit(domain, p, d, tmax) * d for d in dirs])


# set-level properties

@dataclass(frozen=True)
class SetPropertyProfile:
    is_open: Verdict
    is_polyhedron: Verdict
    property_C_prime: Verdict
    property_B: Verdict
    affine_dim: int
    property_B_witness: Witness | None = None
    notes: str = ""

    @property
    def property_C(self) -> Verdict:
        if Verdict.HOLDS in (self.is_open, self.is_polyhedron):
            return Verdict.HOLDS
        if Verdict.UNRESOLVED in (self.is_open, self.is_polyhedron):
            return Verdict.UNRESOLVED
        return Verdict.FAILS

    def to_dict(self) -> dict:
        return {"is_open": self.is_open.value, "is_polyhedron": self.is_polyhedron.value,
                "property_C": self.property_C.value, "property_C_prime": self.property_C_prime.value,
                "property_B": self.property_B.value, "affine_dim": self.affine_dim,
                "property_B_witness": self.property_B_witness.to_dict() if self.property_B_witness else None,
                "notes": self.notes}


def _c_prime(domain: Domain) -> Verdict:
    if isinstance(domain, (Box, Polyhedron, Simplex)):
        return Verdict.HOLDS
    if isinstance(domain, Ball):
        return Verdict.HOLDS if (domain.open or domain.n == 1) else Verdict.FAILS
    return Verdict.UNRESOLVED


def _bound_lp(domain: Domain, target: np.ndarray, upper: bool) -> bool:
    """Exact feasibility of {a in closure(X) : a >= target} (or <= when not upper)."""
    n = domain.n
    sign = -1.0 if upper else 1.0  # upper: -a <= -target
    if isinstance(domain, Simplex):
        V = domain.vertices
        k = len(V)
        res = linprog(np.zeros(k), A_ub=sign * V.T, b_ub=sign * target,
                      A_eq=np.ones((1, k)), b_eq=[1.0], bounds=[(0, None)] * k, method="highs")
        return res.status == 0
    assert isinstance(domain, Polyhedron)
    A = np.vstack([domain.A, sign * np.eye(n)])
    b = np.concatenate([domain.b, sign * target])
    box = [(None, None)] * n
    if domain._declared_box is not None:
        box = list(zip(domain._declared_box[0], domain._declared_box[1]))
    res = linprog(np.zeros(n), A_ub=A, b_ub=b, bounds=box, method="highs")
    return res.status == 0


def _bound_search(domain: Domain, target: np.ndarray, upper: bool, rng) -> Verdict:
    if domain.contains(target):
        return Verdict.HOLDS
    if isinstance(domain, Ball):
        near = np.maximum(target, domain.center) if upper else np.minimum(target, domain.center)
        return Verdict.HOLDS if domain.contains(near) else Verdict.FAILS
    if isinstance(domain, (Polyhedron, Simplex)):
        return Verdict.HOLDS if _bound_lp(domain, target, upper) else Verdict.FAILS
    lo, hi = domain.bounding_box()
    if upper and np.any(target > hi + 1e-12):
        return Verdict.FAILS
    if not upper and np.any(target < lo - 1e-12):
        return Verdict.FAILS
    a, b = (target, hi) if upper else (lo, target)
    for _ in range(20):
        cand = rng.uniform(a, b, size=(64, domain.n))
        if domain.contains(cand).any():
            return Verdict.HOLDS
    return Verdict.UNRESOLVED


def _property_b(domain: Domain, cfg: CheckConfig) -> tuple[Verdict, Witness | None]:
    if isinstance(domain, Box):
        return Verdict.HOLDS, None
    lm = domain.landmarks()
    rng = rng_for(cfg, "property-B")
    extra = domain.sample(rng, 32)
    pts = np.vstack([lm, extra])
    pairs = list(itertools.combinations(range(len(lm)), 2))
    pairs += [(len(lm) + 2 * i, len(lm) + 2 * i + 1) for i in range(len(extra) // 2)]
    verdict = Verdict.HOLDS
    for i, j in pairs:
        x, y = pts[i], pts[j]
        for upper in (True, False):
            target = np.maximum(x, y) if upper else np.minimum(x, y)
            v = _bound_search(domain, target, upper, rng)
            if v is Verdict.FAILS:
                side = "upper" if upper else "lower"
                return Verdict.FAILS, Witness.make(
                    [x, y], description=f"no {side} bound of the pair inside the domain")
            if v is Verdict.UNRESOLVED:
                verdict = Verdict.UNRESOLVED
    return verdict, None


def classify_set_properties(domain: Domain, cfg: CheckConfig) -> SetPropertyProfile:
    basis = affine_basis(domain, cfg)
    is_open = domain.structural_open()
    if is_open is Verdict.HOLDS and basis.dim < domain.n:
        is_open = Verdict.FAILS
    b, wit = _property_b(domain, cfg)
    return SetPropertyProfile(is_open, domain.structural_polyhedron(), _c_prime(domain), b,
                              basis.dim, wit)


# segments

@dataclass(frozen=True)
class Segment:
    """lambda -> lambda x + (1 - lambda) y."""

    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        if np.allclose(self.x, self.y, rtol=0, atol=1e-14):
            raise ValueError("segment endpoints must differ")

    def at(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)[..., None]
        return lam * np.asarray(self.x) + (1 - lam) * np.asarray(self.y)

    def coefficients(self) -> np.ndarray:
        """Cubic coefficient rows (c0..c3) shared with SmoothArc."""
        x, y = np.asarray(self.x), np.asarray(self.y)
        return np.vstack([y, x - y, np.zeros_like(x), np.zeros_like(x)])


def _stratum_pairs(domain: Domain, cfg: CheckConfig) -> list[tuple[np.ndarray, np.ndarray]]:
    out: list[tuple[np.ndarray, np.ndarray]] = []
    if isinstance(domain, Box):
        lo, hi, c = domain.lower, domain.upper, domain.center_guess()
        out.append((lo, hi))
        if domain.n <= 6:
            for bits in itertools.product((0, 1), repeat=domain.n - 1):
                if not any(bits):
                    continue
                a = np.where(np.array((0,) + bits) == 1, hi, lo)
                out.append((a, lo + hi - a))
        for i in range(domain.n):
            a, b = c.copy(), c.copy()
            a[i], b[i] = lo[i], hi[i]
            out.append((a, b))
        for i in range(domain.n):
            for base in (lo, hi):
                a, b = base.copy(), base.copy()
                a[i], b[i] = lo[i], hi[i]
                out.append((a, b))
        pulled = []
        for a, b in out:
            a = a if domain.contains(a) else c + (1 - 1e-6) * (a - c)
            b = b if domain.contains(b) else c + (1 - 1e-6) * (b - c)
            pulled.append((a, b))
        return pulled
    lm = domain.landmarks()
    basis = affine_basis(domain, cfg)
    if basis.dim:
        p = lm[0]
        blo, bhi = domain.bounding_box()
        tmax = 2 * float(np.linalg.norm(bhi - blo)) + 1.0
        for d in basis.directions:
            a = p + ray_exit(domain, p, d, tmax) * d
            b = p - ray_exit(domain, p, -d, tmax) * d
            out.append((a, b))
    for i, j in itertools.combinations(range(1, len(lm)), 2):
        out.append((lm[i], lm[j]))
    for j in range(1, len(lm)):
        out.append((lm[j], lm[0]))
    return out


def sample_segments(domain: Domain, count: int, cfg: CheckConfig) -> list[Segment]:
    if count <= 0:
        return []
    basis = affine_basis(domain, cfg)
    if basis.dim == 0:
        raise ValueError("domain has affine dimension 0: no segments exist")
    segs: list[Segment] = []
    seen: set[tuple] = set()

    def push(a, b):
        key = tuple(np.round(np.concatenate([a, b]), 12))
        if key in seen or np.max(np.abs(a - b)) <= 1e-12:
            return
        if not (domain.contains(a, cfg.cmp_tolerance) and domain.contains(b, cfg.cmp_tolerance)):
            return
        seen.add(key)
        segs.append(Segment(tuple(map(float, a)), tuple(map(float, b))))

    for a, b in _stratum_pairs(domain, cfg):
        if len(segs) >= count:
            return segs
        push(a, b)
    rng = rng_for(cfg, "segments")
    while len(segs) < count:
        need = count - len(segs)
        pts = domain.sample(rng, 2 * need)
        for k in range(need):
            push(pts[2 * k], pts[2 * k + 1])
    return segs


# smooth arcs

@dataclass(frozen=True)
class SmoothArc:
    """m(lambda) = c0 + c1 lambda + c2 lambda^2 + c3 lambda^3 with m(0)=y, m(1)=x."""

    coef: np.ndarray = field(repr=False)
    delta: float
    label: str = ""

    def at(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)[..., None]
        c = self.coef
        return c[0] + lam * (c[1] + lam * (c[2] + lam * c[3]))

    def derivative(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)[..., None]
        c = self.coef
        return c[1] + lam * (2 * c[2] + lam * 3 * c[3])

    @property
    def start(self) -> np.ndarray:
        return self.coef[0].copy()

    @property
    def end(self) -> np.ndarray:
        return self.coef.sum(axis=0)

    def coefficients(self) -> np.ndarray:
        return self.coef


def power_arc(x, y, exponents) -> np.ndarray:
    """Coefficients of m_i(l) = y_i + (x_i - y_i) l^p_i (p_i in 1..3)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    c = np.zeros((4, len(x)))
    c[0] = y
    for i, p in enumerate(exponents):
        c[int(p), i] += x[i] - y[i]
    return c


def arc_is_valid(coef: np.ndarray, domain: Domain, cfg: CheckConfig, delta: float) -> bool:
    arc = SmoothArc(coef, delta)
    lam = np.linspace(0.0, 1.0, cfg.lambda_resolution)
    img = arc.at(lam)
    if not domain.contains(img, cfg.cmp_tolerance).all():
        return False
    if np.linalg.norm(arc.derivative(lam), axis=1).min() < delta:
        return False
    steps = np.diff(img, axis=0)
    if np.any(np.all(steps > 0, axis=0) | np.all(steps < 0, axis=0)):
        return True  # a strictly monotone coordinate makes the arc injective
    from scipy.spatial.distance import pdist, squareform
    dist = squareform(pdist(img))
    np.fill_diagonal(dist, np.inf)
    idx = np.arange(len(lam))
    dist[np.abs(idx[:, None] - idx[None, :]) <= 1] = np.inf
    return bool(dist.min() > cfg.cmp_tolerance)


def power_exponents(n: int, limit: int = 26) -> list[tuple[int, ...]]:
    out = []
    for p in itertools.product((1, 2, 3), repeat=n):
        if 1 in p and any(v != 1 for v in p):
            out.append(p)
    out.sort(key=lambda p: (sum(p), p))
    return out[:limit]


def sample_smooth_arcs(domain: Domain, x, y, count: int, cfg: CheckConfig,
                       include_power: bool = True, tag: str = "arcs") -> list[SmoothArc]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.max(np.abs(x - y)) <= 1e-14:
        raise ValueError("arc endpoints must differ")
    if not (domain.contains(x) and domain.contains(y)):
        raise ValueError("arc endpoints must lie in the domain")
    if count <= 0:
        return []
    length = float(np.linalg.norm(x - y))
    delta = 1e-3 * length
    arcs = [SmoothArc(power_arc(x, y, (1,) * len(x)), delta, "segment")]
    if include_power:
        for p in power_exponents(len(x)):
            if len(arcs) >= count:
                break
            fwd = power_arc(x, y, p)
            if arc_is_valid(fwd, domain, cfg, delta):
                arcs.append(SmoothArc(fwd, delta, f"power{p}"))
            if len(arcs) >= count:
                break
            # mirrored: bends near x instead of near y
            rev = power_arc(y, x, p)
            rev = np.vstack([rev.sum(axis=0), -(rev[1] + 2 * rev[2] + 3 * rev[3]),
                             rev[2] + 3 * rev[3], -rev[3]])
            if arc_is_valid(rev, domain, cfg, delta):
                arcs.append(SmoothArc(rev, delta, f"power{p}-mirrored"))
    key = zlib.crc32(np.round(np.concatenate([x, y]), 12).tobytes())
    rng = rng_for(cfg, tag, key)
    tries = 0
    while len(arcs) < count and tries < 50 * count:
        tries += 1
        a = rng.normal(scale=0.5 * length, size=len(x))
        b = rng.normal(scale=0.5 * length, size=len(x))
        # y + l (x - y) + l (1 - l) (a + b l)
        coef = np.vstack([y, x - y + a, b - a, -b])
        if arc_is_valid(coef, domain, cfg, delta):
            arcs.append(SmoothArc(coef, delta, "bowed"))
    return arcs[:count]


# relative-interior probe

def rockafellar_probe(domain: Domain, x_ri, y_cl, cfg: CheckConfig) -> PropertyReport:
    pid = "rockafellar"
    basis = affine_basis(domain, cfg)
    x_ri = np.asarray(x_ri, float)
    y_cl = np.asarray(y_cl, float)
    if not ri_certificate(domain, x_ri, basis, cfg):
        return unresolved(pid, cfg, 0, Reason.PRECONDITION, "x_ri failed the relative-interior certificate")
    if not domain.contains(y_cl, cfg.cmp_tolerance):
        return unresolved(pid, cfg, 0, Reason.PRECONDITION, "y_cl is not in the domain")
    lam = np.linspace(0.0, 1.0, cfg.lambda_resolution)[:-1]
    pts = lam[:, None] * y_cl + (1 - lam[:, None]) * x_ri
    ok = ri_certificate(domain, pts, basis, cfg)
    if ok.all():
        return holds(pid, cfg, len(lam))
    k = int(np.argmin(ok))
    return fails(pid, cfg, len(lam), [Witness.make([x_ri, y_cl, pts[k]], [lam[k]],
                                                   "mixture point failed the relative-interior certificate")])


# sampling grids

@dataclass(frozen=True)
class Grid:
    points: np.ndarray   # (G, n), all nodes including non-members
    member: np.ndarray   # (G,) membership mask
    shape: tuple         # node counts per grid axis
    spacing: float       # smallest positive node spacing


GRID_CAP = 250_000


def grid_nodes(domain: Domain, N: int, cfg: CheckConfig) -> Grid:
    """Regular grid over the bounding box, or over aff X when it is lower-dimensional."""
    basis = affine_basis(domain, cfg)
    d = max(basis.dim, 1)
    n_eff = max(3, min(N, int(round(GRID_CAP ** (1.0 / d)))))
    if basis.dim == domain.n:
        lo, hi = domain.bounding_box()
        axes = [np.linspace(a, b, n_eff) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        spans = (hi - lo)[hi > lo]
    else:
        if basis.dim == 0:
            pts = basis.origin[None, :]
            return Grid(pts, domain.contains(pts, cfg.cmp_tolerance), (1,), 0.0)
        cloud = member_cloud(domain, cfg)
        coords = (cloud - basis.origin) @ basis.directions.T
        lo, hi = coords.min(axis=0), coords.max(axis=0)
        axes = [np.linspace(a, b, n_eff) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        tt = np.stack([m.ravel() for m in mesh], axis=1)
        pts = basis.origin + tt @ basis.directions
        spans = (hi - lo)[hi > lo]
    spacing = float(spans.min() / (n_eff - 1)) if len(spans) else 0.0
    shape = tuple(len(a) for a in axes)
    return Grid(pts, domain.contains(pts, cfg.cmp_tolerance), shape, spacing)
