"""Real-valued test functions and their continuity / convexity checkers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .core import (CheckConfig, PropertyReport, Reason, Robustness, Verdict, Witness, fails,
                   holds, lambda_floor, rng_for, unresolved)
from .expr import Compiled, EvaluationError
from .geometry import (Domain, affine_basis, classify_set_properties, grid_nodes,
                       power_exponents, sample_segments, sample_smooth_arcs)
from .probe import probe_params, probe_points, screen

CONTINUITY_MODES = ("joint", "separate", "linear", "arc")
CONVEXITY_KINDS = ("concave", "convex", "quasi-concave", "quasi-convex",
                   "midpoint-quasi-concave", "midpoint-quasi-convex",
                   "separately-quasi-concave", "separately-quasi-convex")


@dataclass(frozen=True, eq=False)
class RealFunction:
    """A vectorised f: R^n -> R with a JSON-describable body."""

    id: str
    arity: int
    body: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    kind: str = "builtin"
    params: dict = field(default_factory=dict, repr=False)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.arity:
            raise ValueError(f"{self.id} expects points of dimension {self.arity}")
        with np.errstate(all="ignore"):
            return np.asarray(self.body(X), dtype=float)

    def to_dict(self) -> dict:
        return {"id": self.id, "arity": self.arity, "kind": self.kind, **self.params}


# builtins

def genocchi_peano() -> RealFunction:
    """2 x1 x2^2 / (x1^2 + x2^4), 0 at the origin: continuous on every line, not jointly."""
    def f(X):
        a, b = X[:, 0], X[:, 1]
        b2 = b * b
        den = a * a + b2 * b2
        out = 2 * a * b2 / den
        out[den == 0] = 0.0
        return out
    return RealFunction("genocchi-peano", 2, f, params={"name": "genocchi-peano"})


def parabola_ratio() -> RealFunction:
    """2 x1^2 x2 / (x1^4 + x2^2), 0 at the origin; equals 1 on x2 = x1^2."""
    def f(X):
        a, b = X[:, 0], X[:, 1]
        a2 = a * a
        den = a2 * a2 + b * b
        out = 2 * a2 * b / den
        out[den == 0] = 0.0
        return out
    return RealFunction("parabola-ratio", 2, f, params={"name": "parabola-ratio"})


def sin_reciprocal(arity: int = 1, coord: int = 0, at_zero: float = 1.0) -> RealFunction:
    """sin(1 / x_coord) for x_coord > 0 and ``at_zero`` otherwise."""
    def f(X):
        t = X[:, coord]
        safe = np.where(t > 0, t, 1.0)
        return np.where(t > 0, np.sin(1.0 / safe), at_zero)
    return RealFunction(f"sin-reciprocal-x{coord + 1}", arity, f,
                        params={"name": "sin-reciprocal", "coord": coord, "at_zero": at_zero})


def nonzero_indicator(arity: int) -> RealFunction:
    """1 off the origin, 0 at it."""
    def f(X):
        return np.any(X != 0, axis=1).astype(float)
    return RealFunction("nonzero-indicator", arity, f, params={"name": "nonzero-indicator"})


def constant(value: float, arity: int) -> RealFunction:
    return RealFunction(f"constant-{value:g}", arity, lambda X: np.full(len(X), float(value)),
                        params={"name": "constant", "value": value})


def linear(a: Sequence[float], b: float = 0.0) -> RealFunction:
    a = np.asarray(a, dtype=float)
    return RealFunction("linear", len(a), lambda X: X @ a + b,
                        params={"name": "linear", "a": a.tolist(), "b": b})


def _fold(op, X: np.ndarray, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    # op-reduce of the affine pieces A_k . x + b_k, one piece at a time;
    # avoids the (B, k) temporary and strided column reads of X @ A.T
    cols = [X[:, j] for j in range(X.shape[1])]
    out = None
    for k in range(A.shape[0]):
        v = cols[0] * A[k, 0]
        for j in range(1, len(cols)):
            v += cols[j] * A[k, j]
        v += b[k]
        out = v if out is None else op(out, v, out=out)
    return out


def min_affine(A, b) -> RealFunction:
    """min_k (A_k . x + b_k): concave."""
    A, b = np.atleast_2d(np.asarray(A, float)), np.asarray(b, float)
    return RealFunction("min-affine", A.shape[1], lambda X: _fold(np.minimum, X, A, b),
                        kind="builtin", params={"name": "min-affine", "A": A.tolist(), "b": b.tolist()})


def max_affine(A, b) -> RealFunction:
    """max_k (A_k . x + b_k): convex."""
    A, b = np.atleast_2d(np.asarray(A, float)), np.asarray(b, float)
    return RealFunction("max-affine", A.shape[1], lambda X: _fold(np.maximum, X, A, b),
                        params={"name": "max-affine", "A": A.tolist(), "b": b.tolist()})


def neg_max_affine(A, b) -> RealFunction:
    A, b = np.atleast_2d(np.asarray(A, float)), np.asarray(b, float)
    return RealFunction("neg-max-affine", A.shape[1], lambda X: -_fold(np.maximum, X, A, b),
                        params={"name": "neg-max-affine", "A": A.tolist(), "b": b.tolist()})


def quadratic(Q, c=None, d: float = 0.0) -> RealFunction:
    """x'Qx + c'x + d."""
    Q = np.atleast_2d(np.asarray(Q, float))
    c = np.zeros(len(Q)) if c is None else np.asarray(c, float)
    return RealFunction("quadratic", len(Q), lambda X: np.einsum("bi,ij,bj->b", X, Q, X) + X @ c + d,
                        params={"name": "quadratic", "Q": Q.tolist(), "c": c.tolist(), "d": d})


def expression(src: str, arity: int, fid: str | None = None) -> RealFunction:
    comp = Compiled(src, arity, "x")
    return RealFunction(fid or src, arity, comp.real, kind="expression", params={"source": src})


def tabulated(axes: Sequence[Sequence[float]], values, fid: str = "table") -> RealFunction:
    """Multilinear interpolation of node values on a tensor grid."""
    axes = [np.asarray(a, float) for a in axes]
    vals = np.asarray(values, float)
    interp = RegularGridInterpolator(axes, vals, method="linear", bounds_error=False, fill_value=None)
    return RealFunction(fid, len(axes), lambda X: interp(X), kind="tabulation",
                        params={"axes": [a.tolist() for a in axes], "values": vals.tolist()})


BUILTINS: dict[str, Callable[..., RealFunction]] = {
    "genocchi-peano": genocchi_peano,
    "parabola-ratio": parabola_ratio,
    "sin-reciprocal": sin_reciprocal,
    "nonzero-indicator": nonzero_indicator,
    "constant": constant,
    "linear": linear,
    "min-affine": min_affine,
    "max-affine": max_affine,
    "neg-max-affine": neg_max_affine,
    "quadratic": quadratic,
}


def function_from_dict(d: dict, arity: int) -> RealFunction:
    if "source" in d or "expression" in d:
        return expression(d.get("source") or d["expression"], arity, d.get("id"))
    if "axes" in d:
        return tabulated(d["axes"], d["values"], d.get("id", "table"))
    name = d.get("name")
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin function {name!r}")
    kwargs = {k: v for k, v in d.items() if k not in ("name", "id", "kind", "arity")}
    if name in ("nonzero-indicator",):
        kwargs.setdefault("arity", arity)
    if name == "constant":
        kwargs.setdefault("arity", arity)
    if name == "sin-reciprocal":
        kwargs.setdefault("arity", arity)
    return BUILTINS[name](**kwargs)


def eval_named(fn: RealFunction, p, domain: Domain | None = None) -> float:
    p = np.asarray(p, dtype=float)
    if domain is not None and not domain.contains(p):
        raise ValueError(f"point {p.tolist()} is outside the domain")
    val = float(fn(p[None, :])[0])
    if not np.isfinite(val):
        raise EvaluationError(f"{fn.id} is not finite at {p.tolist()}")
    return val


# continuity

def _node_candidates(domain: Domain, cfg: CheckConfig):
    grid = grid_nodes(domain, cfg.grid_resolution, cfg)
    lm = domain.landmarks()
    pts = np.vstack([lm, grid.points[grid.member]])
    return pts, max(grid.spacing, 1e-6)


def _joint_hits(fn: RealFunction, domain: Domain, cfg: CheckConfig, separate: bool):
    pts, h = _node_candidates(domain, cfg)

    def run(sub, rho, ladder):
        return probe_points(lambda P, rows: fn(P), pts[sub], rho, ladder, domain,
                            cfg.cmp_tolerance, power=not separate, diagonals=not separate,
                            circles=not separate)
    return pts, screen(run, np.arange(len(pts)), h, cfg), len(pts)


def _curve_eval(fn: RealFunction, coefs: np.ndarray):
    def ev(lam, rows):
        P = np.empty((len(lam), coefs.shape[2]))
        for j in range(coefs.shape[2]):
            c = coefs[:, :, j]
            P[:, j] = c[rows, 0] + lam * (c[rows, 1] + lam * (c[rows, 2] + lam * c[rows, 3]))
        return fn(P)
    return ev


def _curve_hits(fn: RealFunction, coefs: np.ndarray, cfg: CheckConfig):
    M = cfg.lambda_resolution
    lam = np.linspace(0.0, 1.0, M)
    rows = np.repeat(np.arange(len(coefs)), M)
    lams = np.tile(lam, len(coefs))
    ev = _curve_eval(fn, coefs)

    def run(sub, rho, ladder):
        return probe_params(lambda l, r: ev(l, rows[sub][r]), lams[sub], rho, ladder)
    hits = screen(run, np.arange(len(rows)), 1.0 / (M - 1), cfg)
    return rows, lams, hits


def _curve_witnesses(coefs, rows, lams, hits, what: str, limit: int = 5) -> list[Witness]:
    out = []
    for k in range(min(limit, len(hits))):
        i = hits.idx[k]
        c = coefs[rows[i]]
        l0, l1 = lams[i], float(hits.point[k][0])
        pt = lambda l: c[0] + l * (c[1] + l * (c[2] + l * c[3]))
        out.append(Witness.make([c.sum(axis=0), c[0], pt(l0), pt(l1)], [l0, l1],
                                f"{what}: restriction jumps at parameter {l0:.6g} "
                                f"(endpoints x, y, the point, a nearby sample)"))
    return out


def arc_family(domain: Domain, cfg: CheckConfig, anchors: np.ndarray, per_pair: int = 6,
               tag: str = "arc-family") -> list[np.ndarray]:
    """Power and bowed arcs between anchor points and landmarks."""
    lm = domain.landmarks()
    out = []
    for p in anchors:
        for q in lm:
            if np.max(np.abs(p - q)) < 1e-9:
                continue
            try:
                arcs = sample_smooth_arcs(domain, q, p, per_pair, cfg, tag=tag)
            except ValueError:
                continue
            out += [a.coef for a in arcs[1:]]
    return out


def check_function_continuity(fn: RealFunction, domain: Domain, mode: str,
                              cfg: CheckConfig) -> PropertyReport:
    if mode not in CONTINUITY_MODES:
        raise ValueError(f"unknown continuity mode {mode!r}")
    pid = f"{mode}-continuity"
    if mode in ("joint", "separate"):
        pts, hits, used = _joint_hits(fn, domain, cfg, separate=(mode == "separate"))
        note = f"{len(hits.raw_idx)} candidates cleared by refinement" if len(hits.raw_idx) else ""
        if not len(hits):
            return holds(pid, cfg, used, note)
        wits = []
        order = np.argsort(np.linalg.norm(pts[hits.idx] - domain.landmarks()[0], axis=1), kind="stable")
        for k in order[:5]:
            p = pts[hits.idx[k]]
            wits.append(Witness.make([p, hits.point[k]], [],
                                     f"oscillation does not contract at the point; approach along {hits.label[k]}"))
        return fails(pid, cfg, used, wits, note)
    if affine_basis(domain, cfg).dim < 1:
        raise ValueError(f"{mode} continuity needs a domain of affine dimension >= 1")
    segs = sample_segments(domain, cfg.sample_count, cfg)
    coefs = [s.coefficients() for s in segs]
    if mode == "arc":
        _, jh, _ = _joint_hits(fn, domain, cfg, separate=False)
        pts, _ = _node_candidates(domain, cfg)
        anchors = np.vstack([domain.landmarks()[:1], pts[jh.idx[:8]]]) if len(jh) else domain.landmarks()[:1]
        coefs += arc_family(domain, cfg, anchors)
    coefs = np.array(coefs)
    rows, lams, hits = _curve_hits(fn, coefs, cfg)
    used = len(coefs)
    if not len(hits):
        return lambda_floor(holds(pid, cfg, used, f"{len(segs)} segments"
                                  + ("" if mode == "linear" else f", {used - len(segs)} arcs")))
    return fails(pid, cfg, used, _curve_witnesses(coefs, rows, lams, hits, f"{mode} restriction"))


# convexity

def _pairs(domain: Domain, cfg: CheckConfig, pid: str) -> tuple[np.ndarray, np.ndarray]:
    lm = domain.landmarks()
    ij = list(itertools.combinations(range(len(lm)), 2))
    X = [lm[i] for i, _ in ij]
    Y = [lm[j] for _, j in ij]
    rng = rng_for(cfg, pid)
    S = domain.sample(rng, 2 * cfg.sample_count)
    X = np.vstack([np.array(X).reshape(-1, domain.n), S[: cfg.sample_count]])
    Y = np.vstack([np.array(Y).reshape(-1, domain.n), S[cfg.sample_count:]])
    return X, Y


def _separate_pairs(domain: Domain, cfg: CheckConfig, pid: str):
    rng = rng_for(cfg, pid)
    X = domain.sample(rng, cfg.sample_count)
    lo, hi = domain.bounding_box()
    Y = X.copy()
    axis = rng.integers(0, domain.n, size=len(X))
    Y[np.arange(len(X)), axis] = rng.uniform(lo[axis], hi[axis])
    ok = domain.contains(Y)
    return X[ok], Y[ok]


def check_function_convexity(fn: RealFunction, domain: Domain, kind: str,
                             cfg: CheckConfig) -> PropertyReport:
    if kind not in CONVEXITY_KINDS:
        raise ValueError(f"unknown convexity kind {kind!r}")
    pid = kind
    if kind.startswith("separately"):
        X, Y = _separate_pairs(domain, cfg, pid)
    else:
        X, Y = _pairs(domain, cfg, pid)
    if kind.startswith("midpoint"):
        lams = np.array([0.5])
    else:
        lams = np.concatenate([np.linspace(0.1, 0.9, 9), rng_for(cfg, pid, 1).uniform(0, 1, 4)])
    fx, fy = fn(X), fn(Y)
    tau = cfg.cmp_tolerance
    worst = None
    used = 0
    for lam in lams:
        Z = lam * X + (1 - lam) * Y
        fz = fn(Z)
        used += len(Z)
        base = kind.replace("midpoint-", "").replace("separately-", "")
        if base == "concave":
            gap = (lam * fx + (1 - lam) * fy) - fz
        elif base == "convex":
            gap = fz - (lam * fx + (1 - lam) * fy)
        elif base == "quasi-concave":
            gap = np.minimum(fx, fy) - fz
        else:
            gap = fz - np.maximum(fx, fy)
        k = int(np.argmax(gap))
        if gap[k] > tau and (worst is None or gap[k] > worst[0]):
            worst = (float(gap[k]), X[k], Y[k], Z[k], lam)
    if worst is None:
        return holds(pid, cfg, used)
    gap, x, y, z, lam = worst
    rob = Robustness.SURVIVED_REFINEMENT if gap > 2 * tau else Robustness.RAW_GRID
    if rob is Robustness.RAW_GRID:
        return unresolved(pid, cfg, used, Reason.TOLERANCE_AMBIGUITY,
                          f"largest violation {gap:.3g} is within twice the tolerance")
    return fails(pid, cfg, used, [Witness.make([x, y, z], [lam],
                                               f"{base_desc(kind)} violated by {gap:.6g}", rob)])


def base_desc(kind: str) -> str:
    return kind.replace("-", " ") + " inequality"


# profiles and the linear/joint agreement check

def function_profile(fn: RealFunction, domain: Domain, props: Sequence[str],
                     cfg: CheckConfig) -> dict[str, PropertyReport]:
    out = {}
    for p in props:
        if p.endswith("-continuity"):
            out[p] = check_function_continuity(fn, domain, p[: -len("-continuity")], cfg)
        else:
            out[p] = check_function_convexity(fn, domain, p, cfg)
    return out


@dataclass(frozen=True)
class Crosscheck:
    status: str           # "agree", "disagree", "refused"
    explanation: str
    linear: PropertyReport | None = None
    joint: PropertyReport | None = None

    @property
    def toolkit_bug(self) -> bool:
        return (self.status == "disagree" and self.linear is not None and self.joint is not None
                and self.linear.verdict.decisive and self.joint.verdict.decisive)


def crosscheck_linear_joint(fn: RealFunction, domain: Domain, cfg: CheckConfig) -> Crosscheck:
    """Linear and joint continuity must agree for quasi-concave or quasi-convex
    functions on domains that are open or polyhedral; refuse otherwise."""
    prof = classify_set_properties(domain, cfg)
    if prof.property_C is not Verdict.HOLDS:
        return Crosscheck("refused", "domain is neither open nor a polyhedron "
                                     f"(property C = {prof.property_C.value}); agreement is not guaranteed")
    qc = check_function_convexity(fn, domain, "quasi-concave", cfg)
    qv = check_function_convexity(fn, domain, "quasi-convex", cfg)
    if qc.verdict is not Verdict.HOLDS and qv.verdict is not Verdict.HOLDS:
        return Crosscheck("refused", "function is neither quasi-concave nor quasi-convex on the samples")
    lin = check_function_continuity(fn, domain, "linear", cfg)
    joint = check_function_continuity(fn, domain, "joint", cfg)
    same = lin.verdict is joint.verdict
    text = f"linear={lin.verdict.value}, joint={joint.verdict.value}"
    if not same and lin.verdict.decisive and joint.verdict.decisive:
        text += "; decisive disagreement indicates a toolkit bug"
    return Crosscheck("agree" if same else "disagree", text, lin, joint)
