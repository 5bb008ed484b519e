"""Golden corpus of worked examples, the batch runner and report emission."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from . import continuity as C
from . import relations as R
from .core import (SCHEMA, CheckConfig, PropertyReport, Reason, Verdict, Witness, fails, holds,
                   jsonable, unresolved)
from .deduction import DerivedProfile, audit, build_graph, closure, established_conditions, replay
from .functions import (CONTINUITY_MODES, CONVEXITY_KINDS as FUNCTION_KINDS, RealFunction,
                        check_function_continuity, check_function_convexity, genocchi_peano,
                        parabola_ratio, sin_reciprocal, nonzero_indicator)
from .geometry import Ball, Box, Domain, Halfspace, OracleDomain, Polyhedron, classify_set_properties


@dataclass(frozen=True)
class Expectation:
    pid: str
    verdict: Verdict
    citation: str
    inherited: bool = False   # established on the unbounded set, read off a boxed window


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    id: str
    kind: str                                  # "function" or "relation"
    domain: Domain
    subject: object                            # RealFunction or relation
    expected: tuple[Expectation, ...]
    properties: tuple[str, ...]                # direct checks run by the batch runner
    notes: str = ""

    def __post_init__(self):
        for e in self.expected:
            if not e.citation:
                raise ValueError(f"{self.id}: expectation on {e.pid} lacks a citation")
            if e.pid not in self.properties:
                raise ValueError(f"{self.id}: expectation on {e.pid} is never checked")


# property dispatch

SET_LEVEL = ("property-B", "property-C", "open-domain", "cone-domain")


def _structural(pid: str, ok: Verdict, cfg: CheckConfig, why: str, wit: Witness | None = None) -> PropertyReport:
    if ok is Verdict.HOLDS:
        return holds(pid, cfg, 0, why)
    if ok is Verdict.FAILS:
        return fails(pid, cfg, 0, [wit or Witness.make([], [], why)])
    return unresolved(pid, cfg, 0, Reason.PRECONDITION, why)


def check_set_level(domain: Domain, pid: str, cfg: CheckConfig) -> PropertyReport:
    if pid == "cone-domain":
        v = Verdict.HOLDS if domain.is_cone else Verdict.FAILS
        return _structural(pid, v, cfg, "declared convex cone" if domain.is_cone else "not a declared cone")
    prof = classify_set_properties(domain, cfg)
    if pid == "property-B":
        return _structural(pid, prof.property_B, cfg, "componentwise bounds of pairs inside the set",
                           prof.property_B_witness)
    if pid == "property-C":
        return _structural(pid, prof.property_C, cfg,
                           f"open={prof.is_open.value}, polyhedron={prof.is_polyhedron.value}")
    if pid == "open-domain":
        return _structural(pid, prof.is_open, cfg, "relatively open with full affine dimension")
    raise ValueError(pid)


def _relation_checks() -> dict[str, Callable]:
    t: dict[str, Callable] = {}
    for p in R.ORDER_PROPERTIES:
        t[p] = lambda rel, cfg, p=p: R.check_order_property(rel, p, cfg)
    for k in R.CONVEXITY_KINDS:
        t[k] = lambda rel, cfg, k=k: R.check_convexity(rel, k, cfg)
    for k in R.ALGEBRAIC_KINDS:
        t[k] = lambda rel, cfg, k=k: R.check_algebraic(rel, k, cfg)
    t["weakly-monotone"] = lambda rel, cfg: R.check_monotonicity(rel, "weak", cfg)
    t["strongly-monotone"] = lambda rel, cfg: R.check_monotonicity(rel, "strong", cfg)
    t["order-dense"] = R.check_order_density
    for pid in C.SECTION_IDS.values():
        t[pid] = lambda rel, cfg, pid=pid: C.check_section_kinds(rel, cfg)[pid]
    t["continuous"] = C.check_section_continuity
    t["graph-continuous"] = C.check_graph_continuity
    t["linear-continuous"] = C.check_linear_continuity
    t["linear-continuous-pairs"] = lambda rel, cfg: C.check_linear_continuity(rel, cfg, "pairs").renamed(
        "linear-continuous-pairs")
    for side in ("upper", "lower", "both"):
        pre = "" if side == "both" else f"{side}-"
        t[f"{pre}mixture-continuous"] = lambda rel, cfg, s=side: C.check_mixture_continuity(rel, s, cfg)
        t[f"{pre}archimedean"] = lambda rel, cfg, s=side: C.check_archimedean(rel, "plain", s, cfg)
        t[f"{pre}strict-archimedean"] = lambda rel, cfg, s=side: C.check_archimedean(rel, "strict", s, cfg)
    t["wold-continuous"] = lambda rel, cfg: C.check_wold(rel, "full", cfg)
    t["weak-wold-continuous"] = lambda rel, cfg: C.check_wold(rel, "weak", cfg)
    t["arc-continuous"] = lambda rel, cfg: C.check_arc_and_strong(rel, "arc-continuous", cfg)
    t["strong-mixture-continuous"] = lambda rel, cfg: C.check_arc_and_strong(rel, "strong-mixture", cfg)
    t["strong-archimedean"] = lambda rel, cfg: C.check_arc_and_strong(rel, "strong-archimedean", cfg)
    t["strong-strict-archimedean"] = lambda rel, cfg: C.check_arc_and_strong(
        rel, "strong-strict-archimedean", cfg)
    return t


RELATION_CHECKS = _relation_checks()
FUNCTION_PROPERTIES = tuple(f"{m}-continuity" for m in CONTINUITY_MODES) + FUNCTION_KINDS


def property_ids(kind: str) -> tuple[str, ...]:
    if kind == "function":
        return FUNCTION_PROPERTIES + SET_LEVEL
    return tuple(RELATION_CHECKS) + SET_LEVEL


def check_property(kind: str, subject, domain: Domain, pid: str, cfg: CheckConfig) -> PropertyReport:
    if pid in SET_LEVEL:
        return check_set_level(domain, pid, cfg)
    if kind == "function":
        if pid.endswith("-continuity") and pid[: -len("-continuity")] in CONTINUITY_MODES:
            return check_function_continuity(subject, domain, pid[: -len("-continuity")], cfg)
        if pid in FUNCTION_KINDS:
            return check_function_convexity(subject, domain, pid, cfg)
    elif pid in RELATION_CHECKS:
        rep = RELATION_CHECKS[pid](subject, cfg)
        return rep if rep.property_id == pid else rep.renamed(pid)
    raise KeyError(f"unknown {kind} property {pid!r}")


# entries

def _x(pid, verdict, citation, inherited=False):
    return Expectation(pid, Verdict(verdict), citation, inherited)


def _anti_diagonal_segment() -> Polyhedron:
    # {x in [-1,0] x [0,1] : x1 = -x2}
    return Polyhedron([Halfspace([1, 1], 0), Halfspace([-1, -1], 0),
                       Halfspace([1, 0], 0), Halfspace([-1, 0], 1)])


def _parabola_wedge() -> OracleDomain:
    def member(P):
        a, b = P[:, 0], P[:, 1]
        return (a >= 0) & (a <= 1) & (b <= 1) & (a * a <= b) & (b <= 2 * a)
    lm = np.array([[0.0, 0.0], [0.5, 0.25], [0.5, 1.0], [1.0, 1.0], [0.3, 0.3], [0.1, 0.15]])
    return OracleDomain(member, ([0.0, 0.0], [1.0, 1.0]), is_open=False, is_polyhedron=False,
                        landmarks=lm, name="parabola-wedge")


FUNCTION_BASE = ("linear-continuity", "joint-continuity", "quasi-concave", "quasi-convex", "property-C")
RELATION_BASE = ("complete", "transitive", "property-C", "linear-continuous", "mixture-continuous",
                 "archimedean")


def _entries() -> dict[str, Callable[[], CorpusEntry]]:
    sq = lambda: Box([-1.0, -1.0], [1.0, 1.0])
    unit = lambda: Box([0.0, 0.0], [1.0, 1.0], cone=True)

    def gp_function():
        d = sq()
        return CorpusEntry("gp-function", "function", d, genocchi_peano(), (
            _x("linear-continuity", "Holds", "restriction to any line through the square is continuous"),
            _x("joint-continuity", "Fails", "along the parabola x1 = x2^2 the value stays 1 while f(0) = 0"),
        ), FUNCTION_BASE, "classical ratio 2 x1 x2^2 / (x1^2 + x2^4) with value 0 at the origin")

    def gp_relation():
        d = sq()
        return CorpusEntry("gp-relation", "relation", d, R.UtilityInduced(d, genocchi_peano()), (
            _x("mixture-continuous", "Holds", "every mixture set of the induced order is closed"),
            _x("continuous", "Fails", "the upper section of the origin is not closed near the parabola"),
            _x("wold-continuous", "Fails", "a power-curve arc joins two points around the origin while "
                                           "skipping its indifference class"),
        ), RELATION_BASE + ("continuous", "wold-continuous", "convex-upper-sections"),
            "order induced by the classical ratio utility on the square")

    def ex1():
        d = Ball([0.0, 0.0], 1.0)
        return CorpusEntry("ex1-disk", "relation", d, R.predicate(d, "disk-classes"), (
            _x("strict-archimedean", "Holds", "strict mixture sets are open for the two half-disk classes"),
            _x("open-strict-upper", "Fails", "the strict section of a right-class point is the left class, "
                                             "which is not open in the disk"),
        ), RELATION_BASE + ("strict-archimedean", "open-strict-upper", "open-strict-lower"),
            "closed unit disk; left class strictly above right class, nothing else comparable")

    def ex2():
        d = unit()
        return CorpusEntry("ex2-monotone", "relation", d, R.UtilityInduced(d, nonzero_indicator(2)), (
            _x("weakly-monotone", "Holds", "every nonzero bundle beats the origin", inherited=True),
            _x("continuous", "Fails", "the lower strict section of a nonzero point is the singleton origin",
               inherited=True),
            _x("order-dense", "Fails", "nothing lies strictly between the origin and a nonzero bundle",
               inherited=True),
        ), RELATION_BASE + ("weakly-monotone", "continuous", "order-dense", "property-B"),
            "nonnegative orthant boxed to the unit square")

    def ex3():
        d = Box([0.0], [4.0], cone=True)
        return CorpusEntry("ex3-integer-additive", "relation", d, R.predicate(d, "integer-difference"), (
            _x("additive", "Holds", "integer differences are invariant under common translation",
               inherited=True),
            _x("convex-upper-sections", "Fails", "an upper section is a lattice of isolated points",
               inherited=True),
            _x("upper-mixture-continuous", "Holds", "mixture sets are finite, hence closed", inherited=True),
            _x("lower-mixture-continuous", "Holds", "mirror of the upper mixture sets", inherited=True),
        ), RELATION_BASE + ("additive", "convex-upper-sections", "upper-mixture-continuous",
                            "lower-mixture-continuous", "cone-domain"),
            "half-line boxed to [0, 4]; x related to y when x - y is an integer")

    def ex4():
        d = Box([0.0], [1.0])
        return CorpusEntry("ex4-locally-convex-set", "relation", d, R.predicate(d, "band-upper-sets"), (
            _x("locally-convex-upper-sections", "Fails", "the upper sections are bands accumulating at 0, "
                                                         "so no neighbourhood of 0 meets them convexly"),
        ), ("locally-convex-upper-sections",),
            "sections equal a union of disjoint intervals piling up at 0 (bands widened for sampling)")

    def ex5():
        d = Box([0.0, 0.0], [1.0, 1.0])
        return CorpusEntry("ex5-restriction", "relation", d, R.predicate(d, "origin-anti-diagonal"), (
            _x("continuous", "Fails", "the section of the origin is the open anti-diagonal"),
            _x("linear-continuous-pairs", "Holds", "comparing only pairs on a common line loses the "
                                                   "discontinuity, unlike the section-wise restriction"),
            _x("linear-continuous", "Fails", "section-wise restriction to the anti-diagonal keeps the gap"),
        ), RELATION_BASE + ("continuous", "linear-continuous-pairs"),
            "origin indifferent to the open anti-diagonal; pairs mode compares only points of a line")

    def ex6():
        d = _anti_diagonal_segment()
        return CorpusEntry("ex6-no-propertyB", "relation", d, R.UtilityInduced(d, sin_reciprocal(2, 1)), (
            _x("property-B", "Fails", "the ends of the segment have no common upper bound in it"),
            _x("archimedean", "Holds", "utility sin(1/x2) oscillates only at one endpoint"),
            _x("mixture-continuous", "Fails", "mixture sets towards the oscillating end are not closed"),
            _x("wold-continuous", "Holds", "oscillation meets every intermediate indifference class"),
            _x("continuous", "Fails", "sections are not closed at the oscillating end"),
        ), RELATION_BASE + ("property-B", "wold-continuous", "continuous", "weakly-monotone"),
            "anti-diagonal segment from (-1, 1) to the origin; utility sin(1/x2), 1 at the origin")

    def ex7():
        d = _parabola_wedge()
        return CorpusEntry("ex7-parabola", "function", d, parabola_ratio(), (
            _x("quasi-convex", "Holds", "lower level sets of the ratio are convex on the wedge"),
            _x("linear-continuity", "Holds", "every segment of the wedge meets the origin at most transversally"),
            _x("joint-continuity", "Fails", "the ratio equals 1 along the lower parabola edge and 0 at the origin"),
        ), FUNCTION_BASE, "wedge between x2 = x1^2 and x2 = 2 x1 inside the unit square")

    def ex8():
        d = unit()
        return CorpusEntry("ex8-separate-quasiconcave", "function", d, genocchi_peano(), (
            _x("linear-continuity", "Holds", "line restrictions are continuous", inherited=True),
            _x("joint-continuity", "Fails", "the parabola approach to the origin keeps value 1", inherited=True),
            _x("separately-quasi-concave", "Holds", "each coordinate section is single-peaked",
               inherited=True),
        ), FUNCTION_BASE + ("separately-quasi-concave",), "orthant boxed to the unit square")

    def ex9():
        d = Box([0.0, 0.0], [1.0, 1.0])
        return CorpusEntry("ex9-indicator-curve", "relation", d, R.predicate(d, "parabola-pairs"), (
            _x("linear-continuous", "Holds", "each line meets the parabola in at most two points"),
            _x("continuous", "Fails", "the open parabola arc is not closed in the square"),
        ), RELATION_BASE + ("continuous", "reflexive"),
            "x related to y exactly when both lie on the open arc x2 = x1^2; reflexive only on the arc")

    def sin_relation():
        d = Box([0.0], [1.0], cone=True)
        return CorpusEntry("sin-reciprocal-relation", "relation", d, R.UtilityInduced(d, sin_reciprocal()), (
            _x("archimedean", "Holds", "strict comparisons survive small mixtures", inherited=True),
            _x("weak-wold-continuous", "Holds", "the oscillation crosses every intermediate level",
               inherited=True),
            _x("mixture-continuous", "Fails", "mixture sets accumulate at 0 without containing it",
               inherited=True),
        ), RELATION_BASE + ("weak-wold-continuous",),
            "half-line boxed to [0, 1]; utility sin(1/x), 1 at 0")

    def two_class():
        d = Box([0.0], [1.0])
        return CorpusEntry("two-class-threshold", "relation", d, R.predicate(d, "two-class"), (
            _x("graph-continuous", "Holds", "the weak graph is closed and the strict graph open"),
            _x("weak-wold-continuous", "Fails", "no point lies strictly between the two classes"),
        ), RELATION_BASE + ("graph-continuous", "weak-wold-continuous"),
            "upper half of [0, 1] strictly above the lower half; 0.5 indifferent to everything")

    return {"gp-function": gp_function, "gp-relation": gp_relation, "ex1-disk": ex1,
            "ex2-monotone": ex2, "ex3-integer-additive": ex3, "ex4-locally-convex-set": ex4,
            "ex5-restriction": ex5, "ex6-no-propertyB": ex6, "ex7-parabola": ex7,
            "ex8-separate-quasiconcave": ex8, "ex9-indicator-curve": ex9,
            "sin-reciprocal-relation": sin_relation, "two-class-threshold": two_class}


ENTRIES = _entries()
CORPUS_IDS = tuple(ENTRIES)


def load_example(eid: str) -> CorpusEntry:
    try:
        return ENTRIES[eid]()
    except KeyError:
        raise KeyError(f"unknown corpus entry {eid!r}; known: {', '.join(CORPUS_IDS)}") from None


# runner

@dataclass
class EntryResult:
    entry: CorpusEntry
    direct: dict[str, PropertyReport]
    conditions: frozenset[str]
    derived: DerivedProfile
    contradictions: list
    mismatches: list[dict]
    idempotent: bool
    replayed: bool

    def to_dict(self) -> dict:
        return {
            "id": self.entry.id, "kind": self.entry.kind, "notes": self.entry.notes,
            "domain": self.entry.domain.to_dict(),
            "direct": {k: self.direct[k].to_dict() for k in sorted(self.direct)},
            "expected": [{"property": e.pid, "verdict": e.verdict.value, "citation": e.citation,
                          "inherited": e.inherited} for e in self.entry.expected],
            "conditions": sorted(self.conditions),
            "derived": self.derived.to_dict(),
            "contradictions": [c.to_dict() for c in self.contradictions],
            "mismatches": self.mismatches,
            "closure_idempotent": self.idempotent,
            "provenance_replayed": self.replayed,
        }


@dataclass
class CorpusReport:
    config: CheckConfig
    entries: list[EntryResult]
    timestamp: float = field(default_factory=time.time)

    @property
    def mismatches(self) -> list[dict]:
        return [m for e in self.entries for m in e.mismatches]

    @property
    def contradictions(self) -> list:
        return [c for e in self.entries for c in e.contradictions]

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.contradictions and all(
            e.idempotent and e.replayed for e in self.entries)

    def summary(self) -> dict:
        counts = {v.value: 0 for v in Verdict}
        for e in self.entries:
            for r in e.direct.values():
                counts[r.verdict.value] += 1
        return {"pass": self.passed, "entries": len(self.entries),
                "mismatches": len(self.mismatches), "contradictions": len(self.contradictions),
                "verdicts": counts}

    def to_dict(self, with_timestamp: bool = True) -> dict:
        d = {"schema": SCHEMA, "version": __version__, "config": self.config.to_dict(),
             "summary": self.summary(), "entries": [e.to_dict() for e in self.entries]}
        if with_timestamp:
            d["timestamp"] = self.timestamp
        return d

    def canonical_hash(self) -> str:
        blob = json.dumps(jsonable(self.to_dict(with_timestamp=False)), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _safe_check(entry: CorpusEntry, pid: str, cfg: CheckConfig) -> PropertyReport:
    try:
        return check_property(entry.kind, entry.subject, entry.domain, pid, cfg)
    except (ValueError, ArithmeticError) as exc:
        return unresolved(pid, cfg, 0, Reason.PRECONDITION, f"check could not run: {exc}")


def run_entry(entry: CorpusEntry, cfg: CheckConfig, graph=None, asserted: Iterable[str] = ()) -> EntryResult:
    graph = graph or build_graph()
    direct = {pid: _safe_check(entry, pid, cfg) for pid in entry.properties}
    base = DerivedProfile.from_direct(direct)
    cond = established_conditions(base, asserted)
    derived = closure(graph, base, cond)
    again = closure(graph, derived, cond)
    mism = []
    for e in entry.expected:
        got = direct[e.pid].verdict
        if got is not e.verdict:
            kind = "unresolved-not-expected" if got is Verdict.UNRESOLVED else "verdict"
            mism.append({"entry": entry.id, "property": e.pid, "expected": e.verdict.value,
                         "got": got.value, "kind": kind})
    return EntryResult(entry, direct, cond, derived, audit(derived, direct), mism,
                       again.snapshot() == derived.snapshot(), replay(graph, derived))


def run_corpus(cfg: CheckConfig | None = None, subset: Sequence[str] | None = None) -> CorpusReport:
    cfg = cfg or CheckConfig()
    ids = list(subset) if subset else list(CORPUS_IDS)
    graph = build_graph()
    entries = [load_example(i) for i in ids]
    return CorpusReport(cfg, [run_entry(e, cfg, graph) for e in entries])


# emission

def _witness_text(w: Witness) -> str:
    pts = " ".join("(" + ", ".join(f"{v:.6g}" for v in p) + ")" for p in w.points)
    lam = (" lambda=" + ", ".join(f"{s:.6g}" for s in w.scalars)) if w.scalars else ""
    return f"    {w.description} [{w.robustness.value}] {pts}{lam}"


def _report_text(r: PropertyReport, indent: str = "") -> list[str]:
    line = f"{indent}{r.property_id}: {r.verdict.value}"
    if r.reason:
        line += f" ({r.reason.value})"
    if r.notes:
        line += f"  -- {r.notes}"
    return [line] + [indent + _witness_text(w) for w in r.witnesses]


def emit_report(report, fmt: str = "json") -> str:
    """Render a CorpusReport, a PropertyReport or a list of PropertyReports."""
    if fmt not in ("json", "csv", "text"):
        raise ValueError("format must be json, csv or text")
    if isinstance(report, PropertyReport):
        report = [report]
    if isinstance(report, CorpusReport):
        rows = [(e.entry.id, pid, r) for e in report.entries for pid, r in e.direct.items()]
        doc = report.to_dict()
    else:
        rows = [("", r.property_id, r) for r in report]
        doc = {"schema": SCHEMA, "version": __version__, "reports": [r.to_dict() for r in report]}
    if fmt == "json":
        return json.dumps(jsonable(doc), indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["entry", "property", "verdict", "reason", "witnesses", "samples"])
        for eid, pid, r in rows:
            w.writerow([eid, pid, r.verdict.value, r.reason.value if r.reason else "",
                        len(r.witnesses), r.samples_used])
        return buf.getvalue()
    lines = []
    if isinstance(report, CorpusReport):
        s = report.summary()
        lines.append(f"corpus: {'PASS' if s['pass'] else 'FAIL'}  entries={s['entries']} "
                     f"mismatches={s['mismatches']} contradictions={s['contradictions']}")
        for e in report.entries:
            lines.append(f"[{e.entry.id}]")
            for pid in e.entry.properties:
                lines += _report_text(e.direct[pid], "  ")
            for m in e.mismatches:
                lines.append(f"  MISMATCH {m['property']}: expected {m['expected']}, got {m['got']}")
            for c in e.contradictions:
                other = f"direct {c.direct.value}" if c.direct else "another derivation"
                lines.append(f"  CONTRADICTION {c.pid}: derived {c.derived.value} vs {other}")
    else:
        for r in report:
            lines += _report_text(r)
    return "\n".join(lines) + "\n"
