"""Conditional implication graph over postulate ids, forward closure and audit.

Facts are keyed by the same ids the direct checkers emit.  An edge fires when
its side conditions are established (direct Holds or explicit assertion) and
all antecedents hold; biconditional edges also propagate failures backwards.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

from .core import SCHEMA, PropertyReport, Verdict

SIDE_CONDITIONS = (
    "complete", "transitive", "reflexive", "non-trivial", "semi-transitive",
    "transitive-indifference", "convex-upper-sections", "convex-strict-sections",
    "convex-indifference", "locally-convex-upper-sections", "locally-convex-sections",
    "weakly-monotone", "strongly-monotone", "additive", "cone-domain", "independent",
    "property-B", "property-C", "open-domain", "vector-space", "finite-dimensional",
)
ALWAYS = frozenset({"vector-space", "finite-dimensional"})
SEVEN = ("graph-continuous", "continuous", "linear-continuous", "mixture-continuous",
         "archimedean", "wold-continuous", "weak-wold-continuous")
TERMINAL = ("representable", "mixture-linear-representable")


def asserted(tag: str) -> str:
    """A side condition nobody can check; it only holds when a user asserts it."""
    return f"asserted:{tag}"


def is_condition(name: str) -> bool:
    return name in SIDE_CONDITIONS or name.startswith("asserted:")


@lru_cache(maxsize=1)
def citations() -> dict[str, dict]:
    text = resources.files("continlab").joinpath("data/citations.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class ImplicationEdge:
    eid: str
    antecedents: frozenset[str]
    consequents: frozenset[str]
    conditions: frozenset[str]
    citation: str
    subject: str = "relation"
    partner: str | None = None      # reverse edge of a biconditional
    note: str = ""

    def to_dict(self) -> dict:
        return {"id": self.eid, "subject": self.subject,
                "antecedents": sorted(self.antecedents), "consequents": sorted(self.consequents),
                "conditions": sorted(self.conditions), "citation": self.citation,
                "statement": citations()[self.citation]["statement"],
                "biconditional_partner": self.partner, "note": self.note}


@dataclass(frozen=True)
class AbsentEdge:
    """A non-implication, with the corpus entry that refutes it."""
    antecedent: str
    consequent: str
    conditions: frozenset[str]
    refuted_by: str


class ImplicationGraph:
    def __init__(self, edges: Iterable[ImplicationEdge], absent: Iterable[AbsentEdge] = ()):
        self.edges = tuple(edges)
        self.absent = tuple(absent)
        self.by_id = {e.eid: e for e in self.edges}
        if len(self.by_id) != len(self.edges):
            raise ValueError("duplicate edge ids")

    def __len__(self):
        return len(self.edges)

    def ids(self) -> set[str]:
        return {i for e in self.edges for i in e.antecedents | e.consequents}

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, "edges": [e.to_dict() for e in self.edges],
                           "absent": [{"antecedent": a.antecedent, "consequent": a.consequent,
                                       "conditions": sorted(a.conditions), "refuted_by": a.refuted_by}
                                      for a in self.absent]}, indent=2)


class _Builder:
    def __init__(self):
        self.edges: list[ImplicationEdge] = []

    def _name(self, key, ante, cons, cond):
        return f"{key}:{'+'.join(sorted(ante))}->{'+'.join(sorted(cons))}" + (
            f"|{'+'.join(sorted(cond))}" if cond else "")

    def imp(self, key, ante, cons, cond=(), subject="relation", note="", partner=None):
        a, c, k = frozenset(ante), frozenset(cons), frozenset(cond)
        if key not in citations():
            raise KeyError(key)
        e = ImplicationEdge(self._name(key, a, c, k), a, c, k, key, subject, partner, note)
        self.edges.append(e)
        return e

    def iff(self, key, left, right, cond=(), subject="relation", note=""):
        l, r, k = frozenset(left), frozenset(right), frozenset(cond)
        fwd, back = self._name(key, l, r, k), self._name(key, r, l, k)
        self.imp(key, l, r, k, subject, note, partner=back)
        self.imp(key, r, l, k, subject, note, partner=fwd)

    def clique(self, key, members, cond=(), note=""):
        for a, b in itertools.combinations(members, 2):
            self.iff(key, [a], [b], cond, note=note)


def build_graph() -> ImplicationGraph:
    b = _Builder()
    ct = ("complete", "transitive")

    # functions
    for shape in ("quasi-concave", "quasi-convex"):
        b.imp("linear-joint-quasiconvex", [shape, "linear-continuity"], ["joint-continuity"],
              ["property-C"], subject="function")
    b.imp("joint-implies-linear", ["joint-continuity"], ["linear-continuity"], subject="function")
    for shape in ("concave", "convex"):
        b.imp("concave-linear", [shape], ["linear-continuity"], ["open-domain"], subject="function")
        b.imp("concave-joint", [shape], ["joint-continuity"], ["open-domain"], subject="function")

    # definitions
    b.iff("conjunctive-definitions",
          ["closed-upper-sections", "closed-lower-sections", "open-strict-upper", "open-strict-lower"],
          ["continuous"])
    for base in ("mixture-continuous", "archimedean", "strict-archimedean"):
        b.iff("conjunctive-definitions", [f"upper-{base}", f"lower-{base}"], [base])

    b.iff("linear-mixture-archimedean", ["mixture-continuous", "archimedean"], ["linear-continuous"])

    b.clique("seven-postulates-convex", SEVEN, ct + ("property-C", "convex-upper-sections"))
    b.clique("seven-postulates-monotone", SEVEN, ct + ("property-B", "weakly-monotone"),
             note="no nonnegative-orthant requirement is imposed beyond the printed conditions")

    b.imp("postulate-chain", ["graph-continuous"], ["continuous"])
    b.imp("postulate-chain", ["continuous"], ["linear-continuous"])
    b.imp("postulate-chain", ["linear-continuous"], ["strict-archimedean"])
    b.imp("postulate-chain", ["strict-archimedean"], ["archimedean"])
    b.imp("postulate-chain", ["wold-continuous"], ["weak-wold-continuous"])
    b.imp("postulate-chain-ordered", ["continuous"], ["graph-continuous", "wold-continuous"], ct)
    b.imp("postulate-chain-ordered", ["strict-archimedean"], ["mixture-continuous"], ct)
    b.imp("postulate-chain-ordered", ["mixture-continuous"], ["archimedean", "weak-wold-continuous"], ct)
    b.imp("postulate-chain-ordered", ["weak-wold-continuous"], ["archimedean"], ct)

    for cond in (("complete", "property-C", "locally-convex-upper-sections"),
                 ("property-C", "locally-convex-sections"),
                 ("property-C", "reflexive", "convex-indifference", "transitive-indifference")):
        b.iff("linear-continuous-local-convexity", ["linear-continuous"], ["continuous"], cond)

    add = ("additive", "cone-domain")
    b.clique("additive-one-sided", ["upper-mixture-continuous", "lower-mixture-continuous",
                                    "mixture-continuous"], add)
    b.clique("additive-one-sided", ["upper-strict-archimedean", "lower-strict-archimedean",
                                    "strict-archimedean"], add)

    b.clique("convex-scalar-postulates", ["archimedean", "strict-archimedean", "mixture-continuous",
                                          "weak-wold-continuous"], ct + ("convex-upper-sections",))

    b.iff("arc-continuity", ["arc-continuous"], ["continuous"], ["property-C"])
    b.iff("arc-continuity", ["strong-mixture-continuous", "strong-archimedean"], ["continuous"],
          ["property-C"])

    orthant = ct + ("weakly-monotone", "property-B", "property-C")
    b.iff("monotone-orthant-representation", ["continuous"], ["representable"], orthant,
          note="only the equivalence content is encoded; representability has no checker")
    b.iff("monotone-orthant-representation", ["arc-continuous"], ["continuous"], orthant)

    for p in ("mixture-continuous", "archimedean", "weak-wold-continuous"):
        b.imp("mixture-linear-representation", [p], ["mixture-linear-representable"],
              ct + ("independent",))

    b.imp("mixture-strongly-monotone", ["mixture-continuous"], ["strongly-monotone"],
          [asserted("behavioural-axioms")])

    b.iff("additive-homothetic-independent", ["additive", "homothetic"], ["independent"], ["transitive"])
    b.imp("additive-homothetic-independent", ["additive", "mixture-continuous"], ["independent"], ct)
    b.imp("additive-homothetic-independent", ["independent", "mixture-continuous"], ["additive"], ct)

    semi = ("non-trivial", "semi-transitive", "additive", "cone-domain")
    b.imp("additive-representation", ["upper-mixture-continuous", "upper-archimedean"],
          ["mixture-linear-representable"], semi)
    b.imp("additive-closed-open-sections", ["closed-upper-sections", "open-strict-upper"],
          ["complete", "transitive", "continuous"], semi,
          note="closedness of every upper section stands in for closedness at the origin")
    b.imp("completeness-from-additivity", ["upper-mixture-continuous", "upper-archimedean"],
          ["complete", "transitive"], semi)

    sch = (asserted("strict-primitive-consumer"),)
    b.iff("strict-primitive-consumer", ["archimedean"], ["strict-archimedean"], sch)
    b.iff("strict-primitive-consumer", ["strict-archimedean"], ["open-strict-upper", "open-strict-lower"], sch)
    shf = (asserted("non-transitive-consumer"),)
    b.clique("non-transitive-consumer", ["archimedean", "mixture-continuous", "continuous"], shf)

    dubra = ("reflexive", "convex-indifference", "transitive-indifference")
    b.imp("completeness-from-scalar-continuity", ["mixture-continuous", "archimedean"],
          ["continuous", "complete", "transitive"], ("property-C", "non-trivial") + dubra)
    b.imp("convex-sections-from-scalar-continuity", ["mixture-continuous", "archimedean"],
          ["convex-upper-sections", "convex-strict-sections"], dubra)

    b.iff("closed-sections-mixture", ["closed-upper-sections"], ["upper-mixture-continuous"],
          ["locally-convex-upper-sections"])
    b.iff("closed-sections-mixture", ["closed-lower-sections"], ["lower-mixture-continuous"],
          ["locally-convex-sections"])
    b.iff("open-sections-strict-archimedean", ["open-strict-upper"], ["upper-strict-archimedean"],
          ["property-C", "locally-convex-upper-sections"])
    b.iff("open-sections-strict-archimedean", ["open-strict-lower"], ["lower-strict-archimedean"],
          ["property-C", "locally-convex-sections"])

    b.clique("convexity-forms", ["convex-upper-sections", "convex-strict-sections", "star-convex"], ct)

    b.imp("strong-archimedean-forms", ["strong-mixture-continuous", "strong-archimedean"],
          ["strong-strict-archimedean"])
    b.imp("strong-archimedean-forms", ["strong-mixture-continuous", "strong-strict-archimedean"],
          ["strong-archimedean"])

    absent = [
        AbsentEdge("archimedean", "mixture-continuous", frozenset(), "sin-reciprocal-relation"),
        AbsentEdge("weak-wold-continuous", "mixture-continuous", frozenset(), "sin-reciprocal-relation"),
        AbsentEdge("mixture-continuous", "continuous", frozenset(ct), "gp-relation"),
        AbsentEdge("linear-continuous", "continuous", frozenset(ct), "gp-relation"),
        AbsentEdge("weak-wold-continuous", "wold-continuous", frozenset(ct), "gp-relation"),
        AbsentEdge("graph-continuous", "weak-wold-continuous", frozenset(), "two-class-threshold"),
        AbsentEdge("strict-archimedean", "continuous", frozenset(), "ex1-disk"),
        AbsentEdge("linear-continuity", "joint-continuity", frozenset({"property-C"}), "gp-function"),
    ]
    return ImplicationGraph(b.edges, absent)


# profiles

class Status(str, enum.Enum):
    DIRECT_HOLDS = "DirectHolds"
    DIRECT_FAILS = "DirectFails"
    DERIVED_HOLDS = "DerivedHolds"
    DERIVED_FAILS = "DerivedFails"
    UNKNOWN = "Unknown"

    @property
    def holds(self) -> bool:
        return self in (Status.DIRECT_HOLDS, Status.DERIVED_HOLDS)

    @property
    def fails(self) -> bool:
        return self in (Status.DIRECT_FAILS, Status.DERIVED_FAILS)

    @property
    def direct(self) -> bool:
        return self in (Status.DIRECT_HOLDS, Status.DIRECT_FAILS)


@dataclass(frozen=True)
class Fact:
    status: Status
    edge: str | None = None            # edge that produced a derived status
    premises: tuple[str, ...] = ()      # ids whose statuses let the edge fire


@dataclass
class DerivedProfile:
    facts: dict[str, Fact] = field(default_factory=dict)
    # derivations landing on ids that already had a direct fact, one per status
    shadow: dict[tuple[str, Status], Fact] = field(default_factory=dict)
    conflicts: list[tuple[str, Fact, Fact]] = field(default_factory=list)
    conditions: frozenset[str] = frozenset()

    @classmethod
    def from_direct(cls, verdicts: Mapping[str, "Verdict | PropertyReport"]) -> "DerivedProfile":
        facts = {}
        for pid, v in verdicts.items():
            v = v.verdict if isinstance(v, PropertyReport) else Verdict(v)
            if v is Verdict.HOLDS:
                facts[pid] = Fact(Status.DIRECT_HOLDS)
            elif v is Verdict.FAILS:
                facts[pid] = Fact(Status.DIRECT_FAILS)
        return cls(facts)

    def status(self, pid: str) -> Status:
        f = self.facts.get(pid)
        return f.status if f else Status.UNKNOWN

    def chain(self, pid: str, fact: Fact | None = None) -> list[str]:
        """Edge ids used to reach ``pid`` (or the given shadow fact), premises first."""
        out: list[str] = []
        seen: set[str] = set()

        def walk(p, fact):
            if fact is None or fact.edge is None or p in seen:
                return
            seen.add(p)
            for q in fact.premises:
                walk(q, self.facts.get(q))
            if fact.edge not in out:
                out.append(fact.edge)
        walk(pid, fact or self.facts.get(pid))
        return out

    def to_dict(self) -> dict:
        def fd(f: Fact):
            return {"status": f.status.value, "edge": f.edge, "premises": list(f.premises)}
        return {"facts": {k: fd(self.facts[k]) for k in sorted(self.facts)},
                "shadow": [{"id": k, **fd(f)} for (k, _), f in sorted(self.shadow.items())],
                "conflicts": [{"id": p, "first": fd(a), "second": fd(b)} for p, a, b in self.conflicts],
                "conditions": sorted(self.conditions)}

    def snapshot(self):
        return (tuple(sorted((k, v) for k, v in self.facts.items())),
                tuple(sorted((k, v) for k, v in self.shadow.items())))


def established_conditions(profile: DerivedProfile, extra: Iterable[str] = ()) -> frozenset[str]:
    """Conditions backed by a direct Holds, plus explicit assertions."""
    extra = frozenset(extra)
    bad = [c for c in extra if not is_condition(c)]
    if bad:
        raise ValueError(f"unknown side conditions: {bad}")
    direct = {k for k, f in profile.facts.items() if f.status is Status.DIRECT_HOLDS and is_condition(k)}
    return frozenset(direct) | extra | ALWAYS


def applicable_edges(graph: ImplicationGraph, profile: DerivedProfile,
                     conditions: Iterable[str]) -> list[ImplicationEdge]:
    cond = frozenset(conditions) | ALWAYS
    return [e for e in graph.edges
            if e.conditions <= cond and all(profile.status(a).holds for a in e.antecedents)]


def closure(graph: ImplicationGraph, profile: DerivedProfile,
            conditions: Iterable[str] = ()) -> DerivedProfile:
    """Least fixed point of forward chaining; direct facts are never overwritten."""
    cond = frozenset(conditions) | ALWAYS | profile.conditions
    out = DerivedProfile(dict(profile.facts), dict(profile.shadow), list(profile.conflicts), cond)
    live = [e for e in graph.edges if e.conditions <= cond]
    limit = max(1, len(graph.edges) * max(1, len(graph.ids())))

    def derive(pid, holds, edge, premises) -> bool:
        new = Fact(Status.DERIVED_HOLDS if holds else Status.DERIVED_FAILS, edge.eid, tuple(sorted(premises)))
        cur = out.facts.get(pid)
        if cur is None:
            out.facts[pid] = new
            return True
        if cur.status.direct:
            if (pid, new.status) not in out.shadow:
                out.shadow[(pid, new.status)] = new
                return True
            return False
        if cur.status.holds != holds and not any(c[0] == pid for c in out.conflicts):
            out.conflicts.append((pid, cur, new))
        return False

    for _ in range(limit):
        changed = False
        for e in live:
            if all(out.status(a).holds for a in e.antecedents):
                for c in sorted(e.consequents):
                    changed |= derive(c, True, e, e.antecedents)
            if e.partner is None:
                continue
            failed = sorted(c for c in e.consequents if out.status(c).fails)
            if not failed:
                continue
            open_ = [a for a in e.antecedents if not out.status(a).holds]
            if len(open_) == 1:
                others = set(e.antecedents) - {open_[0]}
                changed |= derive(open_[0], False, e, others | {failed[0]})
        if not changed:
            break
    return out


@dataclass(frozen=True)
class Contradiction:
    pid: str
    derived: Status
    direct: Verdict | None       # None: two derivations disagree, no direct verdict involved
    chain: tuple[str, ...]

    @property
    def kind(self) -> str:
        return "derivation-conflict" if self.direct is None else "direct-vs-derived"

    def to_dict(self) -> dict:
        return {"id": self.pid, "kind": self.kind, "derived": self.derived.value,
                "direct": self.direct.value if self.direct else None, "chain": list(self.chain)}


def audit(derived: DerivedProfile, direct: Mapping[str, PropertyReport]) -> list[Contradiction]:
    """Derived conclusions that a direct check refutes.

    A derived Holds only clashes with a Fails whose witness survived
    refinement; a derived Fails clashes with any direct Holds.
    """
    for pid, f in derived.facts.items():
        if f.status.direct:
            rep = direct.get(pid)
            want = Verdict.HOLDS if f.status is Status.DIRECT_HOLDS else Verdict.FAILS
            if rep is None or rep.verdict is not want:
                raise ValueError(f"profile mismatch on {pid!r}")
    out = []
    for (pid, _), f in derived.shadow.items():
        rep = direct[pid]
        if f.status is Status.DERIVED_HOLDS and rep.robust_failure:
            out.append(Contradiction(pid, f.status, rep.verdict, tuple(derived.chain(pid, f))))
        elif f.status is Status.DERIVED_FAILS and rep.verdict is Verdict.HOLDS:
            out.append(Contradiction(pid, f.status, rep.verdict, tuple(derived.chain(pid, f))))
    for pid, a, b in derived.conflicts:
        out.append(Contradiction(pid, b.status, None, tuple(derived.chain(pid, a) + derived.chain(pid, b))))
    return sorted(out, key=lambda c: (c.pid, c.kind, c.derived.value))


def replay(graph: ImplicationGraph, derived: DerivedProfile) -> bool:
    """Re-check every derived fact against its edge; chains must bottom out in direct facts."""
    facts = derived.facts

    def grounded(pid, depth=0) -> bool:
        f = facts.get(pid)
        if f is None or depth > len(facts) + 1:
            return False
        if f.status.direct:
            return True
        e = graph.by_id.get(f.edge or "")
        if e is None or not e.conditions <= derived.conditions:
            return False
        if f.status is Status.DERIVED_HOLDS:
            ok = pid in e.consequents and set(f.premises) == set(e.antecedents) and all(
                facts[p].status.holds for p in f.premises)
        else:
            fail = [p for p in f.premises if p in e.consequents]
            rest = set(f.premises) - set(fail)
            ok = (e.partner is not None and pid in e.antecedents and len(fail) == 1
                  and facts[fail[0]].status.fails and rest == set(e.antecedents) - {pid}
                  and all(facts[p].status.holds for p in rest))
        return ok and all(grounded(p, depth + 1) for p in f.premises)

    ok = all(grounded(p) for p, f in facts.items() if not f.status.direct)
    for f in derived.shadow.values():
        e = graph.by_id.get(f.edge or "")
        ok &= e is not None and all(grounded(p) for p in f.premises)
    return bool(ok)
