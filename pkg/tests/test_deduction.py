import itertools

import pytest

from continlab import CheckConfig, Verdict
from continlab.core import Witness, fails, holds, unresolved, Reason
from continlab.corpus import load_example, run_entry
from continlab.deduction import (ALWAYS, SEVEN, DerivedProfile, Status, applicable_edges, audit,
                                 build_graph, citations, closure, established_conditions, replay)

G = build_graph()
CT = ("complete", "transitive")
CONVEX = CT + ("property-C", "convex-upper-sections")


def test_edge_count_and_citations():
    assert len(G) >= 30
    table = citations()
    for e in G.edges:
        assert e.citation in table
        assert table[e.citation]["statement"].strip()
        assert table[e.citation]["title"].strip()


@pytest.mark.parametrize("cond", [CONVEX, CT + ("property-B", "weakly-monotone")])
def test_seven_postulate_cliques(cond):
    pairs = {(next(iter(e.antecedents)), next(iter(e.consequents)))
             for e in G.edges if e.conditions == frozenset(cond) and len(e.antecedents) == 1}
    for a, b in itertools.permutations(SEVEN, 2):
        assert (a, b) in pairs


def test_weak_wold_to_archimedean_edge():
    assert any(e.antecedents == {"weak-wold-continuous"} and "archimedean" in e.consequents
               and e.conditions == frozenset(CT) for e in G.edges)


def test_biconditionals_are_paired():
    for e in G.edges:
        if e.partner:
            back = G.by_id[e.partner]
            assert back.partner == e.eid
            assert back.antecedents == e.consequents and back.consequents == e.antecedents


def test_applicable_edges_examples():
    assert applicable_edges(G, DerivedProfile(), ()) == []
    p = DerivedProfile.from_direct({"mixture-continuous": "Holds", "archimedean": "Holds"})
    fired = applicable_edges(G, p, ())
    assert any(e.citation == "linear-mixture-archimedean" and e.consequents == {"linear-continuous"}
               for e in fired)
    p = DerivedProfile.from_direct({"continuous": "Holds"})
    fired = applicable_edges(G, p, CT)
    assert any(e.consequents == {"graph-continuous", "wold-continuous"} for e in fired)
    assert not any(e.consequents == {"graph-continuous", "wold-continuous"}
                   for e in applicable_edges(G, p, ()))


def test_closure_examples():
    p = DerivedProfile.from_direct({"linear-continuous": "Holds"})
    d = closure(G, p, CONVEX)
    for pid in SEVEN:
        if pid != "linear-continuous":
            assert d.status(pid) is Status.DERIVED_HOLDS, pid
    assert replay(G, d)
    p = DerivedProfile.from_direct({"mixture-continuous": "Fails"})
    d = closure(G, p, CONVEX)
    assert d.status("linear-continuous") is Status.DERIVED_FAILS
    assert replay(G, d)


def test_closure_is_idempotent_and_monotone():
    p = DerivedProfile.from_direct({"mixture-continuous": "Holds", "archimedean": "Holds"})
    d = closure(G, p, CT)
    assert d.status("linear-continuous") is Status.DERIVED_HOLDS
    assert closure(G, d, CT).snapshot() == d.snapshot()
    bigger = closure(G, p, CONVEX)
    assert len(bigger.facts) > len(d.facts)
    for pid, f in d.facts.items():
        assert bigger.facts[pid].status == f.status


def test_conditions_come_only_from_direct_holds():
    p = DerivedProfile.from_direct({"complete": "Holds", "transitive": "Fails"})
    assert established_conditions(p) == frozenset({"complete"}) | ALWAYS
    with pytest.raises(ValueError):
        established_conditions(p, ["made-up"])


def _reports(**verdicts):
    cfg = CheckConfig()
    out = {}
    for pid, v in verdicts.items():
        pid = pid.replace("_", "-")
        if v == "Holds":
            out[pid] = holds(pid, cfg, 1)
        elif v == "Fails":
            out[pid] = fails(pid, cfg, 1, [Witness.make([[0.0]])])
        else:
            out[pid] = unresolved(pid, cfg, 1, Reason.INSUFFICIENT_SAMPLES)
    return out


def test_audit_empty_and_mismatch():
    assert audit(DerivedProfile(), {}) == []
    p = DerivedProfile.from_direct({"continuous": "Holds"})
    with pytest.raises(ValueError, match="profile mismatch"):
        audit(p, _reports(continuous="Fails"))


def test_audit_flags_false_assertion():
    direct = _reports(linear_continuous="Holds", continuous="Fails", mixture_continuous="Holds",
                      complete="Holds", transitive="Holds")
    base = DerivedProfile.from_direct(direct)
    honest = closure(G, base, established_conditions(base))
    assert audit(honest, direct) == []
    lied = closure(G, base, established_conditions(base, ["property-C", "convex-upper-sections"]))
    found = audit(lied, direct)
    assert any(c.pid == "continuous" and c.direct is Verdict.FAILS for c in found)
    assert [c.pid for c in found] == sorted(c.pid for c in found)


def test_unresolved_never_contradicts():
    direct = _reports(linear_continuous="Holds", continuous="Unresolved")
    base = DerivedProfile.from_direct(direct)
    d = closure(G, base, CONVEX)
    assert audit(d, direct) == []


def test_gp_relation_end_to_end(light):
    entry = load_example("gp-relation")
    honest = run_entry(entry, light, G)
    assert honest.contradictions == []
    lied = run_entry(entry, light, G, ["property-C", "convex-upper-sections"])
    assert any(c.pid == "continuous" and c.direct is Verdict.FAILS for c in lied.contradictions)
    assert lied.replayed
