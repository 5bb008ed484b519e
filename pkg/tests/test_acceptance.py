"""The twelve acceptance criteria at the pinned defaults.

Run under pytest (one PASS/FAIL line per criterion in the terminal summary)
or directly with ``python3 tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest

from continlab import CheckConfig, Verdict, run_corpus
from continlab.continuity import (check_archimedean, check_mixture_continuity,
                                  check_section_continuity, check_wold)
from continlab.corpus import check_property, load_example
from continlab.deduction import build_graph, citations
from continlab.functions import (check_function_continuity, check_function_convexity,
                                 crosscheck_linear_joint, min_affine)
from continlab.geometry import (Box, PositiveOrthant, Simplex, affine_basis, ray_exit,
                                classify_set_properties, ri_certificate, rockafellar_probe)
from continlab.relations import check_algebraic, check_convexity, check_monotonicity, check_order_density
from continlab.core import Robustness, rng_for

CFG = CheckConfig()
H, F = Verdict.HOLDS, Verdict.FAILS
_CORPUS = {}


def corpus():
    if "report" not in _CORPUS:
        _CORPUS["report"] = run_corpus(CFG)
    return _CORPUS["report"]


def gp_function():
    e = load_example("gp-function")
    lin = check_function_continuity(e.subject, e.domain, "linear", CFG)
    joint = check_function_continuity(e.subject, e.domain, "joint", CFG)
    near = [w for w in joint.witnesses
            if w.robustness is Robustness.SURVIVED_REFINEMENT and np.linalg.norm(w.points[0]) <= 0.05
            and "x1 = x2^2" in w.description]
    ok = lin.verdict is H and lin.samples_used >= 500 and joint.verdict is F and bool(near)
    return ok, f"linear={lin.verdict.value} on {lin.samples_used} segments, joint={joint.verdict.value}, " \
               f"{len(near)} refined witnesses within 0.05 along x1 = x2^2"


def gp_relation():
    rel = load_example("gp-relation").subject
    mix = check_mixture_continuity(rel, "both", CFG)
    sec = check_section_continuity(rel, CFG)
    wold = check_wold(rel, "full", CFG)
    on_curve = [w for w in wold.witnesses if len(w.points) == 4]
    ok = mix.verdict is H and mix.samples_used >= 1000 and sec.verdict is F and wold.verdict is F \
        and bool(on_curve)
    return ok, f"mixture={mix.verdict.value} ({mix.samples_used} triples), continuous={sec.verdict.value}, " \
               f"wold={wold.verdict.value}"


def linear_joint_agreement():
    dom = Box([0.0, 0.0], [1.0, 1.0])
    rng = rng_for(CFG, "acceptance-min-affine")
    agree = both_hold = 0
    for _ in range(50):
        k = int(rng.integers(1, 6))
        r = crosscheck_linear_joint(min_affine(rng.normal(size=(k, 2)), rng.normal(size=k)), dom, CFG)
        agree += r.status == "agree"
        both_hold += r.status == "agree" and r.linear.verdict is H
    return agree == 50 and both_hold == 50, f"agree {agree}/50, both Holds {both_hold}/50"


def linear_is_mixture_and_archimedean():
    checked = violations = 0
    for e in corpus().entries:
        d = e.direct
        trio = [d.get(p) for p in ("linear-continuous", "mixture-continuous", "archimedean")]
        if any(r is None or not r.verdict.decisive for r in trio):
            continue
        checked += 1
        lin, mix, arch = (r.verdict is H for r in trio)
        violations += lin != (mix and arch)
    return checked > 0 and violations == 0, f"{checked} relations with three decisive verdicts, " \
                                            f"{violations} violations"


def integer_additive():
    rel = load_example("ex3-integer-additive").subject
    add = check_algebraic(rel, "additive", CFG)
    up = check_mixture_continuity(rel, "upper", CFG)
    lo = check_mixture_continuity(rel, "lower", CFG)
    cvx = check_convexity(rel, "convex-upper-sections", CFG)
    ok = add.verdict is H and up.verdict is lo.verdict and cvx.verdict is F
    return ok, f"additive={add.verdict.value}, upper-mixture={up.verdict.value}, " \
               f"lower-mixture={lo.verdict.value}, convex-upper-sections={cvx.verdict.value}"


def sin_relation():
    rel = load_example("sin-reciprocal-relation").subject
    arch = check_archimedean(rel, "plain", "both", CFG)
    ww = check_wold(rel, "weak", CFG)
    mix = check_mixture_continuity(rel, "both", CFG)
    to_zero = [w for w in mix.witnesses if abs(w.points[3][0]) < 1e-6]
    ok = arch.verdict is H and ww.verdict is H and mix.verdict is F and bool(to_zero)
    return ok, f"archimedean={arch.verdict.value}, weak-wold={ww.verdict.value}, " \
               f"mixture={mix.verdict.value} with {len(to_zero)} witnesses at 0"


def monotone_not_continuous():
    rel = load_example("ex2-monotone").subject
    mono = check_monotonicity(rel, "weak", CFG)
    cont = check_section_continuity(rel, CFG)
    dense = check_order_density(rel, CFG)
    zero_not_open = [w for w in cont.witnesses if w.description.startswith("strict-lower section")
                     and np.allclose(w.points[1], 0.0)]
    ok = mono.verdict is H and cont.verdict is F and bool(zero_not_open) and dense.verdict is F
    return ok, f"weak-monotone={mono.verdict.value}, continuous={cont.verdict.value} " \
               f"({len(zero_not_open)} witnesses: strict lower section {{0}} not open), " \
               f"order-dense={dense.verdict.value}"


def no_property_b():
    e = load_example("ex6-no-propertyB")
    b = classify_set_properties(e.domain, CFG).property_B
    arch = check_archimedean(e.subject, "plain", "both", CFG)
    mix = check_mixture_continuity(e.subject, "both", CFG)
    ok = b is F and arch.verdict is H and mix.verdict is F
    return ok, f"property_B={b.value}, archimedean={arch.verdict.value}, mixture={mix.verdict.value}"


def parabola():
    e = load_example("ex7-parabola")
    qv = check_function_convexity(e.subject, e.domain, "quasi-convex", CFG)
    lin = check_function_continuity(e.subject, e.domain, "linear", CFG)
    joint = check_function_continuity(e.subject, e.domain, "joint", CFG)
    cc = crosscheck_linear_joint(e.subject, e.domain, CFG)
    ok = qv.verdict is H and lin.verdict is H and joint.verdict is F and cc.status == "refused" \
        and "property C" in cc.explanation
    return ok, f"quasi-convex={qv.verdict.value}, linear={lin.verdict.value}, joint={joint.verdict.value}, " \
               f"crosscheck {cc.status}: {cc.explanation}"


def _ri_boundary_pairs(dom, count, tag):
    """Seeded relative-interior points and boundary points reached by rays from them."""
    basis = affine_basis(dom, CFG)
    rng = rng_for(CFG, tag)
    lo, hi = dom.bounding_box()
    tmax = 2.0 * float(np.linalg.norm(hi - lo)) + 1.0
    pairs = []
    while len(pairs) < count:
        x = dom.sample(rng, 1)[0]
        if not ri_certificate(dom, x[None, :], basis, CFG)[0]:
            continue
        d = rng.normal(size=basis.dim) @ basis.directions
        d /= np.linalg.norm(d)
        pairs.append((x, x + ray_exit(dom, x, d, tmax) * d))
    return pairs


def rockafellar():
    doms = {"box": Box([0.0, 0.0], [1.0, 2.0]), "simplex": Simplex(np.eye(3)),
            "orthant": PositiveOrthant(2, 3.0)}
    passed = 0
    for name, dom in doms.items():
        for x, y in _ri_boundary_pairs(dom, 100, f"acceptance-rockafellar-{name}"):
            passed += rockafellar_probe(dom, x, y, CFG).verdict is H
    return passed == 300, f"{passed}/300 Holds"


def corpus_audit():
    rep = corpus()
    idem = all(e.idempotent for e in rep.entries)
    replayed = all(e.replayed for e in rep.entries)
    table = citations()
    cited = all(e.citation in table and table[e.citation]["statement"].strip() for e in build_graph().edges)
    ok = not rep.contradictions and not rep.mismatches and idem and replayed and cited
    return ok, f"contradictions={len(rep.contradictions)}, mismatches={len(rep.mismatches)}, " \
               f"idempotent={idem}, replayed={replayed}, citations resolved={cited}"


def determinism():
    a = corpus().canonical_hash()
    b = run_corpus(CFG).canonical_hash()
    return a == b, f"{a[:16]} vs {b[:16]}"


CRITERIA = [
    (1, "GP function linear vs joint", gp_function),
    (2, "GP relation mixture, continuity, Wold", gp_relation),
    (3, "linear/joint agreement on 50 concave functions", linear_joint_agreement),
    (4, "linear = mixture and archimedean across corpus", linear_is_mixture_and_archimedean),
    (5, "integer-difference additive relation", integer_additive),
    (6, "sin(1/x) relation", sin_relation),
    (7, "monotone relation with {0} not open", monotone_not_continuous),
    (8, "anti-diagonal segment without property B", no_property_b),
    (9, "parabola domain", parabola),
    (10, "relative-interior probe", rockafellar),
    (11, "corpus audit", corpus_audit),
    (12, "determinism", determinism),
]


def _run(num, name, fn):
    t = time.perf_counter()
    ok, detail = fn()
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {name} -- {detail} [{time.perf_counter() - t:.1f}s]"
    return ok, line


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn):
    from conftest import ACCEPTANCE_LINES
    ok, line = _run(num, name, fn)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [_run(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
