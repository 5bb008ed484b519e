import csv
import io
import json

import pytest

from continlab import CheckConfig, Verdict
from continlab.corpus import (CORPUS_IDS, CorpusEntry, Expectation, emit_report, load_example,
                              property_ids, run_corpus)


def test_registry():
    assert len(CORPUS_IDS) == 13
    for eid in CORPUS_IDS:
        e = load_example(eid)
        assert e.id == eid and e.expected
        assert all(x.citation for x in e.expected)
        assert set(e.properties) <= set(property_ids(e.kind))
    with pytest.raises(KeyError, match="nope"):
        load_example("nope")


def test_examples_shape():
    gp = load_example("gp-function")
    assert gp.kind == "function" and gp.subject.arity == 2
    ex3 = load_example("ex3-integer-additive")
    assert ex3.domain.n == 1 and ex3.domain.is_cone


def test_uncited_expectation_is_rejected():
    e = load_example("gp-function")
    with pytest.raises(ValueError, match="citation"):
        CorpusEntry("x", "function", e.domain, e.subject,
                    (Expectation("linear-continuity", Verdict.HOLDS, ""),), ("linear-continuity",))
    with pytest.raises(ValueError, match="never checked"):
        CorpusEntry("x", "function", e.domain, e.subject,
                    (Expectation("joint-continuity", Verdict.HOLDS, "why"),), ("linear-continuity",))


@pytest.fixture(scope="module")
def small(request):
    cfg = CheckConfig(grid_resolution=61, lambda_resolution=101, sample_count=120)
    return run_corpus(cfg, ["gp-function", "ex3-integer-additive", "two-class-threshold"])


def test_subset_and_summary(small):
    assert [e.entry.id for e in small.entries] == ["gp-function", "ex3-integer-additive",
                                                   "two-class-threshold"]
    s = small.summary()
    assert s["entries"] == 3 and s["pass"] == small.passed
    assert (s["mismatches"] == 0) == (not small.mismatches)


def test_csv_row_count(small):
    rows = list(csv.reader(io.StringIO(emit_report(small, "csv"))))
    assert rows[0] == ["entry", "property", "verdict", "reason", "witnesses", "samples"]
    assert len(rows) - 1 == sum(len(e.entry.properties) for e in small.entries)


def test_json_schema(small):
    doc = json.loads(emit_report(small, "json"))
    assert doc["schema"] == "continlab/1" and "timestamp" in doc
    assert doc["summary"]["pass"] == small.passed
    fails = [r for e in doc["entries"] for r in e["direct"].values() if r["verdict"] == "Fails"]
    assert fails and all(r["witnesses"][0]["points"] for r in fails)


def test_text_report(small):
    text = emit_report(small, "text")
    assert text.startswith("corpus: ") and "[gp-function]" in text


def test_determinism():
    cfg = CheckConfig(grid_resolution=61, lambda_resolution=101, sample_count=120)
    a = run_corpus(cfg, ["ex2-monotone", "sin-reciprocal-relation"])
    b = run_corpus(cfg, ["ex2-monotone", "sin-reciprocal-relation"])
    assert a.canonical_hash() == b.canonical_hash()
    assert a.canonical_hash() != run_corpus(CheckConfig(grid_resolution=61, lambda_resolution=101,
                                                        sample_count=120, seed=7),
                                            ["ex2-monotone", "sin-reciprocal-relation"]).canonical_hash()


def test_coarse_grid_reports_unresolved_not_wrong():
    rep = run_corpus(CheckConfig(lambda_resolution=3, grid_resolution=61, sample_count=120),
                     ["gp-relation", "sin-reciprocal-relation"])
    assert not rep.passed
    assert rep.mismatches and all(m["kind"] == "unresolved-not-expected" for m in rep.mismatches)
