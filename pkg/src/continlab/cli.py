"""Command line entry point: check, corpus, deduce, edges."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import SCHEMA, CheckConfig, Verdict, jsonable
from .corpus import (CORPUS_IDS, FUNCTION_BASE, RELATION_BASE, CorpusEntry, check_property,
                     emit_report, load_example, property_ids, run_corpus, run_entry)
from .deduction import build_graph, is_condition
from .functions import function_from_dict
from .geometry import domain_from_dict
from .relations import relation_from_dict

EXIT_PASS, EXIT_FAIL, EXIT_UNRESOLVED, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _config(args) -> CheckConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    flags = {"grid": "grid_resolution", "lambda_": "lambda_resolution", "samples": "sample_count",
             "seed": "seed", "tol": "cmp_tolerance"}
    for attr, name in flags.items():
        v = getattr(args, attr, None)
        if v is not None:
            base[name] = v
    try:
        return CheckConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad config: {exc}") from exc


def load_subject(ref: str):
    """(kind, subject, domain, entry) for a corpus id or a JSON subject file."""
    if ref in CORPUS_IDS:
        e = load_example(ref)
        return e.kind, e.subject, e.domain, e
    path = Path(ref)
    if not path.exists():
        raise UsageError(f"{ref!r} is neither a corpus id nor a file")
    try:
        d = json.loads(path.read_text())
        if d.get("kind", "relation") == "function":
            dom = domain_from_dict(d["domain"])
            return "function", function_from_dict(d["function"], dom.n), dom, None
        rel = relation_from_dict(d)
        return "relation", rel, rel.domain, None
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad subject file: {exc}") from exc


def _verdict_code(reports) -> int:
    verdicts = {r.verdict for r in reports}
    if Verdict.FAILS in verdicts:
        return EXIT_FAIL
    if Verdict.UNRESOLVED in verdicts:
        return EXIT_UNRESOLVED
    return EXIT_PASS


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    cfg = _config(args)
    kind, subject, domain, _ = load_subject(args.subject)
    known = property_ids(kind)
    props = list(known) if args.property == ["all"] else args.property
    bad = [p for p in props if p not in known]
    if bad:
        raise UsageError(f"unknown {kind} properties: {', '.join(bad)}")
    reports = [check_property(kind, subject, domain, p, cfg) for p in props]
    _write(emit_report(reports, args.format), args.out)
    return _verdict_code(reports)


def cmd_corpus(args) -> int:
    cfg = _config(args)
    subset = args.subset.split(",") if args.subset else None
    for s in subset or ():
        if s not in CORPUS_IDS:
            raise UsageError(f"unknown corpus entry {s!r}")
    report = run_corpus(cfg, subset)
    _write(emit_report(report, args.format), args.out)
    if report.passed:
        return EXIT_PASS
    decisive = [m for m in report.mismatches if m["kind"] != "unresolved-not-expected"]
    if report.contradictions or decisive:
        return EXIT_FAIL
    return EXIT_UNRESOLVED


def cmd_deduce(args) -> int:
    cfg = _config(args)
    kind, subject, domain, entry = load_subject(args.subject)
    asserted = [c.strip() for c in (args.assert_ or "").split(",") if c.strip()]
    bad = [c for c in asserted if not is_condition(c)]
    if bad:
        raise UsageError(f"unknown side conditions: {', '.join(bad)}")
    if entry is None:
        props = FUNCTION_BASE if kind == "function" else RELATION_BASE
        entry = CorpusEntry(args.subject, kind, domain, subject, (), props)
    res = run_entry(entry, cfg, build_graph(), asserted)
    doc = {"schema": SCHEMA, "subject": args.subject, "asserted": asserted,
           "direct": {k: v.to_dict() for k, v in sorted(res.direct.items())},
           "derived": res.derived.to_dict(),
           "contradictions": [c.to_dict() for c in res.contradictions]}
    if args.format == "json":
        text = json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"conditions: {', '.join(sorted(res.conditions))}"]
        for pid, f in sorted(res.derived.facts.items()):
            via = f"  via {f.edge}" if f.edge else ""
            lines.append(f"{pid}: {f.status.value}{via}")
        for c in res.contradictions:
            other = f"direct {c.direct.value}" if c.direct else "another derivation"
            lines.append(f"CONTRADICTION {c.pid}: derived {c.derived.value} vs {other}")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return EXIT_FAIL if res.contradictions else EXIT_PASS


def cmd_edges(args) -> int:
    _write(build_graph().to_json() + "\n", args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="continlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def knobs(sp):
        sp.add_argument("--grid", type=int, help="grid resolution N")
        sp.add_argument("--lambda", dest="lambda_", type=int, help="lambda grid size M")
        sp.add_argument("--samples", type=int, help="sample count K")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float, help="comparison tolerance")
        sp.add_argument("--config", help="JSON file with CheckConfig fields")
        sp.add_argument("--out", help="write output here instead of stdout")

    c = sub.add_parser("check", help="run direct checks on one subject")
    c.add_argument("--subject", required=True, help="corpus id or subject JSON file")
    c.add_argument("--property", nargs="+", default=["all"], help="property ids or 'all'")
    c.add_argument("--format", choices=["json", "csv", "text"], default="text")
    knobs(c)
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("corpus", help="run the example corpus")
    k.add_argument("--subset", help="comma separated corpus ids")
    k.add_argument("--format", choices=["json", "csv", "text"], default="text")
    knobs(k)
    k.set_defaults(func=cmd_corpus)

    d = sub.add_parser("deduce", help="direct checks plus closure under asserted conditions")
    d.add_argument("--subject", required=True)
    d.add_argument("--assert", dest="assert_", default="", help="comma separated side conditions")
    d.add_argument("--format", choices=["json", "text"], default="text")
    knobs(d)
    d.set_defaults(func=cmd_deduce)

    e = sub.add_parser("edges", help="export the implication graph")
    e.add_argument("--out")
    e.set_defaults(func=cmd_edges)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"continlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
