"""Command-line front end: ``onto-tdd <command> ...``.

Exit codes: 0 when everything went as expected, 1 when a test expectation,
cycle or consistency requirement is not met, 2 on unreadable or malformed
input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .bench import BenchConfig, cmd_bench
from .errors import EngineError, InconsistentOntologyError
from .fss import ParseError, effective_prefixes, load, load_suite, parse_axiom, render_axiom, save, serialize, short_name
from .query import evaluate, parse_query
from .reasoner import Reasoner
from .synth import write_corpus
from .tdd import (
    Outcome, Strategy, TddTest, UnsupportedTarget, catalogue_markdown, family_of, FAMILIES, regression_failures,
    run_cycle, run_regression, run_test, select_test,
)

OK, UNMET, BAD_INPUT = 0, 1, 2

log = logging.getLogger("onto_tdd")


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


def _setup_logging() -> None:
    level = os.environ.get("ONTO_TDD_LOG", "WARNING").upper()
    if level == "TRACE":
        level = "DEBUG"
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _load(path):
    try:
        return load(path)
    except ParseError as e:
        raise InputError(f"{path}:{e}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e


def _suite(path, o):
    try:
        return load_suite(path, effective_prefixes(o))
    except ParseError as e:
        raise InputError(f"{path}:{e}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e


def _timeout(ms):
    return None if ms is None else ms / 1000.0


def _strategies(ax, wanted: str) -> list[Strategy]:
    """Strategies to run for a target; a missing one falls back to the other."""
    have = [s for s in (Strategy.TBOX, Strategy.ABOX) if s in FAMILIES[family_of(ax)]]
    if wanted == "both":
        return have
    s = Strategy(wanted)
    return [s] if s in have else have[:1]


def _entry_tests(e, wanted: str, where) -> list[TddTest]:
    """The tests a suite line asks for: an explicit id, else one per strategy."""
    try:
        if e.test_id:
            return [TddTest(e.test_id, e.axiom)]
        return [select_test(e.axiom, s) for s in _strategies(e.axiom, e.strategy or wanted)]
    except (UnsupportedTarget, ValueError) as err:
        raise InputError(f"{where}:{e.line}:1: {err}") from err


def _write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


# -- commands ------------------------------------------------------------------------

def cmd_test(args) -> int:
    o = _load(args.ontology)
    entries = _suite(args.suite, o)
    pfx = effective_prefixes(o)
    r = Reasoner(o)
    rows, all_ok = [], True
    for e in entries:
        for test in _entry_tests(e, args.strategy, args.suite):
            v = run_test(o, test, r, _timeout(args.timeout))
            if v.outcome is Outcome.ERROR or v.outcome is Outcome.INCONSISTENT:
                ok = False
            else:
                ok = v.passed == (e.expect == "pass")
            all_ok &= ok
            rows.append({"line": e.line, "test_id": test.test_id, "strategy": test.strategy.value,
                         "target": render_axiom(e.axiom, pfx), "expect": e.expect,
                         "ok": ok, **v.to_dict()})
    print(f"{'line':>4}  {'test':<9} {'strategy':<8} {'expect':<6} {'outcome':<20} {'ok':<4} target")
    for row in rows:
        print(f"{row['line']:>4}  {row['test_id']:<9} {row['strategy']:<8} {row['expect']:<6} "
              f"{row['outcome']:<20} {'yes' if row['ok'] else 'NO':<4} {row['target']}")
    met = sum(1 for row in rows if row["ok"])
    print(f"{met}/{len(rows)} expectations met")
    if args.out:
        _write_json(args.out, {"schema": 1, "ontology": str(args.ontology), "suite": str(args.suite),
                               "passed": all_ok, "results": rows})
    return OK if all_ok else UNMET


def cmd_cycle(args) -> int:
    o = _load(args.ontology)
    pfx = effective_prefixes(o)
    try:
        ax = parse_axiom(args.axiom, pfx)
        test = select_test(ax, args.strategy)
    except ParseError as e:
        raise InputError(f"axiom:{e}") from e
    except UnsupportedTarget as e:
        raise InputError(str(e)) from e
    suite = []
    if args.suite:
        for e in _suite(args.suite, o):
            if e.expect == "pass":
                suite.extend(_entry_tests(e, "both", args.suite))
    rep = run_cycle(o, test, suite, args.policy, Reasoner(o), _timeout(args.timeout))
    print("\n".join(rep.trace()))
    if args.out:
        _write_json(args.out, rep.to_dict())
    if not rep.success:
        return UNMET
    if args.write:
        save(o, args.ontology)
        print(f"wrote {args.ontology}")
    return OK


def cmd_regress(args) -> int:
    o = _load(args.ontology)
    entries = [e for e in _suite(args.suite, o) if e.expect == "pass"]
    pfx = effective_prefixes(o)
    tests = [t for e in entries for t in _entry_tests(e, args.strategy, args.suite)]
    results = run_regression(o, tests, Reasoner(o), _timeout(args.timeout))
    bad = regression_failures(results)
    for t, v in results:
        flag = "ok" if v.passed else "FLAGGED"
        print(f"{flag:<8} {t.test_id:<9} {v.outcome.value:<20} {render_axiom(t.target, pfx)}")
    print(f"{len(results) - len(bad)}/{len(results)} passed")
    if args.out:
        _write_json(args.out, {"schema": 1, "results": [
            {"test_id": t.test_id, "target": render_axiom(t.target, pfx), "flagged": not v.passed,
             **v.to_dict()} for t, v in results]})
    return OK if not bad else UNMET


def cmd_query(args) -> int:
    o = _load(args.ontology)
    pfx = effective_prefixes(o)
    try:
        q = parse_query(args.atom, pfx)
    except ParseError as e:
        raise InputError(f"query:{e}") from e
    r = Reasoner(o, timeout=_timeout(args.timeout))
    try:
        answers = evaluate(o, q, r)
    except InconsistentOntologyError as e:
        print(str(e), file=sys.stderr)
        return UNMET
    for name in sorted(short_name(a, pfx) for a in answers):
        print(name)
    return OK


def cmd_classify(args) -> int:
    o = _load(args.ontology)
    pfx = effective_prefixes(o)
    r = Reasoner(o, timeout=_timeout(args.timeout))
    if not r.is_consistent():
        print("inconsistent ontology", file=sys.stderr)
        return UNMET
    hier = r.classify()
    unsat = r.unsatisfiable_classes()
    for a in sorted(hier, key=lambda i: short_name(i, pfx)):
        node = hier[a]
        if a in unsat:
            print(f"{short_name(a, pfx)} ⊑ ⊥")
            continue
        sup = ", ".join(sorted(short_name(b, pfx) for b in node.direct_supers)) or "owl:Thing"
        eq = sorted(short_name(b, pfx) for b in node.equivalents)
        print(f"{short_name(a, pfx)} ⊑ {sup}" + (f"  ≡ {', '.join(eq)}" if eq else ""))
    return OK


def cmd_parse(args) -> int:
    o = _load(args.ontology)
    text = serialize(o)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def cmd_catalogue(args) -> int:
    text = catalogue_markdown()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def cmd_bench_cli(args) -> int:
    if args.synthesize:
        try:
            sizes = [int(x) for x in args.synthesize.split(",")]
        except ValueError as e:
            raise InputError(f"--synthesize takes comma-separated sizes: {e}") from e
        write_corpus(args.corpus, sizes, args.seed)
    try:
        buckets = tuple(int(x) for x in args.buckets.split(","))
        cfg = BenchConfig(repetitions=args.repetitions, size_buckets=buckets, seed=args.seed,
                          timeout=_timeout(args.timeout), tests_per_ontology=args.tests,
                          parallel=args.parallel)
    except ValueError as e:
        raise InputError(str(e)) from e
    try:
        res = cmd_bench(args.corpus, cfg, args.out)
    except FileNotFoundError as e:
        raise InputError(str(e)) from e
    if not res.records:
        raise InputError("no parseable ontology in the corpus")
    for b in res.summary["buckets"]:
        t, a = b["strategies"]["tbox"]["elapsed"], b["strategies"]["abox"]["elapsed"]
        h1 = b.get("h1", {}).get("holds")
        h2 = b.get("h2", {})
        print(f"{b['bucket']:>12}  ontologies={b['ontologies']}  tbox median={t.get('median', 0):.4f}s  "
              f"abox median={a.get('median', 0):.4f}s  H1={h1}  "
              f"H2 ratio={h2.get('median_ratio', float('nan')):.2f}")
    for s in res.skipped:
        print(f"skipped {s['path']}: {s['reason']}")
    if res.csv_path:
        print(f"wrote {res.csv_path} and {res.json_path}")
    return OK


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="onto-tdd", description="Test-driven development for OWL ontologies.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, strategy=True):
        if strategy:
            p.add_argument("--strategy", choices=["tbox", "abox", "both"], default="both")
        p.add_argument("--timeout", type=int, metavar="MS", help="per-test reasoning budget")
        p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("test", help="run a suite manifest against an ontology")
    p.add_argument("ontology")
    p.add_argument("suite")
    common(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("cycle", help="run one TDD cycle for an axiom")
    p.add_argument("ontology")
    p.add_argument("axiom")
    common(p, strategy=False)
    p.add_argument("--strategy", choices=["tbox", "abox"], default="tbox")
    p.add_argument("--suite", help="regression suite manifest")
    p.add_argument("--policy", choices=["report", "create"], default="report",
                   help="what to do with names the axiom introduces")
    p.add_argument("--write", action="store_true", help="save the ontology on success")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("regress", help="re-run the passing tests of a suite")
    p.add_argument("ontology")
    p.add_argument("suite")
    common(p)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("query", help="evaluate a query atom")
    p.add_argument("ontology")
    p.add_argument("atom")
    common(p, strategy=False)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="compare the two strategies over a corpus")
    p.add_argument("corpus")
    common(p, strategy=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--buckets", default="100,1000,10000")
    p.add_argument("--tests", type=int, help="random tests per ontology")
    p.add_argument("--parallel", type=int, default=1, metavar="N")
    p.add_argument("--synthesize", metavar="SIZES", help="first write synthetic ontologies of these sizes")
    p.set_defaults(func=cmd_bench_cli)

    p = sub.add_parser("classify", help="print the class hierarchy")
    p.add_argument("ontology")
    common(p, strategy=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("parse", help="parse and re-serialize an ontology")
    p.add_argument("ontology")
    common(p, strategy=False)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("catalogue", help="print the table of test procedures")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_catalogue)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return UNMET


if __name__ == "__main__":
    sys.exit(main())
