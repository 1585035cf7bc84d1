"""Benchmark harness comparing the query-based and mock-individual strategies."""

from __future__ import annotations

import csv
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import EngineError
from .fss import ParseError, load, render_axiom, effective_prefixes
from .reasoner import Reasoner
from .tdd import FAMILIES, Strategy, generate_random_tests, paired, run_test

log = logging.getLogger(__name__)

SCHEMA = 1


@dataclass(frozen=True)
class BenchConfig:
    repetitions: int = 3
    size_buckets: tuple = (100, 1000, 10000)
    seed: int = 0
    timeout: float | None = 60.0  # seconds per test
    tests_per_ontology: int | None = None  # default: one per applicable family
    parallel: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        b = list(self.size_buckets)
        if not b or any(x >= y for x, y in zip(b, b[1:])):
            raise ValueError("bucket boundaries must be strictly increasing")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.parallel < 1:
            raise ValueError("parallel must be at least 1")


@dataclass
class BenchRecord:
    ontology: str
    axioms: int
    bucket: str
    family: str
    test_id: str
    strategy: str
    repetition: int
    target: str
    classification_time: float
    test_time: float
    elapsed: float
    verdict: str


COLUMNS = [f.name for f in fields(BenchRecord)]
_FLOATS = ("classification_time", "test_time", "elapsed")
_INTS = ("axioms", "repetition")


def bucket_labels(bounds) -> list[str]:
    b = list(bounds)
    out = [f"0-{b[0]}"]
    out += [f"{lo}-{hi}" for lo, hi in zip(b, b[1:])]
    out.append(f"{b[-1]}+")
    return out


def bucket_of(n: int, bounds) -> str:
    """Axiom counts up to and including a boundary fall in the lower bucket."""
    labels = bucket_labels(bounds)
    for k, hi in enumerate(bounds):
        if n <= hi:
            return labels[k]
    return labels[-1]


def bench_ontology(path, config: BenchConfig) -> list[BenchRecord]:
    """All records for one ontology file, in a deterministic order."""
    path = Path(path)
    o = load(path)
    n = o.logical_axiom_count()
    bucket = bucket_of(n, config.size_buckets)
    r = Reasoner(o)
    pfx = effective_prefixes(o)
    # classify once up front, as an editor session would before any test
    with r.budget(config.timeout):
        if r.is_consistent():
            r.taxonomy()
    k = config.tests_per_ontology
    if k is None:
        k = len(FAMILIES)
    tests = generate_random_tests(o, k, config.seed)
    out = []
    for t in tests:
        target = render_axiom(t.target, pfx)
        for strategy in (Strategy.TBOX, Strategy.ABOX):
            tt = paired(t, strategy)
            if tt is None:
                continue
            for rep in range(config.repetitions):
                v = run_test(o, tt, r, config.timeout)
                out.append(BenchRecord(path.stem, n, bucket, tt.family, tt.test_id, strategy.value, rep,
                                       target, v.classification_time, v.test_time, v.elapsed,
                                       v.outcome.value))
    log.info("%s: %d axioms, %d records", path.name, n, len(out))
    return out


def _bench_one(args):
    path, config = args
    try:
        return str(path), bench_ontology(path, config), None
    except (ParseError, OSError, EngineError, UnicodeDecodeError) as e:
        return str(path), [], f"{type(e).__name__}: {e}"


def run_bench(paths, config: BenchConfig) -> tuple[list[BenchRecord], list[dict]]:
    """Benchmark every ontology; unusable files are skipped with a note."""
    paths = sorted(Path(p) for p in paths)
    jobs = [(p, config) for p in paths]
    if config.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    records, skipped = [], []
    for path, recs, err in results:
        if err is not None:
            log.warning("skipping %s: %s", path, err)
            skipped.append({"path": path, "reason": err})
        records.extend(recs)
    return records, skipped


def corpus_files(corpus_dir) -> list[Path]:
    return sorted(Path(corpus_dir).glob("*.ofn"))


# -- statistics ----------------------------------------------------------------------

def box_stats(values) -> dict:
    """Median, quartiles and the count of points beyond 1.5 IQR from the box."""
    xs = sorted(values)
    if not xs:
        return {"n": 0}
    if len(xs) == 1:
        q1 = med = q3 = xs[0]
    else:
        q1, med, q3 = statistics.quantiles(xs, n=4, method="inclusive")
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return {"n": len(xs), "median": med, "q1": q1, "q3": q3, "iqr": iqr,
            "min": xs[0], "max": xs[-1], "outliers": sum(1 for x in xs if x < lo or x > hi)}


def _paired_families() -> set:
    return {f for f, m in FAMILIES.items() if len(m) == 2}


def summarize(records, config: BenchConfig, skipped=()) -> dict:
    both = _paired_families()
    buckets = []
    h1, h2 = {}, {}
    for label in bucket_labels(config.size_buckets):
        rows = [r for r in records if r.bucket == label]
        if not rows:
            continue
        entry = {"bucket": label, "ontologies": len({r.ontology for r in rows}), "strategies": {}}
        for s in ("tbox", "abox"):
            sr = [r for r in rows if r.strategy == s]
            entry["strategies"][s] = {
                "elapsed": box_stats([r.elapsed for r in sr]),
                "classification_time": box_stats([r.classification_time for r in sr]),
                "test_time": box_stats([r.test_time for r in sr]),
            }
        # H1 compares the strategies on targets that both can decide
        pt = [r.elapsed for r in rows if r.strategy == "tbox" and r.family in both]
        pa = [r.elapsed for r in rows if r.strategy == "abox" and r.family in both]
        if pt and pa:
            mt, ma = statistics.median(pt), statistics.median(pa)
            entry["h1"] = {"tbox_median": mt, "abox_median": ma, "holds": mt <= ma}
            h1[label] = mt <= ma
        ab = [r.classification_time / r.elapsed for r in rows if r.strategy == "abox" and r.elapsed > 0]
        if ab:
            ratio = statistics.median(ab)
            entry["h2"] = {"median_ratio": ratio, "holds": ratio > 0.5}
            h2[label] = ratio > 0.5
        buckets.append(entry)
    return {
        "schema": SCHEMA,
        "config": {**asdict(config), "size_buckets": list(config.size_buckets)},
        "records": len(records),
        "buckets": buckets,
        "h1": h1,
        "h2": h2,
        "skipped": list(skipped),
    }


# -- files ---------------------------------------------------------------------------

def write_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in records:
            w.writerow([repr(v) if isinstance(v, float) else v for v in asdict(r).values()])


def read_csv(path) -> list[BenchRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            for k in _FLOATS:
                row[k] = float(row[k])
            for k in _INTS:
                row[k] = int(row[k])
            out.append(BenchRecord(**row))
    return out


@dataclass
class BenchResult:
    records: list
    summary: dict
    csv_path: Path | None = None
    json_path: Path | None = None
    skipped: list = field(default_factory=list)


def cmd_bench(corpus_dir, config: BenchConfig, out_dir=None) -> BenchResult:
    paths = corpus_files(corpus_dir)
    if not paths:
        raise FileNotFoundError(f"no .ofn files in {corpus_dir}")
    records, skipped = run_bench(paths, config)
    summary = summarize(records, config, skipped)
    res = BenchResult(records, summary, skipped=skipped)
    if out_dir is not None:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        res.csv_path, res.json_path = d / "bench.csv", d / "summary.json"
        write_csv(records, res.csv_path)
        res.json_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return res
