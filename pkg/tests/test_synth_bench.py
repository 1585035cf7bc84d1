import dataclasses
import statistics

import pytest

from onto_tdd.bench import (
    BenchConfig, box_stats, bucket_labels, bucket_of, cmd_bench, read_csv, summarize,
)
from onto_tdd.fss import load
from onto_tdd.reasoner import Reasoner
from onto_tdd.synth import synthetic_ontology, write_corpus


@pytest.mark.parametrize("n, seed", [(40, 0), (150, 1), (600, 2), (1500, 3)])
def test_synthetic_ontologies_are_consistent_and_coherent(n, seed):
    o = synthetic_ontology(n, seed)
    assert abs(o.logical_axiom_count() - n) <= max(3, n // 50)
    r = Reasoner(o)
    assert r.is_consistent()
    assert not r.unsatisfiable_classes()


def test_synthesis_is_seeded():
    assert synthetic_ontology(200, 5).axioms == synthetic_ontology(200, 5).axioms
    assert synthetic_ontology(200, 5).axioms != synthetic_ontology(200, 6).axioms


def test_buckets():
    assert bucket_labels((100, 1000)) == ["0-100", "100-1000", "1000+"]
    assert [bucket_of(n, (100, 1000)) for n in (0, 100, 101, 1000, 1001)] == \
        ["0-100", "0-100", "100-1000", "100-1000", "1000+"]
    with pytest.raises(ValueError):
        BenchConfig(size_buckets=(5, 5))


def test_box_stats():
    s = box_stats([1, 2, 3, 4, 100])
    assert s["median"] == 3 and s["q1"] == 2 and s["q3"] == 4 and s["outliers"] == 1
    assert box_stats([])["n"] == 0
    assert box_stats([7])["median"] == 7


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    d = tmp_path_factory.mktemp("bench")
    write_corpus(d / "corpus", [60, 140], seed=1)
    (d / "corpus" / "junk.ofn").write_text("Ontology(", encoding="utf-8")
    cfg = BenchConfig(repetitions=2, size_buckets=(100,), seed=4, tests_per_ontology=6)
    return cmd_bench(d / "corpus", cfg, d / "out"), cfg


def test_bench_records_and_files_agree(small_run):
    res, cfg = small_run
    assert len(res.skipped) == 1 and "junk" in res.skipped[0]["path"]
    back = read_csv(res.csv_path)
    assert back == res.records
    again = summarize(back, cfg, res.skipped)
    assert again == res.summary
    for b in res.summary["buckets"]:
        rows = [r for r in back if r.bucket == b["bucket"] and r.strategy == "abox"]
        assert b["strategies"]["abox"]["elapsed"]["median"] == statistics.median(r.elapsed for r in rows)


def test_bench_is_deterministic_apart_from_timings(small_run, tmp_path):
    res, cfg = small_run
    res2 = cmd_bench(res.csv_path.parent.parent / "corpus", cfg)
    strip = lambda rs: [dataclasses.replace(r, classification_time=0, test_time=0, elapsed=0) for r in rs]  # noqa: E731
    assert strip(res.records) == strip(res2.records)


def test_bench_records_cover_both_strategies(small_run):
    res, _ = small_run
    assert {r.strategy for r in res.records} == {"tbox", "abox"}
    assert all(r.verdict in ("true", "false") for r in res.records)
    o = load(res.csv_path.parent.parent / "corpus" / "synth_000060_0.ofn")
    assert {r.axioms for r in res.records if r.ontology == "synth_000060_0"} == {o.logical_axiom_count()}
