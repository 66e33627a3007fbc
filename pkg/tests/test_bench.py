"""Timing models, measured benchmarks and retrieval metrics."""

import random

import pytest

from medsearch.bench import (
    TARGET_RATIO,
    BenchmarkConfig,
    QueryCase,
    QuerySuite,
    calibrate_kappa,
    calibrated_config,
    derive_judgments,
    evaluate,
    f_measure,
    generate_suite,
    load_judgments,
    load_suite,
    model_mobile_time,
    model_static_time,
    parse_machine,
    plan_collection,
    precision,
    recall,
    render_benchmarks,
    render_metrics,
    run_benchmark,
    run_suite,
    save_judgments,
    save_suite,
    static_message_count,
)
from medsearch.bench.metrics import QueryOutcome
from medsearch.errors import ConfigError
from medsearch.search import TopologyKind
from medsearch.sites import generate_corpus
from medsearch.taxonomy import CATEGORIES

from conftest import IMMUNE, RESPIRATORY, SKIN

# ============================================================================
# Timing models
# ============================================================================


def test_static_model():
    cfg = BenchmarkConfig(c_msg=1)
    assert model_static_time(cfg, [5, 7, 9], n_agents=4, m_static=6) == 15
    assert model_static_time(BenchmarkConfig(c_msg=0), [42], 1, 0) == 42
    assert model_static_time(BenchmarkConfig(c_msg=1, kappa=0.5), [5, 7, 9], 4, 6) == 33


def test_mobile_model():
    assert model_mobile_time(BenchmarkConfig(c_msg=1), [5, 7, 9], 2, 3) == 23
    assert model_mobile_time(BenchmarkConfig(c_msg=1, c_move=1), [5, 7, 9], 2, 3) == 26
    assert model_mobile_time(BenchmarkConfig(c_msg=0), [42], 0, 0) == 42


def test_models_need_sites():
    with pytest.raises(ValueError):
        model_static_time(BenchmarkConfig(), [], 1, 4)
    with pytest.raises(ValueError):
        model_mobile_time(BenchmarkConfig(), [], 2, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        BenchmarkConfig(kappa=-0.1)
    with pytest.raises(ValueError):
        BenchmarkConfig(repetitions=0)
    with pytest.raises(ValueError):
        BenchmarkConfig(collect_latency_ms={"a": -1})


def test_message_counts():
    assert static_message_count(2) == 6
    assert static_message_count(13) == 28


def test_crossover():
    rng = random.Random(5)
    for _ in range(200):
        sites = [rng.uniform(1, 500) for _ in range(rng.randint(2, 13))]
        cfg = BenchmarkConfig(c_msg=0, c_move=0, kappa=0)
        agents = rng.randint(1, 13)
        static = model_static_time(cfg, sites, agents, static_message_count(agents))
        assert static <= model_mobile_time(cfg, sites, 2, len(sites))

        kappa = calibrate_kappa(cfg, sites, agents, static_message_count(agents))
        tuned = BenchmarkConfig(c_msg=0, c_move=0, kappa=kappa)
        mobile = model_mobile_time(tuned, sites, 2, 0)
        static = model_static_time(tuned, sites, agents, static_message_count(agents))
        assert mobile < static
        assert mobile / static == pytest.approx(TARGET_RATIO)


def test_calibration_out_of_reach():
    with pytest.raises(ValueError):
        calibrate_kappa(BenchmarkConfig(c_msg=10), [100], 1, static_message_count(1))
    with pytest.raises(ValueError):
        calibrate_kappa(BenchmarkConfig(), [100], 0, 4)


# ============================================================================
# Measured benchmarks
# ============================================================================


def test_plan_collection(corpus, dictionary):
    plan = plan_collection(corpus, "fevr", dictionary)
    assert plan.per_site_ms == {"immune-01": 180, "respiratory-01": 100, "respiratory-02": 140}
    assert plan.per_category_ms == {IMMUNE: 180, RESPIRATORY: 240}
    assert plan.web_agents == 3


def test_benchmarks_agree_with_the_models(corpus, dictionary):
    cfg = BenchmarkConfig(c_msg=1, repetitions=3)

    static = run_benchmark("static", cfg, corpus, "fevr", dictionary)
    mobile = run_benchmark("mobile", cfg, corpus, "fevr", dictionary)

    assert static.modeled_ms == pytest.approx(240 + 6)
    assert static.messages_sent == 6
    assert len(static.measured_ms) == 3
    assert static.deviation() <= 0.2

    assert mobile.modeled_ms == pytest.approx(420 + 2)
    assert mobile.median_ms == pytest.approx(422)
    assert mobile.messages_sent == 2
    assert mobile.migrations == 3


@pytest.mark.slow
def test_random_configs_stay_close_to_the_models(dictionary):
    rng = random.Random(21)
    corpus = generate_corpus(4, sites_per_category=1, records_per_site=5)
    for _ in range(50):
        cfg = BenchmarkConfig(
            collect_latency_ms={s.site_id: rng.randint(20, 200) for s in corpus},
            c_msg=rng.uniform(0, 2),
            c_move=rng.uniform(0, 5),
            kappa=rng.uniform(0, 0.05),
            repetitions=2,
        )
        for topology in TopologyKind:
            report = run_benchmark(topology, cfg, corpus, "fever cough", dictionary)
            assert report.deviation() <= 0.2, (topology, cfg)


def test_calibrated_mobile_beats_static(dictionary):
    corpus = generate_corpus(7, sites_per_category=1, records_per_site=20)
    cfg = calibrated_config(BenchmarkConfig(c_msg=0.5, repetitions=10), corpus, "fever", dictionary)

    static = run_benchmark("static", cfg, corpus, "fever", dictionary)
    mobile = run_benchmark("mobile", cfg, corpus, "fever", dictionary)

    assert cfg.kappa > 0
    assert mobile.median_ms < static.median_ms
    assert 0.88 <= mobile.median_ms / static.median_ms <= 0.99


# ============================================================================
# Metrics
# ============================================================================


def test_metric_values():
    retrieved = {f"r{i}" for i in range(25)}
    relevant = {f"r{i}" for i in range(24)} | {f"x{i}" for i in range(76)}
    assert precision(retrieved, relevant) == pytest.approx(0.96)
    assert recall({f"r{i}" for i in range(91)}, {f"r{i}" for i in range(100)}) == 0.91
    assert f_measure(0.96, 0.91) == pytest.approx(0.9343, abs=5e-4)
    assert round(f_measure(0.96, 0.91) * 100) == 93


def test_metric_edges():
    assert precision(set(), {"a"}) == 0.0
    assert recall({"a"}, set()) == 0.0
    assert f_measure(0.0, 0.0) == 0.0
    assert recall({"a", "b", "c"}, {"a", "b"}) == 1.0
    assert precision({"a"}, {"a", "b"}) == 1.0


def test_evaluate_matches_a_brute_force_fold():
    rng = random.Random(3)
    pool = [f"r{i}" for i in range(40)]
    outcomes = [
        QueryOutcome(
            f"q{i}",
            rng.choice(CATEGORIES),
            frozenset(rng.sample(pool, rng.randint(0, 8))),
            frozenset(rng.sample(pool, rng.randint(0, 8))),
        )
        for i in range(225)
    ]

    report = evaluate(outcomes)

    hits = sum(len(o.retrieved & o.relevant) for o in outcomes)
    p = hits / sum(len(o.retrieved) for o in outcomes)
    r = hits / sum(len(o.relevant) for o in outcomes)
    assert report.precision == pytest.approx(p)
    assert report.recall == pytest.approx(r)
    assert report.f_measure == pytest.approx(2 * p * r / (p + r))
    assert sum(c.queries for c in report.per_category.values()) == 225
    for counts in report.per_category.values():
        assert 0.0 <= counts.f_measure <= 1.0


# ============================================================================
# Suites
# ============================================================================


def test_generated_suite_covers_every_category(dictionary):
    corpus = generate_corpus(3, sites_per_category=1, records_per_site=20)
    suite = generate_suite(11, corpus, dictionary)

    assert len(suite) == 225
    counts = suite.categories()
    assert set(counts) == set(CATEGORIES)
    assert set(counts.values()) == {17, 18}
    assert len({q.query_id for q in suite}) == 225
    assert [q.raw for q in generate_suite(11, corpus, dictionary)] == [q.raw for q in suite]


def test_suite_rejects_duplicates_and_unknown_categories():
    with pytest.raises(ValueError):
        QuerySuite([QueryCase("q1", "gout", SKIN), QueryCase("q1", "acne", SKIN)])
    with pytest.raises(ValueError):
        QuerySuite([QueryCase("q1", "gout", "astrology")])


def test_suite_files(tmp_path, corpus):
    suite = QuerySuite([QueryCase("q1", "eczema", SKIN), QueryCase("q2", "do asthma", RESPIRATORY)])
    save_suite(suite, tmp_path / "suite.tsv")
    assert load_suite(tmp_path / "suite.tsv").queries == suite.queries

    judgments = derive_judgments(suite, corpus)
    assert judgments == {("q1", "skin-01-r001"): 1, ("q2", "respiratory-01-r003"): 1}
    save_judgments(judgments, tmp_path / "judgments.tsv")
    assert load_judgments(tmp_path / "judgments.tsv") == judgments

    (tmp_path / "bad.tsv").write_text("q1\tskin-01-r001\tyes\n")
    with pytest.raises(ConfigError):
        load_judgments(tmp_path / "bad.tsv")
    with pytest.raises(ConfigError):
        load_suite(tmp_path / "missing.tsv")


def test_perfect_oracle_scores_one(system, token):
    suite = QuerySuite(
        [
            QueryCase("q1", "eczema", SKIN),
            QueryCase("q2", "anemia", IMMUNE),
            QueryCase("q3", "asthma", RESPIRATORY),
            QueryCase("q4", "bronchitis", RESPIRATORY),
        ]
    )
    judgments = {
        ("q1", "skin-01-r001"): 1,
        ("q2", "immune-01-r002"): 1,
        ("q3", "respiratory-01-r003"): 1,
        ("q3", "respiratory-01-r001"): 0,
    }

    run = run_suite(suite, judgments, system, token)

    assert run.report.precision == run.report.recall == run.report.f_measure == 1.0
    assert run.report.coverage_gaps == ["q4"]
    assert run.report.overall.queries == 3


def test_nothing_relevant_retrieved_scores_zero(system, token):
    suite = QuerySuite([QueryCase("q1", "eczema", SKIN), QueryCase("q2", "between do on", SKIN)])
    judgments = {("q1", "immune-01-r002"): 1, ("q2", "skin-01-r001"): 1}

    run = run_suite(suite, judgments, system, token)

    assert run.report.f_measure == 0.0
    assert run.outcomes[1].retrieved == frozenset()


def test_suite_runs_are_reproducible(system, token, corpus, dictionary):
    suite = generate_suite(5, corpus, dictionary, size=12)
    judgments = derive_judgments(suite, corpus)

    first = run_suite(suite, judgments, system, token).report.to_json()
    second = run_suite(suite, judgments, system, token, "static").report.to_json()
    assert first == second


# ============================================================================
# Reports
# ============================================================================


def test_benchmark_reports_render(corpus, dictionary):
    cfg = BenchmarkConfig(c_msg=1, repetitions=2)
    reports = [run_benchmark(t, cfg, corpus, "fevr", dictionary) for t in ("static", "mobile")]

    records = parse_machine(render_benchmarks(reports, "machine"))
    assert [r["topology"] for r in records] == ["static", "mobile"]
    assert records[1]["median_ms"] == pytest.approx(422)
    assert all(r["kind"] == "benchmark" for r in records)

    table = render_benchmarks(reports)
    assert table.splitlines()[0].split() == [
        "topology",
        "modeled_ms",
        "median_ms",
        "messages_sent",
        "pipeline_ms",
        "locations",
    ]
    assert "mobile/static = " in table


def test_metric_reports_render():
    outcomes = [
        QueryOutcome("q1", SKIN, frozenset({"a"}), frozenset({"a"})),
        QueryOutcome("q2", IMMUNE, frozenset({"b"}), frozenset({"c"})),
    ]
    report = evaluate(outcomes, ["q3"])

    records = parse_machine(render_metrics(report, "machine"))
    assert records[0] == {
        "kind": "metrics",
        "scope": "overall",
        "queries": 2,
        "hits": 1,
        "retrieved": 2,
        "relevant": 2,
        "precision": 0.5,
        "recall": 0.5,
        "f_measure": 0.5,
    }
    assert [r["scope"] for r in records[1:3]] == [IMMUNE, SKIN]
    assert records[-1] == {"kind": "coverage_gaps", "queries": ["q3"]}
    assert "no judgments for 1 queries" in render_metrics(report)
