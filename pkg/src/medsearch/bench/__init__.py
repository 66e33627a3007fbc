"""Timing models, measured benchmarks and retrieval-quality evaluation."""

from .metrics import MetricsReport, QueryOutcome, evaluate, f_measure, precision, recall
from .model import (
    TARGET_RATIO,
    BenchmarkConfig,
    calibrate_kappa,
    model_mobile_time,
    model_static_time,
    static_message_count,
)
from .report import parse_machine, render_benchmarks, render_metrics
from .runner import BenchmarkReport, calibrated_config, plan_collection, run_benchmark
from .suite import (
    QueryCase,
    QuerySuite,
    SuiteRun,
    derive_judgments,
    generate_suite,
    load_judgments,
    load_suite,
    run_suite,
    save_judgments,
    save_suite,
)

__all__ = [
    "TARGET_RATIO",
    "BenchmarkConfig",
    "BenchmarkReport",
    "MetricsReport",
    "QueryCase",
    "QueryOutcome",
    "QuerySuite",
    "SuiteRun",
    "calibrate_kappa",
    "calibrated_config",
    "derive_judgments",
    "evaluate",
    "f_measure",
    "generate_suite",
    "load_judgments",
    "load_suite",
    "model_mobile_time",
    "model_static_time",
    "parse_machine",
    "plan_collection",
    "precision",
    "recall",
    "render_benchmarks",
    "render_metrics",
    "run_benchmark",
    "run_suite",
    "save_judgments",
    "save_suite",
    "static_message_count",
]
