"""
Retrieval-quality metrics: precision, recall and F-measure.
"""

import json
from dataclasses import dataclass, field
from typing import AbstractSet, Any, Iterable

from ..taxonomy import CATEGORIES


def precision(retrieved: AbstractSet[str], relevant: AbstractSet[str]) -> float:
    if not retrieved:
        return 0.0
    return len(retrieved & relevant) / len(retrieved)


def recall(retrieved: AbstractSet[str], relevant: AbstractSet[str]) -> float:
    if not relevant:
        return 0.0
    return len(retrieved & relevant) / len(relevant)


def f_measure(p: float, r: float) -> float:
    """Harmonic mean of precision and recall, 0 when both are 0."""
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


@dataclass(frozen=True)
class QueryOutcome:
    """Retrieved and relevant record ids of one evaluated query."""

    query_id: str
    category: str
    retrieved: frozenset[str]
    relevant: frozenset[str]

    @property
    def hits(self) -> int:
        return len(self.retrieved & self.relevant)


@dataclass
class Counts:
    """Micro-averaging accumulator."""

    hits: int = 0
    retrieved: int = 0
    relevant: int = 0
    queries: int = 0

    def add(self, outcome: QueryOutcome) -> None:
        self.hits += outcome.hits
        self.retrieved += len(outcome.retrieved)
        self.relevant += len(outcome.relevant)
        self.queries += 1

    @property
    def precision(self) -> float:
        return self.hits / self.retrieved if self.retrieved else 0.0

    @property
    def recall(self) -> float:
        return self.hits / self.relevant if self.relevant else 0.0

    @property
    def f_measure(self) -> float:
        return f_measure(self.precision, self.recall)

    def to_dict(self) -> dict[str, Any]:
        return {
            "queries": self.queries,
            "hits": self.hits,
            "retrieved": self.retrieved,
            "relevant": self.relevant,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f_measure": round(self.f_measure, 6),
        }


@dataclass
class MetricsReport:
    """
    Micro-averaged precision, recall and F-measure over a query suite,
    with the same figures per category.
    """

    overall: Counts = field(default_factory=Counts)
    per_category: dict[str, Counts] = field(default_factory=dict)
    coverage_gaps: list[str] = field(default_factory=list)

    @property
    def precision(self) -> float:
        return self.overall.precision

    @property
    def recall(self) -> float:
        return self.overall.recall

    @property
    def f_measure(self) -> float:
        return self.overall.f_measure

    def to_dict(self) -> dict[str, Any]:
        ordered = [c for c in CATEGORIES if c in self.per_category]
        ordered += sorted(set(self.per_category) - set(ordered))
        return {
            "overall": self.overall.to_dict(),
            "per_category": {c: self.per_category[c].to_dict() for c in ordered},
            "coverage_gaps": list(self.coverage_gaps),
        }

    def to_json(self) -> str:
        """Stable serialization; equal reports give equal bytes."""
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def evaluate(outcomes: Iterable[QueryOutcome], coverage_gaps: Iterable[str] = ()) -> MetricsReport:
    """Fold per-query outcomes into a micro-averaged report."""
    report = MetricsReport(coverage_gaps=sorted(coverage_gaps))
    for outcome in outcomes:
        report.overall.add(outcome)
        report.per_category.setdefault(outcome.category, Counts()).add(outcome)
    return report
