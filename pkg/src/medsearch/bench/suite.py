"""
Generated query suites, relevance judgments and suite evaluation.

Queries are drawn per category from the disease stems actually present in
the corpus: the stem itself, a one-edit misspelling, or the stem behind a
stopword. A record is relevant to a query when its disease names the
query's intended stem.
"""

import logging
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from ..errors import ConfigError, EmptyQuery
from ..query.dictionary import DEFAULT_LANGUAGE, Dictionary
from ..query.pipeline import edit_distance, tokenize
from ..search.system import SearchSystem
from ..search.topologies import TopologyKind
from ..sites.corpus import Corpus
from ..sites.vocabulary import DISEASE_STEMS
from ..taxonomy import CATEGORY_SET
from .metrics import MetricsReport, QueryOutcome, evaluate

logger = logging.getLogger(__name__)

SUITE_SIZE = 225

# Share of plain, misspelled and stopword-prefixed queries
PLAIN_SHARE = 0.6
MISSPELLED_SHARE = 0.2

_WORD = re.compile(r"\w+")

Judgments = dict[tuple[str, str], int]


@dataclass(frozen=True)
class QueryCase:
    query_id: str
    raw: str
    category: str


class QuerySuite:
    """Queries with unique ids, each labeled with one taxonomy category."""

    def __init__(self, queries: list[QueryCase]):
        seen: set[str] = set()
        for q in queries:
            if q.query_id in seen:
                raise ValueError(f"duplicate query id: {q.query_id}")
            if q.category not in CATEGORY_SET:
                raise ValueError(f"query {q.query_id} has unknown category {q.category!r}")
            seen.add(q.query_id)
        self.queries = tuple(queries)

    def __len__(self) -> int:
        return len(self.queries)

    def __iter__(self) -> Iterator[QueryCase]:
        return iter(self.queries)

    def categories(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for q in self.queries:
            counts[q.category] = counts.get(q.category, 0) + 1
        return counts


def category_quotas(size: int, categories: list[str]) -> dict[str, int]:
    """Split ``size`` over the categories as evenly as possible, earlier ones first."""
    if not categories:
        raise ValueError("no categories to spread queries over")
    base, extra = divmod(size, len(categories))
    return {c: base + (1 if i < extra else 0) for i, c in enumerate(categories)}


def _stems_in_corpus(corpus: Corpus) -> dict[str, list[str]]:
    stems: dict[str, list[str]] = {}
    for category, sites in corpus.by_category().items():
        words = {w for s in sites for r in s.records for w in _WORD.findall(r.disease.lower())}
        present = [stem for stem in DISEASE_STEMS[category] if stem in words]
        stems[category] = present or list(DISEASE_STEMS[category])
    return stems


def _misspell(rng: random.Random, word: str, known: set[str]) -> str:
    """A one-edit variant of the word that is not itself a known term."""
    for _ in range(10):
        i = rng.randrange(1, len(word) - 1) if len(word) > 2 else 0
        if rng.random() < 0.5:
            variant = word[:i] + word[i + 1] + word[i] + word[i + 2 :]
        else:
            letter = rng.choice("abcdefghijklmnopqrstuvwxyz")
            variant = word[:i] + letter + word[i + 1 :]
        if variant != word and variant not in known:
            return variant
    return word


def generate_suite(
    seed: int,
    corpus: Corpus,
    dictionary: Dictionary,
    size: int = SUITE_SIZE,
    language: str = DEFAULT_LANGUAGE,
) -> QuerySuite:
    """Deterministic query suite covering every category in the corpus."""
    rng = random.Random(seed)
    vocabulary = dictionary.vocabulary(language)
    known = set(vocabulary)
    stopwords = sorted(w for w, e in vocabulary.items() if e.is_stopword)
    stems = _stems_in_corpus(corpus)

    queries = []
    for category, quota in category_quotas(size, corpus.categories()).items():
        for _ in range(quota):
            stem = rng.choice(stems[category])
            roll = rng.random()
            if roll < PLAIN_SHARE or not stopwords:
                raw = stem
            elif roll < PLAIN_SHARE + MISSPELLED_SHARE:
                raw = _misspell(rng, stem, known)
            else:
                raw = f"{rng.choice(stopwords)} {stem}"
            queries.append(QueryCase(f"q{len(queries) + 1:03d}", raw, category))
    logger.info("Generated %d queries over %d categories", len(queries), len(corpus.categories()))
    return QuerySuite(queries)


def intended_stem(case: QueryCase) -> Optional[str]:
    """The category stem a query was generated from (nearest within two edits)."""
    best: Optional[tuple[int, str]] = None
    for token in tokenize(case.raw):
        for stem in DISEASE_STEMS[case.category]:
            d = edit_distance(token, stem, bound=2)
            if d <= 2 and (best is None or (d, stem) < best):
                best = (d, stem)
    return best[1] if best else None


def derive_judgments(suite: QuerySuite, corpus: Corpus) -> Judgments:
    """Mark every record whose disease names a query's intended stem as relevant."""
    records = [
        (r.record_id, set(_WORD.findall(r.disease.lower()))) for s in corpus for r in s.records
    ]
    judgments: Judgments = {}
    for case in suite:
        stem = intended_stem(case)
        if stem is None:
            continue
        for record_id, words in records:
            if stem in words:
                judgments[(case.query_id, record_id)] = 1
    return judgments


# ============================================================================
# Files
# ============================================================================


def save_suite(suite: QuerySuite, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for q in suite:
            f.write(f"{q.query_id}\t{q.category}\t{q.raw}\n")


def _rows(path: str | Path, columns: int) -> Iterator[tuple[int, list[str]]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    for line_no, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != columns:
            raise ConfigError(f"{path}:{line_no}: expected {columns} tab-separated columns")
        yield line_no, parts


def load_suite(path: str | Path) -> QuerySuite:
    """
    Raises:
        ConfigError: unreadable file, malformed line or invalid suite
    """
    queries = [QueryCase(qid, raw, category) for _, (qid, category, raw) in _rows(path, 3)]
    try:
        return QuerySuite(queries)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def save_judgments(judgments: Judgments, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for (qid, rid), rel in sorted(judgments.items()):
            f.write(f"{qid}\t{rid}\t{rel}\n")


def load_judgments(path: str | Path) -> Judgments:
    judgments: Judgments = {}
    for line_no, (qid, rid, rel) in _rows(path, 3):
        if rel not in ("0", "1"):
            raise ConfigError(f"{path}:{line_no}: relevance must be 0 or 1")
        judgments[(qid, rid)] = int(rel)
    return judgments


# ============================================================================
# Evaluation
# ============================================================================


@dataclass
class SuiteRun:
    report: MetricsReport
    outcomes: list[QueryOutcome]


def run_suite(
    suite: QuerySuite,
    judgments: Judgments,
    system: SearchSystem,
    token: str,
    topology: Optional[TopologyKind | str] = None,
) -> SuiteRun:
    """
    Search every judged query and score what came back.

    Queries without any judgment are skipped and reported as coverage gaps.
    A query left empty by stopword removal retrieves nothing.
    """
    judged: dict[str, set[str]] = {}
    for (qid, rid), rel in judgments.items():
        relevant = judged.setdefault(qid, set())
        if rel:
            relevant.add(rid)

    outcomes, gaps = [], []
    for case in suite:
        if case.query_id not in judged:
            gaps.append(case.query_id)
            continue
        try:
            result = system.search(token, case.raw, topology)
            retrieved = {rid for item in result.results for rid in item.record_ids}
        except EmptyQuery:
            retrieved = set()
        outcomes.append(
            QueryOutcome(
                case.query_id,
                case.category,
                frozenset(retrieved),
                frozenset(judged[case.query_id]),
            )
        )
    if gaps:
        logger.warning("%d queries have no judgments", len(gaps))
    return SuiteRun(evaluate(outcomes, gaps), outcomes)
