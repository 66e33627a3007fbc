"""
Measured benchmark of one topology, reported next to its modeled time.
"""

import logging
import secrets
import tempfile
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from ..personalization.profile import ProfileStore
from ..platform import make_scheduler
from ..query.dictionary import Dictionary, load_dictionary
from ..query.pipeline import annotate, search_terms
from ..search.system import SearchSystem
from ..search.topologies import TopologyKind, filter_locations
from ..security.gate import Credential, SessionManager
from ..security.users import UserDirectory
from ..sites.corpus import Corpus
from .model import (
    MOBILE_MESSAGES,
    TARGET_RATIO,
    BenchmarkConfig,
    calibrate_kappa,
    model_mobile_time,
    model_static_time,
    static_message_count,
)

logger = logging.getLogger(__name__)

BENCH_USER = "bench-user"
BENCH_IP = "127.0.0.1"


@dataclass
class BenchmarkReport:
    """Modeled and measured collection times of one topology."""

    topology: TopologyKind
    modeled_ms: float
    measured_ms: list[float] = field(default_factory=list)
    messages_sent: int = 0
    pipeline_ms: list[float] = field(default_factory=list)
    locations: int = 0
    migrations: int = 0

    @property
    def median_ms(self) -> float:
        return float(np.median(self.measured_ms)) if self.measured_ms else 0.0

    @property
    def median_pipeline_ms(self) -> float:
        return float(np.median(self.pipeline_ms)) if self.pipeline_ms else 0.0

    def deviation(self) -> float:
        """Relative distance of the measured median from the model."""
        if self.modeled_ms == 0:
            return 0.0
        return abs(self.median_ms - self.modeled_ms) / self.modeled_ms

    def to_dict(self) -> dict[str, Any]:
        return {
            "topology": self.topology.value,
            "modeled_ms": round(self.modeled_ms, 3),
            "median_ms": round(self.median_ms, 3),
            "measured_ms": [round(v, 3) for v in self.measured_ms],
            "messages_sent": self.messages_sent,
            "pipeline_ms": round(self.median_pipeline_ms, 3),
            "locations": self.locations,
            "migrations": self.migrations,
        }


def apply_latencies(corpus: Corpus, overrides: dict[str, float]) -> Corpus:
    """Copy of the corpus with the given sites' latencies replaced."""
    if not overrides:
        return corpus
    unknown = set(overrides) - {s.site_id for s in corpus}
    if unknown:
        raise ValueError(f"latency given for unknown sites: {sorted(unknown)}")
    return Corpus(
        replace(s, collect_latency_ms=int(round(overrides[s.site_id])))
        if s.site_id in overrides
        else s
        for s in corpus
    )


@dataclass
class CollectionPlan:
    """What a query will make the topologies collect."""

    per_site_ms: dict[str, float]
    per_category_ms: dict[str, float]
    web_agents: int

    @property
    def locations(self) -> int:
        return len(self.per_site_ms)


def plan_collection(
    corpus: Corpus, query: str, dictionary: Dictionary, required_assurance: int = 0
) -> CollectionPlan:
    """
    Collection time per filtered site (latency times number of search
    terms) and per web agent (its sites collected one after another).
    """
    annotated = annotate(query, dictionary)
    n_terms = len(search_terms(annotated))
    locations = filter_locations(
        corpus.locations(), annotated.target_categories, required_assurance
    )
    per_site: dict[str, float] = {}
    per_category: dict[str, float] = {}
    for loc in locations:
        ms = float(loc.site.collect_latency_ms * n_terms)
        per_site[loc.location_id] = ms
        category = min(loc.categories & annotated.target_categories)
        per_category[category] = per_category.get(category, 0.0) + ms
    return CollectionPlan(per_site, per_category, web_agents=len(corpus.categories()))


def modeled_time(cfg: BenchmarkConfig, topology: TopologyKind, plan: CollectionPlan) -> float:
    if not plan.per_site_ms:
        return cfg.c_msg * MOBILE_MESSAGES
    if topology is TopologyKind.STATIC:
        return model_static_time(
            cfg,
            list(plan.per_category_ms.values()),
            plan.web_agents,
            static_message_count(len(plan.per_category_ms)),
        )
    return model_mobile_time(
        cfg, list(plan.per_site_ms.values()), MOBILE_MESSAGES, plan.locations
    )


def calibrated_config(
    cfg: BenchmarkConfig,
    corpus: Corpus,
    query: str,
    dictionary: Optional[Dictionary] = None,
    target_ratio: float = TARGET_RATIO,
) -> BenchmarkConfig:
    """The config with kappa solved so modeled mobile / static hits the target ratio."""
    dictionary = dictionary or load_dictionary()
    plan = plan_collection(apply_latencies(corpus, cfg.collect_latency_ms), query, dictionary)
    if not plan.per_site_ms:
        raise ValueError(f"query {query!r} reaches no site")
    # Per-web-agent totals sum to the per-site total the mobile model needs
    kappa = calibrate_kappa(
        cfg,
        list(plan.per_category_ms.values()),
        plan.web_agents,
        static_message_count(len(plan.per_category_ms)),
        MOBILE_MESSAGES,
        plan.locations,
        target_ratio,
    )
    logger.info("Calibrated kappa %.5f for ratio %.4f", kappa, target_ratio)
    return replace(cfg, kappa=kappa)


def run_benchmark(
    topology: TopologyKind | str,
    cfg: BenchmarkConfig,
    corpus: Corpus,
    query: str,
    dictionary: Optional[Dictionary] = None,
    scheduler: str = "deterministic",
    required_assurance: int = 0,
) -> BenchmarkReport:
    """
    Run one topology ``cfg.repetitions`` times, back to back.

    Each run is measured from the query-mod agent's collection request to
    its receipt of the completion message, on the platform clock.
    """
    kind = TopologyKind.parse(topology)
    dictionary = dictionary or load_dictionary()
    corpus = apply_latencies(corpus, cfg.collect_latency_ms)
    plan = plan_collection(corpus, query, dictionary, required_assurance)
    report = BenchmarkReport(
        topology=kind, modeled_ms=modeled_time(cfg, kind, plan), locations=plan.locations
    )

    with tempfile.TemporaryDirectory(prefix="medsearch-bench-") as tmp:
        users = UserDirectory()
        users.register(BENCH_USER, [BENCH_IP])
        sessions = SessionManager(users)
        system = SearchSystem(
            corpus,
            dictionary,
            sessions,
            ProfileStore(tmp),
            secrets.token_bytes(32),
            topologies=(kind,),
            default_topology=kind,
            scheduler=make_scheduler(scheduler),
            required_assurance=required_assurance,
            c_msg=cfg.c_msg,
            c_move=cfg.c_move,
            kappa=cfg.kappa,
        )
        with system:
            token = sessions.login(Credential(BENCH_USER, BENCH_IP)).token
            for i in range(cfg.repetitions):
                result = system.search(token, query, kind)
                report.measured_ms.append(result.outcome.total_ms)
                report.pipeline_ms.append(result.pipeline_ms)
                report.messages_sent = result.outcome.messages_sent
                if i == 0:
                    report.migrations = result.outcome.migrations
                logger.debug("%s run %d: %.1f ms", kind.value, i + 1, result.outcome.total_ms)

    logger.info(
        "%s: modeled %.1f ms, median %.1f ms over %d runs",
        kind.value,
        report.modeled_ms,
        report.median_ms,
        len(report.measured_ms),
    )
    return report
