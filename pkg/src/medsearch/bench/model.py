"""
Closed-form response-time models for the two collection topologies.

Static collection is bounded by its slowest site, stretched by contention
from every live agent, plus the cost of its messages. Mobile collection is
the sum of every site's time plus two messages and the migrations.
"""

from dataclasses import dataclass, field
from typing import Sequence

MOBILE_MESSAGES = 2

# Mobile/static response-time ratio reported for the original deployment
TARGET_RATIO = 75123 / 80524


def static_message_count(web_agents: int) -> int:
    """REQUEST to the coordinator, a REQUEST/CONFIRM pair per web agent, final CONFIRM."""
    return 2 + 2 * web_agents


@dataclass
class BenchmarkConfig:
    """
    Costs of one benchmark setup.

    ``collect_latency_ms`` overrides the injected latency of the named
    sites; sites not listed keep their corpus latency.
    """

    collect_latency_ms: dict[str, float] = field(default_factory=dict)
    c_msg: float = 1.0
    c_move: float = 0.0
    kappa: float = 0.0
    repetitions: int = 10

    def __post_init__(self) -> None:
        if min(self.c_msg, self.c_move, self.kappa) < 0:
            raise ValueError("c_msg, c_move and kappa must be >= 0")
        if any(v < 0 for v in self.collect_latency_ms.values()):
            raise ValueError("collect latencies must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def _check_sites(sites: Sequence[float]) -> None:
    if not sites:
        raise ValueError("at least one site is required")


def model_static_time(
    cfg: BenchmarkConfig, sites: Sequence[float], n_agents: int, m_static: int
) -> float:
    """max_i(collect_i * (1 + kappa * n_agents)) + c_msg * m_static"""
    _check_sites(sites)
    return max(sites) * (1.0 + cfg.kappa * n_agents) + cfg.c_msg * m_static


def model_mobile_time(
    cfg: BenchmarkConfig, sites: Sequence[float], m_mobile: int, n_moves: int
) -> float:
    """sum_i(collect_i) + c_msg * m_mobile + c_move * n_moves"""
    _check_sites(sites)
    return float(sum(sites)) + cfg.c_msg * m_mobile + cfg.c_move * n_moves


def calibrate_kappa(
    cfg: BenchmarkConfig,
    sites: Sequence[float],
    n_agents: int,
    m_static: int,
    m_mobile: int = MOBILE_MESSAGES,
    n_moves: int = 0,
    target_ratio: float = TARGET_RATIO,
) -> float:
    """
    Contention coefficient for which modeled mobile / static equals the target.

    Raises:
        ValueError: no agents to contend, or the ratio needs a negative kappa
    """
    _check_sites(sites)
    if n_agents <= 0:
        raise ValueError("contention needs at least one agent")
    if target_ratio <= 0:
        raise ValueError("target ratio must be positive")
    mobile = model_mobile_time(cfg, sites, m_mobile, n_moves)
    slowest = max(sites)
    if slowest <= 0:
        raise ValueError("sites need a positive collection time")
    kappa = ((mobile / target_ratio - cfg.c_msg * m_static) / slowest - 1.0) / n_agents
    if kappa < 0:
        raise ValueError(
            f"ratio {target_ratio:.3f} is out of reach: static is already slower without contention"
        )
    return kappa
