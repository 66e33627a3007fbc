"""
Result post-processing: conflicts, merging, ranking and feedback.
"""

import logging
import re
import threading
from dataclasses import dataclass, replace
from typing import Any, Iterable, Optional, Sequence

from ..errors import UnknownResult
from ..sites.corpus import SiteRecord
from .profile import FeedbackEvent, FeedbackKind, UserProfile, clamp_weight

logger = logging.getLogger(__name__)

SIMILARITY_THRESHOLD = 0.8

RATING_STEP = 0.1
CLICK_STEP = 0.02

MAX_DELIVERED_PER_USER = 500

_WORD = re.compile(r"\w+")


@dataclass(frozen=True)
class ResultItem:
    """A collected record with where it came from and why it matched."""

    record: SiteRecord
    source_location: str
    matched_terms: frozenset[str]
    score: float = 0.0
    categories: frozenset[str] = frozenset()
    assurance_level: int = 0
    sources: tuple[str, ...] = ()
    record_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.sources:
            object.__setattr__(self, "sources", (self.source_location,))
        if not self.record_ids:
            object.__setattr__(self, "record_ids", (self.record.record_id,))

    @property
    def record_id(self) -> str:
        return self.record.record_id

    @property
    def disease_key(self) -> str:
        return self.record.disease.strip().casefold()

    def to_dict(self) -> dict[str, Any]:
        return {
            "record_id": self.record_id,
            "disease": self.record.disease,
            "description": self.record.description,
            "drugs": list(self.record.drugs),
            "source_location": self.source_location,
            "sources": list(self.sources),
            "record_ids": list(self.record_ids),
            "matched_terms": sorted(self.matched_terms),
            "categories": sorted(self.categories),
            "assurance_level": self.assurance_level,
            "score": round(self.score, 6),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResultItem":
        return cls(
            record=SiteRecord(
                record_id=data["record_id"],
                disease=data["disease"],
                description=data.get("description", ""),
                drugs=tuple(data.get("drugs", [])),
            ),
            source_location=data["source_location"],
            matched_terms=frozenset(data.get("matched_terms", [])),
            score=float(data.get("score", 0.0)),
            categories=frozenset(data.get("categories", [])),
            assurance_level=int(data.get("assurance_level", 0)),
            sources=tuple(data.get("sources", [])),
            record_ids=tuple(data.get("record_ids", [])),
        )


def _conflicting(a: ResultItem, b: ResultItem) -> bool:
    da, db = set(a.record.drugs), set(b.record.drugs)
    return bool(da) and bool(db) and da.isdisjoint(db)


def resolve_conflicts(items: Sequence[ResultItem]) -> list[ResultItem]:
    """
    Drop items contradicted by a better-assured source.

    Two items conflict when they describe the same disease with nonempty,
    disjoint drug lists. The lower-assurance side is dropped; equal levels
    keep both.
    """
    kept = []
    for item in items:
        beaten = any(
            other is not item
            and other.disease_key == item.disease_key
            and other.assurance_level > item.assurance_level
            and _conflicting(item, other)
            for other in items
        )
        if beaten:
            logger.debug("Conflict: dropping %s from %s", item.record_id, item.source_location)
        else:
            kept.append(item)
    return kept


def description_tokens(text: str) -> frozenset[str]:
    return frozenset(_WORD.findall(text.lower()))


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _merge_group(group: list[ResultItem]) -> ResultItem:
    if len(group) == 1:
        return group[0]
    head = min(group, key=lambda i: (-i.assurance_level, i.record_id))
    drugs = sorted({d for item in group for d in item.record.drugs})
    sources: list[str] = []
    record_ids: list[str] = []
    for item in group:
        sources.extend(s for s in item.sources if s not in sources)
        record_ids.extend(r for r in item.record_ids if r not in record_ids)
    return replace(
        head,
        record=replace(head.record, drugs=tuple(drugs)),
        matched_terms=frozenset().union(*(i.matched_terms for i in group)),
        score=max(i.score for i in group),
        categories=frozenset().union(*(i.categories for i in group)),
        sources=tuple(sources),
        record_ids=tuple(record_ids),
    )


def merge_similar(
    items: Sequence[ResultItem], threshold: float = SIMILARITY_THRESHOLD
) -> list[ResultItem]:
    """
    Merge items with equal diseases and similar descriptions.

    Similarity is token Jaccard on the descriptions, threshold inclusive.
    Groups are the connected components of the similarity relation and come
    out in order of their first member.
    """
    n = len(items)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tokens = [description_tokens(i.record.description) for i in items]
    for i in range(n):
        for j in range(i + 1, n):
            if items[i].disease_key != items[j].disease_key:
                continue
            if jaccard(tokens[i], tokens[j]) >= threshold:
                parent[find(j)] = find(i)

    groups: dict[int, list[ResultItem]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(items[i])
    return [_merge_group(g) for g in groups.values()]


def score_item(item: ResultItem, profile: Optional[UserProfile]) -> float:
    boost = sum(profile.weight(c) for c in item.categories) if profile else 0.0
    return len(item.matched_terms) + boost


def _order_key(item: ResultItem) -> tuple:
    return (-item.score, -item.assurance_level, item.record_id, item.source_location)


def rank_and_sort(
    items: Iterable[ResultItem], profile: Optional[UserProfile] = None
) -> list[ResultItem]:
    """Score items against the profile and sort them into a total order."""
    scored = [replace(i, score=score_item(i, profile)) for i in items]
    return sorted(scored, key=_order_key)


def post_process(
    items: Sequence[ResultItem], profile: Optional[UserProfile] = None
) -> list[ResultItem]:
    """resolve_conflicts -> merge_similar -> rank_and_sort."""
    return rank_and_sort(merge_similar(resolve_conflicts(items)), profile)


def feedback_delta(event: FeedbackEvent) -> float:
    if event.kind is FeedbackKind.IMPLICIT:
        return CLICK_STEP
    return RATING_STEP * int(event.signal)


def apply_feedback(
    profile: UserProfile, event: FeedbackEvent, item: Optional[ResultItem]
) -> UserProfile:
    """
    Move the profile's category weights after feedback on a delivered item.

    Raises:
        UnknownResult: the event does not reference the given delivered item
    """
    if item is None or event.record_id not in item.record_ids:
        raise UnknownResult(f"no delivered result {event.record_id!r}")
    delta = feedback_delta(event)
    preferences = dict(profile.preferences)
    for category in sorted(item.categories):
        preferences[category] = clamp_weight(preferences.get(category, 0.0) + delta)
    return replace(
        profile,
        preferences=preferences,
        feedback_history=[*profile.feedback_history, event],
    )


class DeliveredResults:
    """
    Results delivered to each user, so feedback can be checked against them.

    Only the most recent ``limit`` record ids are kept per user.
    """

    def __init__(self, limit: int = MAX_DELIVERED_PER_USER) -> None:
        if limit < 1:
            raise ValueError(f"limit must be >= 1, got {limit}")
        self.limit = limit
        self._lock = threading.Lock()
        self._by_user: dict[str, dict[str, ResultItem]] = {}

    def remember(self, user_id: str, items: Iterable[ResultItem]) -> None:
        with self._lock:
            delivered = self._by_user.setdefault(user_id, {})
            for item in items:
                for record_id in item.record_ids:
                    # Re-delivery moves the id to the newest end
                    delivered.pop(record_id, None)
                    delivered[record_id] = item
            while len(delivered) > self.limit:
                del delivered[next(iter(delivered))]

    def count(self, user_id: str) -> int:
        with self._lock:
            return len(self._by_user.get(user_id, {}))

    def find(self, user_id: str, record_id: str) -> Optional[ResultItem]:
        with self._lock:
            return self._by_user.get(user_id, {}).get(record_id)
