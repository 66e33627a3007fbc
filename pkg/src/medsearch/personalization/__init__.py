"""User profiles, query enrichment and result post-processing."""

from .enrich import CONTEXT_TERM_WEIGHT, enrich_query
from .profile import (
    FeedbackEvent,
    FeedbackKind,
    ProfileStore,
    UserProfile,
    apply_form,
    create_or_update_profile,
)
from .results import (
    DeliveredResults,
    ResultItem,
    apply_feedback,
    jaccard,
    merge_similar,
    post_process,
    rank_and_sort,
    resolve_conflicts,
)

__all__ = [
    "CONTEXT_TERM_WEIGHT",
    "DeliveredResults",
    "FeedbackEvent",
    "FeedbackKind",
    "ProfileStore",
    "ResultItem",
    "UserProfile",
    "apply_feedback",
    "apply_form",
    "create_or_update_profile",
    "enrich_query",
    "jaccard",
    "merge_similar",
    "post_process",
    "rank_and_sort",
    "resolve_conflicts",
]
