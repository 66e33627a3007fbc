"""
Profile-aware query enrichment.
"""

from typing import Optional

from ..query.pipeline import AnnotatedQuery, tokenize
from .profile import UserProfile

# Weight given to health-condition context terms relative to query terms
CONTEXT_TERM_WEIGHT = 0.25


def enrich_query(annotated: AnnotatedQuery, profile: Optional[UserProfile]) -> AnnotatedQuery:
    """
    Reweight target categories by profile preference and attach the user's
    health conditions as context terms. Query terms are left untouched.
    """
    if profile is None or not (profile.preferences or profile.health_conditions):
        return annotated

    weights = {
        category: annotated.category_weights.get(category, 1.0) + profile.weight(category)
        for category in annotated.target_categories
    }

    query_terms = {t.corrected for t in annotated.terms}
    context: list[str] = []
    for condition in profile.health_conditions:
        for token in tokenize(condition):
            if token not in query_terms and token not in context:
                context.append(token)

    return annotated.with_enrichment(weights, context)
