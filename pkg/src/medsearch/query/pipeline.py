"""
Query modification pipeline.

    detect_language -> tokenize -> spellcheck -> filter_stopwords
    -> expand_synonyms -> classify_terms -> AnnotatedQuery
"""

import json
import logging
import re
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Optional, Sequence

from ..errors import EmptyQuery
from .dictionary import Dictionary

if TYPE_CHECKING:
    from ..personalization.profile import UserProfile

logger = logging.getLogger(__name__)

MAX_EDIT_DISTANCE = 2

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class AnnotatedTerm:
    surface: str
    corrected: str
    synonyms: tuple[str, ...] = ()
    categories: frozenset[str] = frozenset()

    def to_dict(self) -> dict[str, Any]:
        return {
            "surface": self.surface,
            "corrected": self.corrected,
            "synonyms": list(self.synonyms),
            "categories": sorted(self.categories),
        }


@dataclass(frozen=True)
class TermRelation:
    source: str
    target: str
    label: str

    def to_list(self) -> list[str]:
        return [self.source, self.target, self.label]


@dataclass(frozen=True)
class AnnotatedQuery:
    """
    Pipeline output.

    ``category_weights`` starts at 1.0 per target category and is raised by
    profile enrichment; ``context_terms`` are profile-derived and never leave
    the platform.
    """

    raw: str
    language: str
    terms: tuple[AnnotatedTerm, ...]
    relations: tuple[TermRelation, ...] = ()
    removed_stopwords: tuple[str, ...] = ()
    target_categories: frozenset[str] = frozenset()
    category_weights: dict[str, float] = field(default_factory=dict)
    context_terms: tuple[str, ...] = ()
    from_profile: bool = False

    def corrections(self) -> list[tuple[str, str]]:
        """(surface, corrected) pairs where spellcheck changed the term."""
        return [(t.surface, t.corrected) for t in self.terms if t.surface != t.corrected]

    def with_enrichment(
        self, category_weights: dict[str, float], context_terms: Sequence[str]
    ) -> "AnnotatedQuery":
        return replace(
            self, category_weights=dict(category_weights), context_terms=tuple(context_terms)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "raw": self.raw,
            "language": self.language,
            "terms": [t.to_dict() for t in self.terms],
            "relations": [r.to_list() for r in self.relations],
            "removed_stopwords": list(self.removed_stopwords),
            "target_categories": sorted(self.target_categories),
            "category_weights": dict(sorted(self.category_weights.items())),
            "context_terms": list(self.context_terms),
            "from_profile": self.from_profile,
        }

    def canonical(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


# ============================================================================
# Stages
# ============================================================================


def tokenize(raw: str) -> list[str]:
    """Lowercase word tokens in original order."""
    return _TOKEN.findall(raw.lower())


def detect_language(raw: str, dictionary: Dictionary) -> str:
    """
    Pick the language whose vocabulary covers the most tokens.

    Ties and zero overlap fall back to the dictionary's default language.
    """
    tokens = tokenize(raw)
    if not tokens:
        return dictionary.default_language
    counts = {
        lang: sum(1 for t in tokens if t in dictionary.vocabulary(lang))
        for lang in dictionary.languages
    }
    best = max(counts.values())
    if best == 0:
        return dictionary.default_language
    leaders = [lang for lang, n in counts.items() if n == best]
    if dictionary.default_language in leaders:
        return dictionary.default_language
    return sorted(leaders)[0]


def edit_distance(a: str, b: str, bound: Optional[int] = None) -> int:
    """
    Levenshtein distance with unit costs.

    With a bound, any distance above it is reported as bound + 1.
    """
    if bound is not None and abs(len(a) - len(b)) > bound:
        return bound + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if bound is not None and min(cur) > bound:
            return bound + 1
        prev = cur
    distance = prev[-1]
    if bound is not None and distance > bound:
        return bound + 1
    return distance


def spellcheck(
    term: str,
    dictionary: Dictionary,
    language: str,
    max_edit_distance: int = MAX_EDIT_DISTANCE,
) -> str:
    """Closest dictionary term within the bound; ties go to the lexicographically first."""
    if dictionary.get(term, language) is not None:
        return term
    best, best_distance = term, max_edit_distance + 1
    for candidate in dictionary.candidates(language):
        d = edit_distance(term, candidate, bound=max_edit_distance)
        if d < best_distance:
            best, best_distance = candidate, d
            if d == 1:
                # Nothing closer than 1 exists for an unknown term
                break
    return best if best_distance <= max_edit_distance else term


def expand_synonyms(term: str, dictionary: Dictionary, language: str) -> list[str]:
    """One-hop synonyms of a term; unknown terms have none."""
    entry = dictionary.get(term, language)
    return list(entry.synonyms) if entry is not None else []


def filter_stopwords(
    terms: Sequence[str], dictionary: Dictionary, language: str
) -> tuple[list[str], list[str]]:
    """Split terms into (kept, removed) preserving order."""
    kept, removed = [], []
    for term in terms:
        entry = dictionary.get(term, language)
        if entry is not None and entry.is_stopword:
            removed.append(term)
        else:
            kept.append(term)
    return kept, removed


def classify_terms(
    terms: Sequence[str], dictionary: Dictionary, language: str
) -> tuple[dict[str, frozenset[str]], list[TermRelation]]:
    """
    Categories per term and the relations linking terms of this query.

    A relation appears once per unordered pair and label, in term order.
    """
    categories: dict[str, frozenset[str]] = {}
    relations: list[TermRelation] = []
    present = set(terms)
    seen: set[tuple[frozenset[str], str]] = set()
    for term in terms:
        entry = dictionary.get(term, language)
        categories[term] = entry.categories if entry is not None else frozenset()
        if entry is None:
            continue
        for other, label in entry.related:
            if other not in present or other == term:
                continue
            key = (frozenset((term, other)), label)
            if key in seen:
                continue
            seen.add(key)
            relations.append(TermRelation(term, other, label))
    return categories, relations


# ============================================================================
# Composition
# ============================================================================


def _build(
    raw: str,
    tokens: Sequence[str],
    dictionary: Dictionary,
    language: str,
    max_edit_distance: int,
    from_profile: bool = False,
) -> AnnotatedQuery:
    corrected = [spellcheck(t, dictionary, language, max_edit_distance) for t in tokens]

    kept_pairs, removed = [], []
    for surface, fixed in zip(tokens, corrected):
        entry = dictionary.get(fixed, language)
        if entry is not None and entry.is_stopword:
            removed.append(surface)
        else:
            kept_pairs.append((surface, fixed))

    kept = [fixed for _, fixed in kept_pairs]
    categories, relations = classify_terms(kept, dictionary, language)
    terms = tuple(
        AnnotatedTerm(
            surface=surface,
            corrected=fixed,
            synonyms=tuple(expand_synonyms(fixed, dictionary, language)),
            categories=categories[fixed],
        )
        for surface, fixed in kept_pairs
    )
    target: frozenset[str] = frozenset().union(*(t.categories for t in terms))
    return AnnotatedQuery(
        raw=raw,
        language=language,
        terms=terms,
        relations=tuple(relations),
        removed_stopwords=tuple(removed),
        target_categories=target,
        category_weights={c: 1.0 for c in target},
        from_profile=from_profile,
    )


def _matches_dictionary(annotated: AnnotatedQuery, dictionary: Dictionary) -> bool:
    return any(dictionary.get(t.corrected, annotated.language) is not None for t in annotated.terms)


def annotate(
    raw: str,
    dictionary: Dictionary,
    profile: Optional["UserProfile"] = None,
    max_edit_distance: int = MAX_EDIT_DISTANCE,
) -> AnnotatedQuery:
    """
    Run the whole pipeline over a raw query.

    When nothing in the query matches the dictionary and a profile is given,
    the annotation is rebuilt from the profile's health conditions alone.

    Raises:
        EmptyQuery: no terms remain after stopword removal
    """
    language = detect_language(raw, dictionary)
    tokens = tokenize(raw)
    annotated = _build(raw, tokens, dictionary, language, max_edit_distance)

    if not _matches_dictionary(annotated, dictionary) and profile is not None:
        extra = [tok for condition in profile.health_conditions for tok in tokenize(condition)]
        if extra:
            logger.debug("No dictionary match, retrying with %d profile terms", len(extra))
            annotated = _build(
                raw, extra, dictionary, language, max_edit_distance, from_profile=True
            )

    if not annotated.terms:
        raise EmptyQuery()
    return annotated


def search_terms(annotated: AnnotatedQuery) -> list[str]:
    """Corrected terms followed by their synonyms, deduplicated in order."""
    out: list[str] = []
    for term in annotated.terms:
        for candidate in (term.corrected, *term.synonyms):
            if candidate not in out:
                out.append(candidate)
    return out
