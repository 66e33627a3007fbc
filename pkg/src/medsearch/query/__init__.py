"""Query modification: dictionary and annotation pipeline."""

from .dictionary import (
    DEFAULT_LANGUAGE,
    Dictionary,
    DictionaryEntry,
    EntryKind,
    load_dictionary,
    parse_dictionary,
)
from .pipeline import (
    MAX_EDIT_DISTANCE,
    AnnotatedQuery,
    AnnotatedTerm,
    TermRelation,
    annotate,
    classify_terms,
    detect_language,
    edit_distance,
    expand_synonyms,
    filter_stopwords,
    search_terms,
    spellcheck,
    tokenize,
)

__all__ = [
    "DEFAULT_LANGUAGE",
    "MAX_EDIT_DISTANCE",
    "AnnotatedQuery",
    "AnnotatedTerm",
    "Dictionary",
    "DictionaryEntry",
    "EntryKind",
    "TermRelation",
    "annotate",
    "classify_terms",
    "detect_language",
    "edit_distance",
    "expand_synonyms",
    "filter_stopwords",
    "load_dictionary",
    "parse_dictionary",
    "search_terms",
    "spellcheck",
    "tokenize",
]
