"""
Multilingual term dictionary.

File format (UTF-8, tab separated, '#' starts a comment line):

    term  language  kind  synonyms  related  categories

synonyms are comma-joined terms, related are comma-joined ``term:label``
pairs and categories are comma-joined category slugs (or full names
without commas).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from ..errors import ConfigError
from ..taxonomy import resolve_category

logger = logging.getLogger(__name__)

DEFAULT_LANGUAGE = "en"


class EntryKind(Enum):
    TERM = "TERM"
    STOPWORD = "STOPWORD"


@dataclass(frozen=True)
class DictionaryEntry:
    """A term or stopword of one language."""

    term: str
    language: str
    kind: EntryKind = EntryKind.TERM
    synonyms: tuple[str, ...] = ()
    related: tuple[tuple[str, str], ...] = ()
    categories: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.term or self.term != self.term.lower():
            raise ValueError(f"dictionary term must be nonempty lowercase: {self.term!r}")
        if self.term in self.synonyms:
            raise ValueError(f"{self.term!r} lists itself as a synonym")
        if self.kind is EntryKind.STOPWORD and (self.synonyms or self.related or self.categories):
            raise ValueError(f"stopword {self.term!r} cannot carry synonyms or categories")

    @property
    def is_stopword(self) -> bool:
        return self.kind is EntryKind.STOPWORD


class Dictionary:
    """Entries indexed by (language, term)."""

    def __init__(
        self, entries: Iterable[DictionaryEntry], default_language: str = DEFAULT_LANGUAGE
    ):
        self._entries: dict[tuple[str, str], DictionaryEntry] = {}
        self._by_language: dict[str, dict[str, DictionaryEntry]] = {}
        for entry in entries:
            key = (entry.language, entry.term)
            if key in self._entries:
                raise ValueError(f"duplicate dictionary entry: {entry.language}/{entry.term}")
            self._entries[key] = entry
            self._by_language.setdefault(entry.language, {})[entry.term] = entry
        if not self._by_language:
            raise ValueError("dictionary has no languages")
        if default_language not in self._by_language:
            default_language = sorted(self._by_language)[0]
        self.default_language = default_language
        # Sorted, stopwords included; spellcheck ties go to the first term
        self._candidates = {lang: sorted(terms) for lang, terms in self._by_language.items()}

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def languages(self) -> list[str]:
        return sorted(self._by_language)

    def get(self, term: str, language: str) -> Optional[DictionaryEntry]:
        return self._entries.get((language, term))

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._entries

    def vocabulary(self, language: str) -> dict[str, DictionaryEntry]:
        return self._by_language.get(language, {})

    def candidates(self, language: str) -> list[str]:
        """Every term of a language, stopwords included, sorted."""
        return self._candidates.get(language, [])

    def entries(self) -> list[DictionaryEntry]:
        return list(self._entries.values())


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_line(line: str, line_no: int = 0) -> Optional[DictionaryEntry]:
    """Parse one dictionary line; blank and comment lines give None."""
    if not line.strip() or line.lstrip().startswith("#"):
        return None
    cols = line.rstrip("\n").split("\t")
    if len(cols) < 3:
        raise ValueError(f"line {line_no}: expected at least 3 columns, got {len(cols)}")
    cols += [""] * (6 - len(cols))
    term, language, kind, synonyms, related, categories = (c.strip() for c in cols[:6])

    pairs = []
    for item in _split(related):
        other, sep, label = item.partition(":")
        if not sep or not other or not label:
            raise ValueError(f"line {line_no}: bad relation {item!r}")
        pairs.append((other.strip().lower(), label.strip()))

    return DictionaryEntry(
        term=term,
        language=language,
        kind=EntryKind(kind.upper()),
        synonyms=tuple(s.lower() for s in _split(synonyms)),
        related=tuple(pairs),
        categories=frozenset(resolve_category(c) for c in _split(categories)),
    )


def parse_dictionary(text: str, default_language: str = DEFAULT_LANGUAGE) -> Dictionary:
    entries = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        entry = parse_line(line, line_no)
        if entry is not None:
            entries.append(entry)
    return Dictionary(entries, default_language)


def load_dictionary(
    path: Optional[str | Path] = None, default_language: str = DEFAULT_LANGUAGE
) -> Dictionary:
    """
    Load a dictionary file, or the packaged one when no path is given.

    Raises:
        ConfigError: missing or malformed file
    """
    try:
        if path is None:
            text = resources.files("medsearch.data").joinpath("dictionary.tsv").read_text("utf-8")
            source = "packaged dictionary"
        else:
            text = Path(path).read_text(encoding="utf-8")
            source = str(path)
        dictionary = parse_dictionary(text, default_language)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot load dictionary: {e}") from e
    logger.debug("Loaded %d dictionary entries from %s", len(dictionary), source)
    return dictionary
