"""
Synthetic medical site corpus: generation, persistence and locations.
"""

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from ..errors import ConfigError
from ..platform.messages import Location
from ..taxonomy import CATEGORIES, CATEGORY_SET, SLUGS
from .vocabulary import DISEASE_STEMS, DRUGS, QUALIFIERS, SYMPTOM_WORDS

logger = logging.getLogger(__name__)

INDEX_FILE = "index.json"

# Chance that a site lists a canonical disease with a disjoint set of drugs
CONFLICT_RATE = 0.1

DEFAULT_LATENCY_MS = (10, 60)


@dataclass(frozen=True)
class SiteRecord:
    """One disease description published by a site."""

    record_id: str
    disease: str
    description: str
    drugs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.disease.strip():
            raise ValueError(f"record {self.record_id} has an empty disease")

    def matches(self, term: str) -> bool:
        """Case-insensitive substring match on the disease field."""
        return term.lower() in self.disease.lower()

    def to_dict(self) -> dict[str, Any]:
        return {
            "record_id": self.record_id,
            "disease": self.disease,
            "description": self.description,
            "drugs": list(self.drugs),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SiteRecord":
        return cls(
            record_id=str(data["record_id"]),
            disease=str(data["disease"]),
            description=str(data.get("description", "")),
            drugs=tuple(str(d) for d in data.get("drugs", [])),
        )


@dataclass(frozen=True)
class SiteManifest:
    """A medical web site: its category, assurance level, latency and records."""

    site_id: str
    category: str
    assurance_level: int
    collect_latency_ms: int
    records: tuple[SiteRecord, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.category not in CATEGORY_SET:
            raise ValueError(f"site {self.site_id}: unknown category {self.category!r}")
        if not 0 <= self.assurance_level <= 3:
            raise ValueError(f"site {self.site_id}: assurance level must be 0..3")
        if self.collect_latency_ms < 0:
            raise ValueError(f"site {self.site_id}: collect latency must be >= 0")
        ids = [r.record_id for r in self.records]
        if len(ids) != len(set(ids)):
            raise ValueError(f"site {self.site_id}: duplicate record ids")

    def scan(self, term: str) -> list[SiteRecord]:
        """Linear scan of the records, in site order."""
        return [r for r in self.records if r.matches(term)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "site_id": self.site_id,
            "category": self.category,
            "assurance_level": self.assurance_level,
            "collect_latency_ms": self.collect_latency_ms,
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SiteManifest":
        return cls(
            site_id=str(data["site_id"]),
            category=str(data["category"]),
            assurance_level=int(data["assurance_level"]),
            collect_latency_ms=int(data["collect_latency_ms"]),
            records=tuple(SiteRecord.from_dict(r) for r in data.get("records", [])),
        )


class Corpus:
    """An immutable, ordered collection of sites."""

    def __init__(self, sites: Iterable[SiteManifest]):
        self._sites: tuple[SiteManifest, ...] = tuple(sites)
        self._by_id: dict[str, SiteManifest] = {}
        for site in self._sites:
            if site.site_id in self._by_id:
                raise ValueError(f"duplicate site id: {site.site_id}")
            self._by_id[site.site_id] = site

    @property
    def sites(self) -> tuple[SiteManifest, ...]:
        return self._sites

    def __len__(self) -> int:
        return len(self._sites)

    def __iter__(self):
        return iter(self._sites)

    def site(self, site_id: str) -> Optional[SiteManifest]:
        return self._by_id.get(site_id)

    def record_count(self) -> int:
        return sum(len(s.records) for s in self._sites)

    def categories(self) -> list[str]:
        """Categories present, in taxonomy order."""
        present = {s.category for s in self._sites}
        return [c for c in CATEGORIES if c in present]

    def by_category(self) -> dict[str, list[SiteManifest]]:
        grouped: dict[str, list[SiteManifest]] = {c: [] for c in self.categories()}
        for site in self._sites:
            grouped[site.category].append(site)
        return grouped

    def locations(self) -> list[Location]:
        """One platform location per site, keyed by site id."""
        return [
            Location(location_id=s.site_id, site=s, categories=frozenset({s.category}))
            for s in self._sites
        ]

    def canonical_bytes(self) -> bytes:
        """Stable serialization used to compare corpora."""
        payload = [s.to_dict() for s in self._sites]
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


# ============================================================================
# Generation
# ============================================================================


def _disease_pool(rng: random.Random, category: str) -> list[SiteRecord]:
    """Canonical (disease, description, drugs) entries shared by a category's sites."""
    pool = []
    symptoms = SYMPTOM_WORDS[category]
    drugs = DRUGS[category]
    for stem in DISEASE_STEMS[category]:
        for qualifier in QUALIFIERS:
            disease = f"{qualifier} {stem}"
            a, b = rng.sample(symptoms, 2)
            pool.append(
                SiteRecord(
                    record_id="",
                    disease=disease,
                    description=f"{disease.capitalize()} presenting with {a} and {b}.",
                    drugs=tuple(sorted(rng.sample(drugs, 2))),
                )
            )
    return pool


def _conflicting_drugs(
    rng: random.Random, category: str, canonical: tuple[str, ...]
) -> tuple[str, ...]:
    others = [d for d in DRUGS[category] if d not in canonical]
    return tuple(sorted(rng.sample(others, 2)))


def generate_corpus(
    seed: int,
    sites_per_category: int,
    records_per_site: int,
    latency_ms: tuple[int, int] = DEFAULT_LATENCY_MS,
) -> Corpus:
    """
    Build a deterministic synthetic corpus.

    Sites of one category draw their records from a shared pool, so the same
    disease recurs across sites (merge candidates) and now and then with a
    disjoint drug list (conflict candidates).

    Args:
        seed: Random seed; equal seeds give byte-identical corpora
        sites_per_category: Sites generated for each of the 13 categories
        records_per_site: Records on each site
        latency_ms: Inclusive range for each site's collect latency

    Returns:
        Corpus with 13 * sites_per_category sites
    """
    if sites_per_category <= 0 or records_per_site <= 0:
        raise ValueError("sites_per_category and records_per_site must be positive")
    lo, hi = latency_ms
    if lo < 0 or hi < lo:
        raise ValueError(f"invalid latency range: {latency_ms}")

    rng = random.Random(seed)
    sites = []
    for category in CATEGORIES:
        pool = _disease_pool(rng, category)
        for n in range(1, sites_per_category + 1):
            site_id = f"{SLUGS[category]}-{n:02d}"
            if records_per_site <= len(pool):
                picks = rng.sample(pool, records_per_site)
            else:
                picks = list(pool) + [
                    rng.choice(pool) for _ in range(records_per_site - len(pool))
                ]
            records = []
            for k, base in enumerate(picks, start=1):
                drugs = base.drugs
                if rng.random() < CONFLICT_RATE:
                    drugs = _conflicting_drugs(rng, category, base.drugs)
                records.append(
                    SiteRecord(
                        record_id=f"{site_id}-r{k:03d}",
                        disease=base.disease,
                        description=base.description,
                        drugs=drugs,
                    )
                )
            sites.append(
                SiteManifest(
                    site_id=site_id,
                    category=category,
                    assurance_level=rng.randint(0, 3),
                    collect_latency_ms=rng.randint(lo, hi),
                    records=tuple(records),
                )
            )
    logger.debug("Generated %d sites (seed=%d)", len(sites), seed)
    return Corpus(sites)


# ============================================================================
# Persistence
# ============================================================================


def save_corpus(corpus: Corpus, directory: str | Path) -> Path:
    """
    Write one JSON file per site plus an index listing them in order.

    Returns:
        Path of the index file
    """
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    names = []
    for site in corpus:
        name = f"{site.site_id}.json"
        with open(root / name, "w", encoding="utf-8") as f:
            json.dump(site.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")
        names.append(name)
    index = root / INDEX_FILE
    with open(index, "w", encoding="utf-8") as f:
        json.dump({"sites": names}, f, indent=2)
        f.write("\n")
    logger.info("Saved %d sites to %s", len(names), root)
    return index


def load_corpus(path: str | Path) -> Corpus:
    """
    Load a corpus from its directory or its index file.

    Raises:
        ConfigError: missing or malformed corpus files
    """
    path = Path(path)
    index = path / INDEX_FILE if path.is_dir() else path
    if not index.is_file():
        raise ConfigError(f"corpus index not found: {index}")
    try:
        with open(index, "r", encoding="utf-8") as f:
            names = json.load(f)["sites"]
        sites = []
        for name in names:
            with open(index.parent / name, "r", encoding="utf-8") as f:
                sites.append(SiteManifest.from_dict(json.load(f)))
        corpus = Corpus(sites)
    except (OSError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid corpus at {index.parent}: {e}") from e
    logger.debug("Loaded %d sites from %s", len(corpus), index.parent)
    return corpus


def drug_lookup(disease: str, corpus: Corpus) -> list[str]:
    """Deduplicated, sorted drugs of every record whose disease matches."""
    if not disease.strip():
        return []
    found: set[str] = set()
    for site in corpus:
        for record in site.scan(disease.strip()):
            found.update(record.drugs)
    return sorted(found)
