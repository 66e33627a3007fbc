"""
The symptom-category taxonomy shared by sites, dictionary and evaluation.
"""

CATEGORIES: tuple[str, ...] = (
    "abdominal symptom",
    "cardiovascular system symptom",
    "digestive system symptom",
    "head and neck symptom",
    "hemic and immune system",
    "musculoskeleton system symptom",
    "nervous system symptom",
    "neurological and physiological symptom",
    "nutrition, metabolism and development symptom",
    "reproductive system symptom",
    "respiratory and chest symptom",
    "skin and intergumentary tissue symptom",
    "urinary system symptom",
)

CATEGORY_SET = frozenset(CATEGORIES)

# Short slugs used in identifiers and file names
SLUGS: dict[str, str] = {
    "abdominal symptom": "abdominal",
    "cardiovascular system symptom": "cardio",
    "digestive system symptom": "digestive",
    "head and neck symptom": "headneck",
    "hemic and immune system": "immune",
    "musculoskeleton system symptom": "musculo",
    "nervous system symptom": "nervous",
    "neurological and physiological symptom": "neuro",
    "nutrition, metabolism and development symptom": "nutrition",
    "reproductive system symptom": "reproductive",
    "respiratory and chest symptom": "respiratory",
    "skin and intergumentary tissue symptom": "skin",
    "urinary system symptom": "urinary",
}

BY_SLUG: dict[str, str] = {slug: category for category, slug in SLUGS.items()}


def resolve_category(name: str) -> str:
    """
    Accept either a full category name or its slug.

    Raises:
        ValueError: if the name is neither
    """
    if name in CATEGORY_SET:
        return name
    if name in BY_SLUG:
        return BY_SLUG[name]
    raise ValueError(f"unknown category: {name!r}")
