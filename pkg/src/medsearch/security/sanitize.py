"""
Outbound payload sanitization.

Anything heading toward the sites is reduced to query-derived content, category
weights and a per-search record key, then scanned once more. A residual
identifier stops the payload from leaving (fail closed).
"""

import copy
import logging
import re
from typing import TYPE_CHECKING, Any, Iterable, Optional

from ..errors import SanitizationFailure
from ..taxonomy import CATEGORY_SET
from .gate import RecordKey, Session

if TYPE_CHECKING:
    from ..personalization.profile import UserProfile
    from ..query.pipeline import AnnotatedQuery

logger = logging.getLogger(__name__)

RECORD_KEY = "record_key"

# Field names of the outbound payload
PAYLOAD_KEYS = frozenset(
    {RECORD_KEY, "search_terms", "categories", "category_weights", "required_assurance"}
)

# Keys that carry user data and are dropped wherever they appear
IDENTIFYING_KEYS = frozenset(
    {
        "user_id",
        "user",
        "token",
        "session",
        "source_ip",
        "profile",
        "common_info",
        "medical_info",
        "health_conditions",
        "context_terms",
        "feedback_history",
    }
)

# Shorter needles only match whole words
MIN_SUBSTRING_LEN = 3

_WORD = re.compile(r"\w+")
_SPACES = re.compile(r"\s{2,}")


def build_site_payload(
    annotated: "AnnotatedQuery",
    search_terms: list[str],
    record_key: RecordKey,
    required_assurance: int,
) -> dict[str, Any]:
    """The only content a search sends toward the sites."""
    return {
        RECORD_KEY: record_key.key,
        "search_terms": list(search_terms),
        "categories": sorted(annotated.target_categories),
        "category_weights": {
            c: round(annotated.category_weights.get(c, 1.0), 6)
            for c in sorted(annotated.target_categories)
        },
        "required_assurance": int(required_assurance),
    }


def private_needles(session: Session, profile: Optional["UserProfile"] = None) -> list[str]:
    """Strings that identify the user and must not appear outbound, longest first."""
    needles = [session.user_id, session.token, session.source_ip]
    if profile is not None:
        needles.extend(profile.private_values())
    folded = {n.casefold() for n in needles if n and n.strip()}
    return sorted(folded, key=lambda n: (-len(n), n))


def _contains(text: str, needle: str) -> bool:
    folded = text.casefold()
    if len(needle) >= MIN_SUBSTRING_LEN:
        return needle in folded
    return needle in _WORD.findall(folded) or folded.strip() == needle


def _redact(text: str, needle: str) -> str:
    if len(needle) >= MIN_SUBSTRING_LEN:
        pattern = re.compile(re.escape(needle), re.IGNORECASE)
    else:
        pattern = re.compile(rf"(?<!\w){re.escape(needle)}(?!\w)", re.IGNORECASE)
    previous = None
    while previous != text:
        previous, text = text, pattern.sub("", text)
    return _SPACES.sub(" ", text).strip()


def _is_public(text: str) -> bool:
    return text in CATEGORY_SET or text in PAYLOAD_KEYS


def _clean(text: str, needles: list[str]) -> str:
    """Redact every needle until none is left (one removal can expose another)."""
    if _is_public(text):
        return text
    previous = None
    while previous != text:
        previous = text
        for n in needles:
            if _contains(text, n):
                text = _redact(text, n)
    return text


def scan_payload(payload: Any, needles: Iterable[str], path: str = "$") -> list[str]:
    """
    Paths of string keys or leaves that still contain a needle.

    The record key, payload field names and taxonomy category names are
    not scanned.
    """
    needles = [n.casefold() for n in needles if n]
    found: list[str] = []

    def visit(value: Any, where: str) -> None:
        if isinstance(value, dict):
            for k, v in value.items():
                if k == RECORD_KEY:
                    continue
                key = str(k)
                if not _is_public(key) and any(_contains(key, n) for n in needles):
                    found.append(f"{where}.{key}")
                visit(v, f"{where}.{key}")
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                visit(v, f"{where}[{i}]")
        elif isinstance(value, str):
            if not _is_public(value) and any(_contains(value, n) for n in needles):
                found.append(where)

    visit(payload, path)
    return found


def _strip(value: Any, needles: list[str]) -> Any:
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if k in IDENTIFYING_KEYS:
                continue
            if k == RECORD_KEY:
                out[k] = v
                continue
            key = _clean(str(k), needles)
            if not key:
                continue
            out[key] = _strip(v, needles)
        return out
    if isinstance(value, (list, tuple)):
        items = [_strip(v, needles) for v in value]
        return [v for v in items if v != ""]
    if isinstance(value, str):
        return _clean(value, needles)
    return value


def pseudonymize_outbound(
    payload: dict[str, Any],
    session: Session,
    profile: Optional["UserProfile"] = None,
    record_key: Optional[RecordKey] = None,
) -> dict[str, Any]:
    """
    Remove every user reference from a site-bound payload.

    Identifying sections are dropped, strings mentioning the user id, the
    session token or profile values are redacted, and the record key stands
    in for the user.

    Raises:
        SanitizationFailure: the self-scan still finds an identifier
    """
    needles = private_needles(session, profile)
    try:
        sanitized = _strip(copy.deepcopy(payload), needles)
    except Exception as e:
        raise SanitizationFailure(f"sanitization failed: {type(e).__name__}") from e
    if record_key is not None:
        sanitized[RECORD_KEY] = record_key.key

    residuals = scan_payload(sanitized, needles)
    if residuals:
        logger.error("Outbound payload blocked: %d residual identifiers", len(residuals))
        raise SanitizationFailure(f"residual identifiers at {', '.join(residuals)}")
    return sanitized
