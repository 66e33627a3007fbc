"""
The search system: a platform with every agent of a search spawned on it.
"""

import logging
import threading
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

from ..errors import AuthRequired, MedSearchError, PlatformError
from ..personalization.profile import (
    FeedbackEvent,
    ProfileStore,
    UserProfile,
    create_or_update_profile,
)
from ..personalization.results import DeliveredResults, ResultItem, apply_feedback
from ..platform.messages import AgentId, Message, Performative
from ..platform.runtime import Platform
from ..platform.scheduler import Scheduler
from ..query.dictionary import Dictionary
from ..query.pipeline import AnnotatedQuery, search_terms
from ..security.gate import Session, SessionManager, derive_record_key, new_search_nonce
from ..security.sanitize import build_site_payload, pseudonymize_outbound
from ..sites.corpus import Corpus
from ..sites.service import SiteService
from ..sites.transport import HttpTransport, InProcessTransport, Transport
from .agents import (
    COLLECT,
    EXTERNAL_SENDER,
    INTERFACE_AGENT,
    MOBILE_COORDINATOR,
    PERSONALIZE_AGENT,
    PROFILE_AGENT,
    QUERY_MOD_AGENT,
    SEARCH,
    STATIC_COORDINATOR,
    InterfaceBehavior,
    MobileCoordinatorBehavior,
    PersonalizeBehavior,
    ProfileBehavior,
    QueryModBehavior,
    StaticCoordinatorBehavior,
    WebAgentBehavior,
    session_content,
    web_agent_name,
)
from .topologies import CollectionOutcome, TopologyKind

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 120.0


@dataclass
class SearchResult:
    """What one end-to-end search delivers to the user."""

    results: list[ResultItem]
    outcome: CollectionOutcome
    annotated: dict[str, Any] = field(default_factory=dict)
    pipeline_ms: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "results": [r.to_dict() for r in self.results],
            "outcome": self.outcome.to_dict(),
            "annotated": self.annotated,
            "pipeline_ms": round(self.pipeline_ms, 3),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SearchResult":
        return cls(
            results=[ResultItem.from_dict(r) for r in data.get("results", [])],
            outcome=CollectionOutcome.from_dict(data["outcome"]),
            annotated=dict(data.get("annotated", {})),
            pipeline_ms=float(data.get("pipeline_ms", 0.0)),
        )


class SearchSystem:
    """
    Boots the agents of a search and runs searches through them.

    Web agents and the static coordinator are spawned when the static
    topology is enabled, the mobile coordinator when the mobile one is.
    Site collection goes through ``transport``; by default an in-process
    transport over the corpus, slowed by the platform's contention factor
    and timed on the platform clock.
    """

    def __init__(
        self,
        corpus: Corpus,
        dictionary: Dictionary,
        sessions: SessionManager,
        profiles: ProfileStore,
        secret: bytes,
        topologies: Iterable[TopologyKind | str] = (TopologyKind.STATIC, TopologyKind.MOBILE),
        default_topology: TopologyKind | str = TopologyKind.MOBILE,
        scheduler: Optional[Scheduler] = None,
        site_url: Optional[str] = None,
        site_service: Optional[SiteService] = None,
        required_assurance: int = 0,
        c_msg: float = 0.0,
        c_move: float = 0.0,
        kappa: float = 0.0,
        timeout_s: float = DEFAULT_TIMEOUT_S,
    ):
        """
        Initialize the search system.

        Args:
            corpus: Sites to search; one platform location per site
            dictionary: Query-pipeline dictionary
            sessions: Session authority
            profiles: Profile persistence
            secret: Platform secret keying the record keys
            topologies: Topologies whose agents are booted
            default_topology: Topology used when a search names none
            scheduler: Platform scheduler (threaded when omitted)
            site_url: Base URL of a site server; in-process when omitted
            site_service: In-process site service to use instead of a fresh one
            required_assurance: Default site assurance a search demands
            c_msg: Per-message cost in ms
            c_move: Per-migration cost in ms
            kappa: Contention coefficient
            timeout_s: How long a search may take
        """
        self.corpus = corpus
        self.dictionary = dictionary
        self.sessions = sessions
        self.profiles = profiles
        self.secret = secret
        self.topologies = tuple(dict.fromkeys(TopologyKind.parse(t) for t in topologies))
        self.default_topology = TopologyKind.parse(default_topology)
        self.required_assurance = required_assurance
        self.timeout_s = timeout_s
        self.delivered = DeliveredResults()

        self.platform = Platform(
            corpus.locations(), scheduler=scheduler, c_msg=c_msg, c_move=c_move, kappa=kappa
        )
        self.site_service: Optional[SiteService] = site_service
        self.transport: Transport = self._make_transport(site_url)
        self._booted = False
        self._drive_lock = threading.Lock()

    def _make_transport(self, site_url: Optional[str]) -> Transport:
        clock = self.platform.clock
        slowdown = self.platform.contention_factor
        if site_url:
            return HttpTransport(site_url, clock=clock, slowdown=slowdown)
        if self.site_service is None:
            self.site_service = SiteService(self.corpus)
        return InProcessTransport(self.site_service, clock=clock, slowdown=slowdown)

    # ========================================================================
    # Lifecycle
    # ========================================================================

    def boot(self) -> "SearchSystem":
        """Spawn the agents. Idempotent."""
        if self._booted:
            return self
        p = self.platform
        p.spawn_agent(INTERFACE_AGENT, InterfaceBehavior())
        p.spawn_agent(PROFILE_AGENT, ProfileBehavior(self.profiles))
        p.spawn_agent(QUERY_MOD_AGENT, QueryModBehavior(self.dictionary, self.secret))
        p.spawn_agent(PERSONALIZE_AGENT, PersonalizeBehavior(self.delivered))

        if TopologyKind.STATIC in self.topologies:
            p.spawn_agent(STATIC_COORDINATOR, StaticCoordinatorBehavior())
            for category in self.corpus.categories():
                p.spawn_agent(web_agent_name(category), WebAgentBehavior(category, self.transport))
        if TopologyKind.MOBILE in self.topologies:
            p.spawn_agent(MOBILE_COORDINATOR, MobileCoordinatorBehavior(self.transport))

        self._booted = True
        logger.info(
            "Search system booted: %d agents, %d locations, topologies %s",
            len(p.live_agents()),
            len(p.get_available_locations()),
            ",".join(t.value for t in self.topologies),
        )
        return self

    def shutdown(self) -> None:
        self.platform.shutdown()
        self.transport.close()

    def __enter__(self) -> "SearchSystem":
        return self.boot()

    def __exit__(self, *exc: Any) -> None:
        self.shutdown()

    # ========================================================================
    # Conversations with the interface agent
    # ========================================================================

    def _converse(self, prefix: str, content: dict[str, Any]) -> dict[str, Any]:
        if not self._booted:
            raise PlatformError("search system is not booted")
        interface = self.platform.lookup(INTERFACE_AGENT)
        if interface is None:
            raise PlatformError("interface agent is not running")
        # The deterministic scheduler runs handlers on the waiting thread
        guard = self._drive_lock if self.platform.deterministic else nullcontext()
        with guard:
            conversation = self.platform.open_conversation(prefix)
            self.platform.send(
                Message(
                    performative=Performative.REQUEST,
                    sender=AgentId(EXTERNAL_SENDER),
                    receiver=interface,
                    conversation_id=conversation,
                    content=content,
                )
            )
            try:
                return self.platform.wait_conversation(conversation, self.timeout_s)
            except MedSearchError:
                raise
            except TimeoutError as e:
                raise PlatformError(f"{conversation} timed out") from e

    def _topology(self, topology: Optional[TopologyKind | str]) -> TopologyKind:
        kind = self.default_topology if topology is None else TopologyKind.parse(topology)
        if kind not in self.topologies:
            raise PlatformError(f"topology {kind.value} is not booted")
        return kind

    # ========================================================================
    # Operations
    # ========================================================================

    def search(
        self, token: Optional[str], raw: str, topology: Optional[TopologyKind | str] = None
    ) -> SearchResult:
        """
        Run one query end to end and return the personalized results.

        Raises:
            AuthRequired: no live session for the token (before any traffic)
            EmptyQuery: nothing left to search for
            SanitizationFailure: an identifier survived pseudonymization
        """
        session = self.sessions.require(token)
        kind = self._topology(topology)
        reply = self._converse(
            SEARCH,
            {
                "kind": SEARCH,
                "raw": raw,
                "session": session_content(session),
                "topology": kind.value,
                "required_assurance": self.required_assurance,
            },
        )
        return SearchResult.from_dict(reply)

    end_to_end_search = search

    def site_payload(self, annotated: AnnotatedQuery, session: Session) -> dict[str, Any]:
        """Sanitized payload for an already annotated query."""
        profile = self.profiles.load(session.user_id)
        record_key = derive_record_key(self.secret, session.user_id, new_search_nonce())
        required = (
            profile.required_assurance(self.required_assurance)
            if profile
            else self.required_assurance
        )
        payload = build_site_payload(annotated, search_terms(annotated), record_key, required)
        return pseudonymize_outbound(payload, session, profile, record_key)

    def collect(
        self, annotated: AnnotatedQuery, session: Session, topology: TopologyKind | str
    ) -> CollectionOutcome:
        """
        Collect records for an annotated query without post-processing.

        Raises:
            AuthRequired: the session has expired
            SanitizationFailure: an identifier survived pseudonymization
        """
        if not session.is_live():
            raise AuthRequired("session expired")
        kind = self._topology(topology)
        payload = self.site_payload(annotated, session)
        reply = self._converse(
            COLLECT, {"kind": COLLECT, "payload": payload, "topology": kind.value}
        )
        return CollectionOutcome.from_dict(reply["outcome"])

    def run_static(self, annotated: AnnotatedQuery, session: Session) -> CollectionOutcome:
        return self.collect(annotated, session, TopologyKind.STATIC)

    def run_mobile(self, annotated: AnnotatedQuery, session: Session) -> CollectionOutcome:
        return self.collect(annotated, session, TopologyKind.MOBILE)

    def get_profile(self, token: Optional[str]) -> UserProfile:
        session = self.sessions.require(token)
        return self.profiles.get(session.user_id)

    def update_profile(self, token: Optional[str], form: Mapping[str, Any]) -> UserProfile:
        """
        Raises:
            AuthRequired: no live session
            ValueError: the form names an unknown category
        """
        session = self.sessions.require(token)
        return create_or_update_profile(self.profiles, session, form)

    def feedback(
        self,
        token: Optional[str],
        record_id: str,
        rating: Optional[int] = None,
    ) -> UserProfile:
        """
        Apply a rating (or a click when no rating is given) to a delivered result.

        Raises:
            AuthRequired: no live session
            UnknownResult: the record was never delivered to this user
            ValueError: rating outside -1..1
        """
        session = self.sessions.require(token)
        event = (
            FeedbackEvent.click(record_id)
            if rating is None
            else FeedbackEvent.rating(record_id, rating)
        )
        item = self.delivered.find(session.user_id, record_id)
        return self.profiles.update(session.user_id, lambda p: apply_feedback(p, event, item))
