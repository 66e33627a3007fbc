"""
Agent behaviors of the search system.

A search travels interface -> query-mod -> (profile) -> coordinator ->
sites -> query-mod -> personalize -> interface. Conversation ids of the
sub-exchanges are derived from the search conversation, so the trace of one
search can be picked out by prefix.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import (
    MedSearchError,
    MigrationAborted,
    NoSuchLocation,
    PlatformError,
    error_from_report,
)
from ..personalization.enrich import enrich_query
from ..personalization.profile import ProfileStore, UserProfile
from ..personalization.results import DeliveredResults, post_process
from ..platform.behavior import AgentBehavior, AgentContext
from ..platform.messages import AgentId, Location, Message, Performative
from ..query.dictionary import Dictionary
from ..query.pipeline import annotate, search_terms
from ..security.gate import Session, derive_record_key, new_search_nonce
from ..security.sanitize import build_site_payload, pseudonymize_outbound
from ..sites.transport import Transport
from ..taxonomy import SLUGS
from .collect import CollectedRecord, LocationVisit, collect_location
from .topologies import ItineraryPlan, TopologyKind, coordination_service, filter_locations

logger = logging.getLogger(__name__)

# Agent names
INTERFACE_AGENT = "interface"
PROFILE_AGENT = "profile"
QUERY_MOD_AGENT = "query-mod"
PERSONALIZE_AGENT = "personalize"
STATIC_COORDINATOR = "static-coordinator"
MOBILE_COORDINATOR = "coordinator"

# Sender name used for requests injected from outside the platform
EXTERNAL_SENDER = "user"

# Service types
PROFILE_SERVICE = "profile"
PERSONALIZATION_SERVICE = "personalization"

# Request kinds understood by the query-mod agent
SEARCH = "search"
COLLECT = "collect"

PROFILE_SUFFIX = "/profile"
COLLECT_SUFFIX = "/collect"


def web_agent_name(category: str) -> str:
    return f"web-{SLUGS[category]}"


def collection_conversation(conversation_id: str) -> str:
    return conversation_id + COLLECT_SUFFIX


def failure_content(error: BaseException) -> dict[str, str]:
    return {"error": type(error).__name__, "reason": str(error)}


def session_content(session: Session) -> dict[str, str]:
    return {"user_id": session.user_id, "token": session.token, "source_ip": session.source_ip}


def _session_from(content: dict[str, str]) -> Session:
    return Session(
        token=content["token"],
        user_id=content["user_id"],
        source_ip=content["source_ip"],
        expires_at=math.inf,
    )


def _visit_content(visits: list[LocationVisit]) -> dict[str, Any]:
    return {
        "records": [r.to_dict() for v in visits for r in v.records],
        "per_location_ms": {v.location_id: v.elapsed_ms for v in visits},
        "failures": [v.failure for v in visits if v.failure],
    }


# ============================================================================
# Interface agent
# ============================================================================


class InterfaceBehavior(AgentBehavior):
    """
    Entry and exit point of every search.

    Requests injected from outside are forwarded to the query-mod agent;
    the final INFORM (or FAILURE) resolves the caller's conversation.
    """

    def handle(self, ctx: AgentContext, message: Message) -> None:
        conversation = message.conversation_id
        if message.performative is Performative.REQUEST:
            query_mod = ctx.lookup(QUERY_MOD_AGENT)
            if query_mod is None:
                ctx.platform.fail_conversation(
                    conversation, PlatformError("query-mod agent is not running")
                )
                return
            ctx.send(Performative.REQUEST, query_mod, conversation, message.content)
        elif message.performative is Performative.INFORM:
            ctx.platform.resolve_conversation(conversation, message.content)
        elif message.performative is Performative.FAILURE:
            error = error_from_report(
                message.content.get("error", ""), message.content.get("reason", "")
            )
            ctx.platform.fail_conversation(conversation, error)


# ============================================================================
# Profile agent
# ============================================================================


class ProfileBehavior(AgentBehavior):
    """Serves profile reads over messages."""

    def __init__(self, store: ProfileStore):
        self.store = store

    def setup(self, ctx: AgentContext) -> None:
        ctx.register_service(PROFILE_SERVICE, PROFILE_AGENT)

    def handle(self, ctx: AgentContext, message: Message) -> None:
        if message.performative is not Performative.REQUEST:
            return
        profile = self.store.get(message.content["user_id"])
        ctx.reply(message, Performative.INFORM, {"profile": profile.to_dict()})


# ============================================================================
# Query-modification agent
# ============================================================================


@dataclass
class _PendingSearch:
    kind: str
    requester: AgentId
    topology: TopologyKind
    raw: str = ""
    session: Optional[dict[str, str]] = None
    default_assurance: int = 0
    payload: Optional[dict[str, Any]] = None
    profile: Optional[dict[str, Any]] = None
    annotated: Optional[dict[str, Any]] = None
    pipeline_ms: float = 0.0
    started_ms: float = 0.0


class QueryModBehavior(AgentBehavior):
    """
    Turns a raw query into a site-bound payload and drives its collection.

    A ``search`` request runs the whole pipeline (profile read, annotation,
    enrichment, record key, sanitization) and hands the collected records
    to the personalize agent. A ``collect`` request carries a ready payload
    and gets the bare collection outcome back.
    """

    def __init__(self, dictionary: Dictionary, secret: bytes):
        self.dictionary = dictionary
        self.secret = secret
        self._pending: dict[str, _PendingSearch] = {}

    def handle(self, ctx: AgentContext, message: Message) -> None:
        conversation = message.conversation_id
        if conversation.endswith(PROFILE_SUFFIX):
            self._on_profile(ctx, message, conversation[: -len(PROFILE_SUFFIX)])
        elif conversation.endswith(COLLECT_SUFFIX):
            self._on_collected(ctx, message, conversation[: -len(COLLECT_SUFFIX)])
        elif message.performative is Performative.REQUEST:
            self._on_request(ctx, message)

    def _on_request(self, ctx: AgentContext, message: Message) -> None:
        content = message.content
        pending = _PendingSearch(
            kind=content.get("kind", SEARCH),
            requester=message.sender,
            topology=TopologyKind.parse(content["topology"]),
        )
        conversation = message.conversation_id
        self._pending[conversation] = pending

        if pending.kind == COLLECT:
            pending.payload = content["payload"]
            self._start_collection(ctx, conversation)
            return

        pending.raw = content["raw"]
        pending.session = content["session"]
        pending.default_assurance = int(content.get("required_assurance", 0))
        providers = ctx.search_service(PROFILE_SERVICE)
        if not providers:
            self._fail(ctx, conversation, PlatformError("no profile service registered"))
            return
        ctx.send(
            Performative.REQUEST,
            providers[0],
            conversation + PROFILE_SUFFIX,
            {"user_id": pending.session["user_id"]},
        )

    def _on_profile(self, ctx: AgentContext, message: Message, conversation: str) -> None:
        pending = self._pending.get(conversation)
        if pending is None:
            return
        if message.performative is not Performative.INFORM:
            self._fail(ctx, conversation, PlatformError("profile read failed"))
            return

        started = time.perf_counter()
        try:
            profile = UserProfile.from_dict(message.content["profile"])
            session = _session_from(pending.session)
            annotated = enrich_query(annotate(pending.raw, self.dictionary, profile), profile)
            record_key = derive_record_key(self.secret, session.user_id, new_search_nonce())
            payload = build_site_payload(
                annotated,
                search_terms(annotated),
                record_key,
                profile.required_assurance(pending.default_assurance),
            )
            pending.payload = pseudonymize_outbound(payload, session, profile, record_key)
        except Exception as e:
            if not isinstance(e, MedSearchError):
                logger.exception("%s pipeline failed", conversation)
            self._fail(ctx, conversation, e)
            return
        pending.pipeline_ms = (time.perf_counter() - started) * 1000.0
        pending.profile = profile.to_dict()
        pending.annotated = annotated.to_dict()
        self._start_collection(ctx, conversation)

    def _start_collection(self, ctx: AgentContext, conversation: str) -> None:
        pending = self._pending[conversation]
        coordinators = ctx.search_service(coordination_service(pending.topology))
        if not coordinators:
            self._fail(
                ctx,
                conversation,
                PlatformError(f"no {pending.topology.value} coordinator registered"),
            )
            return
        pending.started_ms = ctx.now_ms()
        ctx.send(
            Performative.REQUEST,
            coordinators[0],
            collection_conversation(conversation),
            {"payload": pending.payload},
        )

    def _on_collected(self, ctx: AgentContext, message: Message, conversation: str) -> None:
        pending = self._pending.get(conversation)
        if pending is None:
            return
        if message.performative is Performative.FAILURE:
            reason = message.content.get("reason", "collection failed")
            name = message.content.get("error")
            error = error_from_report(name, reason) if name else PlatformError(reason)
            self._fail(ctx, conversation, error)
            return

        outcome = dict(message.content["outcome"])
        outcome["topology"] = pending.topology.value
        outcome["total_ms"] = ctx.now_ms() - pending.started_ms
        outcome["messages_sent"] = ctx.platform.delivered_count(message.conversation_id)
        del self._pending[conversation]
        logger.debug(
            "%s collected %d records in %.1f ms",
            conversation,
            len(outcome.get("records", [])),
            outcome["total_ms"],
        )

        if pending.kind == COLLECT:
            ctx.send(Performative.INFORM, pending.requester, conversation, {"outcome": outcome})
            return

        personalizers = ctx.search_service(PERSONALIZATION_SERVICE)
        if not personalizers:
            self._fail_to(ctx, pending, conversation, PlatformError("no personalization service"))
            return
        ctx.send(
            Performative.REQUEST,
            personalizers[0],
            conversation,
            {
                "outcome": outcome,
                "profile": pending.profile,
                "annotated": pending.annotated,
                "pipeline_ms": pending.pipeline_ms,
                "reply_to": pending.requester.name,
            },
        )

    def _fail(self, ctx: AgentContext, conversation: str, error: BaseException) -> None:
        pending = self._pending.pop(conversation, None)
        if pending is not None:
            self._fail_to(ctx, pending, conversation, error)

    def _fail_to(
        self, ctx: AgentContext, pending: _PendingSearch, conversation: str, error: BaseException
    ) -> None:
        logger.info("%s failed: %s", conversation, type(error).__name__)
        ctx.send(Performative.FAILURE, pending.requester, conversation, failure_content(error))


# ============================================================================
# Personalization agent
# ============================================================================


class PersonalizeBehavior(AgentBehavior):
    """Post-processes collected records and delivers them to the interface."""

    def __init__(self, delivered: DeliveredResults):
        self.delivered = delivered

    def setup(self, ctx: AgentContext) -> None:
        ctx.register_service(PERSONALIZATION_SERVICE, PERSONALIZE_AGENT)

    def handle(self, ctx: AgentContext, message: Message) -> None:
        if message.performative is not Performative.REQUEST:
            return
        content = message.content
        profile = UserProfile.from_dict(content["profile"])
        items = [
            CollectedRecord.from_dict(r).to_result_item() for r in content["outcome"]["records"]
        ]
        ranked = post_process(items, profile)
        self.delivered.remember(profile.user_id, ranked)

        receiver = ctx.lookup(content["reply_to"])
        if receiver is None:
            logger.warning("Results for %s have no receiver", message.conversation_id)
            return
        ctx.send(
            Performative.INFORM,
            receiver,
            message.conversation_id,
            {
                "results": [i.to_dict() for i in ranked],
                "outcome": content["outcome"],
                "annotated": content["annotated"],
                "pipeline_ms": content["pipeline_ms"],
            },
        )


# ============================================================================
# Static topology
# ============================================================================


@dataclass
class _Collection:
    requester: AgentId
    waiting: set[str] = field(default_factory=set)
    records: list[dict[str, Any]] = field(default_factory=list)
    per_location_ms: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)


class StaticCoordinatorBehavior(AgentBehavior):
    """
    Delegates collection to the web agent of each target category.

    The filtered locations are split by category; each web agent gets its
    share in one REQUEST and answers with one CONFIRM. The coordinator
    confirms completion once every web agent has answered.
    """

    def __init__(self) -> None:
        self._collections: dict[str, _Collection] = {}

    def setup(self, ctx: AgentContext) -> None:
        ctx.register_service(coordination_service(TopologyKind.STATIC), STATIC_COORDINATOR)

    def handle(self, ctx: AgentContext, message: Message) -> None:
        if message.performative is Performative.REQUEST:
            self._start(ctx, message)
        elif message.performative in (Performative.CONFIRM, Performative.FAILURE):
            self._collected(ctx, message)

    def _start(self, ctx: AgentContext, message: Message) -> None:
        payload = message.content["payload"]
        wanted = payload["categories"]
        locations = filter_locations(
            ctx.platform.get_available_locations(), wanted, payload["required_assurance"]
        )

        shares: dict[str, list[str]] = {}
        for loc in locations:
            category = min(loc.categories & set(wanted))
            shares.setdefault(category, []).append(loc.location_id)

        collection = _Collection(message.sender)
        self._collections[message.conversation_id] = collection
        for category, location_ids in shares.items():
            agents = ctx.search_service(category)
            if not agents:
                collection.failures.append(f"no web agent for {category}")
                continue
            ctx.send(
                Performative.REQUEST,
                agents[0],
                message.conversation_id,
                {"locations": location_ids, "search_terms": payload["search_terms"]},
            )
            collection.waiting.add(agents[0].name)
        self._finish_if_done(ctx, message.conversation_id)

    def _collected(self, ctx: AgentContext, message: Message) -> None:
        collection = self._collections.get(message.conversation_id)
        if collection is None or message.sender.name not in collection.waiting:
            return
        collection.waiting.discard(message.sender.name)
        content = message.content
        if message.performative is Performative.FAILURE:
            collection.failures.append(f"{message.sender.name}: {content.get('reason', '')}")
        else:
            collection.records.extend(content["records"])
            collection.per_location_ms.update(content["per_location_ms"])
            collection.failures.extend(content["failures"])
        self._finish_if_done(ctx, message.conversation_id)

    def _finish_if_done(self, ctx: AgentContext, conversation: str) -> None:
        collection = self._collections[conversation]
        if collection.waiting:
            return
        del self._collections[conversation]
        outcome = {
            "records": collection.records,
            "per_location_ms": collection.per_location_ms,
            "failures": collection.failures,
            "migrations": 0,
        }
        ctx.send(Performative.CONFIRM, collection.requester, conversation, {"outcome": outcome})


class WebAgentBehavior(AgentBehavior):
    """Collects from the locations of one category, registered under it."""

    contends = True

    def __init__(self, category: str, transport: Transport):
        self.category = category
        self.transport = transport

    def setup(self, ctx: AgentContext) -> None:
        ctx.register_service(self.category, ctx.agent_id.name)

    def handle(self, ctx: AgentContext, message: Message) -> None:
        if message.performative is not Performative.REQUEST:
            return
        terms = message.content["search_terms"]
        visits = []
        for location_id in message.content["locations"]:
            try:
                location = ctx.platform.location(location_id)
            except NoSuchLocation:
                visits.append(LocationVisit(location_id, [], 0.0, f"{location_id}: unknown"))
                continue
            visits.append(collect_location(location, terms, self.transport, ctx.platform.clock))
        ctx.reply(message, Performative.CONFIRM, _visit_content(visits))


# ============================================================================
# Mobile topology
# ============================================================================


class MobileCoordinatorBehavior(AgentBehavior):
    """
    One agent that migrates through every filtered location.

    Records gathered on arrival accumulate in the migrating state and leave
    with the single final INFORM.
    """

    def __init__(self, transport: Transport):
        self.transport = transport
        self._state: dict[str, Any] = {}

    def setup(self, ctx: AgentContext) -> None:
        ctx.register_service(coordination_service(TopologyKind.MOBILE), MOBILE_COORDINATOR)

    def snapshot(self) -> dict[str, Any]:
        return dict(self._state)

    def restore(self, state: dict[str, Any]) -> None:
        self._state = dict(state)

    @property
    def visited(self) -> list[str]:
        """Locations whose arrival hook ran in the current or last search."""
        return list(self._state.get("visited", []))

    def handle(self, ctx: AgentContext, message: Message) -> None:
        if message.performative is not Performative.REQUEST:
            return
        payload = message.content["payload"]
        plan = ItineraryPlan(
            tuple(
                filter_locations(
                    ctx.platform.get_available_locations(),
                    payload["categories"],
                    payload["required_assurance"],
                )
            ),
            message.conversation_id,
        )
        self._state = {
            "conversation": plan.conversation_id,
            "search_terms": list(payload["search_terms"]),
            "records": [],
            "per_location_ms": {},
            "failures": [],
            "visited": [],
        }
        hops_before = ctx.platform.hop_count(MOBILE_COORDINATOR)

        for location in plan.locations:
            try:
                ctx.move(location)
            except MigrationAborted as e:
                logger.warning("%s aborted during migration", plan.conversation_id)
                self._state["conversation"] = ""
                ctx.reply(message, Performative.FAILURE, failure_content(e))
                return
            except NoSuchLocation as e:
                self._state["failures"].append(f"{location.location_id}: {e}")

        outcome = {
            "records": self._state["records"],
            "per_location_ms": self._state["per_location_ms"],
            "failures": self._state["failures"],
            "migrations": ctx.platform.hop_count(MOBILE_COORDINATOR) - hops_before,
        }
        self._state["conversation"] = ""
        ctx.reply(message, Performative.INFORM, {"outcome": outcome})
        logger.debug("%s visited %d locations", plan.conversation_id, len(plan))

    def after_move(self, ctx: AgentContext, location: Location) -> None:
        if not self._state.get("conversation"):
            return
        visit = collect_location(
            location, self._state["search_terms"], self.transport, ctx.platform.clock
        )
        self._state["records"].extend(r.to_dict() for r in visit.records)
        self._state["per_location_ms"][visit.location_id] = visit.elapsed_ms
        if visit.failure:
            self._state["failures"].append(visit.failure)
        self._state["visited"].append(visit.location_id)
