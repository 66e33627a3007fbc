"""Profiles, enrichment and result post-processing."""

import random

import pytest

from medsearch.errors import AuthRequired, UnknownResult
from medsearch.personalization import (
    DeliveredResults,
    FeedbackEvent,
    ProfileStore,
    ResultItem,
    UserProfile,
    apply_feedback,
    apply_form,
    create_or_update_profile,
    enrich_query,
    jaccard,
    merge_similar,
    post_process,
    rank_and_sort,
    resolve_conflicts,
)
from medsearch.query import annotate
from medsearch.sites.corpus import SiteRecord

from conftest import IMMUNE, RESPIRATORY, SKIN, USER


def item_from(corpus, record_id: str, matched=("fever",)) -> ResultItem:
    site_id = record_id.rsplit("-", 1)[0]
    site = corpus.site(site_id)
    record = next(r for r in site.records if r.record_id == record_id)
    return ResultItem(
        record=record,
        source_location=site_id,
        matched_terms=frozenset(matched),
        categories=frozenset({site.category}),
        assurance_level=site.assurance_level,
    )


def bare_item(record_id: str, disease: str, description: str, drugs=(), assurance=1):
    return ResultItem(
        record=SiteRecord(record_id, disease, description, tuple(drugs)),
        source_location=record_id.split("/")[0],
        matched_terms=frozenset({"x"}),
        assurance_level=assurance,
    )


# ============================================================================
# Profiles
# ============================================================================


def test_apply_form_replaces_given_sections_only():
    profile = UserProfile(user_id=USER, common_info={"name": "Alice"})
    updated = apply_form(
        profile,
        {
            "health_conditions": "asthma, diabetes",
            "preferences": {"respiratory": 0.7, IMMUNE: 1.5},
        },
    )

    assert updated.common_info == {"name": "Alice"}
    assert updated.health_conditions == ["asthma", "diabetes"]
    assert updated.preferences == {RESPIRATORY: 0.7, IMMUNE: 1.0}
    assert profile.preferences == {}


def test_apply_form_rejects_unknown_categories():
    with pytest.raises(ValueError):
        apply_form(UserProfile(user_id=USER), {"preferences": {"astrology": 0.5}})


def test_required_assurance_from_medical_info():
    profile = UserProfile(user_id=USER, medical_info={"data_sensitivity": "2"})
    assert profile.required_assurance(0) == 2
    profile.medical_info["data_sensitivity"] = "7"
    assert profile.required_assurance(1) == 1
    profile.medical_info["data_sensitivity"] = "high"
    assert profile.required_assurance(1) == 1


def test_profile_store_round_trip(profiles):
    assert profiles.load(USER) is None
    assert profiles.get(USER).is_empty()

    profile = UserProfile(
        user_id=USER,
        medical_info={"blood_type": "O"},
        health_conditions=["asthma"],
        preferences={RESPIRATORY: 0.4},
        feedback_history=[FeedbackEvent.rating("r1", 1)],
    )
    profiles.save(profile)

    assert profiles.load(USER) == profile
    # Documents are named by a hash, never by the user id
    assert all(USER not in p.name for p in profiles.directory.iterdir())


def test_profile_store_update_is_read_modify_write(profiles):
    profiles.update(USER, lambda p: apply_form(p, {"health_conditions": ["gout"]}))
    updated = profiles.update(USER, lambda p: apply_form(p, {"preferences": {"musculo": 0.3}}))

    assert updated.health_conditions == ["gout"]
    assert ProfileStore(profiles.directory).get(USER).preferences == updated.preferences


def test_profile_changes_need_a_session(profiles, session):
    with pytest.raises(AuthRequired):
        create_or_update_profile(profiles, None, {"health_conditions": ["gout"]})

    profile = create_or_update_profile(profiles, session, {"health_conditions": ["gout"]})
    assert profile.user_id == USER
    assert profiles.get(USER).health_conditions == ["gout"]


# ============================================================================
# Enrichment
# ============================================================================


def test_enrichment_reweights_categories_and_adds_context(dictionary):
    annotated = annotate("fever", dictionary)
    profile = UserProfile(
        user_id=USER,
        health_conditions=["asthma", "fever"],
        preferences={RESPIRATORY: 0.5},
    )

    enriched = enrich_query(annotated, profile)

    assert enriched.category_weights == {RESPIRATORY: 1.5, IMMUNE: 1.0}
    assert enriched.context_terms == ("asthma",)
    assert enriched.terms == annotated.terms
    assert enriched.target_categories == annotated.target_categories


def test_enrichment_without_profile_data_is_identity(dictionary):
    annotated = annotate("fever", dictionary)
    assert enrich_query(annotated, None) is annotated
    assert enrich_query(annotated, UserProfile(user_id=USER)) is annotated


# ============================================================================
# Post-processing
# ============================================================================


def test_better_assured_source_wins_a_conflict():
    strong = bare_item("a/1", "Gout", "joint pain", ["colchicine"], assurance=3)
    weak = bare_item("b/1", "gout", "joint pain", ["aspirin"], assurance=1)
    peer = bare_item("c/1", "gout", "joint pain", ["ibuprofen"], assurance=3)
    overlapping = bare_item(
        "d/1", "gout", "joint pain", ["aspirin", "colchicine", "ibuprofen"], assurance=0
    )
    no_drugs = bare_item("e/1", "gout", "joint pain", assurance=0)

    kept = resolve_conflicts([strong, weak, peer, overlapping, no_drugs])

    assert kept == [strong, peer, overlapping, no_drugs]


def test_jaccard():
    assert jaccard(frozenset(), frozenset()) == 1.0
    assert jaccard(frozenset("ab"), frozenset("bc")) == pytest.approx(1 / 3)


def test_merge_joins_equal_diseases_with_similar_descriptions(corpus):
    strong = item_from(corpus, "respiratory-01-r001")
    weak = item_from(corpus, "respiratory-02-r001", matched=("influenza",))
    other = item_from(corpus, "immune-01-r001")

    merged = merge_similar([weak, other, strong])

    assert len(merged) == 2
    first = merged[0]
    assert first.record_id == "respiratory-01-r001"
    assert first.record.drugs == ("oseltamivir", "paracetamol")
    assert first.sources == ("respiratory-02", "respiratory-01")
    assert first.record_ids == ("respiratory-02-r001", "respiratory-01-r001")
    assert first.matched_terms == {"fever", "influenza"}
    assert merged[1] == other


def test_merge_threshold_is_inclusive():
    a = bare_item("a/1", "flu", "w x y z")
    b = bare_item("b/1", "flu", "w x y z v")
    c = bare_item("c/1", "flu", "w x y q r")

    assert len(merge_similar([a, b])) == 1
    assert len(merge_similar([a, c])) == 2
    assert len(merge_similar([a, b], threshold=0.81)) == 2


def test_merging_twice_changes_nothing():
    rng = random.Random(5)
    words = ["fever", "cough", "rash", "pain", "chest", "dry", "night", "red"]
    for _ in range(200):
        items = [
            bare_item(
                f"s{rng.randrange(4)}/{k}",
                rng.choice(["flu", "cold", "asthma"]),
                " ".join(rng.sample(words, rng.randint(3, 6))),
                rng.sample(["a", "b", "c"], rng.randint(0, 2)),
                rng.randint(0, 3),
            )
            for k in range(rng.randint(1, 8))
        ]
        threshold = rng.choice([0.5, 0.6, 0.8, 1.0])
        once = merge_similar(items, threshold)
        assert merge_similar(once, threshold) == once

def test_ranking_uses_matches_then_preferences_then_ids(corpus):
    fever = item_from(corpus, "immune-01-r001")
    flu = item_from(corpus, "respiratory-01-r001", matched=("fever", "influenza"))
    asthma = item_from(corpus, "respiratory-01-r003")

    assert [i.record_id for i in rank_and_sort([asthma, fever, flu])] == [
        "respiratory-01-r001",
        "respiratory-01-r003",
        "immune-01-r001",
    ]

    profile = UserProfile(user_id=USER, preferences={IMMUNE: 0.9})
    ranked = rank_and_sort([asthma, fever, flu], profile)
    assert [i.record_id for i in ranked] == [
        "respiratory-01-r001",
        "immune-01-r001",
        "respiratory-01-r003",
    ]
    assert ranked[1].score == pytest.approx(1.9)


def test_post_process_chains_the_stages(corpus):
    items = [
        item_from(corpus, "respiratory-02-r001"),
        item_from(corpus, "respiratory-01-r001"),
        item_from(corpus, "immune-01-r001"),
    ]
    result = post_process(items)
    assert [i.record_id for i in result] == ["respiratory-01-r001", "immune-01-r001"]


# ============================================================================
# Feedback
# ============================================================================


def test_feedback_moves_weights_within_bounds(corpus):
    item = item_from(corpus, "respiratory-01-r001")
    profile = UserProfile(user_id=USER, preferences={RESPIRATORY: 0.95})

    up = apply_feedback(profile, FeedbackEvent.rating(item.record_id, 1), item)
    assert up.preferences[RESPIRATORY] == 1.0
    assert len(up.feedback_history) == 1

    down = apply_feedback(up, FeedbackEvent.rating(item.record_id, -1), item)
    assert down.preferences[RESPIRATORY] == pytest.approx(0.9)

    clicked = apply_feedback(UserProfile(user_id=USER), FeedbackEvent.click(item.record_id), item)
    assert clicked.preferences == {RESPIRATORY: 0.02}


def test_positive_feedback_never_lowers_a_weight(corpus):
    rng = random.Random(9)
    record_ids = ("respiratory-01-r001", "immune-01-r002", "skin-01-r001")
    items = [item_from(corpus, r) for r in record_ids]
    categories = [RESPIRATORY, IMMUNE, SKIN]
    for _ in range(300):
        item = rng.choice(items)
        chosen = rng.sample(categories, rng.randint(0, 3))
        preferences = {c: round(rng.random(), 3) for c in chosen}
        profile = UserProfile(user_id=USER, preferences=preferences)
        event = rng.choice(
            [FeedbackEvent.rating(item.record_id, 1), FeedbackEvent.click(item.record_id)]
        )
        updated = apply_feedback(profile, event, item)
        for category in categories:
            assert updated.weight(category) >= profile.weight(category)
        for category in item.categories:
            if profile.weight(category) < 1.0:
                assert updated.weight(category) > profile.weight(category)

def test_feedback_must_reference_a_delivered_item(corpus):
    item = item_from(corpus, "respiratory-01-r001")
    with pytest.raises(UnknownResult):
        apply_feedback(UserProfile(user_id=USER), FeedbackEvent.rating("elsewhere", 1), item)
    with pytest.raises(UnknownResult):
        apply_feedback(UserProfile(user_id=USER), FeedbackEvent.rating(item.record_id, 1), None)


def test_feedback_events_validate_signals():
    with pytest.raises(ValueError):
        FeedbackEvent.rating("r", 2)
    event = FeedbackEvent.click("r")
    assert FeedbackEvent.from_dict(event.to_dict()) == event


def test_delivered_results_index_every_merged_record(corpus):
    merged = merge_similar(
        [item_from(corpus, "respiratory-01-r001"), item_from(corpus, "respiratory-02-r001")]
    )
    delivered = DeliveredResults()
    delivered.remember(USER, merged)

    assert delivered.find(USER, "respiratory-02-r001") is merged[0]
    assert delivered.find(USER, "respiratory-01-r001") is merged[0]
    assert delivered.find("bob", "respiratory-01-r001") is None


def test_delivered_results_keep_only_the_newest_per_user(corpus):
    delivered = DeliveredResults(limit=2)
    first, second, third = (
        item_from(corpus, r)
        for r in ("respiratory-01-r001", "respiratory-01-r002", "respiratory-01-r003")
    )
    delivered.remember(USER, [first, second])
    delivered.remember("bob", [first])
    delivered.remember(USER, [third])

    assert delivered.count(USER) == 2
    assert delivered.find(USER, "respiratory-01-r001") is None
    assert delivered.find(USER, "respiratory-01-r003") is third
    assert delivered.find("bob", "respiratory-01-r001") is first

    # Re-delivery refreshes an id
    delivered.remember(USER, [second])
    delivered.remember(USER, [first])
    assert delivered.find(USER, "respiratory-01-r002") is second
    assert delivered.find(USER, "respiratory-01-r003") is None

    with pytest.raises(ValueError):
        DeliveredResults(limit=0)
