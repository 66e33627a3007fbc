"""Query modification pipeline and the term dictionary."""

import random

import pytest

from medsearch.errors import ConfigError, EmptyQuery
from medsearch.personalization.profile import UserProfile
from medsearch.query import (
    Dictionary,
    DictionaryEntry,
    EntryKind,
    annotate,
    detect_language,
    edit_distance,
    expand_synonyms,
    filter_stopwords,
    load_dictionary,
    parse_dictionary,
    search_terms,
    spellcheck,
    tokenize,
)

from conftest import IMMUNE, RESPIRATORY


def levenshtein(a: str, b: str) -> int:
    """Full dynamic-programming table, no early exit."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1, table[i][j - 1] + 1, table[i - 1][j - 1] + cost
            )
    return table[len(a)][len(b)]


def brute_force_correction(term: str, dictionary: Dictionary, language: str) -> str:
    """Minimum edit distance over every entry, stopwords included, ties to the smallest."""
    vocabulary = dictionary.vocabulary(language)
    if term in vocabulary:
        return term
    scored = sorted((levenshtein(term, word), word) for word in vocabulary)
    distance, best = scored[0]
    return best if distance <= 2 else term


def test_tokenize_keeps_order_and_lowercases():
    assert tokenize("Fever, COUGH and  chest-pain!") == ["fever", "cough", "and", "chest", "pain"]


def test_tokenize_splits_on_underscores():
    assert tokenize("fever_cough") == ["fever", "cough"]
    assert tokenize("__") == []


def test_edit_distance():
    assert edit_distance("fevr", "fever") == 1
    assert edit_distance("kitten", "sitting") == 3
    assert edit_distance("kitten", "sitting", bound=2) == 3
    assert edit_distance("", "abc") == 3


def test_spellcheck_corrects_within_two_edits(dictionary):
    assert spellcheck("fevr", dictionary, "en") == "fever"
    assert spellcheck("asthmaa", dictionary, "en") == "asthma"
    assert spellcheck("fever", dictionary, "en") == "fever"
    assert spellcheck("xylophone", dictionary, "en") == "xylophone"


def test_spellcheck_matches_exhaustive_search(dictionary):
    rng = random.Random(11)
    words = sorted(dictionary.vocabulary("en"))
    letters = "abcdefghijklmnopqrstuvwxyz"
    for _ in range(1000):
        word = list(rng.choice(words))
        for _ in range(rng.randint(1, 2)):
            i = rng.randrange(len(word))
            op = rng.choice(("sub", "del", "ins"))
            if op == "sub":
                word[i] = rng.choice(letters)
            elif op == "del" and len(word) > 1:
                del word[i]
            else:
                word.insert(i, rng.choice(letters))
        fuzzed = "".join(word)
        assert spellcheck(fuzzed, dictionary, "en") == brute_force_correction(
            fuzzed, dictionary, "en"
        )


def test_stopwords_never_survive(dictionary):
    kept, removed = filter_stopwords(["between", "do", "on", "fever"], dictionary, "en")
    assert kept == ["fever"]
    assert removed == ["between", "do", "on"]

    annotated = annotate("what do I have between fever on cough", dictionary)
    surviving = {t.corrected for t in annotated.terms}
    assert surviving.isdisjoint({"between", "do", "on", "what", "i", "have"})


def test_misspelled_stopwords_are_corrected_then_removed(dictionary):
    assert spellcheck("betwen", dictionary, "en") == "between"
    assert spellcheck("whitch", dictionary, "en") == "which"

    annotated = annotate("betwen fever", dictionary)
    assert [t.corrected for t in annotated.terms] == ["fever"]
    assert annotated.removed_stopwords == ("betwen",)


def test_only_stopwords_is_an_empty_query(dictionary):
    with pytest.raises(EmptyQuery, match="empty query after stopword removal"):
        annotate("between do on", dictionary)
    with pytest.raises(EmptyQuery):
        annotate("   ", dictionary)


def test_misspelled_query_is_annotated(dictionary):
    annotated = annotate("fevr", dictionary)

    assert annotated.corrections() == [("fevr", "fever")]
    (term,) = annotated.terms
    assert term.synonyms == ("pyrexia",)
    assert annotated.target_categories == {RESPIRATORY, IMMUNE}
    assert annotated.category_weights == {RESPIRATORY: 1.0, IMMUNE: 1.0}
    assert search_terms(annotated) == ["fever", "pyrexia"]


def test_relations_link_terms_of_the_query(dictionary):
    annotated = annotate("influenza fever", dictionary)
    labels = {(r.source, r.target, r.label) for r in annotated.relations}
    assert ("influenza", "fever", "symptom") in labels
    # One relation per unordered pair and label
    assert len(annotated.relations) == len({(frozenset((r.source, r.target)), r.label)
                                            for r in annotated.relations})


def test_synonyms_are_one_hop(dictionary):
    assert expand_synonyms("influenza", dictionary, "en") == ["flu", "grippe"]
    assert expand_synonyms("unheard", dictionary, "en") == []


def test_annotation_is_deterministic(dictionary):
    first = annotate("Asthmaa and bronchitis since monday", dictionary).canonical()
    assert all(
        annotate("Asthmaa and bronchitis since monday", dictionary).canonical() == first
        for _ in range(5)
    )


def test_language_detection(dictionary):
    assert detect_language("треска и кашлица", dictionary) == "bg"
    assert detect_language("fever and cough", dictionary) == "en"
    assert detect_language("zzz qqq", dictionary) == dictionary.default_language


def test_profile_conditions_rescue_unmatched_queries(dictionary):
    profile = UserProfile(user_id="u", health_conditions=["asthma"])
    annotated = annotate("zzzz qqqq", dictionary, profile)
    assert annotated.from_profile
    assert [t.corrected for t in annotated.terms] == ["asthma"]

    single = annotate("xqzzt", dictionary, UserProfile("u1", health_conditions=["asthma"]))
    assert [t.corrected for t in single.terms] == ["asthma"]
    assert [t.surface for t in single.terms] == ["asthma"]
    assert single.target_categories == {RESPIRATORY}

    plain = annotate("zzzz qqqq", dictionary)
    assert not plain.from_profile


# ============================================================================
# Dictionary
# ============================================================================


def test_packaged_dictionary_has_both_languages(dictionary):
    assert dictionary.languages == ["bg", "en"]
    assert dictionary.get("between", "en").is_stopword
    assert ("en", "fever") in dictionary


def test_parse_dictionary_lines():
    text = "# comment\nflu\ten\tTERM\tinfluenza\tfever:symptom\trespiratory\non\ten\tSTOPWORD\n"
    parsed = parse_dictionary(text)
    entry = parsed.get("flu", "en")
    assert entry.synonyms == ("influenza",)
    assert entry.related == (("fever", "symptom"),)
    assert entry.categories == {RESPIRATORY}
    assert parsed.candidates("en") == ["flu", "on"]


def test_dictionary_rejects_bad_entries():
    with pytest.raises(ValueError):
        DictionaryEntry("Fever", "en")
    with pytest.raises(ValueError):
        DictionaryEntry("on", "en", EntryKind.STOPWORD, synonyms=("upon",))
    with pytest.raises(ValueError):
        Dictionary([DictionaryEntry("a", "en"), DictionaryEntry("a", "en")])


def test_missing_dictionary_file(tmp_path):
    with pytest.raises(ConfigError):
        load_dictionary(tmp_path / "nope.tsv")
