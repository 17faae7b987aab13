import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import fixture_path
from sekg.defs import (
    Definition,
    hyponyms_from_definitions,
    lemmatize_head,
    load_definitions,
    parse_definitions,
)
from sekg.errors import ParseError
from sekg.hyponym import lemma_of

# Independently checked singular forms; the implementation must agree
# on every row.
PLURALS = [
    ("levels", "level"),
    ("systems", "system"),
    ("risks", "risk"),
    ("requirements", "requirement"),
    ("reviews", "review"),
    ("phases", "phase"),
    ("scenarios", "scenario"),
    ("engineers", "engineer"),
    ("missions", "mission"),
    ("elements", "element"),
    ("functions", "function"),
    ("margins", "margin"),
    ("documents", "document"),
    ("baselines", "baseline"),
    ("terms", "term"),
    ("activities", "activity"),
    ("facilities", "facility"),
    ("capabilities", "capability"),
    ("studies", "study"),
    ("categories", "category"),
    ("boundaries", "boundary"),
    ("assemblies", "assembly"),
    ("anomalies", "anomaly"),
    ("processes", "process"),
    ("classes", "class"),
    ("masses", "mass"),
    ("losses", "loss"),
    ("glasses", "glass"),
    ("boxes", "box"),
    ("approaches", "approach"),
    ("branches", "branch"),
    ("switches", "switch"),
    ("dishes", "dish"),
    ("flashes", "flash"),
    ("buzzes", "buzz"),
    ("waltzes", "waltz"),
    ("analyses", "analysis"),
    ("criteria", "criterion"),
    ("appendices", "appendix"),
    ("matrices", "matrix"),
    ("indices", "index"),
    ("data", "data"),
    ("bases", "basis"),
    ("hypotheses", "hypothesis"),
    ("phenomena", "phenomenon"),
    ("series", "series"),
    ("species", "species"),
    ("children", "child"),
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
    ("feet", "foot"),
    ("lives", "life"),
    ("media", "medium"),
    ("crises", "crisis"),
    ("statuses", "status"),
    ("syntheses", "synthesis"),
    ("axes", "axis"),
]

UNCHANGED = ["status", "basis", "analysis", "class", "bus", "gas", "process"]

CASED = [
    ("Levels", "Level"),
    ("SYSTEMS", "SYSTEM"),
    ("Analyses", "Analysis"),
    ("CRITERIA", "CRITERION"),
    ("Activities", "Activity"),
    ("ACTIVITIES", "ACTIVITY"),
    ("Processes", "Process"),
]


class TestLemmatizeHead:
    @pytest.mark.parametrize("plural,singular", PLURALS)
    def test_known_plurals(self, plural, singular):
        assert lemmatize_head(plural) == singular

    @pytest.mark.parametrize("word", UNCHANGED)
    def test_singulars_untouched(self, word):
        assert lemmatize_head(word) == word

    @pytest.mark.parametrize("word,expected", CASED)
    def test_case_is_preserved(self, word, expected):
        assert lemmatize_head(word) == expected

    @given(st.text(st.characters(min_codepoint=97, max_codepoint=122),
                   min_size=1, max_size=12))
    def test_idempotent_on_arbitrary_words(self, word):
        once = lemmatize_head(word)
        assert lemmatize_head(once) == once

    def test_idempotent_when_strip_lands_on_exception(self):
        once = lemmatize_head("peoples")
        assert lemmatize_head(once) == once

    def test_plural_and_singular_share_a_lemma(self):
        assert lemma_of("processes") == lemma_of("process") == "process"
        assert lemma_of("Technology Readiness Levels") == (
            "technology readiness level"
        )


class TestParse:
    def test_records_and_bodies(self):
        text = (
            "Risk\n"
            "The chance of loss.\n"
            "Spans two lines.\n"
            "\n"
            "Acceptable Risk:\n"
            "Risk that is understood.\n"
        )
        records = parse_definitions(text.splitlines())
        assert records == [
            Definition("Risk", "The chance of loss. Spans two lines.", 1),
            Definition("Acceptable Risk", "Risk that is understood.", 5),
        ]

    def test_trailing_punctuation_stripped(self):
        for decorated in ("Risk:", "Risk.", "Risk;"):
            assert parse_definitions([decorated])[0].term == "Risk"

    def test_empty_term_rejected(self):
        with pytest.raises(ParseError) as exc:
            parse_definitions(["good", "body", "", "::"])
        assert exc.value.line == 4

    def test_multiple_blank_lines_between_records(self):
        records = parse_definitions(["A", "a text", "", "", "B", "b text"])
        assert [r.term for r in records] == ["A", "B"]

    def test_empty_input(self):
        assert parse_definitions([]) == []

    def test_fixture_loads(self):
        records = load_definitions(fixture_path("definitions.txt"))
        assert len(records) == 10
        assert records[0].term == "Risk"
        assert records[1].term == "Acceptable Risk"


def defs_of(*terms):
    return [Definition(term, "", i + 1) for i, term in enumerate(terms)]


def term_key(term):
    words = term.split()
    if not words:
        return ()
    return tuple(w.lower() for w in words[:-1]) + (
        lemmatize_head(words[-1]).lower(),
    )


def oracle_pairs(entries):
    """Pairwise suffix scan over every definition pair."""
    keyed = [(term_key(d.term), d) for d in entries if term_key(d.term)]
    known = {}
    for k, d in keyed:
        known.setdefault(k, d)
    pairs = set()
    for k, d in keyed:
        if known[k] is not d:
            continue
        suffixes = [
            k2 for k2 in known
            if 0 < len(k2) < len(k) and k[len(k) - len(k2):] == k2
        ]
        if suffixes:
            longest = max(suffixes, key=len)
            pairs.add((lemma_of(d.term), lemma_of(known[longest].term)))
    return pairs


class TestHyponyms:
    def test_fixture_chain(self):
        entries = load_definitions(fixture_path("definitions.txt"))
        triples = hyponyms_from_definitions(entries)
        assert [(t.head, t.tail) for t in triples] == [
            ("acceptable risk", "risk"),
            ("technical risk", "risk"),
            ("flight system", "system"),
            ("analysis process", "process"),
            ("mission system", "system"),
            ("decision analysis process", "analysis process"),
        ]
        assert all(t.relation == "subset_of" for t in triples)
        assert all(t.provenance == "definitions" for t in triples)
        last = triples[-1]
        assert last.head_surface == "Decision Analysis Process"
        assert last.tail_surface == "Analysis Process"

    def test_plural_head_still_links(self):
        triples = hyponyms_from_definitions(
            defs_of("System", "Mission Systems")
        )
        assert [(t.head, t.tail) for t in triples] == [
            ("mission system", "system")
        ]

    def test_longest_suffix_wins(self):
        triples = hyponyms_from_definitions(
            defs_of("Process", "Analysis Process", "Decision Analysis Process")
        )
        by_head = {t.head: t.tail for t in triples}
        assert by_head["decision analysis process"] == "analysis process"

    def test_duplicate_terms_link_once(self):
        triples = hyponyms_from_definitions(
            defs_of("Risk", "Acceptable Risk", "acceptable risks")
        )
        assert len(triples) == 1

    def test_blank_term_is_ignored(self):
        assert hyponyms_from_definitions([Definition("  ", "", 1)]) == []

    word = st.sampled_from(
        ["risk", "risks", "analysis", "process", "mission",
         "system", "systems", "flight", "plan", "level"]
    )
    phrases = st.lists(
        st.builds(" ".join, st.lists(word, min_size=1, max_size=3)),
        min_size=1,
        max_size=6,
    )

    @given(phrases)
    def test_matches_pairwise_oracle(self, terms):
        entries = defs_of(*terms)
        triples = hyponyms_from_definitions(entries)
        assert {(t.head, t.tail) for t in triples} == oracle_pairs(entries)
        assert len(triples) == len({(t.head, t.tail) for t in triples})

    @given(phrases)
    def test_edges_form_a_dag(self, terms):
        triples = hyponyms_from_definitions(defs_of(*terms))
        assert oracles.is_acyclic([(t.head, t.tail) for t in triples])
