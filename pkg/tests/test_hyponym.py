import pytest
from hypothesis import given, strategies as st

from sekg.abbrev import AbbrevTable
from sekg.bio import Entity
from sekg.corpus import Sentence, Token
from sekg.errors import ParseError
from sekg.hyponym import (
    ELIGIBLE_LABELS,
    Triple,
    dedupe,
    hyponyms_from_pos,
    lemma_of,
    read_triples,
    relations_from_abbreviations,
    write_triples,
)


def tagged(pairs, source_id="s:1"):
    tokens = []
    offset = 0
    for surface, pos in pairs:
        tokens.append(Token(surface, offset, pos))
        offset += len(surface) + 1
    return Sentence(tuple(tokens), source_id)


def entity(label, start, end, sentence):
    surface = " ".join(t.surface for t in sentence.tokens[start:end])
    return Entity(label, start, end, surface)


class TestPosHyponyms:
    def se_sentence(self):
        return tagged([
            ("SE", "NNP"),
            ("functions", "NNS"),
            ("should", "MD"),
            ("be", "VB"),
            ("performed", "VBN"),
        ])

    def test_noun_run_extends_entity(self):
        sentence = self.se_sentence()
        triples = hyponyms_from_pos(
            sentence, [entity("abb", 0, 1, sentence)]
        )
        assert [(t.head, t.relation, t.tail) for t in triples] == [
            ("se function", "subset_of", "se")
        ]
        only = triples[0]
        assert only.head_surface == "SE functions"
        assert only.tail_surface == "SE"
        assert only.provenance == "s:1"

    def test_ineligible_label_skipped(self):
        sentence = self.se_sentence()
        assert hyponyms_from_pos(
            sentence, [entity("mea", 0, 1, sentence)]
        ) == []

    def test_eligible_set_is_a_knob(self):
        sentence = self.se_sentence()
        triples = hyponyms_from_pos(
            sentence,
            [entity("mea", 0, 1, sentence)],
            eligible=frozenset({"mea"}),
        )
        assert len(triples) == 1

    def test_zero_run_yields_nothing(self):
        sentence = tagged([("SE", "NNP"), ("should", "MD")])
        assert hyponyms_from_pos(
            sentence, [entity("abb", 0, 1, sentence)]
        ) == []

    def test_entity_at_sentence_end(self):
        sentence = tagged([("use", "VB"), ("SE", "NNP")])
        assert hyponyms_from_pos(
            sentence, [entity("abb", 1, 2, sentence)]
        ) == []

    def test_run_stops_at_next_entity(self):
        sentence = tagged([
            ("SE", "NNP"),
            ("functions", "NNS"),
            ("review", "NN"),
            ("board", "NN"),
        ])
        ents = [
            entity("abb", 0, 1, sentence),
            entity("grp", 2, 4, sentence),
        ]
        triples = hyponyms_from_pos(sentence, ents)
        assert [t.head_surface for t in triples] == ["SE functions"]

    def test_adjacent_entities_leave_no_run(self):
        sentence = tagged([("SE", "NNP"), ("MDR", "NNP"), ("work", "NN")])
        ents = [
            entity("abb", 0, 1, sentence),
            entity("abb", 1, 2, sentence),
        ]
        triples = hyponyms_from_pos(sentence, ents)
        assert [t.head for t in triples] == ["mdr work"]

    def test_untagged_token_stops_run(self):
        sentence = tagged([("SE", "NNP"), ("functions", None)])
        assert hyponyms_from_pos(
            sentence, [entity("abb", 0, 1, sentence)]
        ) == []

    @st.composite
    def pos_case(draw):
        n = draw(st.integers(1, 10))
        pos = draw(st.lists(
            st.sampled_from(["NN", "NNS", "MD", "VB", "JJ", None]),
            min_size=n, max_size=n,
        ))
        spans = []
        i = 0
        while i < n:
            if draw(st.booleans()):
                end = min(n, i + draw(st.integers(1, 2)))
                spans.append(
                    (draw(st.sampled_from(["abb", "opcon", "mea", "grp"])),
                     i, end)
                )
                i = end
            else:
                i += 1
        return pos, spans

    @given(pos_case())
    def test_tail_is_strict_token_prefix_of_head(self, case):
        pos, spans = case
        sentence = tagged([(f"w{i}", p) for i, p in enumerate(pos)])
        ents = [entity(label, s, e, sentence) for label, s, e in spans]
        for t in hyponyms_from_pos(sentence, ents):
            head_words = t.head_surface.split()
            tail_words = t.tail_surface.split()
            assert len(head_words) > len(tail_words)
            assert head_words[: len(tail_words)] == tail_words
            assert t.relation == "subset_of"
            assert t.head == lemma_of(t.head_surface)
            assert t.tail == lemma_of(t.tail_surface)

    @given(pos_case())
    def test_matches_direct_recount(self, case):
        pos, spans = case
        sentence = tagged([(f"w{i}", p) for i, p in enumerate(pos)])
        ents = [entity(label, s, e, sentence) for label, s, e in spans]
        expected = []
        ordered = sorted(spans, key=lambda span: span[1])
        for k, (label, start, end) in enumerate(ordered):
            if label not in ELIGIBLE_LABELS:
                continue
            limit = len(pos)
            if k + 1 < len(ordered):
                limit = ordered[k + 1][1]
            run = end
            while run < limit and pos[run] in ("NN", "NNS"):
                run += 1
            if run > end:
                expected.append(
                    " ".join(f"w{i}" for i in range(start, run))
                )
        got = [t.head_surface for t in hyponyms_from_pos(sentence, ents)]
        assert got == expected


class TestAbbrevRelations:
    def test_stands_for_triples(self):
        table = AbbrevTable({"TRL": "Technology Readiness Level"})
        triples = relations_from_abbreviations(table)
        assert [(t.head, t.relation, t.tail) for t in triples] == [
            ("trl", "stands_for", "technology readiness level")
        ]
        assert triples[0].head_surface == "TRL"
        assert triples[0].provenance == "abbreviations"

    def test_lemma_equal_pair_skipped(self):
        table = AbbrevTable({"TRL": "TRLs"})
        assert relations_from_abbreviations(table) == []


class TestTripleValidation:
    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            Triple("a", "related_to", "b")

    def test_phrase_requires_verb_phrase(self):
        with pytest.raises(ValueError):
            Triple("a", "subset_of", "b", phrase="does")

    def test_verb_phrase_requires_phrase(self):
        with pytest.raises(ValueError):
            Triple("a", "verb_phrase", "b")

    def test_self_relation_rejected(self):
        with pytest.raises(ValueError):
            Triple("a", "subset_of", "a")


class TestTripleIo:
    def sample(self):
        return [
            Triple("trl", "stands_for", "technology readiness level",
                   "TRL", "Technology Readiness Levels",
                   provenance="abbreviations"),
            Triple("nasa", "verb_phrase", "orion", "NASA", "Orion",
                   phrase="will launch", provenance="s:4"),
            Triple("se functions", "subset_of", "se", "SE functions", "SE",
                   provenance="s:2"),
        ]

    def test_write_read_round_trip(self, tmp_path):
        path = tmp_path / "triples.tsv"
        path.write_text(write_triples(self.sample()))
        back = read_triples(path)
        assert [
            (t.head, t.relation, t.tail, t.phrase, t.provenance)
            for t in back
        ] == [
            (t.head, t.relation, t.tail, t.phrase, t.provenance)
            for t in self.sample()
        ]

    def test_phrase_rides_in_relation_column(self):
        text = write_triples(self.sample())
        assert "\tverb_phrase:will launch\t" in text

    def test_read_skips_blank_lines(self, tmp_path):
        path = tmp_path / "triples.tsv"
        path.write_text("a\tsubset_of\tb\ts:1\n\n")
        assert len(read_triples(path)) == 1

    def bad(self, tmp_path, text):
        path = tmp_path / "triples.tsv"
        path.write_text(text)
        return path

    def test_read_rejects_bad_column_count(self, tmp_path):
        with pytest.raises(ParseError):
            read_triples(self.bad(tmp_path, "a\tsubset_of\tb\n"))

    def test_read_rejects_empty_endpoint(self, tmp_path):
        with pytest.raises(ParseError):
            read_triples(self.bad(tmp_path, "\tsubset_of\tb\ts:1\n"))

    def test_read_rejects_unknown_relation(self, tmp_path):
        with pytest.raises(ParseError):
            read_triples(self.bad(tmp_path, "a\trelated\tb\ts:1\n"))

    def test_read_rejects_empty_phrase_payload(self, tmp_path):
        with pytest.raises(ParseError):
            read_triples(self.bad(tmp_path, "a\tverb_phrase:\tb\ts:1\n"))


class TestDedupe:
    def test_first_occurrence_wins(self):
        a = Triple("x", "subset_of", "y", provenance="s:1")
        b = Triple("x", "subset_of", "y", provenance="s:2")
        assert dedupe([a, b]) == [a]

    def test_phrase_distinguishes(self):
        a = Triple("x", "verb_phrase", "y", phrase="runs")
        b = Triple("x", "verb_phrase", "y", phrase="stops")
        assert dedupe([a, b]) == [a, b]
