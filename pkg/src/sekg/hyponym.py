"""Relation triples and the POS-context hyponym rule."""

from __future__ import annotations

from dataclasses import dataclass

from .abbrev import AbbrevTable
from .bio import Entity
from .corpus import Sentence
from .defs import lemmatize_head
from .errors import ParseError

RELATION_KINDS = ("stands_for", "subset_of", "verb_phrase")

# Entity labels whose mentions may head a noun-compound hyponym.
ELIGIBLE_LABELS = frozenset({"opcon", "syscon", "abb"})

# POS tags a compound may absorb to the right of the entity.
_NOUN_TAGS = frozenset({"NN", "NNS"})


@dataclass(frozen=True)
class Triple:
    """One typed relation between two concepts.

    `head` and `tail` are canonical lemma keys; the surface fields
    keep the spelling seen in text. `phrase` is set only for
    verb_phrase relations.
    """

    head: str
    relation: str
    tail: str
    head_surface: str = ""
    tail_surface: str = ""
    phrase: str | None = None
    provenance: str = ""

    def __post_init__(self):
        if self.relation not in RELATION_KINDS:
            raise ValueError(f"unknown relation kind {self.relation!r}")
        if self.relation == "verb_phrase":
            if not self.phrase:
                raise ValueError("verb_phrase triples need a phrase")
        elif self.phrase is not None:
            raise ValueError("phrase is only set on verb_phrase triples")
        if self.head == self.tail:
            raise ValueError(f"head and tail coincide: {self.head!r}")


def lemma_of(surface: str) -> str:
    """Canonical key for a concept mention.

    Lowercased, with the final word singularized, so "Technology
    Readiness Levels" and "technology readiness level" coincide.
    """
    words = surface.split()
    if not words:
        return ""
    words[-1] = lemmatize_head(words[-1])
    return " ".join(words).lower()


def hyponyms_from_pos(
    sentence: Sentence,
    entities: list[Entity],
    eligible: frozenset[str] = ELIGIBLE_LABELS,
) -> list[Triple]:
    """Derived entities read off POS context.

    When an eligible entity is immediately followed by a run of
    common-noun tokens, the combined phrase names something narrower
    than the entity alone: in "SE functions should be performed" the
    mention "SE" plus "functions" yields "SE functions" as a
    more specific concept under "SE". The run extends right over
    NN/NNS tokens and stops before the next entity. The entity
    surface is always a token-wise strict prefix of the compound.
    """
    ordered = sorted(entities, key=lambda e: e.start)
    starts = [e.start for e in ordered]
    triples = []
    for idx, ent in enumerate(ordered):
        if ent.label not in eligible:
            continue
        limit = len(sentence.tokens)
        if idx + 1 < len(ordered):
            limit = min(limit, starts[idx + 1])
        j = ent.end
        while j < limit and (sentence.tokens[j].pos or "") in _NOUN_TAGS:
            j += 1
        if j == ent.end:
            continue
        run = [t.surface for t in sentence.tokens[ent.end : j]]
        compound = " ".join([ent.surface] + run)
        triples.append(
            Triple(
                head=lemma_of(compound),
                relation="subset_of",
                tail=lemma_of(ent.surface),
                head_surface=compound,
                tail_surface=ent.surface,
                provenance=sentence.source_id,
            )
        )
    return triples


def relations_from_abbreviations(table: AbbrevTable) -> list[Triple]:
    """One stands-for triple per table entry.

    An entry whose two sides collapse to the same lemma cannot be a
    well-formed triple and is skipped.
    """
    triples = []
    for short, long_form in table.items():
        head, tail = lemma_of(short), lemma_of(long_form)
        if head == tail:
            continue
        triples.append(
            Triple(
                head=head,
                relation="stands_for",
                tail=tail,
                head_surface=short,
                tail_surface=long_form,
                provenance="abbreviations",
            )
        )
    return triples


# ---------------------------------------------------------------------------
# Flat triple files: head<TAB>relation<TAB>tail<TAB>provenance, where a
# verb_phrase relation carries its phrase as `verb_phrase:<text>`.


def write_triples(triples: list[Triple]) -> str:
    lines = []
    for t in triples:
        rel = t.relation
        if t.relation == "verb_phrase":
            rel = f"verb_phrase:{t.phrase}"
        lines.append(f"{t.head}\t{rel}\t{t.tail}\t{t.provenance}")
    return "".join(line + "\n" for line in lines)


def read_triples(path) -> list[Triple]:
    triples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise ParseError(
                    "expected head<TAB>relation<TAB>tail<TAB>provenance",
                    lineno,
                )
            head, rel, tail, provenance = cols
            if not head or not tail:
                raise ParseError("empty head or tail", lineno)
            phrase = None
            if rel.startswith("verb_phrase:"):
                rel, phrase = "verb_phrase", rel[len("verb_phrase:") :]
            if rel not in RELATION_KINDS or (
                rel == "verb_phrase" and not phrase
            ):
                raise ParseError(f"unknown relation {rel!r}", lineno)
            triples.append(
                Triple(
                    head=head,
                    relation=rel,
                    tail=tail,
                    head_surface=head,
                    tail_surface=tail,
                    phrase=phrase,
                    provenance=provenance,
                )
            )
    return triples


def dedupe(triples: list[Triple]) -> list[Triple]:
    """Drop repeats of (head, relation, tail, phrase), keeping first."""
    seen = set()
    out = []
    for t in triples:
        key = (t.head, t.relation, t.tail, t.phrase)
        if key in seen:
            continue
        seen.add(key)
        out.append(t)
    return out
