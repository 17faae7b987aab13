"""Glossary definitions: parsing, head-noun lemmas, suffix hyponyms.

A definitions file is a sequence of records separated by blank lines.
The first line of a record is the term; the remaining lines are its
definition text and are joined with single spaces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

# Irregular plurals seen as head nouns. Keys are lowercase; the
# replacement is re-cased to match the input word.
_IRREGULAR = {
    "analyses": "analysis",
    "appendices": "appendix",
    "axes": "axis",
    "bases": "basis",
    "children": "child",
    "crises": "crisis",
    "criteria": "criterion",
    "data": "data",
    "feet": "foot",
    "hypotheses": "hypothesis",
    "indices": "index",
    "lives": "life",
    "matrices": "matrix",
    "media": "medium",
    "men": "man",
    "people": "person",
    "phenomena": "phenomenon",
    "series": "series",
    "species": "species",
    "statuses": "status",
    "syntheses": "synthesis",
    "women": "woman",
}


def _match_case(repl: str, like: str) -> str:
    if len(like) > 1 and like.isupper():
        return repl.upper()
    if like[:1].isupper():
        return repl[:1].upper() + repl[1:]
    return repl


def _singular_step(word: str) -> str:
    lower = word.lower()
    mapped = _IRREGULAR.get(lower)
    if mapped is not None:
        return _match_case(mapped, word)
    if len(lower) >= 5 and lower.endswith("ies"):
        return word[:-3] + _match_case("y", word[-3:])
    if lower.endswith("sses"):
        return word[:-2]
    if lower.endswith(("xes", "ches", "shes", "zes")):
        return word[:-2]
    if (
        len(lower) >= 4
        and lower.endswith("s")
        and not lower.endswith(("ss", "us", "is"))
    ):
        return word[:-1]
    return word


def lemmatize_head(word: str) -> str:
    """Singularize one head noun.

    Table lookup first, then suffix rules, repeated until nothing
    changes, so applying the function to its own output changes
    nothing even when a stripped form lands on a table entry.
    """
    while True:
        reduced = _singular_step(word)
        if reduced == word:
            return word
        word = reduced


@dataclass(frozen=True)
class Definition:
    term: str
    text: str
    line: int  # line number of the term in the source file


def parse_definitions(lines) -> list[Definition]:
    """Split blank-line-separated records into Definition values.

    The term line may carry a trailing colon, period, or semicolon;
    that punctuation is dropped. A record whose term is empty after
    stripping is a ParseError.
    """
    records: list[Definition] = []
    term: str | None = None
    term_line = 0
    body: list[str] = []

    def flush():
        nonlocal term, body
        if term is None:
            return
        records.append(Definition(term, " ".join(body), term_line))
        term, body = None, []

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").strip()
        if not line:
            flush()
            continue
        if term is None:
            cleaned = line.rstrip(":;.").strip()
            if not cleaned:
                raise ParseError("record has an empty term", lineno)
            term = cleaned
            term_line = lineno
        else:
            body.append(line)
    flush()
    return records


def load_definitions(path) -> list[Definition]:
    with open(path, encoding="utf-8") as fh:
        return parse_definitions(fh)


def _term_key(term: str) -> tuple[str, ...]:
    words = term.split()
    if not words:
        return ()
    head = lemmatize_head(words[-1]).lower()
    return tuple(w.lower() for w in words[:-1]) + (head,)


def hyponyms_from_definitions(entries: list[Definition]) -> list:
    """Derive subset-of triples from term structure.

    A term whose word sequence ends with another defined term names a
    narrower concept: "Acceptable Risk" ends with the defined term
    "Risk", so it is treated as a kind of risk. The longest proper
    suffix wins when several defined terms qualify. Comparison is on
    lowercased words with the head noun lemmatized, so plural heads
    still line up. Edges always point from the longer term to a
    strictly shorter one, which rules out cycles.
    """
    from .hyponym import Triple, lemma_of  # here to avoid an import cycle

    keyed: list[tuple[tuple[str, ...], Definition]] = []
    known: dict[tuple[str, ...], Definition] = {}
    for entry in entries:
        key = _term_key(entry.term)
        if not key:
            continue
        keyed.append((key, entry))
        known.setdefault(key, entry)

    triples = []
    # Visit terms in increasing word count (stable on ties), so output
    # order climbs from general to specific.
    ranked = sorted(enumerate(keyed), key=lambda ik: (len(ik[1][0]), ik[0]))
    for _, (key, entry) in ranked:
        if known.get(key) is not entry:
            continue  # duplicate term; first record owns it
        best: tuple[tuple[str, ...], Definition] | None = None
        for cut in range(1, len(key)):
            suffix = key[cut:]
            target = known.get(suffix)
            if target is not None:
                best = (suffix, target)
                break  # longest suffix first
        if best is None:
            continue
        _, target = best
        triples.append(
            Triple(
                head=lemma_of(entry.term),
                relation="subset_of",
                tail=lemma_of(target.term),
                head_surface=entry.term,
                tail_surface=target.term,
                provenance="definitions",
            )
        )
    return triples
