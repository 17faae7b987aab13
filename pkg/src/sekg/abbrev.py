"""Parenthetical abbreviation detection and expansion.

A candidate is a single parenthesized token starting with a capital
letter, e.g. "( TRLs )". Expansion segments the candidate at its
capital letters and matches the segments right to left against the
words before the open parenthesis: "TRLs" resolves against
"Technology Readiness Levels", "ConOps" against "Concept of
Operations".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Sentence, Token
from .errors import DuplicateShortForm, ParseError

# The in-parentheses shape that counts as a candidate: one token of
# letters led by a capital.
CANDIDATE_PATTERN = re.compile(r"\([ ]*[A-Z][A-Za-z]*[ ]*\)")

_CANDIDATE_TOKEN = re.compile(r"[A-Z][A-Za-z]*$")

# Function words that may sit inside a long form without consuming a
# segment of the short form.
SKIPPABLE_WORDS = frozenset(("of", "the", "for", "and", "to", "in", "on"))

DEFAULT_WINDOW = 8


@dataclass(frozen=True)
class Abbreviation:
    """A short form tied to the long form it was expanded from."""

    short_form: str
    long_form: str
    sentence_id: str = ""
    span: tuple[int, int] = (0, 0)  # token range of the long form


@dataclass(frozen=True)
class Candidate:
    """A parenthesized token eligible for expansion."""

    surface: str
    token_index: int
    open_index: int


class AbbrevTable:
    """Immutable short form -> long form map."""

    def __init__(self, entries: dict[str, str]):
        for short, long in entries.items():
            if short == long:
                raise ParseError(f"short form {short!r} maps to itself")
        self.entries = dict(entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, short):
        return short in self.entries

    def get(self, short: str) -> str | None:
        return self.entries.get(short)

    def items(self):
        return self.entries.items()


def find_candidates(sentence: Sentence) -> list[Candidate]:
    """All single parenthesized tokens shaped like an abbreviation.

    Requires parentheses to be standalone tokens. Multi-token
    parentheticals are never candidates.
    """
    toks = sentence.tokens
    out = []
    for i in range(len(toks) - 2):
        if (
            toks[i].surface == "("
            and toks[i + 2].surface == ")"
            and _CANDIDATE_TOKEN.match(toks[i + 1].surface)
        ):
            out.append(Candidate(toks[i + 1].surface, i + 1, i))
    return out


def _segments(candidate: str) -> list[str]:
    """Split at capital letters: "ConOps" -> ["Con", "Ops"]."""
    return re.findall(r"[A-Z][a-z0-9]*", candidate)


def _matches(segment: str, word: str) -> bool:
    word = word.lower()
    seg = segment.lower()
    if word.startswith(seg):
        return True
    return len(seg) == 1 and word[:1] == seg


def expand(
    candidate: str,
    preceding: list[Token],
    sentence_id: str = "",
    offset: int = 0,
) -> Abbreviation | None:
    """Expand a candidate against the words right before its parenthesis.

    One trailing lowercase 's' is ignored while matching (TRLs -> TRL).
    Segments are consumed right to left; a segment matches a word when
    the word starts with it or the segment is the word's initial letter.
    Words in SKIPPABLE_WORDS may be passed over without consuming a
    segment. `offset` is the token index of `preceding[0]` in the source
    sentence, used to report the long-form span. Returns None when no
    complete match exists.

    The stored short form keeps the candidate's spelling; only a pure
    initialism (every segment a single capital) drops the plural 's'
    (TRLs -> TRL, but ConOps stays ConOps).
    """
    core = candidate
    if len(core) > 1 and core.endswith("s"):
        core = core[:-1]
    segments = _segments(core)
    if not segments or "".join(segments) != core:
        return None

    words = [t.surface for t in preceding]
    si = len(segments) - 1
    wi = len(words) - 1
    last_matched = None
    while si >= 0:
        if wi < 0:
            return None
        word = words[wi]
        if _matches(segments[si], word):
            if last_matched is None:
                last_matched = wi
            first_matched = wi
            si -= 1
            wi -= 1
        elif word.lower() in SKIPPABLE_WORDS and last_matched is not None:
            wi -= 1
        else:
            return None

    initialism = all(len(s) == 1 for s in segments)
    short = core if initialism else candidate
    long_form = " ".join(words[first_matched : last_matched + 1])
    return Abbreviation(
        short_form=short,
        long_form=long_form,
        sentence_id=sentence_id,
        span=(offset + first_matched, offset + last_matched + 1),
    )


def is_sound(abbr: Abbreviation) -> bool:
    """Check that every capital of the short form maps, in order, to a
    word of the long form it could begin."""
    words = abbr.long_form.split()
    wi = 0
    for ch in abbr.short_form:
        if not ch.isupper():
            continue
        while wi < len(words) and not words[wi].lower().startswith(ch.lower()):
            wi += 1
        if wi >= len(words):
            return False
        wi += 1
    return True


def extract_abbreviations(
    sentences: list[Sentence], window: int = DEFAULT_WINDOW
) -> tuple[list[Abbreviation], list[str]]:
    """Run detection and expansion over a document.

    The first expansion of a short form wins; later conflicting
    expansions are dropped and reported as warnings.
    """
    found: list[Abbreviation] = []
    seen: dict[str, str] = {}
    warnings: list[str] = []
    for sentence in sentences:
        for cand in find_candidates(sentence):
            lo = max(0, cand.open_index - window)
            abbr = expand(
                cand.surface,
                list(sentence.tokens[lo : cand.open_index]),
                sentence_id=sentence.source_id,
                offset=lo,
            )
            if abbr is None:
                continue
            prior = seen.get(abbr.short_form)
            if prior is None:
                seen[abbr.short_form] = abbr.long_form
                found.append(abbr)
            elif prior.lower() != abbr.long_form.lower():
                warnings.append(
                    f"{abbr.sentence_id}: {abbr.short_form} already expands "
                    f"to {prior!r}; ignoring {abbr.long_form!r}"
                )
    return found, warnings


def load_appendix(path) -> AbbrevTable:
    """Read a `short<TAB>long` TSV into a table.

    Duplicate short forms and malformed rows are hard errors.
    """
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                raise ParseError("expected short<TAB>long", lineno)
            short, long = cols
            if short in entries:
                raise DuplicateShortForm(short, lineno)
            if short == long:
                raise ParseError(
                    f"short form {short!r} maps to itself", lineno
                )
            entries[short] = long
    return AbbrevTable(entries)


def write_abbreviations(abbrevs: list[Abbreviation]) -> str:
    """Serialize extraction output as `short<TAB>long<TAB>sentence_id`."""
    lines = [
        f"{a.short_form}\t{a.long_form}\t{a.sentence_id}" for a in abbrevs
    ]
    return "".join(line + "\n" for line in lines)


def read_abbreviations(path) -> list[Abbreviation]:
    """Parse the write_abbreviations format back. Spans are not stored
    in the file, so they come back empty."""
    out: list[Abbreviation] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3 or not cols[0] or not cols[1]:
                raise ParseError(
                    "expected short<TAB>long<TAB>sentence_id", lineno
                )
            out.append(Abbreviation(cols[0], cols[1], cols[2], (0, 0)))
    return out
