"""The 11-class concept label set, BIO tag algebra, and dataset I/O.

Tags are handled as their serialized strings ("O", "B-opcon", ...).
The vocabulary is closed: anything outside the 23 tags is a hard error,
never silently mapped to O.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Sentence, Token
from .errors import InvalidSequence, ParseError, UnknownTag

LABELS = (
    "abb",
    "grp",
    "syscon",
    "opcon",
    "seterm",
    "event",
    "org",
    "art",
    "cardinal",
    "loc",
    "mea",
)

OUTSIDE = "O"

TAGS = (OUTSIDE,) + tuple(
    f"{prefix}-{label}" for label in LABELS for prefix in ("B", "I")
)

_TAG_SET = frozenset(TAGS)


def split_tag(tag: str) -> tuple[str, str | None]:
    """"B-opcon" -> ("B", "opcon"); "O" -> ("O", None)."""
    if tag == OUTSIDE:
        return OUTSIDE, None
    prefix, _, label = tag.partition("-")
    return prefix, label


def is_valid_tag(tag: str) -> bool:
    return tag in _TAG_SET


@dataclass(frozen=True)
class LabeledSentence:
    sentence: Sentence
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.tags) != len(self.sentence.tokens):
            raise ValueError("one tag per token required")


@dataclass(frozen=True)
class Entity:
    """A labeled token span; `end` is exclusive."""

    label: str
    start: int
    end: int
    surface: str


def validate_bio(tags) -> list[tuple[int, str]]:
    """Indexes and reasons for every I-tag without a matching B/I before
    it. Empty list means the sequence is valid."""
    violations = []
    prev = OUTSIDE
    for i, tag in enumerate(tags):
        prefix, label = split_tag(tag)
        if prefix == "I":
            prev_prefix, prev_label = split_tag(prev)
            if prev_prefix == OUTSIDE:
                violations.append((i, f"I-{label} after O"))
            elif prev_label != label:
                violations.append((i, f"I-{label} after {prev}"))
        prev = tag
    return violations


def repair_bio(tags) -> list[str]:
    """Promote every stranded I-tag to B. Valid input comes back
    unchanged; output always passes validate_bio."""
    repaired = list(tags)
    for i, _reason in validate_bio(tags):
        label = split_tag(repaired[i])[1]
        repaired[i] = f"B-{label}"
    return repaired


def decode_entities(ls: LabeledSentence) -> list[Entity]:
    """Maximal B-x (I-x)* runs, in order. Raises InvalidSequence on
    tags that fail validate_bio."""
    bad = validate_bio(ls.tags)
    if bad:
        i, reason = bad[0]
        raise InvalidSequence(f"index {i}: {reason}")
    return [
        Entity(label, start, end, _span_surface(ls.sentence, start, end))
        for label, start, end in entity_spans(ls.tags)
    ]


def entity_spans(tags) -> list[tuple[str, int, int]]:
    """(label, start, end) for each B-x (I-x)* run; assumes valid tags."""
    spans = []
    start = None
    label = None
    for i, tag in enumerate(tags):
        prefix, tag_label = split_tag(tag)
        if prefix == "I" and label == tag_label:
            continue
        if start is not None:
            spans.append((label, start, i))
            start = None
            label = None
        if prefix == "B":
            start = i
            label = tag_label
    if start is not None:
        spans.append((label, start, len(tags)))
    return spans


def encode_entities(n_tokens: int, spans) -> list[str]:
    """Inverse of entity_spans: (label, start, end) triples to tags."""
    tags = [OUTSIDE] * n_tokens
    for label, start, end in spans:
        tags[start] = f"B-{label}"
        for i in range(start + 1, end):
            tags[i] = f"I-{label}"
    return tags


def _span_surface(sentence: Sentence, start: int, end: int) -> str:
    return " ".join(t.surface for t in sentence.tokens[start:end])


def parse_conll(path) -> list[LabeledSentence]:
    """Read labeled sentences from `surface<TAB>tag[<TAB>pos]` rows
    separated by blank lines."""
    with open(path, encoding="utf-8") as fh:
        return parse_conll_lines(fh)


def parse_conll_lines(lines) -> list[LabeledSentence]:
    out: list[LabeledSentence] = []
    rows: list[tuple[str, str, str | None]] = []

    def flush():
        if not rows:
            return
        tokens = []
        offset = 0
        for surface, _tag, pos in rows:
            tokens.append(Token(surface, offset, pos))
            offset += len(surface) + 1
        tags = tuple(tag for _s, tag, _p in rows)
        out.append(
            LabeledSentence(
                Sentence(tuple(tokens), f"c:{len(out) + 1}"), tags
            )
        )
        rows.clear()

    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            flush()
            continue
        cols = line.split("\t")
        if len(cols) not in (2, 3) or not cols[0] or not cols[1]:
            raise ParseError("expected surface<TAB>tag[<TAB>pos]", lineno)
        tag = cols[1]
        if not is_valid_tag(tag):
            raise UnknownTag(tag, lineno)
        pos = cols[2] if len(cols) == 3 and cols[2] else None
        rows.append((cols[0], tag, pos))
    flush()
    return out


def write_conll(corpus: list[LabeledSentence]) -> str:
    """Canonical serialization: one blank line between sentences, a
    single trailing newline, pos column only where present."""
    blocks = []
    for ls in corpus:
        lines = []
        for tok, tag in zip(ls.sentence.tokens, ls.tags):
            if tok.pos is not None:
                lines.append(f"{tok.surface}\t{tag}\t{tok.pos}")
            else:
                lines.append(f"{tok.surface}\t{tag}")
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def tag_histogram(corpus: list[LabeledSentence]) -> dict[str, int]:
    """Serialized-tag counts over every token of the corpus."""
    counts = Counter()
    for ls in corpus:
        counts.update(ls.tags)
    return dict(counts)


def write_histogram(counts: dict[str, int]) -> str:
    """`tag<TAB>count` rows, count descending, tag ascending on ties."""
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return "".join(f"{tag}\t{n}\n" for tag, n in ordered)
