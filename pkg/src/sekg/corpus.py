"""Text normalization, sentence splitting, tokenization, and POS tagging.

Turns raw extracted text into clean, tokenized, sentence-segmented input
for the labeling and extraction stages. All functions are pure; Sentence
and Token are immutable values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .errors import MissingLexicon, ParseError

# Runs of 3+ identical non-alphanumeric, non-whitespace characters are
# formatting noise; runs of 2 (e.g. "--" ranges) are kept.
_DUP_RUN = re.compile(r"([^\w\s])\1{2,}")

# A URL is a scheme:// or www. prefix plus the rest of its
# non-whitespace run.
_URL = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)

_SPACES = re.compile(r"[ \t]+")

# Word-ish tokens: decimals, then letter/digit runs glued by internal
# hyphens or apostrophes; any other non-space character stands alone,
# which guarantees parentheses come out as their own tokens.
_TOKEN = re.compile(r"\d+\.\d+|[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*|\S")

# Short forms after which a period does not end a sentence.
_NONFINAL_ABBREVS = frozenset(
    "fig figs eq eqs sec no nos vol pp ref refs cf vs etc al e.g i.e "
    "dr mr mrs ms approx dept est".split()
)

_CLOSERS = "\"')]’”"


@dataclass(frozen=True)
class Token:
    """A surface form with its character offset into the source sentence."""

    surface: str
    start: int
    pos: str | None = None

    @property
    def end(self) -> int:
        return self.start + len(self.surface)


@dataclass(frozen=True)
class Sentence:
    """An ordered, non-empty sequence of tokens with provenance."""

    tokens: tuple[Token, ...]
    source_id: str = ""

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("a sentence must contain at least one token")

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def text(self) -> str:
        """Reconstruct the source text from surfaces and offsets."""
        end = self.tokens[-1].end
        chars = [" "] * end
        for tok in self.tokens:
            chars[tok.start : tok.end] = tok.surface
        return "".join(chars)


def normalize_text(raw: str) -> str:
    """Clean raw extracted text.

    Collapses 3+ runs of a repeated non-alphanumeric character, strips
    URLs, joins hard line breaks that fall inside a sentence (a line not
    ending in sentence-final punctuation is glued to the next line of
    its paragraph), and normalizes whitespace. Idempotent.
    """
    text = _DUP_RUN.sub(r"\1", raw)
    text = _URL.sub("", text)

    paragraphs: list[list[str]] = [[]]
    for line in text.split("\n"):
        line = _SPACES.sub(" ", line).strip()
        if not line:
            if paragraphs[-1]:
                paragraphs.append([])
            continue
        paragraphs[-1].append(line)
    if not paragraphs[-1]:
        paragraphs.pop()

    joined = []
    for para in paragraphs:
        parts: list[str] = []
        for line in para:
            if parts and not _ends_sentence(parts[-1]):
                parts[-1] = parts[-1] + " " + line
            else:
                parts.append(line)
        joined.append("\n".join(parts))
    return "\n\n".join(joined)


def _ends_sentence(line: str) -> bool:
    stripped = line.rstrip(_CLOSERS)
    return stripped.endswith((".", "!", "?"))


def split_sentence_texts(raw: str) -> list[str]:
    """Split normalized text into sentence strings.

    Boundaries are sentence-final punctuation followed by whitespace and
    an upper-case/digit/opening continuation. Periods after known short
    forms or a lone capital (initials, "Phase A."-style names) do not
    split. Newlines always end a sentence.
    """
    out = []
    for line in raw.split("\n"):
        line = line.strip()
        if not line:
            continue
        out.extend(_split_line(line))
    return out


def _split_line(line: str) -> list[str]:
    sentences = []
    start = 0
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in ".!?":
            j = i + 1
            while j < n and line[j] in _CLOSERS:
                j += 1
            if j >= n:
                break
            if line[j] == " " and _starts_sentence(line, j + 1):
                if ch != "." or not _abbrev_guard(line, start, i):
                    sentences.append(line[start:j])
                    start = j + 1
                    i = j + 1
                    continue
        i += 1
    tail = line[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _starts_sentence(line: str, k: int) -> bool:
    while k < len(line) and line[k] in "\"'([‘“":
        k += 1
    return k < len(line) and (line[k].isupper() or line[k].isdigit())


def _abbrev_guard(line: str, start: int, dot: int) -> bool:
    """True when the word before the period must not end a sentence."""
    k = dot
    while k > start and (line[k - 1].isalnum() or line[k - 1] == "."):
        k -= 1
    word = line[k:dot]
    if len(word) == 1 and word.isupper():
        return True
    return word.rstrip(".").lower() in _NONFINAL_ABBREVS


def tokenize(sentence_text: str, source_id: str = "") -> Sentence:
    """Tokenize one sentence, recording character offsets.

    Punctuation is split from words; parentheses are always standalone
    tokens; hyphens and apostrophes stay inside words.
    """
    tokens = tuple(
        Token(m.group(), m.start()) for m in _TOKEN.finditer(sentence_text)
    )
    if not tokens:
        raise ValueError("cannot tokenize empty text")
    return Sentence(tokens, source_id)


def split_sentences(raw: str, source_id: str = "s") -> list[Sentence]:
    """Split normalized text into tokenized sentences.

    Sentence ids are numbered "<source_id>:1", "<source_id>:2", ...
    Empty input yields an empty list.
    """
    return [
        tokenize(text, f"{source_id}:{n}")
        for n, text in enumerate(split_sentence_texts(raw), start=1)
    ]


def replace_long_forms(raw: str, table) -> str:
    """Replace every long form in `table` with its short form.

    Matching is case-insensitive on whole-word boundaries and scans
    leftmost-first; where two long forms start at the same position the
    longer one wins.
    """
    entries = getattr(table, "entries", table)
    if not entries:
        return raw
    by_long = {long.lower(): short for short, long in entries.items()}
    longs = sorted(by_long, key=len, reverse=True)
    pattern = re.compile(
        r"(?<!\w)(?:" + "|".join(re.escape(lf) for lf in longs) + r")(?!\w)",
        re.IGNORECASE,
    )
    return pattern.sub(lambda m: by_long[m.group().lower()], raw)


# Most-frequent-tag entries for closed-class words plus a few open-class
# words the suffix rules would get wrong.
_DEFAULT_WORD_TAGS = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT",
    "these": "DT", "those": "DT", "each": "DT", "every": "DT", "all": "DT",
    "some": "DT", "any": "DT", "no": "DT", "another": "DT", "both": "DT",
    "of": "IN", "in": "IN", "on": "IN", "at": "IN", "by": "IN", "for": "IN",
    "with": "IN", "from": "IN", "as": "IN", "into": "IN", "through": "IN",
    "during": "IN", "between": "IN", "against": "IN", "within": "IN",
    "without": "IN", "under": "IN", "over": "IN", "per": "IN", "via": "IN",
    "across": "IN", "after": "IN", "before": "IN", "until": "IN",
    "upon": "IN", "throughout": "IN", "if": "IN", "whether": "IN",
    "because": "IN", "while": "IN", "since": "IN", "than": "IN",
    "and": "CC", "or": "CC", "but": "CC", "nor": "CC",
    "to": "TO",
    "should": "MD", "shall": "MD", "must": "MD", "may": "MD", "might": "MD",
    "can": "MD", "could": "MD", "will": "MD", "would": "MD",
    "be": "VB", "is": "VBZ", "are": "VBP", "was": "VBD", "were": "VBD",
    "been": "VBN", "being": "VBG", "am": "VBP",
    "have": "VBP", "has": "VBZ", "had": "VBD",
    "do": "VBP", "does": "VBZ", "did": "VBD", "done": "VBN",
    "determine": "VB", "define": "VB", "perform": "VB", "verify": "VB",
    "validate": "VB", "provide": "VB", "ensure": "VB", "include": "VB",
    "support": "VB", "conduct": "VB", "establish": "VB", "identify": "VB",
    "develop": "VB", "use": "VB", "manage": "VB", "require": "VB",
    "assess": "VB", "review": "VB", "track": "VB", "document": "VB",
    "maintain": "VB", "evaluate": "VB", "produce": "VB", "derive": "VB",
    "allocate": "VB", "capture": "VB", "mitigate": "VB", "proceed": "VB",
    "exceed": "VB", "meet": "VB", "begins": "VBZ", "begin": "VB",
    "it": "PRP", "they": "PRP", "we": "PRP", "there": "EX",
    "its": "PRP$", "their": "PRP$", "our": "PRP$",
    "which": "WDT", "what": "WDT", "who": "WP", "when": "WRB", "how": "WRB",
    "where": "WRB", "why": "WRB",
    "not": "RB", "also": "RB", "only": "RB", "then": "RB", "well": "RB",
    "never": "RB", "often": "RB", "once": "RB", "early": "RB", "so": "RB",
    "more": "JJR", "most": "JJS", "less": "JJR", "least": "JJS",
    "new": "JJ", "initial": "JJ", "other": "JJ", "such": "JJ", "same": "JJ",
    "key": "JJ", "high": "JJ", "low": "JJ", "full": "JJ", "due": "JJ",
    "many": "JJ", "several": "JJ", "necessary": "JJ", "appropriate": "JJ",
    "acceptable": "JJ", "complete": "JJ", "overall": "JJ", "top": "JJ",
    "one": "CD", "two": "CD", "three": "CD", "four": "CD", "five": "CD",
    "six": "CD", "seven": "CD", "eight": "CD", "nine": "CD", "ten": "CD",
    "zero": "CD",
    "need": "NN", "needs": "NNS", "speed": "NN", "cost": "NN",
    "phase": "NN", "process": "NN", "risk": "NN", "system": "NN",
}

# Ordered (suffix, tag) fallbacks for words missing from the lexicon.
_SUFFIX_RULES = (
    ("ing", "VBG"),
    ("ed", "VBN"),
    ("ly", "RB"),
    ("ion", "NN"), ("ment", "NN"), ("ness", "NN"), ("ity", "NN"),
    ("ance", "NN"), ("ence", "NN"),
    ("ive", "JJ"), ("ous", "JJ"), ("ful", "JJ"), ("able", "JJ"),
    ("ible", "JJ"), ("ic", "JJ"), ("al", "JJ"),
)

_HAS_DIGIT = re.compile(r"\d")
_ALL_NUMERIC = re.compile(r"[\d.,/-]+$")


@dataclass(frozen=True)
class PosLexicon:
    """word -> most-frequent-tag map; suffix fallbacks are built in."""

    words: dict

    @classmethod
    def default(cls) -> "PosLexicon":
        return cls(dict(_DEFAULT_WORD_TAGS))

    @classmethod
    def load(cls, path) -> "PosLexicon":
        """Read a TSV lexicon, one `word<TAB>tag` entry per line."""
        words = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 2 or not cols[0] or not cols[1]:
                    raise ParseError("expected word<TAB>tag", lineno)
                words[cols[0]] = cols[1]
        return cls(words)

    def merged(self, other: "PosLexicon") -> "PosLexicon":
        """Entries of `other` override entries of self."""
        combined = dict(self.words)
        combined.update(other.words)
        return PosLexicon(combined)

    def lookup(self, word: str) -> str | None:
        tag = self.words.get(word)
        if tag is None:
            tag = self.words.get(word.lower())
        return tag


def guess_tag(word: str) -> str:
    """Suffix-rule fallback tag for a word not in the lexicon."""
    if _HAS_DIGIT.search(word) and _ALL_NUMERIC.match(word):
        return "CD"
    if word[0].isupper():
        return "NNP"
    lower = word.lower()
    if lower.endswith("s") and not lower.endswith(("ss", "us", "is")):
        return "NNS"
    for suffix, tag in _SUFFIX_RULES:
        if len(lower) > len(suffix) + 1 and lower.endswith(suffix):
            return tag
    if not word[0].isalnum():
        return word[0]
    return "NN"


def pos_tag(sentence: Sentence, lexicon: PosLexicon) -> Sentence:
    """Attach a POS tag to every token.

    Lexicon lookup first (exact, then lowercased), suffix rules for the
    rest. Raises MissingLexicon on an empty lexicon.
    """
    if not lexicon.words:
        raise MissingLexicon("the POS lexicon has no entries")
    tagged = tuple(
        replace(tok, pos=lexicon.lookup(tok.surface) or guess_tag(tok.surface))
        for tok in sentence.tokens
    )
    return Sentence(tagged, sentence.source_id)


def read_pretagged(path) -> list[Sentence]:
    """Read CoNLL-style pre-tagged text: `surface<TAB>pos` rows, blank
    line between sentences. Offsets are synthesized as single-space
    joins."""
    sentences = []
    rows: list[tuple[str, str]] = []

    def flush():
        if not rows:
            return
        tokens = []
        offset = 0
        for surface, pos in rows:
            tokens.append(Token(surface, offset, pos))
            offset += len(surface) + 1
        sentences.append(Sentence(tuple(tokens), f"t:{len(sentences) + 1}"))
        rows.clear()

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush()
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                raise ParseError("expected surface<TAB>pos", lineno)
            rows.append((cols[0], cols[1]))
    flush()
    return sentences
