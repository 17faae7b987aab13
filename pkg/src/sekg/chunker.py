"""Tag-pattern chunk grammars compiled to finite automata.

A grammar rule looks like

    VP: {(<MD>|<R.*>|<VB.*>)*<VB.*>+}

The pattern is a regular expression over a POS-tag alphabet: each
angle-bracket atom holds a regex matched against one whole tag, and
atoms compose with concatenation, alternation `|`, grouping `( )`, and
the closures `*` `+` `?`. Compilation parses the pattern into an AST
and builds a Thompson-style NFA; matching simulates the NFA with
epsilon closures. Chunking scans left to right emitting the longest
match at each position (leftmost-longest, non-overlapping, never
empty).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .bio import Entity
from .corpus import Sentence
from .errors import PatternSyntaxError
from .hyponym import Triple, lemma_of

# Verb-phrase grammar: optional modal/adverb/preposition/verb/adjective
# material around at least one verb.
VP_GRAMMAR = (
    "VP: {(<MD>|<R.*>|<I.*>|<VB.*>|<JJ.*>|<TO>)*"
    "<VB.*>+"
    "(<MD>|<R.*>|<I.*>|<VB.*>|<JJ.*>|<TO>)*}"
)

_VERB_TAG = re.compile(r"VB.*\Z")


# ---------------------------------------------------------------------------
# Pattern AST


@dataclass(frozen=True)
class Atom:
    """One angle-bracket matcher; `source` is anchored against a full tag."""

    source: str


@dataclass(frozen=True)
class Seq:
    parts: tuple


@dataclass(frozen=True)
class Alt:
    choices: tuple


@dataclass(frozen=True)
class Repeat:
    """Closure over `inner`: op is one of '*', '+', '?'."""

    inner: object
    op: str


@dataclass(frozen=True)
class TagPattern:
    root: object
    source: str


class _Parser:
    """Recursive-descent parser for the pattern body (between braces)."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, reason: str, pos: int | None = None):
        raise PatternSyntaxError(reason, self.pos if pos is None else pos)

    def peek(self) -> str | None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def parse(self):
        node = self.alternation()
        if self.peek() is not None:
            self.fail(f"unexpected {self.text[self.pos]!r}")
        return node

    def alternation(self):
        choices = [self.sequence()]
        while self.peek() == "|":
            self.pos += 1
            choices.append(self.sequence())
        if len(choices) == 1:
            return choices[0]
        return Alt(tuple(choices))

    def sequence(self):
        parts = []
        while True:
            ch = self.peek()
            if ch is None or ch in ")|":
                break
            parts.append(self.repetition())
        if not parts:
            self.fail("empty alternative")
        if len(parts) == 1:
            return parts[0]
        return Seq(tuple(parts))

    def repetition(self):
        node = self.primary()
        ch = self.peek()
        if ch in ("*", "+", "?"):
            self.pos += 1
            node = Repeat(node, ch)
        return node

    def primary(self):
        ch = self.peek()
        if ch == "<":
            return self.atom()
        if ch == "(":
            open_pos = self.pos
            self.pos += 1
            node = self.alternation()
            if self.peek() != ")":
                self.fail("unbalanced '('", open_pos)
            self.pos += 1
            return node
        if ch is None:
            self.fail("pattern ended unexpectedly")
        self.fail(f"dangling {ch!r}")

    def atom(self):
        open_pos = self.pos
        close = self.text.find(">", self.pos + 1)
        if close < 0:
            self.fail("unbalanced '<'", open_pos)
        source = self.text[self.pos + 1 : close].strip()
        if not source:
            self.fail("empty atom", open_pos)
        try:
            re.compile(source)
        except re.error as exc:
            self.fail(f"bad atom regex {source!r}: {exc}", open_pos)
        self.pos = close + 1
        return Atom(source)


_RULE_SHAPE = re.compile(r"\s*([A-Za-z_][\w.-]*)\s*:\s*\{(.*)\}\s*\Z", re.DOTALL)


def parse_pattern(body: str) -> TagPattern:
    root = _Parser(body).parse()
    return TagPattern(root, pretty(root))


def pretty(node) -> str:
    """Canonical text of a pattern node; stable under reparsing."""
    if isinstance(node, Atom):
        return f"<{node.source}>"
    if isinstance(node, Seq):
        return "".join(pretty(p) for p in node.parts)
    if isinstance(node, Alt):
        return "(" + "|".join(pretty(c) for c in node.choices) + ")"
    if isinstance(node, Repeat):
        inner = pretty(node.inner)
        if isinstance(node.inner, (Seq, Repeat)):
            inner = "(" + inner + ")"
        return inner + node.op
    raise TypeError(f"not a pattern node: {node!r}")


# ---------------------------------------------------------------------------
# Thompson construction and simulation

_EPS = None


class _Nfa:
    def __init__(self):
        self.transitions: list[list] = []  # state -> [(matcher_index, dest)]
        self.matchers: list = []  # compiled tag regexes
        self._matcher_ids: dict[str, int] = {}
        self.start = 0
        self.accept = 0

    def state(self) -> int:
        self.transitions.append([])
        return len(self.transitions) - 1

    def matcher(self, source: str) -> int:
        idx = self._matcher_ids.get(source)
        if idx is None:
            idx = len(self.matchers)
            self.matchers.append(re.compile(source + r"\Z"))
            self._matcher_ids[source] = idx
        return idx

    def edge(self, src: int, matcher: int | None, dst: int):
        self.transitions[src].append((matcher, dst))


def _build(nfa: _Nfa, node) -> tuple[int, int]:
    """Thompson fragment for `node`: returns (entry, exit) states."""
    if isinstance(node, Atom):
        a, b = nfa.state(), nfa.state()
        nfa.edge(a, nfa.matcher(node.source), b)
        return a, b
    if isinstance(node, Seq):
        entry, cur = None, None
        for part in node.parts:
            a, b = _build(nfa, part)
            if entry is None:
                entry = a
            else:
                nfa.edge(cur, _EPS, a)
            cur = b
        return entry, cur
    if isinstance(node, Alt):
        entry, exit_ = nfa.state(), nfa.state()
        for choice in node.choices:
            a, b = _build(nfa, choice)
            nfa.edge(entry, _EPS, a)
            nfa.edge(b, _EPS, exit_)
        return entry, exit_
    if isinstance(node, Repeat):
        a, b = _build(nfa, node.inner)
        entry, exit_ = nfa.state(), nfa.state()
        nfa.edge(entry, _EPS, a)
        nfa.edge(b, _EPS, exit_)
        if node.op in ("*", "?"):
            nfa.edge(entry, _EPS, exit_)
        if node.op in ("*", "+"):
            nfa.edge(b, _EPS, a)
        return entry, exit_
    raise TypeError(f"not a pattern node: {node!r}")


def _compile_nfa(pattern: TagPattern) -> _Nfa:
    nfa = _Nfa()
    entry, exit_ = _build(nfa, pattern.root)
    nfa.start, nfa.accept = entry, exit_
    return nfa


@dataclass(frozen=True)
class Chunk:
    rule: str
    start: int
    end: int


@dataclass
class ChunkRule:
    """A named, compiled tag pattern."""

    name: str
    pattern: TagPattern
    _nfa: _Nfa = field(repr=False, compare=False, default=None)
    _match_cache: dict = field(repr=False, compare=False, default_factory=dict)

    def source(self) -> str:
        """Canonical `NAME: {pattern}` text for this rule."""
        return f"{self.name}: {{{self.pattern.source}}}"

    def _closure(self, states: set[int]) -> frozenset[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            s = stack.pop()
            for matcher, dst in self._nfa.transitions[s]:
                if matcher is _EPS and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return frozenset(seen)

    def _matches(self, matcher: int, tag: str) -> bool:
        key = (matcher, tag)
        hit = self._match_cache.get(key)
        if hit is None:
            hit = self._nfa.matchers[matcher].match(tag) is not None
            self._match_cache[key] = hit
        return hit

    def _step(self, states: frozenset[int], tag: str) -> frozenset[int]:
        nxt = set()
        for s in states:
            for matcher, dst in self._nfa.transitions[s]:
                if matcher is not _EPS and self._matches(matcher, tag):
                    nxt.add(dst)
        return self._closure(nxt) if nxt else frozenset()

    def accepts(self, tags) -> bool:
        states = self._closure({self._nfa.start})
        for tag in tags:
            states = self._step(states, tag)
            if not states:
                return False
        return self._nfa.accept in states

    def longest_match(self, tags, start: int) -> int | None:
        """End of the longest non-empty match beginning at `start`."""
        states = self._closure({self._nfa.start})
        best = None
        for i in range(start, len(tags)):
            states = self._step(states, tags[i])
            if not states:
                break
            if self._nfa.accept in states:
                best = i + 1
        return best


def compile_grammar(source: str) -> ChunkRule:
    """Compile one `NAME: { pattern }` rule.

    Whitespace inside the braces is insignificant. Raises
    PatternSyntaxError on malformed input.
    """
    m = _RULE_SHAPE.match(source)
    if m is None:
        raise PatternSyntaxError(
            "expected NAME: { pattern }", 0
        )
    name, body = m.group(1), m.group(2)
    if "{" in body or "}" in body:
        bad = min(i for i in (body.find("{"), body.find("}")) if i >= 0)
        raise PatternSyntaxError(
            "nested braces are not supported", m.start(2) + bad
        )
    pattern = parse_pattern(body)
    rule = ChunkRule(name, pattern)
    rule._nfa = _compile_nfa(pattern)
    return rule


def load_grammar(path) -> ChunkRule:
    """Read a grammar file holding one rule."""
    with open(path, encoding="utf-8") as fh:
        return compile_grammar(fh.read())


def chunk(rule: ChunkRule, tags) -> list[Chunk]:
    """Leftmost-longest, non-overlapping matches over a tag sequence."""
    tags = list(tags)
    out = []
    pos = 0
    while pos < len(tags):
        end = rule.longest_match(tags, pos)
        if end is None:
            pos += 1
        else:
            out.append(Chunk(rule.name, pos, end))
            pos = end
    return out


def extract_vp_relations(
    sentence: Sentence, entities: list[Entity], rule: ChunkRule
) -> list[Triple]:
    """Link adjacent entity pairs through a verb-phrase chunk.

    For each adjacent pair, the tokens strictly between them are
    chunked; the first chunk containing at least one VB-family tag
    becomes the relation phrase. Gaps without a verb yield nothing.
    """
    ordered = sorted(entities, key=lambda e: e.start)
    triples = []
    for left, right in zip(ordered, ordered[1:]):
        gap = sentence.tokens[left.end : right.start]
        if not gap or lemma_of(left.surface) == lemma_of(right.surface):
            continue
        tags = [t.pos or "" for t in gap]
        for ch in chunk(rule, tags):
            if not any(_VERB_TAG.match(t) for t in tags[ch.start : ch.end]):
                continue
            phrase = " ".join(t.surface for t in gap[ch.start : ch.end])
            triples.append(
                Triple(
                    head_surface=left.surface,
                    head=lemma_of(left.surface),
                    relation="verb_phrase",
                    tail_surface=right.surface,
                    tail=lemma_of(right.surface),
                    phrase=phrase,
                    provenance=sentence.source_id,
                )
            )
            break
    return triples
