"""Exception types shared across the toolkit.

Every error raised on bad user data derives from SekgError so callers
(and the CLI) can distinguish data problems from programming bugs.
"""

from __future__ import annotations


class SekgError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SekgError):
    """A file or record could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingLexicon(SekgError):
    """POS tagging was requested with an empty lexicon."""


class DuplicateShortForm(SekgError):
    """An abbreviation table maps the same short form twice."""

    def __init__(self, short: str, line: int | None = None):
        self.short = short
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate short form {short!r}{where}")


class UnknownTag(SekgError):
    """A tag outside the closed BIO tag vocabulary."""

    def __init__(self, tag: str, line: int | None = None):
        self.tag = tag
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown tag {tag!r}{where}")


class InvalidSequence(SekgError):
    """A tag sequence violates the BIO well-formedness rules."""


class EmptyCorpus(SekgError):
    """Training was requested on an empty corpus."""


class ShapeMismatch(SekgError):
    """Gold and predicted structures do not line up."""


class UnknownNode(SekgError):
    """A graph query referenced a node id that does not exist."""

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node {node_id!r}")


class PatternSyntaxError(SekgError):
    """A chunk grammar could not be compiled."""

    def __init__(self, reason: str, position: int):
        self.position = position
        self.reason = reason
        super().__init__(f"at position {position}: {reason}")


class ModelFormatError(SekgError):
    """A serialized model file has the wrong format or version."""
