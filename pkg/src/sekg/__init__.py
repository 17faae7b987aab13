"""Concept recognition and knowledge-graph assembly for engineering text.

The package is organized as a pipeline: `corpus` turns raw text into
tokenized, POS-tagged sentences; `abbrev` pairs short forms with their
spelled-out expansions; `bio` and `tagger` handle sequence labels over
a closed concept-tag set; `defs`, `hyponym`, and `chunker` derive
typed relations; `kg` assembles and exports the resulting graph. The
`sekg` console script chains the steps from files.
"""

from .abbrev import (
    AbbrevTable,
    Abbreviation,
    extract_abbreviations,
    load_appendix,
)
from .bio import (
    LABELS,
    TAGS,
    Entity,
    LabeledSentence,
    decode_entities,
    parse_conll,
    repair_bio,
    tag_histogram,
    validate_bio,
    write_conll,
)
from .chunker import VP_GRAMMAR, chunk, compile_grammar, extract_vp_relations
from .corpus import (
    PosLexicon,
    Sentence,
    Token,
    normalize_text,
    pos_tag,
    split_sentences,
    tokenize,
)
from .defs import (
    Definition,
    hyponyms_from_definitions,
    lemmatize_head,
    load_definitions,
)
from .errors import SekgError
from .hyponym import Triple, hyponyms_from_pos, relations_from_abbreviations
from .kg import KnowledgeGraph, build_graph, export_dot, export_json, import_json
from .tagger import Metrics, SequenceTagger, evaluate, split_corpus, train

__version__ = "0.1.0"

__all__ = [
    "AbbrevTable",
    "Abbreviation",
    "Definition",
    "Entity",
    "KnowledgeGraph",
    "LABELS",
    "LabeledSentence",
    "Metrics",
    "PosLexicon",
    "Sentence",
    "SekgError",
    "SequenceTagger",
    "TAGS",
    "Token",
    "Triple",
    "VP_GRAMMAR",
    "build_graph",
    "chunk",
    "compile_grammar",
    "decode_entities",
    "evaluate",
    "export_dot",
    "export_json",
    "extract_abbreviations",
    "extract_vp_relations",
    "hyponyms_from_definitions",
    "hyponyms_from_pos",
    "import_json",
    "lemmatize_head",
    "load_appendix",
    "load_definitions",
    "normalize_text",
    "parse_conll",
    "pos_tag",
    "relations_from_abbreviations",
    "repair_bio",
    "split_corpus",
    "split_sentences",
    "tag_histogram",
    "tokenize",
    "train",
    "validate_bio",
    "write_conll",
]
