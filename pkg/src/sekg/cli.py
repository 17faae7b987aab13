"""Command-line front end.

Subcommands cover the whole pipeline: raw text in, concept graph out.
Every output file is written atomically (temp file in the target
directory, then rename). Exit status is 0 on success, 1 for usage
problems, 2 when input data cannot be processed.

A `--config FILE` of key=value lines can stand in for any flag;
values given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import abbrev as abbrev_mod
from . import bio, chunker, corpus, defs, hyponym, kg, tagger
from .errors import SekgError

PROG = "sekg"

# Flags each subcommand cannot run without. They are not marked
# required in argparse so that a config file may supply them.
_REQUIRED = {
    "preprocess": ("input",),
    "abbrev": ("input",),
    "train": ("corpus", "model"),
    "tag": ("model", "input"),
    "eval": ("gold", "pred"),
    "hyponyms": (),  # needs --definitions and/or --input, checked below
    "relations": ("input",),
    "kg": ("triples",),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit status 1."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".out-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def _lexicon(args) -> corpus.PosLexicon:
    lex = corpus.PosLexicon.default()
    if getattr(args, "lexicon", None):
        lex = lex.merged(corpus.PosLexicon.load(args.lexicon))
    return lex


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _sentences(args) -> list[corpus.Sentence]:
    raw = _read_text(args.input)
    return corpus.split_sentences(corpus.normalize_text(raw))


def _label_set(text: str) -> frozenset[str]:
    names = frozenset(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise ValueError("no labels given")
    unknown = names - set(bio.LABELS)
    if unknown:
        raise ValueError(f"unknown labels: {', '.join(sorted(unknown))}")
    return names


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_preprocess(args) -> int:
    sentences = [corpus.pos_tag(s, _lexicon(args)) for s in _sentences(args)]
    skeleton = [
        bio.LabeledSentence(s, tuple(bio.OUTSIDE for _ in s.tokens))
        for s in sentences
    ]
    _emit(args.output, bio.write_conll(skeleton))
    return 0


def _cmd_abbrev(args) -> int:
    found, warnings = abbrev_mod.extract_abbreviations(
        _sentences(args), window=args.window
    )
    for message in warnings:
        print(f"warning: {message}", file=sys.stderr)
    if args.appendix:
        table = abbrev_mod.load_appendix(args.appendix)
        have = {a.short_form for a in found}
        for short, long_form in table.items():
            if short not in have:
                found.append(
                    abbrev_mod.Abbreviation(short, long_form, "appendix", (0, 0))
                )
    _emit(args.output, abbrev_mod.write_abbreviations(found))
    return 0


def _cmd_train(args) -> int:
    labeled = bio.parse_conll(args.corpus)
    if args.holdout is not None:
        train_part, held = tagger.split_corpus(
            labeled, ratio=args.holdout, seed=args.seed
        )
        model = tagger.train(train_part, epochs=args.epochs, seed=args.seed)
        predicted = [model.predict(ls.sentence) for ls in held]
        sys.stdout.write(
            tagger.metrics_report(tagger.evaluate(held, predicted))
        )
    else:
        model = tagger.train(labeled, epochs=args.epochs, seed=args.seed)
    _atomic_write(args.model, model.dumps())
    return 0


def _cmd_tag(args) -> int:
    model = tagger.SequenceTagger.load(args.model)
    lex = _lexicon(args)
    out = [model.predict(corpus.pos_tag(s, lex)) for s in _sentences(args)]
    _emit(args.output, bio.write_conll(out))
    return 0


def _cmd_eval(args) -> int:
    gold = bio.parse_conll(args.gold)
    pred = bio.parse_conll(args.pred)
    _emit(args.output, tagger.metrics_report(tagger.evaluate(gold, pred)))
    return 0


def _entities(ls: bio.LabeledSentence) -> list[bio.Entity]:
    fixed = bio.LabeledSentence(ls.sentence, tuple(bio.repair_bio(ls.tags)))
    return bio.decode_entities(fixed)


def _cmd_hyponyms(args) -> int:
    if not args.definitions and not args.input:
        raise _UsageError(
            f"{PROG} hyponyms: --definitions and/or --input required"
        )
    triples: list[hyponym.Triple] = []
    if args.definitions:
        entries = defs.load_definitions(args.definitions)
        print(f"{len(entries)} definitions read", file=sys.stderr)
        triples.extend(defs.hyponyms_from_definitions(entries))
    if args.input:
        for ls in bio.parse_conll(args.input):
            triples.extend(
                hyponym.hyponyms_from_pos(
                    ls.sentence, _entities(ls), eligible=args.labels
                )
            )
    _emit(args.output, hyponym.write_triples(hyponym.dedupe(triples)))
    return 0


def _cmd_relations(args) -> int:
    labeled = bio.parse_conll(args.input)
    rule = (
        chunker.load_grammar(args.grammar)
        if args.grammar
        else chunker.compile_grammar(chunker.VP_GRAMMAR)
    )
    triples: list[hyponym.Triple] = []
    if args.abbrev:
        entries: dict[str, str] = {}
        for a in abbrev_mod.read_abbreviations(args.abbrev):
            entries.setdefault(a.short_form, a.long_form)
        triples.extend(
            hyponym.relations_from_abbreviations(
                abbrev_mod.AbbrevTable(entries)
            )
        )
    for ls in labeled:
        triples.extend(
            chunker.extract_vp_relations(ls.sentence, _entities(ls), rule)
        )
    _emit(args.output, hyponym.write_triples(hyponym.dedupe(triples)))
    return 0


def _cmd_kg(args) -> int:
    triples: list[hyponym.Triple] = []
    for path in args.triples:
        triples.extend(hyponym.read_triples(path))
    graph = kg.build_graph(triples)
    for triple, reason in graph.rejected:
        print(
            f"warning: dropped {triple.head} -{triple.relation}-> "
            f"{triple.tail}: {reason}",
            file=sys.stderr,
        )
    if args.focus:
        graph = graph.subgraph(args.focus, radius=args.radius)
    if args.dot is None and args.json is None:
        raise _UsageError(f"{PROG} kg: pass --dot and/or --json")
    if args.dot is not None:
        _emit(args.dot, kg.export_dot(graph))
    if args.json is not None:
        _emit(args.json, kg.export_json(graph))
    return 0


# ---------------------------------------------------------------------------
# Argument plumbing


def _build_parser() -> _Parser:
    parser = _Parser(
        prog=PROG,
        description="Concept recognition and graph building for "
        "engineering text.",
    )
    parser.add_argument(
        "--config",
        help="key=value file; command-line flags override its entries",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser(
        "preprocess", help="normalize raw text into a token/POS skeleton"
    )
    p.add_argument("--input", help="raw UTF-8 text file")
    p.add_argument("--output", help="CoNLL skeleton (default stdout)")
    p.add_argument("--lexicon", help="extra word<TAB>tag rows")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("abbrev", help="extract abbreviation pairs")
    p.add_argument("--input", help="raw UTF-8 text file")
    p.add_argument("--output", help="short/long/sentence TSV (default stdout)")
    p.add_argument(
        "--window",
        type=int,
        default=abbrev_mod.DEFAULT_WINDOW,
        help="how many preceding tokens to search",
    )
    p.add_argument("--appendix", help="short<TAB>long rows to merge in")
    p.set_defaults(func=_cmd_abbrev)

    p = sub.add_parser("train", help="fit a tagger on labeled sentences")
    p.add_argument("--corpus", help="labeled CoNLL file")
    p.add_argument("--model", help="where to save the model")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument(
        "--holdout",
        type=float,
        help="train on this fraction, report scores on the rest",
    )
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("tag", help="label raw text with a trained model")
    p.add_argument("--model")
    p.add_argument("--input", help="raw UTF-8 text file")
    p.add_argument("--output", help="labeled CoNLL (default stdout)")
    p.add_argument("--lexicon", help="extra word<TAB>tag rows")
    p.set_defaults(func=_cmd_tag)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--gold", help="gold CoNLL file")
    p.add_argument("--pred", help="predicted CoNLL file")
    p.add_argument("--output", help="report file (default stdout)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser(
        "hyponyms",
        help="derive subset-of triples from definitions and labeled text",
    )
    p.add_argument("--definitions", help="blank-line-separated records")
    p.add_argument("--input", help="labeled CoNLL with POS")
    p.add_argument(
        "--labels",
        type=_label_set,
        default=hyponym.ELIGIBLE_LABELS,
        help="entity labels eligible for noun extension"
        " (comma-separated; default opcon,syscon,abb)",
    )
    p.add_argument("--output", help="triple TSV (default stdout)")
    p.set_defaults(func=_cmd_hyponyms)

    p = sub.add_parser(
        "relations",
        help="extract verb-phrase triples from a labeled corpus",
    )
    p.add_argument("--input", help="labeled CoNLL with POS")
    p.add_argument("--output", help="triple TSV (default stdout)")
    p.add_argument("--grammar", help="chunk grammar file (built-in VP rule)")
    p.add_argument(
        "--abbrev", help="abbreviation TSV to fold in as stands-for triples"
    )
    p.set_defaults(func=_cmd_relations)

    p = sub.add_parser("kg", help="assemble and export the concept graph")
    p.add_argument(
        "--triples", nargs="+", metavar="FILE",
        help="one or more triple TSV files",
    )
    p.add_argument("--dot", help="write Graphviz here")
    p.add_argument("--json", help="write JSON here")
    p.add_argument("--focus", help="restrict to the ball around this node")
    p.add_argument("--radius", type=int, default=1)
    p.set_defaults(func=_cmd_kg)

    # --config is valid before or after the subcommand name.
    for child in sub.choices.values():
        child.add_argument("--config", help=argparse.SUPPRESS)

    return parser


def _known_options(parser: _Parser) -> dict[str, argparse.Action]:
    """dest -> action for every configurable option."""
    known: dict[str, argparse.Action] = {}
    stack: list[argparse.ArgumentParser] = [parser]
    while stack:
        cur = stack.pop()
        for action in cur._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())
            elif action.dest not in ("help", "command", "func", "config"):
                known.setdefault(action.dest, action)
    return known


def _apply_config(parser: _Parser, config: dict[str, object]):
    """Install config values as defaults wherever the option exists.

    Subcommands parse into a fresh namespace, so defaults set only on
    the root parser would be lost; each subparser needs its own copy.
    """
    stack: list[argparse.ArgumentParser] = [parser]
    while stack:
        cur = stack.pop()
        dests = {action.dest for action in cur._actions}
        relevant = {k: v for k, v in config.items() if k in dests}
        if relevant:
            cur.set_defaults(**relevant)
        for action in cur._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())


def _load_config(path: str, known: dict) -> dict[str, object]:
    values: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not sep or not key:
                raise _UsageError(f"{path}:{lineno}: expected key=value")
            action = known.get(key)
            if action is None:
                raise _UsageError(f"{path}:{lineno}: unknown option {key!r}")
            parts = value.split() if action.nargs in ("+", "*") else [value]
            try:
                converted = [
                    action.type(p) if action.type else p for p in parts
                ]
            except ValueError:
                raise _UsageError(
                    f"{path}:{lineno}: bad value for {key!r}: {value!r}"
                ) from None
            values[key] = converted if action.nargs in ("+", "*") else converted[0]
    return values


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        pre = _Parser(add_help=False)
        pre.add_argument("--config")
        probe, _rest = pre.parse_known_args(argv)
        if probe.config:
            config = _load_config(probe.config, _known_options(parser))
            _apply_config(parser, config)
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_help(sys.stderr)
            return 1
        missing = [
            name
            for name in _REQUIRED[args.command]
            if getattr(args, name) in (None, [])
        ]
        if missing:
            flags = ", ".join("--" + name for name in missing)
            raise _UsageError(f"{PROG} {args.command}: {flags} required")
        return args.func(args)
    except SystemExit as exc:  # argparse --help
        return exc.code if isinstance(exc.code, int) else 0
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (SekgError, OSError, UnicodeDecodeError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
