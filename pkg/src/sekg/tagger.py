"""Sequence labeling with an averaged structured perceptron.

Decoding is Viterbi over the closed tag set with a hard transition
mask, so every prediction is a well-formed BIO sequence by
construction. Training is deterministic for a fixed corpus order,
epoch count, and seed: the only randomness is the per-epoch shuffle,
drawn from one seeded generator, and weight arithmetic follows a
fixed feature order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bio import (
    LabeledSentence,
    OUTSIDE,
    TAGS,
    entity_spans,
    repair_bio,
    validate_bio,
)
from .corpus import Sentence
from .errors import EmptyCorpus, InvalidSequence, ModelFormatError, ShapeMismatch

MODEL_FORMAT = "seqtagger-model"
MODEL_VERSION = "1"

_START = "<s>"
_END = "</s>"

_TAG_INDEX = {tag: i for i, tag in enumerate(TAGS)}


def _shape(word: str) -> str:
    return "".join(
        "X" if ch.isupper() else "x" if ch.islower() else "d" if ch.isdigit() else ch
        for ch in word
    )


def token_features(tokens, i: int) -> list[str]:
    """Emission features for position i. Order is fixed; scoring sums
    weights in this order, which keeps float results reproducible."""
    w = tokens[i].surface
    lower = w.lower()
    return [
        f"w={w}",
        f"lw={lower}",
        f"suf3={lower[-3:]}",
        f"shape={_shape(w)}",
        f"prev={tokens[i - 1].surface if i > 0 else _START}",
        f"next={tokens[i + 1].surface if i + 1 < len(tokens) else _END}",
    ]


def _transition_allowed(prev: str, tag: str) -> bool:
    if not tag.startswith("I-"):
        return True
    label = tag[2:]
    return prev == f"B-{label}" or prev == f"I-{label}"


_ALLOWED_PREV = {
    tag: tuple(p for p in TAGS if _transition_allowed(p, tag)) for tag in TAGS
}


class SequenceTagger:
    """Linear model over (feature, tag) weights with masked Viterbi."""

    def __init__(self, weights: dict[tuple[str, str], float] | None = None):
        self.weights = weights if weights is not None else {}

    # -- decoding -----------------------------------------------------

    def _emissions(self, feats: list[str]) -> list[float]:
        w = self.weights
        scores = []
        for tag in TAGS:
            s = 0.0
            for f in feats:
                s += w.get((f, tag), 0.0)
            scores.append(s)
        return scores

    def _decode(self, tokens, margin: list[str] | None = None) -> list[str]:
        """Best tag path. With `margin` set to the gold tags, every
        non-gold tag gets +1, so training only settles once the gold
        path wins by a strict margin (cost-augmented updates)."""
        n = len(tokens)
        w = self.weights
        feat_lists = [token_features(tokens, i) for i in range(n)]
        em0 = self._emissions(feat_lists[0])
        if margin is not None:
            for ti, t in enumerate(TAGS):
                if t != margin[0]:
                    em0[ti] += 1.0
        # I-* tags cannot open a sequence.
        score = [
            (em0[_TAG_INDEX[t]] + w.get((f"pt={_START}", t), 0.0))
            if not t.startswith("I-")
            else None
            for t in TAGS
        ]
        back: list[list[int | None]] = []
        for i in range(1, n):
            em = self._emissions(feat_lists[i])
            if margin is not None:
                for ti, t in enumerate(TAGS):
                    if t != margin[i]:
                        em[ti] += 1.0
            nxt: list[float | None] = []
            ptr: list[int | None] = []
            for ti, tag in enumerate(TAGS):
                best = None
                best_prev = None
                for prev in _ALLOWED_PREV[tag]:
                    pi = _TAG_INDEX[prev]
                    base = score[pi]
                    if base is None:
                        continue
                    cand = base + w.get((f"pt={prev}", tag), 0.0)
                    if best is None or cand > best:
                        best, best_prev = cand, pi
                if best is None:
                    nxt.append(None)
                    ptr.append(None)
                else:
                    nxt.append(best + em[ti])
                    ptr.append(best_prev)
            score = nxt
            back.append(ptr)
        last = max(
            (ti for ti in range(len(TAGS)) if score[ti] is not None),
            key=lambda ti: score[ti],
        )
        path = [last]
        for ptr in reversed(back):
            path.append(ptr[path[-1]])
        path.reverse()
        return [TAGS[ti] for ti in path]

    def predict(self, sentence: Sentence) -> LabeledSentence:
        return LabeledSentence(sentence, tuple(self._decode(sentence.tokens)))

    # -- persistence --------------------------------------------------

    def dumps(self) -> str:
        header = "\t".join((MODEL_FORMAT, MODEL_VERSION, ",".join(TAGS)))
        rows = sorted(
            (feat, tag, weight)
            for (feat, tag), weight in self.weights.items()
            if weight != 0.0
        )
        lines = [header]
        lines.extend(f"{feat}\t{tag}\t{weight!r}" for feat, tag, weight in rows)
        return "".join(line + "\n" for line in lines)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "SequenceTagger":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if len(header) != 3 or header[0] != MODEL_FORMAT:
                raise ModelFormatError("not a tagger model file")
            if header[1] != MODEL_VERSION:
                raise ModelFormatError(
                    f"model version {header[1]!r} is not supported"
                )
            if tuple(header[2].split(",")) != TAGS:
                raise ModelFormatError("model tag set does not match")
            weights: dict[tuple[str, str], float] = {}
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                cols = line.split("\t")
                if len(cols) != 3 or cols[1] not in _TAG_INDEX:
                    raise ModelFormatError(f"bad weight row at line {lineno}")
                try:
                    weights[(cols[0], cols[1])] = float(cols[2])
                except ValueError:
                    raise ModelFormatError(
                        f"bad weight value at line {lineno}"
                    ) from None
        return cls(weights)


class _Trainer:
    """Perceptron state with lazily averaged weights."""

    def __init__(self):
        self.weights: dict[tuple[str, str], float] = {}
        self.totals: dict[tuple[str, str], float] = {}
        self.stamps: dict[tuple[str, str], int] = {}
        self.step = 0

    def bump(self, key: tuple[str, str], delta: float):
        self.totals[key] = self.totals.get(key, 0.0) + (
            self.step - self.stamps.get(key, 0)
        ) * self.weights.get(key, 0.0)
        self.stamps[key] = self.step
        self.weights[key] = self.weights.get(key, 0.0) + delta

    def averaged(self) -> dict[tuple[str, str], float]:
        out = {}
        for key, weight in self.weights.items():
            total = self.totals.get(key, 0.0)
            total += (self.step - self.stamps.get(key, 0)) * weight
            value = total / self.step
            if value != 0.0:
                out[key] = value
        return out


def _path_keys(tokens, tags: list[str]):
    prev = _START
    for i, tag in enumerate(tags):
        for f in token_features(tokens, i):
            yield (f, tag)
        yield (f"pt={prev}", tag)
        prev = tag


def train(
    corpus: list[LabeledSentence], epochs: int = 10, seed: int = 13
) -> SequenceTagger:
    """Fit a tagger on labeled sentences.

    Gold tag sequences must be valid BIO. Examples are revisited in a
    freshly shuffled order each epoch; all shuffles come from one
    generator seeded with `seed`.
    """
    if not corpus:
        raise EmptyCorpus("cannot train on an empty corpus")
    for ls in corpus:
        bad = validate_bio(ls.tags)
        if bad:
            index, reason = bad[0]
            raise InvalidSequence(
                f"{ls.sentence.source_id}: {reason} at token {index}"
            )
    trainer = _Trainer()
    model = SequenceTagger(trainer.weights)
    rng = random.Random(seed)
    order = list(range(len(corpus)))
    for _ in range(epochs):
        rng.shuffle(order)
        for idx in order:
            ls = corpus[idx]
            trainer.step += 1
            gold = list(ls.tags)
            guess = model._decode(ls.sentence.tokens, margin=gold)
            if guess == gold:
                continue
            for key in _path_keys(ls.sentence.tokens, gold):
                trainer.bump(key, 1.0)
            for key in _path_keys(ls.sentence.tokens, guess):
                trainer.bump(key, -1.0)
    return SequenceTagger(trainer.averaged())


def split_corpus(
    corpus: list[LabeledSentence], ratio: float = 0.8, seed: int = 13
) -> tuple[list[LabeledSentence], list[LabeledSentence]]:
    """Deterministic shuffled split; the first part gets
    floor(ratio * n) sentences."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must be strictly between 0 and 1")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    cut = int(len(corpus) * ratio)
    return [corpus[i] for i in order[:cut]], [corpus[i] for i in order[cut:]]


def tag_corpus(
    tagger: SequenceTagger, sentences: list[Sentence]
) -> list[LabeledSentence]:
    return [tagger.predict(s) for s in sentences]


# ---------------------------------------------------------------------------
# Entity-level evaluation


@dataclass(frozen=True)
class LabelScore:
    tp: int
    fp: int
    fn: int

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class Metrics:
    per_label: dict[str, LabelScore]
    micro: LabelScore
    macro_precision: float
    macro_recall: float
    macro_f1: float
    token_accuracy: float
    token_accuracy_excl_o: float


def evaluate(gold: list[LabeledSentence], pred) -> Metrics:
    """Exact-match entity scores.

    An entity counts as correct only when label, start, and end all
    agree. `pred` holds one tag sequence per gold sentence, given
    either as plain tag lists or as LabeledSentence values. Predicted
    sequences are repaired before decoding; gold sequences must
    already be valid. Macro scores average the labels with nonzero
    gold support, visited in sorted order.
    """
    if len(gold) != len(pred):
        raise ShapeMismatch(
            f"{len(gold)} gold sentences vs {len(pred)} predicted"
        )
    pred_tags = [getattr(p, "tags", p) for p in pred]
    tp: dict[str, int] = {}
    fp: dict[str, int] = {}
    fn: dict[str, int] = {}
    tok_total = tok_hit = 0
    ent_total = ent_hit = 0  # tokens whose gold tag is not O
    for g, p in zip(gold, pred_tags):
        if len(g.tags) != len(p):
            raise ShapeMismatch(
                f"{g.sentence.source_id}: {len(g.tags)} tokens vs {len(p)}"
            )
        bad = validate_bio(g.tags)
        if bad:
            index, reason = bad[0]
            raise InvalidSequence(
                f"{g.sentence.source_id}: {reason} at token {index}"
            )
        gold_spans = set(entity_spans(g.tags))
        pred_spans = set(entity_spans(repair_bio(p)))
        for label, start, end in gold_spans & pred_spans:
            tp[label] = tp.get(label, 0) + 1
        for label, start, end in pred_spans - gold_spans:
            fp[label] = fp.get(label, 0) + 1
        for label, start, end in gold_spans - pred_spans:
            fn[label] = fn.get(label, 0) + 1
        for gt, pt in zip(g.tags, p):
            tok_total += 1
            if gt == pt:
                tok_hit += 1
            if gt != OUTSIDE:
                ent_total += 1
                if gt == pt:
                    ent_hit += 1
    labels = sorted(set(tp) | set(fp) | set(fn))
    per_label = {
        label: LabelScore(tp.get(label, 0), fp.get(label, 0), fn.get(label, 0))
        for label in labels
    }
    micro = LabelScore(
        sum(tp.values()), sum(fp.values()), sum(fn.values())
    )
    with_support = [l for l in labels if per_label[l].support > 0]
    if with_support:
        k = len(with_support)
        macro_p = sum(per_label[l].precision for l in with_support) / k
        macro_r = sum(per_label[l].recall for l in with_support) / k
        macro_f = sum(per_label[l].f1 for l in with_support) / k
    else:
        macro_p = macro_r = macro_f = 0.0
    return Metrics(
        per_label=per_label,
        micro=micro,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f,
        token_accuracy=tok_hit / tok_total if tok_total else 0.0,
        token_accuracy_excl_o=ent_hit / ent_total if ent_total else 0.0,
    )


def metrics_report(m: Metrics) -> str:
    """Render scores as aligned text, one label per row."""
    lines = ["label\tprecision\trecall\tf1\tsupport"]
    for label, s in sorted(m.per_label.items()):
        lines.append(
            f"{label}\t{s.precision:.4f}\t{s.recall:.4f}\t{s.f1:.4f}\t{s.support}"
        )
    lines.append(
        f"micro\t{m.micro.precision:.4f}\t{m.micro.recall:.4f}"
        f"\t{m.micro.f1:.4f}\t{m.micro.support}"
    )
    lines.append(
        f"macro\t{m.macro_precision:.4f}\t{m.macro_recall:.4f}"
        f"\t{m.macro_f1:.4f}\t{m.micro.support}"
    )
    lines.append(f"token_accuracy\t{m.token_accuracy:.4f}")
    lines.append(f"token_accuracy_excl_O\t{m.token_accuracy_excl_o:.4f}")
    return "".join(line + "\n" for line in lines)
