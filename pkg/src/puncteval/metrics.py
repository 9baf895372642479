"""Punctuation scoring and error rates over aligned segment pairs.

Scoring is at segment-terminal granularity: each aligned pair contributes
one mark-vs-mark comparison. Unaligned reference segments are excluded
from the confusion counts entirely — alignment failure is reported
separately through coverage, not conflated with punctuation failure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .aligner import Alignment, edit_ops
from .corpus import PunctMark
from .errors import EmptyReference, InsufficientClasses
from .textnorm import normalize


@dataclass
class PunctConfusion:
    """True/false positive and false negative tallies per mark."""

    tp: dict[PunctMark, int] = field(default_factory=dict)
    fp: dict[PunctMark, int] = field(default_factory=dict)
    fn: dict[PunctMark, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for counts in (self.tp, self.fp, self.fn):
            for mark in PunctMark:
                counts.setdefault(mark, 0)

    def add(self, other: "PunctConfusion") -> "PunctConfusion":
        return PunctConfusion(
            tp={m: self.tp[m] + other.tp[m] for m in PunctMark},
            fp={m: self.fp[m] + other.fp[m] for m in PunctMark},
            fn={m: self.fn[m] + other.fn[m] for m in PunctMark},
        )


def punct_confusion(alignment: Alignment) -> PunctConfusion:
    """Compare marks across aligned pairs.

    Equal marks count a true positive; differing marks count a false
    negative for the reference mark and a false positive for the
    hypothesis mark. A marked reference paired with unmarked hypothesis
    material is a false negative; the mirror case is a false positive.
    """
    c = PunctConfusion()
    for pair in alignment.pairs:
        if pair.hyp_id is None:
            continue
        ref_mark, hyp_mark = pair.ref_mark, pair.hyp_mark
        if ref_mark is None and hyp_mark is None:
            continue
        if ref_mark == hyp_mark:
            c.tp[ref_mark] += 1
        else:
            if ref_mark is not None:
                c.fn[ref_mark] += 1
            if hyp_mark is not None:
                c.fp[hyp_mark] += 1
    return c


@dataclass(frozen=True)
class ClassScore:
    """Precision/recall/F1 for one mark, as percentages."""

    mark: PunctMark
    precision: float
    recall: float
    f1: float
    degenerate: bool = False


def prf(c: PunctConfusion, mark: PunctMark) -> ClassScore:
    """P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); zero denominators
    yield 0 with the degenerate flag set."""
    tp, fp, fn = c.tp[mark], c.fp[mark], c.fn[mark]
    degenerate = False
    if tp + fp > 0:
        precision = 100.0 * tp / (tp + fp)
    else:
        precision, degenerate = 0.0, True
    if tp + fn > 0:
        recall = 100.0 * tp / (tp + fn)
    else:
        recall, degenerate = 0.0, True
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ClassScore(mark=mark, precision=precision, recall=recall, f1=f1, degenerate=degenerate)


def scored_marks(c: PunctConfusion) -> list[PunctMark]:
    """Marks the hypothesis actually produces (tp+fp > 0).

    Marks absent from the hypothesis output (colons and semicolons, for
    ASR systems that cannot emit them) are excluded from macro averaging.
    """
    return [m for m in PunctMark if c.tp[m] + c.fp[m] > 0]


@dataclass(frozen=True)
class MacroAverage:
    precision: tuple[float, float]
    recall: tuple[float, float]
    f1: tuple[float, float]
    n_classes: int


def macro_average(scores: list[ClassScore]) -> MacroAverage:
    """Arithmetic mean and sample (n-1) standard deviation per column."""
    if len(scores) < 2:
        raise InsufficientClasses(f"macro average needs >= 2 classes, got {len(scores)}")

    def col(values: list[float]) -> tuple[float, float]:
        arr = np.asarray(values, dtype=np.float64)
        return float(arr.mean()), float(arr.std(ddof=1))

    return MacroAverage(
        precision=col([s.precision for s in scores]),
        recall=col([s.recall for s in scores]),
        f1=col([s.f1 for s in scores]),
        n_classes=len(scores),
    )


class ErrorUnit(enum.Enum):
    WORD = "word"
    CHAR = "char"


@dataclass(frozen=True)
class ErrorRates:
    """Micro-aggregated edit-operation rate over aligned pairs."""

    wer: float
    substitutions: int
    insertions: int
    deletions: int
    ref_units: int
    unit: ErrorUnit

    @property
    def rate(self) -> float:
        return self.wer


def error_rates(alignment: Alignment, unit: ErrorUnit = ErrorUnit.WORD) -> ErrorRates:
    """Total edit operations over total reference units, aligned pairs only.

    Both sides are normalized before edit accounting, so punctuation and
    casing never count as errors.
    """
    subs = ins = dels = 0
    ref_units = 0
    for pair in alignment.pairs:
        if pair.hyp_id is None or pair.hyp_text is None:
            continue
        ref_tokens = normalize(pair.ref_text).tokens
        hyp_tokens = normalize(pair.hyp_text).tokens
        if unit is ErrorUnit.CHAR:
            ref_seq: str | tuple = " ".join(ref_tokens)
            hyp_seq: str | tuple = " ".join(hyp_tokens)
        else:
            ref_seq, hyp_seq = ref_tokens, hyp_tokens
        s, i, d = edit_ops(ref_seq, hyp_seq)
        subs += s
        ins += i
        dels += d
        ref_units += len(ref_seq)
    if ref_units == 0:
        raise EmptyReference("no reference units among aligned pairs")
    return ErrorRates(
        wer=(subs + ins + dels) / ref_units,
        substitutions=subs,
        insertions=ins,
        deletions=dels,
        ref_units=ref_units,
        unit=unit,
    )
