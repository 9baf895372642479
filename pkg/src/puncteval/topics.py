"""Transcript-based topic assignment, summary selection and BLANC scoring.

Segments (with their externally produced embedding vectors) are assigned
to the nearest taxonomy topic by cosine similarity; the most representative
segments are then picked under a duration budget, yielding an edit-decision
list rather than a rendered video. Summary quality is scored with BLANC:
masked tokens of the source document are predicted with and without the
summary as context, and the score is the normalized gain.

No model runs here — embeddings and masked-token predictions arrive
through the bridge's JSONL wire formats, keeping this component
deterministic and dependency-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import VectorTable
from .errors import DimensionMismatch, EmptyDocument, ZeroTotal, ZeroVector

MASK_TOKEN = "[MASK]"
BASE_FILLER = "."


def cosine(u: np.ndarray | Sequence[float], v: np.ndarray | Sequence[float]) -> float:
    """u.v / (|u||v|); rejects zero vectors and mismatched dimensions."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"cosine of {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity is undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class TopicAssignment:
    segment_id: str
    topic_id: str
    similarity: float


def assign_topics(segments: VectorTable, taxonomy: VectorTable) -> list[TopicAssignment]:
    """Assign each segment to its argmax-cosine topic.

    Ties break toward the lexicographically smallest topic id. Cosine is
    scale-free, so any positive rescaling of the vectors leaves the
    assignment unchanged.
    """
    if segments.dim != taxonomy.dim:
        raise DimensionMismatch(
            f"segment dim {segments.dim} != taxonomy dim {taxonomy.dim}"
        )
    topic_ids = sorted(taxonomy.vectors.keys())
    topic_mat = np.stack([taxonomy.vectors[tid] for tid in topic_ids])
    topic_norms = np.linalg.norm(topic_mat, axis=1)
    if np.any(topic_norms == 0.0):
        raise ZeroVector("taxonomy contains a zero vector")

    out: list[TopicAssignment] = []
    for seg_id in segments.ids():
        vec = segments.vectors[seg_id]
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ZeroVector(f"segment vector {seg_id!r} is zero")
        sims = topic_mat @ vec / (topic_norms * norm)
        best = 0
        for j in range(1, len(topic_ids)):
            if sims[j] > sims[best]:
                best = j
        out.append(
            TopicAssignment(segment_id=seg_id, topic_id=topic_ids[best], similarity=float(sims[best]))
        )
    return out


@dataclass(frozen=True)
class SelectedClip:
    segment_id: str
    start_s: float
    end_s: float
    topic_id: str
    similarity: float


@dataclass(frozen=True)
class SummarySelection:
    """Chronological edit-decision list under a duration budget."""

    clips: tuple[SelectedClip, ...]
    total_duration_s: float
    budget_s: float


def select_representatives(
    assignments: Sequence[TopicAssignment],
    spans: Mapping[str, tuple[float, float]],
    budget_s: float,
    per_topic_quota: int | None = None,
) -> SummarySelection:
    """Greedy pick by descending similarity under the duration budget.

    Segments whose duration would overflow the remaining budget are
    skipped and the scan continues (skip-and-continue); similarity ties go
    to the earlier start time. The final list is re-sorted chronologically.

    Selection is global over all assignments by default; per_topic_quota
    caps how many clips any single topic may contribute, for more diverse
    summaries.
    """
    if budget_s < 0:
        raise ValueError("budget_s must be >= 0")
    if per_topic_quota is not None and per_topic_quota < 1:
        raise ValueError("per_topic_quota must be >= 1")
    order = sorted(
        assignments,
        key=lambda a: (-a.similarity, spans[a.segment_id][0], a.segment_id),
    )
    chosen: list[SelectedClip] = []
    per_topic: dict[str, int] = {}
    total = 0.0
    for a in order:
        start_s, end_s = spans[a.segment_id]
        duration = end_s - start_s
        if duration <= 0:
            continue
        if per_topic_quota is not None and per_topic.get(a.topic_id, 0) >= per_topic_quota:
            continue
        if total + duration <= budget_s:
            chosen.append(
                SelectedClip(
                    segment_id=a.segment_id,
                    start_s=start_s,
                    end_s=end_s,
                    topic_id=a.topic_id,
                    similarity=a.similarity,
                )
            )
            per_topic[a.topic_id] = per_topic.get(a.topic_id, 0) + 1
            total += duration
    chosen.sort(key=lambda c: (c.start_s, c.segment_id))
    return SummarySelection(clips=tuple(chosen), total_duration_s=total, budget_s=budget_s)


@dataclass(frozen=True)
class BlancCounts:
    """Masked-token prediction tallies with and without the summary."""

    n_help: int
    n_base: int
    n_total: int

    def __post_init__(self) -> None:
        if self.n_total <= 0:
            raise ZeroTotal("n_total must be positive")
        if not (0 <= self.n_help <= self.n_total and 0 <= self.n_base <= self.n_total):
            raise ValueError("counts must satisfy 0 <= n_help, n_base <= n_total")


def blanc(c: BlancCounts) -> float:
    """(n_help - n_base) / n_total, in [-1, 1]."""
    return (c.n_help - c.n_base) / c.n_total


@dataclass(frozen=True)
class MaskingTask:
    """One deterministic fill-in exercise for the masked language model.

    The same masked sentence is predicted twice: once prefixed with the
    summary (help) and once with a neutral filler of equal token length
    (base), so any accuracy gain is attributable to the summary.
    """

    task_id: str
    sentence_index: int
    offset: int
    tokens: tuple[str, ...]
    masked_positions: tuple[int, ...]
    gold_tokens: tuple[str, ...]
    help_context: str
    base_context: str

    @property
    def masked_tokens(self) -> tuple[str, ...]:
        masked = list(self.tokens)
        for p in self.masked_positions:
            masked[p] = MASK_TOKEN
        return tuple(masked)

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "sentence_index": self.sentence_index,
            "offset": self.offset,
            "tokens": list(self.tokens),
            "masked_positions": list(self.masked_positions),
            "gold_tokens": list(self.gold_tokens),
            "help_context": self.help_context,
            "base_context": self.base_context,
        }


def make_masking_tasks(
    document_tokens: Sequence[Sequence[str]],
    summary_text: str,
    gap: int = 6,
    min_token_len: int = 4,
) -> list[MaskingTask]:
    """Build the deterministic masking schedule over document sentences.

    For each sentence and each offset 0..gap-1, every gap-th token of
    length >= min_token_len is masked; offsets that mask nothing produce
    no task. Defaults follow the standard fill-in-the-blank evaluation
    parameters (gap 6, minimum token length 4).
    """
    if gap < 1 or min_token_len < 1:
        raise ValueError("gap and min_token_len must be positive")
    if not any(len(s) for s in document_tokens):
        raise EmptyDocument("document has no tokens to mask")
    summary_tokens = summary_text.split()
    help_context = " ".join(summary_tokens)
    base_context = " ".join([BASE_FILLER] * len(summary_tokens))
    tasks: list[MaskingTask] = []
    for si, sentence in enumerate(document_tokens):
        sentence = tuple(sentence)
        for offset in range(gap):
            positions = tuple(
                p
                for p in range(offset, len(sentence), gap)
                if len(sentence[p]) >= min_token_len
            )
            if not positions:
                continue
            tasks.append(
                MaskingTask(
                    task_id=f"s{si}-o{offset}",
                    sentence_index=si,
                    offset=offset,
                    tokens=sentence,
                    masked_positions=positions,
                    gold_tokens=tuple(sentence[p] for p in positions),
                    help_context=help_context,
                    base_context=base_context,
                )
            )
    return tasks


def blanc_from_count_records(records: Sequence[Mapping]) -> tuple[float, BlancCounts]:
    """Aggregate per-task unmasking counts into one BLANC score.

    Each record carries correct_with / correct_without / total for one
    task; sums feed the score.
    """
    n_help = n_base = n_total = 0
    for rec in records:
        total = int(rec["total"])
        cw, co = int(rec["correct_with"]), int(rec["correct_without"])
        if not (0 <= cw <= total and 0 <= co <= total):
            raise ValueError(
                f"task {rec.get('task_id')!r}: counts must lie in [0, total]"
            )
        n_help += cw
        n_base += co
        n_total += total
    counts = BlancCounts(n_help=n_help, n_base=n_base, n_total=n_total)
    return blanc(counts), counts
