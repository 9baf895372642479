"""Three-step alignment of reference segments to ASR hypothesis segments.

Manual transcripts carry longer segments than ASR output, so a plain
one-to-one pass is not enough. The alignment runs in three steps:

1. document matching — each reference document is paired with the
   hypothesis document whose concatenated text scores highest;
2. preliminary alignment — a cursor advances monotonically through the
   hypothesis, pairing each reference segment with the first unconsumed
   hypothesis segment that scores at or above the threshold within a
   bounded look-ahead;
3. contextual alignment — every still-unaligned reference segment takes
   its most similar hypothesis segment, extends it with one neighbor on
   each side, and greedily trims whole words off both window ends while
   the score improves; the pair is accepted if the final score clears the
   contextual threshold.

Similarity is the mean of a Levenshtein similarity and an LCS similarity,
both computed at character level over normalized (lowercased,
punctuation-free, numbers spelled out) text.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .corpus import PunctMark, Segment
from .textnorm import NormalizedText, normalize


# Below this cell count plain Python loops beat numpy's per-call overhead.
_SMALL_DP_CELLS = 400


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimal insert/delete/substitute edits between two sequences."""
    if len(a) == 0:
        return len(b)
    if len(b) == 0:
        return len(a)
    if len(a) * len(b) <= _SMALL_DP_CELLS:
        prev = list(range(len(b) + 1))
        for i, ca in enumerate(a, start=1):
            cur = [i] + [0] * len(b)
            for j, cb in enumerate(b, start=1):
                cur[j] = min(prev[j - 1] + (ca != cb), prev[j] + 1, cur[j - 1] + 1)
            prev = cur
        return prev[-1]
    b_arr = np.array(list(b))
    idx = np.arange(len(b) + 1, dtype=np.int64)
    prev_row = idx.copy()
    for i, ca in enumerate(a, start=1):
        neq = (b_arr != ca).astype(np.int64)
        tail = np.minimum(prev_row[:-1] + neq, prev_row[1:] + 1)
        seq = np.concatenate(([i], tail))
        # Insertions propagate left to right: cur[j] = min_k<=j seq[k] + (j-k).
        prev_row = np.minimum.accumulate(seq - idx) + idx
    return int(prev_row[-1])


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of a longest common subsequence of two sequences."""
    if len(a) == 0 or len(b) == 0:
        return 0
    if len(a) * len(b) <= _SMALL_DP_CELLS:
        prev = [0] * (len(b) + 1)
        for ca in a:
            cur = [0] * (len(b) + 1)
            for j, cb in enumerate(b, start=1):
                cur[j] = prev[j - 1] + 1 if ca == cb else max(prev[j], cur[j - 1])
            prev = cur
        return prev[-1]
    b_arr = np.array(list(b))
    prev_row = np.zeros(len(b) + 1, dtype=np.int64)
    for ca in a:
        eq = (b_arr == ca).astype(np.int64)
        cand = np.maximum(prev_row[1:], prev_row[:-1] + eq)
        prev_row = np.maximum.accumulate(np.concatenate(([0], cand)))
    return int(prev_row[-1])


def edit_ops(ref: Sequence, hyp: Sequence) -> tuple[int, int, int]:
    """(substitutions, insertions, deletions) turning ref into hyp.

    Ties during backtrace prefer the diagonal, then deletion, then
    insertion, so the split is canonical; the three always sum to the
    Levenshtein distance.
    """
    n, m = len(ref), len(hyp)
    if n == 0:
        return 0, m, 0
    if m == 0:
        return 0, 0, n
    hyp_arr = np.array(list(hyp))
    idx = np.arange(m + 1, dtype=np.int64)
    rows = np.empty((n + 1, m + 1), dtype=np.int64)
    rows[0] = idx
    for i, ca in enumerate(ref, start=1):
        neq = (hyp_arr != ca).astype(np.int64)
        tail = np.minimum(rows[i - 1, :-1] + neq, rows[i - 1, 1:] + 1)
        seq = np.concatenate(([i], tail))
        rows[i] = np.minimum.accumulate(seq - idx) + idx
    subs = ins = dels = 0
    i, j = n, m
    while i > 0 and j > 0:
        cost = 0 if ref[i - 1] == hyp[j - 1] else 1
        if rows[i][j] == rows[i - 1][j - 1] + cost:
            subs += cost
            i -= 1
            j -= 1
        elif rows[i][j] == rows[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    dels += i
    ins += j
    return subs, ins, dels


def _lev_and_lcs(a: str, b: str) -> tuple[int, int]:
    """Both distances in one pass (the row loops share the char compare)."""
    if not a or not b:
        return max(len(a), len(b)), 0
    if len(a) * len(b) <= _SMALL_DP_CELLS:
        return levenshtein(a, b), lcs_length(a, b)
    b_arr = np.array(list(b))
    idx = np.arange(len(b) + 1, dtype=np.int64)
    lev_prev = idx.copy()
    lcs_prev = np.zeros(len(b) + 1, dtype=np.int64)
    for i, ca in enumerate(a, start=1):
        neq = (b_arr != ca).astype(np.int64)
        tail = np.minimum(lev_prev[:-1] + neq, lev_prev[1:] + 1)
        seq = np.concatenate(([i], tail))
        lev_prev = np.minimum.accumulate(seq - idx) + idx
        cand = np.maximum(lcs_prev[1:], lcs_prev[:-1] + (1 - neq))
        lcs_prev = np.maximum.accumulate(np.concatenate(([0], cand)))
    return int(lev_prev[-1]), int(lcs_prev[-1])


@lru_cache(maxsize=65536)
def score_strings(a: str, b: str) -> float:
    """Mean of Levenshtein similarity and LCS similarity over characters.

    sim_lev = 1 - dist/max(|a|,|b|) and sim_lcs = lcs/max(|a|,|b|); two
    empty strings score 1.0.
    """
    if not a and not b:
        return 1.0
    longest = max(len(a), len(b))
    dist, lcs = _lev_and_lcs(a, b)
    return ((1.0 - dist / longest) + lcs / longest) / 2.0


def match_score(a: NormalizedText, b: NormalizedText) -> float:
    """score_strings over the space-joined normalized token strings."""
    return score_strings(a.text, b.text)


def match_documents(
    ref_docs: Sequence[Sequence[Segment]],
    hyp_docs: Sequence[Sequence[Segment]],
    max_chars: int = 4000,
) -> dict[int, int]:
    """Map each reference document to its best-scoring hypothesis document.

    Scoring uses the concatenated normalized text, truncated to max_chars
    per side (identification needs a representative prefix, not the whole
    interview). Ties go to the earliest hypothesis index.
    """
    if not hyp_docs:
        raise ValueError("at least one hypothesis document is required")

    def doc_text(doc: Sequence[Segment]) -> str:
        return normalize(" ".join(s.raw_text for s in doc)).text[:max_chars]

    hyp_texts = [doc_text(d) for d in hyp_docs]
    mapping: dict[int, int] = {}
    for ri, ref_doc in enumerate(ref_docs):
        ref_text = doc_text(ref_doc)
        best_j, best_s = 0, -1.0
        for j, ht in enumerate(hyp_texts):
            s = score_strings(ref_text, ht)
            if s > best_s:
                best_j, best_s = j, s
        mapping[ri] = best_j
    return mapping


class AlignStep(enum.Enum):
    PRELIMINARY = "preliminary"
    CONTEXTUAL = "contextual"
    UNALIGNED = "unaligned"


# Contextual anchors tried per reference segment, best trimmed-window
# score wins (ties keep the earlier anchor). Evaluation stops early once a
# window is already near-perfect.
_ANCHOR_CANDIDATES = 3
_ANCHOR_GOOD_ENOUGH = 0.95


@dataclass(frozen=True)
class AlignedPair:
    """One reference segment and whatever hypothesis material it matched."""

    ref_id: str
    hyp_id: str | None
    score: float
    step: AlignStep
    ref_text: str
    hyp_text: str | None
    ref_mark: PunctMark | None
    hyp_mark: PunctMark | None
    hyp_window: tuple[int, int] | None = None


@dataclass(frozen=True)
class Alignment:
    pairs: tuple[AlignedPair, ...]
    coverage: float

    @classmethod
    def from_pairs(cls, pairs: Sequence[AlignedPair]) -> "Alignment":
        aligned = sum(1 for p in pairs if p.hyp_id is not None)
        coverage = aligned / len(pairs) if pairs else 0.0
        return cls(pairs=tuple(pairs), coverage=coverage)


def _trim_window(tokens: list[str], g0: int, g1: int, target: str) -> tuple[int, int, float]:
    """Greedy hill-climb: drop the end word whose removal most improves the
    score; stop at a local optimum (ties trim the right end)."""
    current = score_strings(" ".join(tokens[g0:g1]), target)
    while g1 - g0 > 1:
        s_left = score_strings(" ".join(tokens[g0 + 1 : g1]), target)
        s_right = score_strings(" ".join(tokens[g0 : g1 - 1]), target)
        if max(s_left, s_right) <= current:
            break
        if s_right >= s_left:
            g1 -= 1
            current = s_right
        else:
            g0 += 1
            current = s_left
    return g0, g1, current


def align(
    ref: Sequence[Segment],
    hyp: Sequence[Segment],
    tau: float = 0.90,
    tau_ctx: float = 0.60,
    lookahead: int = 5,
) -> Alignment:
    """Align reference segments to hypothesis segments (steps 2 and 3).

    Accepted hypothesis positions are non-decreasing across reference
    order; two reference segments may share a hypothesis segment when the
    hypothesis merged them. Degenerate inputs yield all-Unaligned pairs.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    n, m = len(ref), len(hyp)
    ref_norm = [normalize(s.raw_text) for s in ref]
    hyp_norm = [normalize(s.raw_text) for s in hyp]
    hyp_strings = [t.text for t in hyp_norm]

    offsets = [0]
    all_tokens: list[str] = []
    for t in hyp_norm:
        all_tokens.extend(t.tokens)
        offsets.append(len(all_tokens))

    results: list[AlignedPair | None] = [None] * n
    assigned = [-1] * n

    def unaligned(i: int) -> AlignedPair:
        return AlignedPair(
            ref_id=ref[i].id,
            hyp_id=None,
            score=0.0,
            step=AlignStep.UNALIGNED,
            ref_text=ref[i].raw_text,
            hyp_text=None,
            ref_mark=ref[i].mark,
            hyp_mark=None,
        )

    # Preliminary pass: monotone cursor with bounded look-ahead.
    cursor = 0
    for i in range(n):
        for j in range(cursor, min(cursor + lookahead, m)):
            s = score_strings(ref_norm[i].text, hyp_strings[j])
            if s >= tau:
                results[i] = AlignedPair(
                    ref_id=ref[i].id,
                    hyp_id=hyp[j].id,
                    score=s,
                    step=AlignStep.PRELIMINARY,
                    ref_text=ref[i].raw_text,
                    hyp_text=hyp[j].raw_text,
                    ref_mark=ref[i].mark,
                    hyp_mark=hyp[j].mark,
                )
                assigned[i] = j
                cursor = j + 1
                break

    # Contextual pass over the leftovers, bounded by accepted neighbors.
    for i in range(n):
        if results[i] is not None:
            continue
        lo, hi = 0, m - 1
        for k in range(i - 1, -1, -1):
            if assigned[k] >= 0:
                lo = assigned[k]
                break
        for k in range(i + 1, n):
            if assigned[k] >= 0:
                hi = assigned[k]
                break
        if m == 0 or lo > hi:
            results[i] = unaligned(i)
            continue

        # Rank candidate anchors by single-segment similarity, then judge
        # the top few by their trimmed-window score: the segment most
        # similar in isolation is not always the one whose neighborhood
        # contains the reference text.
        ranked = sorted(
            range(lo, hi + 1),
            key=lambda j: (-score_strings(ref_norm[i].text, hyp_strings[j]), j),
        )
        best_j, best_window, final = -1, (0, 0), -1.0
        for j in ranked[:_ANCHOR_CANDIDATES]:
            g0 = offsets[max(j - 1, 0)]
            g1 = offsets[min(j + 1, m - 1) + 1]
            if g1 <= g0:
                continue
            w0, w1, score = _trim_window(all_tokens, g0, g1, ref_norm[i].text)
            if score > final:
                best_j, best_window, final = j, (w0, w1), score
            if final >= _ANCHOR_GOOD_ENOUGH:
                break
        if best_j < 0 or final < tau_ctx:
            results[i] = unaligned(i)
            continue
        g0, g1 = best_window

        # The window carries a hypothesis mark only when it ends exactly at
        # a segment boundary; mid-segment ends mean no punctuation event at
        # the aligned span's end. With empty segments several boundaries can
        # coincide; the latest punctuation event wins.
        hyp_mark = None
        pos = bisect_right(offsets, g1) - 1
        if pos >= 1 and offsets[pos] == g1 and pos - 1 < m:
            hyp_mark = hyp[pos - 1].mark
        results[i] = AlignedPair(
            ref_id=ref[i].id,
            hyp_id=hyp[best_j].id,
            score=final,
            step=AlignStep.CONTEXTUAL,
            ref_text=ref[i].raw_text,
            hyp_text=" ".join(all_tokens[g0:g1]),
            ref_mark=ref[i].mark,
            hyp_mark=hyp_mark,
            hyp_window=(g0, g1),
        )
        assigned[i] = best_j

    return Alignment.from_pairs([p if p is not None else unaligned(i) for i, p in enumerate(results)])
