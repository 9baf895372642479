"""Split turn text into punctuation-terminated segments and count things.

Segmentation is the unit everything downstream consumes: alignment pairs
segments, punctuation scoring compares their terminal marks, and the topic
pipeline summarizes them. Two distinct counting conventions coexist here:

* ``punct_histogram`` counts one terminal mark per segment ("..." is a
  single ellipsis mark) — the convention behind distribution tables and
  confusion scoring.
* ``punct_census`` counts raw character occurrences in text: every '.'
  counts toward the full-stop tally (ellipsis dots included) while "..."
  sequences are tallied separately. This is how side-by-side transcript
  comparisons are traditionally reported, and the golden-excerpt acceptance
  numbers follow it.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import PunctMark, Segment, SENTENCE_MARKS, Transcript

_MARK_CHARS = ".?!,;:"

_ELLIPSIS_RE = re.compile(r"\.\.\.")


def _is_boundary(text: str, pos: int, width: int) -> bool:
    """A mark ends a segment only at a word boundary (next char is space/EOS).

    Keeps intra-word separators intact: "8:30" or "1.5" never split a
    segment mid-number.
    """
    nxt = pos + width
    return nxt >= len(text) or text[nxt].isspace() or text[nxt] in _MARK_CHARS


def segment(text: str, id_prefix: str = "s") -> list[Segment]:
    """Cut text into segments, each ended by one of the seven marks.

    "..." is consumed as a single ellipsis (checked before full stop);
    runs of adjacent marks ("?!") collapse onto the first one. Trailing
    unpunctuated words become a tail segment with mark None.
    """
    segments: list[Segment] = []
    buf: list[str] = []
    i = 0
    n = len(text)

    def close(mark: PunctMark | None) -> None:
        tokens = tuple("".join(buf).split())
        if not tokens and mark is None:
            return
        raw = " ".join(tokens)
        segments.append(
            Segment(id=f"{id_prefix}{len(segments)}", tokens=tokens, mark=mark, raw_text=raw)
        )
        buf.clear()

    while i < n:
        if text.startswith("...", i) and _is_boundary(text, i, 3):
            close(PunctMark.ELLIPSIS)
            i += 3
        elif text[i] in _MARK_CHARS and _is_boundary(text, i, 1):
            close(PunctMark.from_str(text[i]))
            i += 1
        else:
            buf.append(text[i])
            i += 1
            continue
        # Collapse any run of further mark characters onto the mark above.
        while i < n and text[i] in _MARK_CHARS:
            i += 1
    close(None)
    return segments


def segment_turn(text: str, id_prefix: str, start_s: float | None, end_s: float | None) -> list[Segment]:
    """Segment a turn, interpolating time bounds proportionally by length.

    When the turn carries times, each segment receives a slice of the span
    proportional to its character share — a documented approximation, since
    diarized records only bound whole turns.
    """
    segs = segment(text, id_prefix=id_prefix)
    if start_s is None or end_s is None or not segs:
        return segs
    weights = [len(s.text_with_mark) or 1 for s in segs]
    total = sum(weights)
    out: list[Segment] = []
    t = start_s
    span = end_s - start_s
    acc = 0
    for s, w in zip(segs, weights):
        acc += w
        seg_end = start_s + span * acc / total
        out.append(Segment(s.id, s.tokens, s.mark, s.raw_text, start_s=t, end_s=seg_end))
        t = seg_end
    return out


def segment_transcript(t: Transcript) -> list[list[Segment]]:
    """Per-turn segment lists with transcript-scoped, stable segment ids."""
    return [
        segment_turn(turn.text, f"{t.interview_id}-t{i}-s", turn.start_s, turn.end_s)
        for i, turn in enumerate(t.turns)
    ]


def sentences(segments: Sequence[Segment]) -> list[Segment]:
    """Segments that carry a complete idea (fullstop / question / exclamation)."""
    return [s for s in segments if s.mark in SENTENCE_MARKS]


def sentence_word_counts(segments: Sequence[Segment]) -> list[int]:
    """Word length of each sentence, with preceding non-sentence segments
    accumulated onto the sentence that closes them. Trailing words after the
    last sentence belong to no sentence and are dropped."""
    counts: list[int] = []
    pending = 0
    for s in segments:
        pending += len(s.tokens)
        if s.mark in SENTENCE_MARKS:
            counts.append(pending)
            pending = 0
    return counts


def sentence_starts(turn_segments: Iterable[Sequence[Segment]]) -> int:
    """Count sentence beginnings across turns.

    Every non-empty turn opens a sentence; each sentence-final mark followed
    by further material inside the same turn opens another. On capitalized
    transcripts this equals the number of capitalized sentence-initial words.
    """
    total = 0
    for segs in turn_segments:
        if not segs:
            continue
        total += 1
        for s in segs[:-1]:
            if s.mark in SENTENCE_MARKS:
                total += 1
    return total


def punct_histogram(segments: Sequence[Segment]) -> dict[PunctMark, int]:
    """Terminal-mark counts per segment; tail segments are not counted."""
    hist = {mark: 0 for mark in PunctMark}
    for s in segments:
        if s.mark is not None:
            hist[s.mark] += 1
    return hist


def punct_census(text: str) -> dict[PunctMark, int]:
    """Raw occurrence counts of punctuation in text.

    Character marks are counted per character; the ellipsis row counts
    non-overlapping "..." sequences, whose dots also appear in the
    full-stop row (a character tally and a sequence tally overlap by
    construction).
    """
    return {
        PunctMark.COMMA: text.count(","),
        PunctMark.SEMICOLON: text.count(";"),
        PunctMark.COLON: text.count(":"),
        PunctMark.EXCLAMATION: text.count("!"),
        PunctMark.QUESTION: text.count("?"),
        PunctMark.FULLSTOP: text.count("."),
        PunctMark.ELLIPSIS: len(_ELLIPSIS_RE.findall(text)),
    }


@dataclass
class StatsData:
    """Raw pooled material behind CorpusStats; merging two is list concat."""

    turn_word_counts: list[int] = field(default_factory=list)
    sentence_word_counts: list[int] = field(default_factory=list)
    n_tokens: int = 0
    punct: Counter = field(default_factory=Counter)
    n_segments: int = 0
    n_sentence_starts: int = 0

    def merge(self, other: "StatsData") -> "StatsData":
        return StatsData(
            self.turn_word_counts + other.turn_word_counts,
            self.sentence_word_counts + other.sentence_word_counts,
            self.n_tokens + other.n_tokens,
            self.punct + other.punct,
            self.n_segments + other.n_segments,
            self.n_sentence_starts + other.n_sentence_starts,
        )


@dataclass(frozen=True)
class CorpusStats:
    """Turn/sentence/token statistics plus the punctuation distribution.

    Lengths are in words, punctuation excluded; the token total includes
    punctuation (one token per terminal mark). Standard deviations are
    population deviations — the corpus is exhaustive, not sampled.
    """

    n_turns: int
    avg_turn_len: float
    std_turn_len: float
    n_sentences: int
    avg_sent_len: float
    std_sent_len: float
    n_tokens: int
    punct_histogram: dict[PunctMark, int]

    @classmethod
    def from_data(cls, data: StatsData) -> "CorpusStats":
        def mean_std(xs: list[int]) -> tuple[float, float]:
            if not xs:
                return 0.0, 0.0
            arr = np.asarray(xs, dtype=np.float64)
            return float(arr.mean()), float(arr.std(ddof=0))

        avg_t, std_t = mean_std(data.turn_word_counts)
        avg_s, std_s = mean_std(data.sentence_word_counts)
        hist = {mark: data.punct.get(mark, 0) for mark in PunctMark}
        return cls(
            n_turns=len(data.turn_word_counts),
            avg_turn_len=avg_t,
            std_turn_len=std_t,
            n_sentences=len(data.sentence_word_counts),
            avg_sent_len=avg_s,
            std_sent_len=std_s,
            n_tokens=data.n_tokens,
            punct_histogram=hist,
        )


def collect_stats(t: Transcript) -> StatsData:
    data = StatsData()
    per_turn = segment_transcript(t)
    for segs in per_turn:
        words = sum(len(s.tokens) for s in segs)
        data.turn_word_counts.append(words)
        data.sentence_word_counts.extend(sentence_word_counts(segs))
        marks = sum(1 for s in segs if s.mark is not None)
        data.n_tokens += words + marks
        data.n_segments += len(segs)
        for mark, count in punct_histogram(segs).items():
            if count:
                data.punct[mark] += count
    data.n_sentence_starts = sentence_starts(per_turn)
    return data


def corpus_stats(t: Transcript) -> CorpusStats:
    """Statistics for one transcript."""
    return CorpusStats.from_data(collect_stats(t))


def aggregate_stats(transcripts: Iterable[Transcript]) -> CorpusStats:
    """Corpus-level statistics: counts sum, means/stds pool all turns."""
    data = StatsData()
    for t in transcripts:
        data = data.merge(collect_stats(t))
    return CorpusStats.from_data(data)


@dataclass(frozen=True)
class TokenDiffRow:
    token: str
    hyp_count: int
    ref_count: int
    difference: int


def _count_tokens(t: Transcript) -> Counter:
    counts: Counter = Counter()
    for segs in segment_transcript(t):
        for s in segs:
            for word in s.tokens:
                counts[word.lower()] += 1
            if s.mark is not None:
                counts[s.mark.char] += 1
    return counts


def token_diff(hyp: Transcript | Sequence[Transcript], ref: Transcript | Sequence[Transcript]) -> list[TokenDiffRow]:
    """Per-token count difference (hyp - ref), descending; ties lexicographic.

    Tokens are lowercased words plus punctuation marks as their own tokens.
    The table is complete: every token seen on either side gets a row.
    """
    hyps = [hyp] if isinstance(hyp, Transcript) else list(hyp)
    refs = [ref] if isinstance(ref, Transcript) else list(ref)
    hyp_counts: Counter = Counter()
    ref_counts: Counter = Counter()
    for t in hyps:
        hyp_counts += _count_tokens(t)
    for t in refs:
        ref_counts += _count_tokens(t)
    rows = [
        TokenDiffRow(tok, hyp_counts.get(tok, 0), ref_counts.get(tok, 0),
                     hyp_counts.get(tok, 0) - ref_counts.get(tok, 0))
        for tok in set(hyp_counts) | set(ref_counts)
    ]
    rows.sort(key=lambda r: (-r.difference, r.token))
    return rows
