"""Domain types and parsers for every external data format.

Three formats come in: turn-labeled reference transcripts (plain UTF-8
text, labels ``P/1:`` / ``P/2:`` / ``R:`` at line starts), ASR hypothesis
segments (JSON Lines, one diarized record per line), and id->vector tables
(JSON Lines). Everything parsed here is immutable and safe to share across
worker threads; per-interview parallelism is the intended unit.
"""

from __future__ import annotations

import enum
import io
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    EmptyInput,
    EncodingError,
    SchemaError,
    TimeOrderError,
)

log = logging.getLogger(__name__)


class PunctMark(enum.Enum):
    """The seven evaluated terminal punctuation marks."""

    COMMA = ","
    SEMICOLON = ";"
    COLON = ":"
    EXCLAMATION = "!"
    QUESTION = "?"
    FULLSTOP = "."
    ELLIPSIS = "..."

    @property
    def char(self) -> str:
        return self.value

    @classmethod
    def from_str(cls, s: str) -> "PunctMark":
        for mark in cls:
            if mark.value == s:
                return mark
        raise ValueError(f"unknown punctuation mark {s!r}")


# Sentence-final marks: the segments carrying a complete idea.
SENTENCE_MARKS = frozenset({PunctMark.FULLSTOP, PunctMark.QUESTION, PunctMark.EXCLAMATION})


class Role(enum.Enum):
    INTERVIEWER1 = "P/1"
    INTERVIEWER2 = "P/2"
    RESPONDENT = "R"
    UNKNOWN = "?"


@dataclass(frozen=True)
class Turn:
    """One labeled stretch of speech by a single speaker."""

    role: Role
    text: str
    start_s: float | None = None
    end_s: float | None = None
    speaker: str | None = None

    def __post_init__(self) -> None:
        if self.start_s is not None and self.end_s is not None and self.end_s < self.start_s:
            raise TimeOrderError(f"turn end {self.end_s} precedes start {self.start_s}")


@dataclass(frozen=True)
class Segment:
    """A token span ended by one terminal mark (tail segments have none)."""

    id: str
    tokens: tuple[str, ...]
    mark: PunctMark | None
    raw_text: str
    start_s: float | None = None
    end_s: float | None = None

    @property
    def text_with_mark(self) -> str:
        return self.raw_text + (self.mark.char if self.mark else "")


@dataclass(frozen=True)
class Transcript:
    """An interview: ordered turns plus free-form speaker metadata tags."""

    interview_id: str
    turns: tuple[Turn, ...]
    speaker_meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.interview_id:
            raise ValueError("interview_id must be non-empty")


# Labels are accepted with or without the trailing colon ("P/1:" or "P/1");
# a colonless label still needs following whitespace so ordinary words
# starting a continuation line never match.
_LABEL_RE = re.compile(r"^\s*(P/\d+|R)\s*(?::\s*|\s+|$)", re.IGNORECASE)

_ROLE_BY_LABEL = {"P/1": Role.INTERVIEWER1, "P/2": Role.INTERVIEWER2, "R": Role.RESPONDENT}


def _decode_utf8(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc


def parse_reference_transcript(text: str | bytes, interview_id: str) -> Transcript:
    """Parse a turn-labeled manual transcript.

    ``P/1:`` and ``P/2:`` open interviewer turns, ``R:`` the respondent's;
    unlabeled lines continue the current turn (joined with single spaces).
    Text before the first label becomes a Role.UNKNOWN turn; labels other
    than the documented three map to Role.UNKNOWN with a warning.
    """
    text = _decode_utf8(text)
    turns: list[Turn] = []
    current_role: Role | None = None
    current_parts: list[str] = []
    saw_label = False

    def close() -> None:
        if current_role is None:
            return
        body = " ".join(p for p in current_parts if p)
        if body:
            turns.append(Turn(role=current_role, text=body))

    for line in text.splitlines():
        m = _LABEL_RE.match(line)
        if m:
            saw_label = True
            close()
            label = m.group(1).upper()
            role = _ROLE_BY_LABEL.get(label)
            if role is None:
                log.warning("unknown turn label %r in %s; using Unknown role", label, interview_id)
                role = Role.UNKNOWN
            current_role = role
            current_parts = [line[m.end() :].strip()]
        else:
            stripped = line.strip()
            if not stripped:
                continue
            if current_role is None:
                current_role = Role.UNKNOWN
                current_parts = []
            current_parts.append(stripped)
    close()

    if not saw_label:
        raise EmptyInput(f"no turn label found in transcript {interview_id!r}")
    return Transcript(interview_id=interview_id, turns=tuple(turns))


def serialize_reference_transcript(t: Transcript) -> str:
    """Inverse of parse_reference_transcript (modulo whitespace)."""
    lines = []
    for turn in t.turns:
        label = turn.role.value if turn.role is not Role.UNKNOWN else "P/0"
        lines.append(f"{label}: {turn.text}")
    return "\n".join(lines) + "\n"


_ASR_FIELDS = ("id", "start_s", "end_s", "speaker", "text")


def iter_jsonl(data: bytes | str | io.IOBase | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_no, record) pairs from JSONL bytes, text, path or file."""
    if isinstance(data, Path):
        data = data.read_bytes()
    if isinstance(data, io.IOBase):
        data = data.read()
    text = _decode_utf8(data)
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON ({exc.msg})", line_no) from exc
        if not isinstance(record, dict):
            raise SchemaError("record is not a JSON object", line_no)
        yield line_no, record


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class AsrRecord:
    id: str
    start_s: float
    end_s: float
    speaker: str | None
    text: str


def parse_asr_records(jsonl: bytes | str | io.IOBase | Path) -> list[AsrRecord]:
    """Parse diarized ASR segment records, validating schema and times."""
    records: list[AsrRecord] = []
    for line_no, raw in iter_jsonl(jsonl):
        for name in _ASR_FIELDS:
            if name not in raw:
                raise SchemaError(f"missing field {name!r}", line_no)
        start_s, end_s = float(raw["start_s"]), float(raw["end_s"])
        if end_s < start_s:
            raise TimeOrderError(f"line {line_no}: end_s {end_s} < start_s {start_s}")
        records.append(
            AsrRecord(
                id=str(raw["id"]),
                start_s=start_s,
                end_s=end_s,
                speaker=raw["speaker"] if raw["speaker"] is None else str(raw["speaker"]),
                text=str(raw["text"]),
            )
        )
    return records


def parse_asr_segments(jsonl: bytes | str | io.IOBase | Path, interview_id: str) -> Transcript:
    """Group diarized ASR records into turns by consecutive speaker.

    A change of speaker closes the turn; records with a null speaker never
    group (diarization quality is an input property, not repaired here).
    """
    records = parse_asr_records(jsonl)
    turns: list[Turn] = []
    run: list[AsrRecord] = []

    def close() -> None:
        if not run:
            return
        turns.append(
            Turn(
                role=Role.UNKNOWN,
                text=" ".join(r.text.strip() for r in run if r.text.strip()),
                start_s=run[0].start_s,
                end_s=run[-1].end_s,
                speaker=run[0].speaker,
            )
        )

    for rec in records:
        if run and (rec.speaker is None or rec.speaker != run[-1].speaker):
            close()
            run = []
        run.append(rec)
    close()
    return Transcript(interview_id=interview_id, turns=tuple(turns))


def serialize_asr_segments(t: Transcript) -> str:
    """One JSONL line per turn, in the diarized-record schema."""
    lines = []
    for i, turn in enumerate(t.turns):
        lines.append(
            json.dumps(
                {
                    "id": f"{t.interview_id}-r{i}",
                    "start_s": turn.start_s if turn.start_s is not None else 0.0,
                    "end_s": turn.end_s if turn.end_s is not None else 0.0,
                    "speaker": turn.speaker,
                    "text": turn.text,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VectorTable:
    """Uniform-dimension id->vector map with optional per-id labels."""

    vectors: dict[str, np.ndarray]
    labels: dict[str, str]
    dim: int

    def __len__(self) -> int:
        return len(self.vectors)

    def ids(self) -> list[str]:
        return list(self.vectors.keys())


def load_vectors(jsonl: bytes | str | io.IOBase | Path) -> VectorTable:
    """Load a JSONL vector table, enforcing one dimension throughout."""
    vectors: dict[str, np.ndarray] = {}
    labels: dict[str, str] = {}
    dim: int | None = None
    for line_no, raw in iter_jsonl(jsonl):
        for name in ("id", "vector"):
            if name not in raw:
                raise SchemaError(f"missing field {name!r}", line_no)
        vid = str(raw["id"])
        if vid in vectors:
            raise DuplicateId(f"line {line_no}: duplicate vector id {vid!r}")
        vec = np.asarray(raw["vector"], dtype=np.float64)
        if vec.ndim != 1 or vec.size < 1:
            raise SchemaError(f"vector for id {vid!r} is not a flat non-empty list", line_no)
        if dim is None:
            dim = int(vec.size)
        elif vec.size != dim:
            raise DimensionMismatch(
                f"vector {vid!r} has dimension {vec.size}, expected {dim}"
            )
        vectors[vid] = vec
        if "label" in raw and raw["label"] is not None:
            labels[vid] = str(raw["label"])
    if dim is None:
        raise EmptyInput("vector table is empty")
    return VectorTable(vectors=vectors, labels=labels, dim=dim)


def serialize_vectors(table: VectorTable) -> str:
    lines = []
    for vid, vec in table.vectors.items():
        rec: dict[str, Any] = {"id": vid, "vector": [float(x) for x in vec]}
        if vid in table.labels:
            rec["label"] = table.labels[vid]
        lines.append(json.dumps(rec, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def load_manifest(path: str | Path) -> list[dict]:
    """Read the sidecar manifest listing interviews, file paths and tags.

    Schema: {"interviews": [{"interview_id", "ref", "hyp", "tags": {...}}]}.
    Paths are resolved relative to the manifest's directory.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    entries = data.get("interviews")
    if not isinstance(entries, list):
        raise SchemaError('manifest must contain an "interviews" list')
    base = path.parent
    out = []
    for e in entries:
        if "interview_id" not in e:
            raise SchemaError('manifest entry missing "interview_id"')
        entry = dict(e)
        for key in ("ref", "hyp"):
            if key in entry and entry[key] is not None:
                entry[key] = str((base / entry[key]).resolve())
        entry.setdefault("tags", {})
        out.append(entry)
    return out
