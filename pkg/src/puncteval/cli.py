"""Command-line pipeline: stats, align, score, topics, blanc, pipeline.

Every emitted JSON report embeds the full run configuration, floats are
rounded to four decimals (one decimal in percentage tables), and ordering
is fixed everywhere, so identical inputs produce byte-identical reports.
The primary component contains no randomness at all.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .aligner import AlignedPair, Alignment, AlignStep, align
from .corpus import (
    SENTENCE_MARKS,
    PunctMark,
    Segment,
    Transcript,
    Turn,
    iter_jsonl,
    load_manifest,
    load_vectors,
    parse_asr_records,
    parse_asr_segments,
    parse_reference_transcript,
    write_jsonl,
)
from .errors import PunctEvalError
from .metrics import (
    ErrorUnit,
    MacroAverage,
    error_rates,
    macro_average,
    prf,
    punct_confusion,
    scored_marks,
)
from .segmenter import (
    CorpusStats,
    aggregate_stats,
    segment,
    segment_transcript,
    token_diff,
)
from .textnorm import normalize, remove_quotes, strip_annotations
from .topics import (
    assign_topics,
    blanc_from_count_records,
    make_masking_tasks,
    select_representatives,
)

MARK_NAMES = {
    PunctMark.COMMA: "Comma",
    PunctMark.SEMICOLON: "Semicolon",
    PunctMark.COLON: "Colon",
    PunctMark.EXCLAMATION: "Exclamation",
    PunctMark.QUESTION: "Question",
    PunctMark.FULLSTOP: "FullStop",
    PunctMark.ELLIPSIS: "Ellipsis",
}

DISTRIBUTION_ORDER = (
    PunctMark.ELLIPSIS,
    PunctMark.EXCLAMATION,
    PunctMark.FULLSTOP,
    PunctMark.QUESTION,
    PunctMark.COMMA,
    PunctMark.SEMICOLON,
    PunctMark.COLON,
)


@dataclass(frozen=True)
class RunConfig:
    """Everything that influenced a run, embedded in each report."""

    tau: float = 0.90
    tau_ctx: float = 0.60
    lookahead: int = 5
    gap: int = 6
    min_token_len: int = 4
    budget_s: float = 600.0
    group_by: str | None = None
    inputs: dict[str, str] | None = None
    version: str = __version__

    def to_dict(self) -> dict:
        d = asdict(self)
        d["inputs"] = dict(sorted((self.inputs or {}).items()))
        return d

    @classmethod
    def from_args(cls, args: argparse.Namespace, **inputs: str | None) -> "RunConfig":
        return cls(
            tau=getattr(args, "tau", 0.90),
            tau_ctx=getattr(args, "tau_ctx", 0.60),
            lookahead=getattr(args, "lookahead", 5),
            gap=getattr(args, "gap", 6),
            min_token_len=getattr(args, "min_token_len", 4),
            budget_s=getattr(args, "budget_s", 600.0),
            group_by=getattr(args, "group_by", None),
            inputs={k: v for k, v in inputs.items() if v is not None},
        )


def _round_floats(obj: Any, ndigits: int = 4) -> Any:
    if isinstance(obj, float):
        return round(obj, ndigits)
    if isinstance(obj, dict):
        return {k: _round_floats(v, ndigits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, ndigits) for v in obj]
    return obj


def write_report(report: dict, out: str | None) -> None:
    text = json.dumps(_round_floats(report), ensure_ascii=False, indent=2) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _worker_count() -> int:
    env = os.environ.get("PUNCT_EVAL_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def preprocess_transcript(t: Transcript) -> Transcript:
    """Strip annotations and quotation marks from every turn.

    Applied to both sides before segmentation: annotations mark non-speech
    events, and quotation marks are removed so transcripts that cannot
    carry them are compared fairly.
    """
    turns = tuple(
        Turn(
            role=turn.role,
            text=remove_quotes(strip_annotations(turn.text)),
            start_s=turn.start_s,
            end_s=turn.end_s,
            speaker=turn.speaker,
        )
        for turn in t.turns
    )
    return Transcript(interview_id=t.interview_id, turns=turns, speaker_meta=t.speaker_meta)


def _load_transcripts(path: str, kind: str) -> list[Transcript]:
    """Load one transcript file or every transcript in a directory.

    kind "ref" reads turn-labeled text (*.txt); kind "hyp" reads diarized
    segment JSONL (*.jsonl). Interview ids come from file stems.
    """
    p = Path(path)
    files: list[Path]
    if p.is_dir():
        pattern = "*.txt" if kind == "ref" else "*.jsonl"
        files = sorted(p.glob(pattern))
        if not files:
            raise PunctEvalError(f"no {pattern} files in {p}")
    else:
        files = [p]
    out = []
    for f in files:
        if kind == "ref":
            parsed = parse_reference_transcript(f.read_bytes(), interview_id=f.stem)
        else:
            parsed = parse_asr_segments(f.read_bytes(), interview_id=f.stem)
        out.append(preprocess_transcript(parsed))
    return out


def flatten_segments(t: Transcript) -> list[Segment]:
    return [s for segs in segment_transcript(t) for s in segs]


# ---------------------------------------------------------------- stats ----


def _stats_block(stats: CorpusStats) -> dict:
    total_marks = sum(stats.punct_histogram.values()) or 1
    return {
        "n_turns": stats.n_turns,
        "avg_turn_len": stats.avg_turn_len,
        "std_turn_len": stats.std_turn_len,
        "n_sentences": stats.n_sentences,
        "avg_sent_len": stats.avg_sent_len,
        "std_sent_len": stats.std_sent_len,
        "n_tokens": stats.n_tokens,
        "punct_distribution": {
            MARK_NAMES[m]: {
                "count": stats.punct_histogram[m],
                "percent": 100.0 * stats.punct_histogram[m] / total_marks,
            }
            for m in DISTRIBUTION_ORDER
        },
    }


def _stats_table(report: dict) -> str:
    sides = [k for k in ("reference", "hypothesis") if k in report]
    lines = []
    header = f"{'':24}" + "".join(f"{s:>22}" for s in sides)
    lines.append(header)
    rows = [
        ("turns", "n_turns", "{:d}"),
        ("avg turn length", None, None),
        ("sentences", "n_sentences", "{:d}"),
        ("avg sentence length", None, None),
        ("tokens", "n_tokens", "{:d}"),
    ]
    for label, key, fmt in rows:
        cells = []
        for s in sides:
            block = report[s]
            if key:
                cells.append(fmt.format(block[key]))
            elif label.startswith("avg turn"):
                cells.append(f"{block['avg_turn_len']:.2f} ± {block['std_turn_len']:.2f}")
            else:
                cells.append(f"{block['avg_sent_len']:.2f} ± {block['std_sent_len']:.2f}")
        lines.append(f"{label:24}" + "".join(f"{c:>22}" for c in cells))
    lines.append("")
    lines.append(f"{'mark':24}" + "".join(f"{s + ' # (%)':>22}" for s in sides))
    for m in DISTRIBUTION_ORDER:
        name = MARK_NAMES[m]
        cells = []
        for s in sides:
            d = report[s]["punct_distribution"][name]
            cells.append(f"{d['count']} ({d['percent']:.1f}%)")
        lines.append(f"{name:24}" + "".join(f"{c:>22}" for c in cells))
    return "\n".join(lines) + "\n"


def cmd_stats(args: argparse.Namespace) -> int:
    refs = _load_transcripts(args.ref, "ref") if args.ref else []
    hyps = _load_transcripts(args.hyp, "hyp") if args.hyp else []
    if not refs and not hyps:
        raise PunctEvalError("stats needs --ref and/or --hyp")
    config = RunConfig.from_args(args, ref=args.ref, hyp=args.hyp)
    report: dict[str, Any] = {"config": config.to_dict()}
    if refs:
        report["reference"] = _stats_block(aggregate_stats(refs))
    if hyps:
        report["hypothesis"] = _stats_block(aggregate_stats(hyps))
    if refs and hyps:
        rows = token_diff(hyps, refs)
        report["token_diff"] = [
            {"token": r.token, "hyp_count": r.hyp_count, "ref_count": r.ref_count,
             "difference": r.difference}
            for r in rows[: args.diff_rows]
        ]
    if args.format == "table":
        sys.stdout.write(_stats_table(report))
    if args.out or args.format == "json":
        write_report(report, args.out)
    return 0


# ---------------------------------------------------------------- align ----


def pair_to_record(p: AlignedPair) -> dict:
    return {
        "ref_id": p.ref_id,
        "hyp_id": p.hyp_id,
        "score": round(p.score, 4),
        "step": p.step.value,
        "ref_text": p.ref_text,
        "hyp_text": p.hyp_text,
        "ref_mark": p.ref_mark.char if p.ref_mark else None,
        "hyp_mark": p.hyp_mark.char if p.hyp_mark else None,
    }


def record_to_pair(rec: dict) -> AlignedPair:
    return AlignedPair(
        ref_id=rec["ref_id"],
        hyp_id=rec["hyp_id"],
        score=float(rec["score"]),
        step=AlignStep(rec["step"]),
        ref_text=rec["ref_text"],
        hyp_text=rec["hyp_text"],
        ref_mark=PunctMark.from_str(rec["ref_mark"]) if rec["ref_mark"] else None,
        hyp_mark=PunctMark.from_str(rec["hyp_mark"]) if rec["hyp_mark"] else None,
    )


def align_transcripts(ref: Transcript, hyp: Transcript, config: RunConfig) -> Alignment:
    return align(
        flatten_segments(ref),
        flatten_segments(hyp),
        tau=config.tau,
        tau_ctx=config.tau_ctx,
        lookahead=config.lookahead,
    )


def cmd_align(args: argparse.Namespace) -> int:
    ref = _load_transcripts(args.ref, "ref")
    hyp = _load_transcripts(args.hyp, "hyp")
    if len(ref) != 1 or len(hyp) != 1:
        raise PunctEvalError("align expects exactly one reference and one hypothesis file")
    config = RunConfig.from_args(args, ref=args.ref, hyp=args.hyp)
    alignment = align_transcripts(ref[0], hyp[0], config)
    write_jsonl(args.out, (pair_to_record(p) for p in alignment.pairs))
    write_report(
        {
            "config": config.to_dict(),
            "n_pairs": len(alignment.pairs),
            "coverage": alignment.coverage,
            "pairs_file": str(args.out),
        },
        None,
    )
    return 0


# ---------------------------------------------------------------- score ----


def _macro_dict(macro: MacroAverage) -> dict:
    return {
        "precision": {"mean": macro.precision[0], "std": macro.precision[1]},
        "recall": {"mean": macro.recall[0], "std": macro.recall[1]},
        "f1": {"mean": macro.f1[0], "std": macro.f1[1]},
        "n_classes": macro.n_classes,
    }


def score_alignment(alignment: Alignment, group: str | None = None) -> dict:
    """Per-class P/R/F1, macro averages and WER/CER for one alignment."""
    confusion = punct_confusion(alignment)
    included = scored_marks(confusion)
    per_class = []
    for mark in PunctMark:
        s = prf(confusion, mark)
        per_class.append(
            {
                "mark": MARK_NAMES[mark],
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "degenerate": s.degenerate,
                "in_macro": mark in included,
            }
        )
    report: dict[str, Any] = {"per_class": per_class}
    if len(included) >= 2:
        report["macro"] = _macro_dict(macro_average([prf(confusion, m) for m in included]))
    try:
        report["wer"] = error_rates(alignment, ErrorUnit.WORD).wer
        report["cer"] = error_rates(alignment, ErrorUnit.CHAR).wer
    except PunctEvalError:
        report["wer"] = None
        report["cer"] = None
    report["coverage"] = alignment.coverage
    report["n_pairs"] = len(alignment.pairs)
    if group is not None:
        report["group"] = group
    return report


def _score_table(report: dict) -> str:
    lines = [f"{'':14}{'P (%)':>10}{'R (%)':>10}{'F1 (%)':>10}"]
    for row in report["per_class"]:
        if row["in_macro"]:
            cells = [f"{row[k]:.1f}" for k in ("precision", "recall", "f1")]
        else:
            cells = ["---"] * 3
        lines.append(f"{row['mark']:14}" + "".join(f"{c:>10}" for c in cells))
    if "macro" in report:
        m = report["macro"]
        cells = [f"{m[k]['mean']:.1f} ± {m[k]['std']:.1f}" for k in ("precision", "recall", "f1")]
        lines.append(f"{'Average':14}" + "".join(f"{c:>16}" for c in cells))
    if report.get("wer") is not None:
        lines.append(f"WER {100 * report['wer']:.2f}%  CER {100 * report['cer']:.2f}%  "
                     f"coverage {100 * report['coverage']:.2f}%")
    return "\n".join(lines) + "\n"


def cmd_score(args: argparse.Namespace) -> int:
    pairs = [record_to_pair(rec) for _ln, rec in iter_jsonl(Path(args.alignment))]
    alignment = Alignment.from_pairs(pairs)
    config = RunConfig.from_args(args, alignment=args.alignment)
    report = {"config": config.to_dict(), **score_alignment(alignment, group=args.group)}
    if args.format == "table":
        sys.stdout.write(_score_table(report))
        if args.out:
            write_report(report, args.out)
    else:
        write_report(report, args.out)
    return 0


# --------------------------------------------------------------- topics ----


def cmd_topics(args: argparse.Namespace) -> int:
    records = parse_asr_records(Path(args.segments))
    spans = {r.id: (r.start_s, r.end_s) for r in records}
    seg_vectors = load_vectors(Path(args.segment_vectors))
    taxonomy = load_vectors(Path(args.taxonomy))
    missing = [sid for sid in seg_vectors.ids() if sid not in spans]
    if missing:
        raise PunctEvalError(f"segment vectors without time spans: {missing[:5]}")
    assignments = assign_topics(seg_vectors, taxonomy)
    selection = select_representatives(
        assignments, spans, budget_s=args.budget_s, per_topic_quota=args.per_topic_quota
    )
    config = RunConfig.from_args(
        args,
        segments=args.segments,
        segment_vectors=args.segment_vectors,
        taxonomy=args.taxonomy,
    )
    write_jsonl(
        args.out_assignments,
        (
            {"segment_id": a.segment_id, "topic_id": a.topic_id,
             "similarity": round(a.similarity, 4)}
            for a in assignments
        ),
    )
    edl = {
        "interview_id": args.interview_id,
        "budget_s": args.budget_s,
        "total_duration_s": selection.total_duration_s,
        "clips": [
            {
                "segment_id": c.segment_id,
                "start_s": c.start_s,
                "end_s": c.end_s,
                "topic_id": c.topic_id,
                "similarity": c.similarity,
            }
            for c in selection.clips
        ],
        "config": config.to_dict(),
    }
    write_report(edl, args.out_edl)
    return 0


# ---------------------------------------------------------------- blanc ----


def document_sentence_tokens(text: str) -> list[list[str]]:
    """Normalized per-sentence token lists for masking.

    Words of non-sentence segments accumulate onto the following sentence;
    a trailing unterminated group becomes a final sentence of its own so
    every document word is maskable.
    """
    groups: list[list[str]] = []
    pending: list[str] = []
    for seg in segment(text):
        pending.extend(normalize(seg.raw_text).tokens)
        if seg.mark in SENTENCE_MARKS:
            if pending:
                groups.append(pending)
            pending = []
    if pending:
        groups.append(pending)
    return groups


def cmd_blanc(args: argparse.Namespace) -> int:
    if args.counts:
        records = [rec for _ln, rec in iter_jsonl(Path(args.counts))]
        score, counts = blanc_from_count_records(records)
        config = RunConfig.from_args(args, counts=args.counts)
        report = {
            "config": config.to_dict(),
            "blanc": score,
            "n_help": counts.n_help,
            "n_base": counts.n_base,
            "n_total": counts.n_total,
        }
        write_report(report, args.out)
        return 0
    if not (args.doc and args.summary):
        raise PunctEvalError("blanc needs either --counts or both --doc and --summary")
    doc_text = Path(args.doc).read_text(encoding="utf-8")
    summary_text = Path(args.summary).read_text(encoding="utf-8")
    sentences = document_sentence_tokens(doc_text)
    summary_norm = " ".join(normalize(summary_text).tokens)
    tasks = make_masking_tasks(
        sentences, summary_norm, gap=args.gap, min_token_len=args.min_token_len
    )
    write_jsonl(args.out, (t.to_record() for t in tasks))
    sys.stdout.write(f"wrote {len(tasks)} masking tasks to {args.out}\n")
    return 0


# ------------------------------------------------------------- pipeline ----


def _run_interview(entry: dict, config: RunConfig) -> dict:
    tags = {str(k): str(v) for k, v in entry.get("tags", {}).items()}
    ref = preprocess_transcript(
        parse_reference_transcript(
            Path(entry["ref"]).read_bytes(), interview_id=entry["interview_id"]
        )
    )
    ref = Transcript(interview_id=ref.interview_id, turns=ref.turns, speaker_meta=tags)
    hyp = preprocess_transcript(
        parse_asr_segments(Path(entry["hyp"]).read_bytes(), interview_id=entry["interview_id"])
    )
    alignment = align_transcripts(ref, hyp, config)
    return {
        "interview_id": entry["interview_id"],
        "tags": entry.get("tags", {}),
        "pairs": [pair_to_record(p) for p in alignment.pairs],
        "coverage": alignment.coverage,
    }


def cmd_pipeline(args: argparse.Namespace) -> int:
    entries = load_manifest(args.manifest)
    config = RunConfig.from_args(args, manifest=args.manifest)
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(lambda e: _run_interview(e, config), entries))
    results.sort(key=lambda r: r["interview_id"])

    def scored(pair_records: list[dict], group: str | None) -> dict:
        pairs = [record_to_pair(rec) for rec in pair_records]
        return score_alignment(Alignment.from_pairs(pairs), group=group)

    all_pairs = [rec for r in results for rec in r["pairs"]]
    report: dict[str, Any] = {
        "config": config.to_dict(),
        "interviews": [
            {"interview_id": r["interview_id"], "tags": r["tags"],
             "n_pairs": len(r["pairs"]), "coverage": r["coverage"]}
            for r in results
        ],
        "overall": scored(all_pairs, group=None),
    }
    manifest_raw = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    if "asr_meta" in manifest_raw:
        report["asr_meta"] = manifest_raw["asr_meta"]
    if args.group_by:
        groups: dict[str, list[dict]] = {}
        for r in results:
            tag = r["tags"].get(args.group_by, "unknown")
            groups.setdefault(tag, []).extend(r["pairs"])
        report["groups"] = {
            tag: scored(pair_records, group=tag)
            for tag, pair_records in sorted(groups.items())
        }
    if args.format == "table":
        sys.stdout.write("overall\n" + _score_table(report["overall"]))
        for tag, block in report.get("groups", {}).items():
            sys.stdout.write(f"\n{args.group_by}={tag}\n" + _score_table(block))
    write_report(report, args.out)
    return 0


# ----------------------------------------------------------------- main ----


def _add_align_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, default=0.90, help="preliminary score threshold")
    p.add_argument("--tau-ctx", dest="tau_ctx", type=float, default=0.60,
                   help="contextual score threshold")
    p.add_argument("--lookahead", type=int, default=5, help="preliminary look-ahead bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="puncteval",
        description="Punctuation-prediction evaluation and transcript topic summaries",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus statistics and punctuation distribution")
    p.add_argument("--ref", help="reference transcript file or directory")
    p.add_argument("--hyp", help="hypothesis segment JSONL file or directory")
    p.add_argument("--out", help="JSON report path (stdout if omitted)")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--diff-rows", type=int, default=20, help="token-diff rows to keep")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("align", help="align reference segments to hypothesis segments")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--out", required=True, help="aligned-pair JSONL path")
    _add_align_flags(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("score", help="punctuation P/R/F1 and WER/CER from aligned pairs")
    p.add_argument("--alignment", required=True, help="aligned-pair JSONL path")
    p.add_argument("--out", help="JSON report path (stdout if omitted)")
    p.add_argument("--group", help="group tag recorded in the report")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("topics", help="assign topics and select a budgeted summary")
    p.add_argument("--segments", required=True, help="segment JSONL with time spans")
    p.add_argument("--segment-vectors", dest="segment_vectors", required=True)
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--budget-s", dest="budget_s", type=float, default=600.0)
    p.add_argument("--per-topic-quota", dest="per_topic_quota", type=int, default=None,
                   help="cap clips per topic for a more diverse summary")
    p.add_argument("--interview-id", dest="interview_id", default="interview")
    p.add_argument("--out-assignments", dest="out_assignments", required=True)
    p.add_argument("--out-edl", dest="out_edl", required=True)
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("blanc", help="emit masking tasks or score unmasking counts")
    p.add_argument("--doc", help="document text file")
    p.add_argument("--summary", help="summary text file")
    p.add_argument("--counts", help="unmasking-count JSONL from the bridge")
    p.add_argument("--out", help="tasks JSONL (emit mode) or report path (score mode)")
    p.add_argument("--gap", type=int, default=6)
    p.add_argument("--min-token-len", dest="min_token_len", type=int, default=4)
    p.set_defaults(func=cmd_blanc)

    p = sub.add_parser("pipeline", help="stats+align+score over a manifest of interviews")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="JSON report path (stdout if omitted)")
    p.add_argument("--group-by", dest="group_by", help="manifest tag to group reports by")
    p.add_argument("--format", choices=("json", "table"), default="json")
    _add_align_flags(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PunctEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
