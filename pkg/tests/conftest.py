import json
from pathlib import Path

import pytest

from puncteval.corpus import parse_reference_transcript

DATA = Path(__file__).parent / "data"


def pytest_runtest_logreport(report):
    """One pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {name}: {report.outcome.upper()}", flush=True)


@pytest.fixture(scope="session")
def whisper_excerpt():
    """The four-turn ASR-output excerpt used as golden data."""
    return parse_reference_transcript(
        (DATA / "excerpt_whisper.txt").read_bytes(), interview_id="excerpt-whisper"
    )


@pytest.fixture(scope="session")
def manual_excerpt():
    """The matching four-turn manual transcription."""
    return parse_reference_transcript(
        (DATA / "excerpt_manual.txt").read_bytes(), interview_id="excerpt-manual"
    )


@pytest.fixture()
def asr_jsonl_factory(tmp_path):
    """Write diarized ASR records to a JSONL file and return its path."""

    def make(records, name="hyp.jsonl"):
        path = tmp_path / name
        path.write_text(
            "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
            encoding="utf-8",
        )
        return path

    return make
