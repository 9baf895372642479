"""Punctuation-prediction evaluation and transcript topic-summary toolkit.

Evaluates the punctuation of ASR transcripts against manual references
(normalization, segmentation, fuzzy alignment, per-mark scoring) and runs
a punctuation-driven topic-summary pipeline (topic assignment, budgeted
segment selection, BLANC scoring) over the same segments.
"""

__version__ = "0.1.0"

from .aligner import (  # noqa: F401
    AlignedPair,
    Alignment,
    AlignStep,
    align,
    lcs_length,
    levenshtein,
    match_documents,
    match_score,
)
from .corpus import (  # noqa: F401
    PunctMark,
    Role,
    Segment,
    Transcript,
    Turn,
    VectorTable,
    load_vectors,
    parse_asr_segments,
    parse_reference_transcript,
)
from .metrics import (  # noqa: F401
    ClassScore,
    ErrorRates,
    ErrorUnit,
    PunctConfusion,
    error_rates,
    macro_average,
    prf,
    punct_confusion,
)
from .segmenter import (  # noqa: F401
    CorpusStats,
    corpus_stats,
    punct_census,
    punct_histogram,
    segment,
    sentence_starts,
    sentences,
    token_diff,
)
from .textnorm import (  # noqa: F401
    NormalizedText,
    normalize,
    number_to_words_pt,
    remove_quotes,
    strip_annotations,
)
from .topics import (  # noqa: F401
    BlancCounts,
    MaskingTask,
    SummarySelection,
    TopicAssignment,
    assign_topics,
    blanc,
    cosine,
    make_masking_tasks,
    select_representatives,
)
