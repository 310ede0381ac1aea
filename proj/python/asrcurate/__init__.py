"""In-process access to the asrcurate per-document operations.

Documents are dicts ``{"doc_id": str, "lines": [(start, end, text), ...]}``
with an optional ``"text_lang"``. Pairs are dicts with ``doc_id``,
``audio_duration``, optional ``audio_lang``, ``manual`` (a document) and an
optional ``machine`` document.
"""

from ._asrcurate import (
    AsrCurateError,
    DataError,
    InternalError,
    UsageError,
    __version__,
    apply_filter,
    case_tag,
    decontaminate,
    detect_repeats,
    doc_wer_filter,
    filter_case,
    filter_language,
    filter_repeats,
    find_duplicates,
    normalize_text,
    segment_document,
    segment_wer_filter,
    signature,
    word_error_rate,
)

__all__ = [
    "AsrCurateError",
    "DataError",
    "InternalError",
    "UsageError",
    "__version__",
    "apply_filter",
    "case_tag",
    "decontaminate",
    "detect_repeats",
    "doc_wer_filter",
    "filter_case",
    "filter_language",
    "filter_repeats",
    "find_duplicates",
    "normalize_text",
    "segment_document",
    "segment_wer_filter",
    "signature",
    "word_error_rate",
]
