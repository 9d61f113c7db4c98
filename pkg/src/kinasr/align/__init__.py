from .store import (
    AgreementReport,
    AlignmentMark,
    Document,
    MarkStore,
    SKIP,
    segment_document,
)

__all__ = [
    "AgreementReport",
    "AlignmentMark",
    "Document",
    "MarkStore",
    "SKIP",
    "segment_document",
]
