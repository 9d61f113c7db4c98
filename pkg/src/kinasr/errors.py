"""Exception hierarchy shared across the pipeline.

Every domain error derives from :class:`KinasrError` so the CLI can map
validation failures to a single exit code.
"""


class KinasrError(Exception):
    """Base class for all pipeline validation errors."""


# --- tokenizer ---

class UnknownSymbolError(KinasrError):
    """No vocabulary token matches the text at the reported offset."""

    def __init__(self, text: str, offset: int):
        self.offset = offset
        snippet = text[offset:offset + 8]
        super().__init__(f"no token matches {snippet!r} at offset {offset}")


class InvalidIdError(KinasrError):
    """Token id is out of range (or is the blank) for the vocabulary."""


# --- metrics ---

class EmptyReferenceError(KinasrError):
    """Reference is empty while the hypothesis is not; the pair is invalid."""


class EmptyCorpusError(KinasrError):
    """corpus_eval called with no pairs."""


# --- ctc decoding ---

class InvalidWidthError(KinasrError):
    """Beam width must be >= 1."""


class VocabMismatchError(KinasrError):
    """Posteriorgram column count differs from the vocabulary size."""


class TooLargeError(KinasrError):
    """Input exceeds the exhaustive oracle's combinatorial guard."""


# --- audio ---

class TooShortError(KinasrError):
    """Waveform shorter than one analysis window."""


class AudioFormatError(KinasrError):
    """WAV file is not PCM16 mono at the pipeline sample rate."""


class MissingTranscriptError(KinasrError):
    """Manifest entry lacks the transcript required by this stage."""


# --- curriculum ---

class MissingHypothesisError(KinasrError):
    """Manifest entry lacks the baseline hypothesis needed for ranking."""


class EmptyCleanError(KinasrError):
    """Curriculum planning needs a non-empty clean manifest."""


# --- pseudo labeling ---

class MissingScoreError(KinasrError):
    """Manifest entry lacks a score (or count) needed for selection."""


# --- alignment service ---

class UnknownDocumentError(KinasrError):
    """Referenced document id is not in the store."""


class IndexOutOfRangeError(KinasrError):
    """Silence or word index outside the document's bounds."""


class NonMonotonicError(KinasrError):
    """Mark would break the non-decreasing word-index order."""


class NoCommonDocumentsError(KinasrError):
    """The two annotators share no annotated documents."""


class IncompleteAnnotationError(KinasrError):
    """Document is not fully marked by the annotator."""
