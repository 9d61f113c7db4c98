"""Durable store for alignment documents and marks.

Marks land in an append-only JSONL journal that is flushed before the
submit call returns, so an acknowledged mark survives a service restart.
``snapshot()`` compacts journal + state into snapshot.json.  Submissions
are serialized under one lock; readers get consistent copies.

A mark's ``word_index`` may be the skip sentinel (``None`` in memory,
``null`` in JSON): the annotator heard a pause but no new words (e.g. a
parenthetical reference was displayed).  Skipped silences merge their
audio into the following segment when the dataset is compiled.
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..audio import filter_segments
from ..errors import (
    IncompleteAnnotationError,
    IndexOutOfRangeError,
    NoCommonDocumentsError,
    NonMonotonicError,
    UnknownDocumentError,
)
from ..manifest import ManifestEntry

SKIP = None  # word_index sentinel: silence marked, no text progressed


@dataclass(frozen=True)
class Document:
    id: str
    words: tuple[str, ...]
    silence_markers: tuple[float, ...]
    audio_ref: str
    duration: float

    def __post_init__(self):
        if not self.words:
            raise ValueError(f"document {self.id}: words must be non-empty")
        times = self.silence_markers
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"document {self.id}: markers must be strictly increasing")
        if times and (times[0] <= 0 or times[-1] >= self.duration):
            raise ValueError(f"document {self.id}: markers must lie inside (0, duration)")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "words": list(self.words),
            "silence_markers": list(self.silence_markers),
            "audio_ref": self.audio_ref,
            "duration": self.duration,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Document":
        return cls(
            id=str(raw["id"]),
            words=tuple(raw["words"]),
            silence_markers=tuple(float(t) for t in raw["silence_markers"]),
            audio_ref=raw.get("audio_ref", ""),
            duration=float(raw["duration"]),
        )


@dataclass(frozen=True)
class AlignmentMark:
    doc_id: str
    annotator_id: str
    silence_index: int
    word_index: int | None
    created_at: str = ""

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "annotator_id": self.annotator_id,
            "silence_index": self.silence_index,
            "word_index": self.word_index,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AlignmentMark":
        return cls(
            doc_id=str(raw["doc_id"]),
            annotator_id=str(raw["annotator_id"]),
            silence_index=int(raw["silence_index"]),
            word_index=None if raw.get("word_index") is None else int(raw["word_index"]),
            created_at=raw.get("created_at", ""),
        )


@dataclass
class AgreementReport:
    ratio: float
    n_agreeing: int
    n_markers: int
    doc_ids: list[str] = field(default_factory=list)


class MarkStore:
    """Documents + marks with journal-backed durability."""

    def __init__(self, root):
        self.root = Path(root)
        self.documents_dir = self.root / "documents"
        self.journal_path = self.root / "journal.jsonl"
        self.snapshot_path = self.root / "snapshot.json"
        self.documents_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._documents: dict[str, Document] = {}
        self._marks: dict[tuple[str, str], dict[int, AlignmentMark]] = {}
        self._journal = None
        self._load()

    # -- lifecycle --

    def _load(self) -> None:
        for path in sorted(self.documents_dir.glob("*.json")):
            with open(path, encoding="utf-8") as f:
                doc = Document.from_dict(json.load(f))
            self._documents[doc.id] = doc
        if self.snapshot_path.exists():
            with open(self.snapshot_path, encoding="utf-8") as f:
                snap = json.load(f)
            for raw in snap.get("marks", []):
                self._remember(AlignmentMark.from_dict(raw))
        if self.journal_path.exists():
            with open(self.journal_path, encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        self._remember(AlignmentMark.from_dict(json.loads(line)))
        self._journal = open(self.journal_path, "a", encoding="utf-8")

    def close(self) -> None:
        with self._lock:
            if self._journal is not None:
                self._journal.close()
                self._journal = None

    def snapshot(self) -> None:
        """Compact: roll journal contents into snapshot.json."""
        with self._lock:
            marks = [m.to_dict() for per in self._marks.values() for m in per.values()]
            tmp = self.snapshot_path.with_suffix(".json.tmp")
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump({"marks": marks}, f)
            tmp.replace(self.snapshot_path)
            self._journal.close()
            self._journal = open(self.journal_path, "w", encoding="utf-8")

    def _remember(self, mark: AlignmentMark) -> None:
        self._marks.setdefault((mark.doc_id, mark.annotator_id), {})[mark.silence_index] = mark

    # -- documents --

    def import_document(self, doc: Document) -> None:
        with self._lock:
            path = self.documents_dir / f"{doc.id}.json"
            with open(path, "w", encoding="utf-8") as f:
                json.dump(doc.to_dict(), f, ensure_ascii=False, indent=2)
            self._documents[doc.id] = doc

    def get_document(self, doc_id: str) -> Document:
        with self._lock:
            doc = self._documents.get(doc_id)
        if doc is None:
            raise UnknownDocumentError(f"no document {doc_id!r}")
        return doc

    def list_documents(self, annotator_id: str | None = None) -> list[dict]:
        """Document summaries in stable id order; an annotator id reorders
        them into that annotator's deterministic random assignment order."""
        with self._lock:
            docs = sorted(self._documents.values(), key=lambda d: d.id)
            annotators = sorted({a for _, a in self._marks})
            out = []
            for doc in docs:
                completion = {}
                for annotator in annotators:
                    per = self._marks.get((doc.id, annotator))
                    if per:
                        completion[annotator] = len(per) / max(1, len(doc.silence_markers))
                out.append({
                    "doc_id": doc.id,
                    "duration": doc.duration,
                    "n_words": len(doc.words),
                    "n_markers": len(doc.silence_markers),
                    "completion": completion,
                })
        if annotator_id is not None:
            seed = int.from_bytes(hashlib.sha256(annotator_id.encode()).digest()[:8], "big")
            random.Random(seed).shuffle(out)
        return out

    # -- marks --

    def submit_mark(
        self,
        doc_id: str,
        annotator_id: str,
        silence_index: int,
        word_index: int | None,
    ) -> AlignmentMark:
        """Validate, persist, ack.  Upsert keyed by (doc, annotator, silence)."""
        with self._lock:
            doc = self._documents.get(doc_id)
            if doc is None:
                raise UnknownDocumentError(f"no document {doc_id!r}")
            if not 0 <= silence_index < len(doc.silence_markers):
                raise IndexOutOfRangeError(
                    f"silence index {silence_index} outside 0..{len(doc.silence_markers) - 1}"
                )
            if word_index is not SKIP:
                if not 0 <= word_index < len(doc.words):
                    raise IndexOutOfRangeError(
                        f"word index {word_index} outside 0..{len(doc.words) - 1}"
                    )
                per = self._marks.get((doc_id, annotator_id), {})
                for other in per.values():
                    if other.silence_index == silence_index or other.word_index is SKIP:
                        continue
                    if other.silence_index < silence_index and other.word_index > word_index:
                        raise NonMonotonicError(
                            f"word {word_index} at silence {silence_index} is below "
                            f"word {other.word_index} marked at silence {other.silence_index}"
                        )
                    if other.silence_index > silence_index and other.word_index < word_index:
                        raise NonMonotonicError(
                            f"word {word_index} at silence {silence_index} is above "
                            f"word {other.word_index} marked at silence {other.silence_index}"
                        )
            mark = AlignmentMark(
                doc_id=doc_id,
                annotator_id=annotator_id,
                silence_index=silence_index,
                word_index=word_index,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            self._journal.write(json.dumps(mark.to_dict(), ensure_ascii=False) + "\n")
            self._journal.flush()
            self._remember(mark)
            return mark

    def marks_for(self, doc_id: str, annotator_id: str) -> list[AlignmentMark]:
        with self._lock:
            per = self._marks.get((doc_id, annotator_id), {})
            return [per[k] for k in sorted(per)]

    def annotated_doc_ids(self, annotator_id: str) -> set[str]:
        with self._lock:
            return {d for d, a in self._marks if a == annotator_id and self._marks[(d, a)]}

    # -- derived views --

    def agreement(
        self,
        annotator_a: str,
        annotator_b: str,
        doc_ids: list[str] | None = None,
    ) -> AgreementReport:
        """Agreeing (silence, word) pairs over all markers in commonly
        annotated documents."""
        common = self.annotated_doc_ids(annotator_a) & self.annotated_doc_ids(annotator_b)
        if doc_ids is not None:
            common &= set(doc_ids)
        if not common:
            raise NoCommonDocumentsError(
                f"annotators {annotator_a!r} and {annotator_b!r} share no annotated documents"
            )
        n_agree = 0
        n_markers = 0
        for doc_id in sorted(common):
            doc = self.get_document(doc_id)
            n_markers += len(doc.silence_markers)
            marks_a = {m.silence_index: m.word_index for m in self.marks_for(doc_id, annotator_a)}
            marks_b = {m.silence_index: m.word_index for m in self.marks_for(doc_id, annotator_b)}
            for k in marks_a.keys() & marks_b.keys():
                if marks_a[k] == marks_b[k]:
                    n_agree += 1
        return AgreementReport(
            ratio=n_agree / n_markers if n_markers else 0.0,
            n_agreeing=n_agree,
            n_markers=n_markers,
            doc_ids=sorted(common),
        )

    def compile_dataset(
        self,
        annotator_id: str,
        doc_ids: list[str] | None = None,
    ) -> tuple[list[ManifestEntry], list[tuple[ManifestEntry, str]]]:
        """Cut fully annotated documents into manifest entries and run them
        through the post-processing filters."""
        if doc_ids is None:
            doc_ids = sorted(self.annotated_doc_ids(annotator_id))
        entries: list[ManifestEntry] = []
        for doc_id in doc_ids:
            doc = self.get_document(doc_id)
            marks = self.marks_for(doc_id, annotator_id)
            if len(marks) < len(doc.silence_markers):
                missing = len(doc.silence_markers) - len(marks)
                raise IncompleteAnnotationError(
                    f"document {doc_id}: {missing} of {len(doc.silence_markers)} silences unmarked"
                )
            entries.extend(segment_document(doc, marks))
        return filter_segments(entries)


def segment_document(doc: Document, marks: list[AlignmentMark]) -> list[ManifestEntry]:
    """Cut one document into segments from its marks.

    Segment k spans audio (marker_{k-1}, marker_k] and words
    (word_{k-1}+1 .. word_k]; a trailing segment carries the words after
    the last mark to the clip end.  Skip marks emit no boundary.
    """
    entries = []
    prev_time = 0.0
    prev_word = -1
    index = 0
    for mark in sorted(marks, key=lambda m: m.silence_index):
        if mark.word_index is SKIP:
            continue
        boundary = doc.silence_markers[mark.silence_index]
        text = " ".join(doc.words[prev_word + 1: mark.word_index + 1])
        entries.append(ManifestEntry(
            id=f"{doc.id}-{index:04d}",
            audio_ref=doc.audio_ref,
            start=prev_time,
            end=boundary,
            transcript=text,
        ))
        prev_time = boundary
        prev_word = mark.word_index
        index += 1
    if prev_word < len(doc.words) - 1:
        entries.append(ManifestEntry(
            id=f"{doc.id}-{index:04d}",
            audio_ref=doc.audio_ref,
            start=prev_time,
            end=doc.duration,
            transcript=" ".join(doc.words[prev_word + 1:]),
        ))
    return entries
