"""Utterance manifest records and JSONL I/O.

A manifest is a JSONL file of one utterance per line; every pipeline stage
reads and writes this shape, so any stage can be swapped for external
tooling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path


@dataclass(frozen=True)
class ManifestEntry:
    """One utterance: where the audio lives, what was said, and stage scores."""

    id: str
    audio_ref: str = ""
    start: float = 0.0
    end: float = 0.0
    transcript: str | None = None
    hypothesis: str | None = None
    cer_vs_baseline: float | None = None
    ctc_log_score: float | None = None
    lm_log_prob: float | None = None
    n_tokens: int | None = None
    n_frames: int | None = None
    labels: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"entry {self.id}: end {self.end} < start {self.start}")

    @property
    def duration(self) -> float:
        return self.end - self.start

    def with_fields(self, **kw) -> "ManifestEntry":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        out: dict = {"id": self.id, "audio_ref": self.audio_ref, "start": self.start, "end": self.end}
        for key in ("transcript", "hypothesis", "cer_vs_baseline", "ctc_log_score",
                    "lm_log_prob", "n_tokens", "n_frames"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.labels:
            out["labels"] = self.labels
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ManifestEntry":
        return cls(
            id=str(raw["id"]),
            audio_ref=raw.get("audio_ref", ""),
            start=float(raw.get("start", 0.0)),
            end=float(raw.get("end", raw.get("duration", 0.0) + float(raw.get("start", 0.0)))),
            transcript=raw.get("transcript"),
            hypothesis=raw.get("hypothesis"),
            cer_vs_baseline=raw.get("cer_vs_baseline"),
            ctc_log_score=raw.get("ctc_log_score"),
            lm_log_prob=raw.get("lm_log_prob"),
            n_tokens=raw.get("n_tokens"),
            n_frames=raw.get("n_frames"),
            labels=raw.get("labels", {}),
        )


def read_manifest(path) -> list[ManifestEntry]:
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                entries.append(ManifestEntry.from_dict(json.loads(line)))
    return entries


def write_manifest(entries, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for entry in entries:
            f.write(json.dumps(entry.to_dict(), ensure_ascii=False))
            f.write("\n")
