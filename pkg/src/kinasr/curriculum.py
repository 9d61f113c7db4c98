"""CER-ranked curriculum planning.

A clean baseline model's transcripts grade every entry in a noisy pool;
easiest entries (lowest CER against the reference transcript) enter
training first.  The plan doubles the cumulative training size each stage
until the pool is exhausted; the final stage carries the long training run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCleanError, MissingHypothesisError
from .manifest import ManifestEntry, write_manifest
from .metrics import cer

INTERMEDIATE_EPOCHS = 10
FINAL_EPOCHS = 49


@dataclass
class CurriculumStage:
    index: int
    entries: list[ManifestEntry]
    cumulative_size: float
    epochs: int
    reset_optimizer: bool = True
    manifest_ref: str | None = None


@dataclass
class CurriculumPlan:
    size_measure: str
    stages: list[CurriculumStage] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "size_measure": self.size_measure,
            "stages": [
                {
                    "index": s.index,
                    "manifest_path": s.manifest_ref,
                    "cumulative_size": s.cumulative_size,
                    "n_entries": len(s.entries),
                    "epochs": s.epochs,
                    "reset_optimizer": s.reset_optimizer,
                }
                for s in self.stages
            ],
        }


def rank_by_cer(pool: list[ManifestEntry]) -> list[ManifestEntry]:
    """Grade each entry's baseline hypothesis against its transcript and
    sort ascending (easiest first); ties break by id."""
    graded = []
    for entry in pool:
        if entry.hypothesis is None:
            raise MissingHypothesisError(f"entry {entry.id} has no baseline hypothesis")
        if entry.transcript is None:
            raise MissingHypothesisError(f"entry {entry.id} has no transcript")
        graded.append(entry.with_fields(
            cer_vs_baseline=cer(entry.transcript, entry.hypothesis)
        ))
    return sorted(graded, key=lambda e: (e.cer_vs_baseline, e.id))


def _size(entry: ManifestEntry, size_measure: str) -> float:
    return entry.duration / 3600.0 if size_measure == "hours" else 1.0


def build_plan(
    clean: list[ManifestEntry],
    ranked_pool: list[ManifestEntry],
    size_measure: str = "hours",
) -> CurriculumPlan:
    """Stage 0 trains on the clean set; stage k targets a cumulative size of
    2**k times the clean size, filled with the next-easiest pool entries.

    Entries are atomic, so targets are met from below.  The first stage
    whose manifest contains the whole pool is final and gets the long
    epoch count; every stage resets the optimizer.
    """
    if size_measure not in ("count", "hours"):
        raise ValueError(f"unknown size measure: {size_measure!r}")
    if not clean:
        raise EmptyCleanError("clean manifest is empty")
    cers = [e.cer_vs_baseline for e in ranked_pool]
    if any(c is None for c in cers):
        raise MissingHypothesisError("ranked pool entries must carry cer_vs_baseline")
    if any(a > b for a, b in zip(cers, cers[1:])):
        raise ValueError("pool must be sorted ascending by cer_vs_baseline")

    clean_size = sum(_size(e, size_measure) for e in clean)
    plan = CurriculumPlan(size_measure=size_measure)
    manifest = list(clean)
    cumulative = clean_size
    plan.stages.append(CurriculumStage(
        index=0,
        entries=list(manifest),
        cumulative_size=cumulative,
        epochs=FINAL_EPOCHS if not ranked_pool else INTERMEDIATE_EPOCHS,
    ))

    next_idx = 0
    k = 0
    while next_idx < len(ranked_pool):
        k += 1
        target = (2 ** k) * clean_size
        while next_idx < len(ranked_pool):
            step = _size(ranked_pool[next_idx], size_measure)
            if cumulative + step > target + 1e-9:
                break
            manifest.append(ranked_pool[next_idx])
            cumulative += step
            next_idx += 1
        exhausted = next_idx >= len(ranked_pool)
        plan.stages.append(CurriculumStage(
            index=k,
            entries=list(manifest),
            cumulative_size=cumulative,
            epochs=FINAL_EPOCHS if exhausted else INTERMEDIATE_EPOCHS,
        ))
    return plan


def write_plan(plan: CurriculumPlan, out_dir) -> Path:
    """Emit plan.json plus one JSONL manifest per stage."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for stage in plan.stages:
        name = f"stage_{stage.index:03d}.jsonl"
        write_manifest(stage.entries, out_dir / name)
        stage.manifest_ref = name
    plan_path = out_dir / "plan.json"
    with open(plan_path, "w", encoding="utf-8") as f:
        json.dump(plan.to_dict(), f, indent=2)
        f.write("\n")
    return plan_path
