"""Threshold-and-rank selection of pseudo-labeled utterances.

Decode scores are normalized per frame and external-LM log-probabilities
per token so thresholds are length-invariant.  Survivors are ranked by LM
score (decode score breaks ties) and taken greedily until the generation's
target hours are reached.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingScoreError
from .manifest import ManifestEntry

# fallback frame count when the manifest does not carry one: 10 ms hop
FRAMES_PER_SECOND = 100.0


@dataclass(frozen=True)
class SelectionConfig:
    min_ctc_score_per_frame: float
    min_lm_logprob_per_token: float
    target_hours: float
    generation: int = 1

    def __post_init__(self):
        if self.target_hours <= 0:
            raise ValueError(f"target_hours must be positive, got {self.target_hours}")
        if self.generation < 1:
            raise ValueError(f"generation must be >= 1, got {self.generation}")


def normalized_scores(entry: ManifestEntry) -> tuple[float, float]:
    """(ctc log-score per frame, lm log-prob per token) for one entry."""
    if entry.hypothesis is None:
        raise MissingScoreError(f"entry {entry.id} has no hypothesis")
    if entry.ctc_log_score is None:
        raise MissingScoreError(f"entry {entry.id} has no ctc_log_score")
    if entry.lm_log_prob is None:
        raise MissingScoreError(f"entry {entry.id} has no lm_log_prob")
    if entry.duration <= 0:
        raise MissingScoreError(f"entry {entry.id} has no duration")
    n_frames = entry.n_frames if entry.n_frames else max(1, round(entry.duration * FRAMES_PER_SECOND))
    if entry.n_tokens is None or entry.n_tokens < 1:
        raise MissingScoreError(f"entry {entry.id} has no token count")
    return entry.ctc_log_score / n_frames, entry.lm_log_prob / entry.n_tokens


def select(decoded: list[ManifestEntry], cfg: SelectionConfig) -> list[ManifestEntry]:
    """Pick the top-ranked pseudo-labeled utterances.

    Entries below either threshold are dropped; the rest are ranked by
    normalized LM log-prob (then normalized decode score, then id) and
    accumulated until the target hours are reached; the entry crossing
    the target is included.
    """
    survivors = []
    for entry in decoded:
        ctc_pf, lm_pt = normalized_scores(entry)
        if ctc_pf < cfg.min_ctc_score_per_frame or lm_pt < cfg.min_lm_logprob_per_token:
            continue
        survivors.append((lm_pt, ctc_pf, entry))

    survivors.sort(key=lambda row: (-row[0], -row[1], row[2].id))

    selected: list[ManifestEntry] = []
    hours = 0.0
    for _, _, entry in survivors:
        if hours >= cfg.target_hours:
            break
        selected.append(entry)
        hours += entry.duration / 3600.0
    return selected


def generation_report(selected: list[ManifestEntry], n_bins: int = 10) -> dict:
    """Summary stats for a generation manifest: sizes, per-channel counts
    and histograms of the normalized scores."""
    if not selected:
        return {
            "n_entries": 0,
            "total_hours": 0.0,
            "per_channel": {},
            "ctc_per_frame_hist": {"bin_edges": [], "counts": []},
            "lm_per_token_hist": {"bin_edges": [], "counts": []},
        }
    ctc_pf = []
    lm_pt = []
    per_channel: dict[str, int] = {}
    total_hours = 0.0
    for entry in selected:
        a, b = normalized_scores(entry)
        ctc_pf.append(a)
        lm_pt.append(b)
        total_hours += entry.duration / 3600.0
        channel = entry.labels.get("channel", "unknown")
        per_channel[channel] = per_channel.get(channel, 0) + 1

    def hist(values):
        counts, edges = np.histogram(np.array(values), bins=n_bins)
        return {"bin_edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}

    return {
        "n_entries": len(selected),
        "total_hours": total_hours,
        "per_channel": dict(sorted(per_channel.items())),
        "ctc_per_frame_hist": hist(ctc_pf),
        "lm_per_token_hist": hist(lm_pt),
    }
