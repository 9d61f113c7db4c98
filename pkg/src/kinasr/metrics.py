"""Character and word error rates with punctuation-omitting scoring.

Scoring strips the sentence punctuation marks { . , ? ! : } from both sides
before computing edit distances; the apostrophe is orthographic in
Kinyarwanda contractions (``b'umwana``) and is retained unless explicitly
asked otherwise.  Corpus figures are micro-averages: total edits over total
reference length.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyCorpusError, EmptyReferenceError

_EVAL_PUNCT = ".,?!:"
_WS_RE = re.compile(r" {2,}")


@dataclass(frozen=True)
class EvalPair:
    """One reference/hypothesis pair, optionally carrying group labels."""

    reference: str
    hypothesis: str
    pair_id: str | None = None
    labels: dict[str, str] = field(default_factory=dict)


@dataclass
class GroupScore:
    cer: float
    wer: float
    n_ref_chars: int
    n_ref_words: int
    n_pairs: int


@dataclass
class EvalReport:
    cer: float
    wer: float
    n_ref_chars: int
    n_ref_words: int
    n_pairs: int
    per_group: dict[str, GroupScore] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "cer": self.cer,
            "wer": self.wer,
            "n_ref_chars": self.n_ref_chars,
            "n_ref_words": self.n_ref_words,
            "n_pairs": self.n_pairs,
        }
        if self.per_group:
            out["per_group"] = {
                name: {
                    "cer": g.cer,
                    "wer": g.wer,
                    "n_ref_chars": g.n_ref_chars,
                    "n_ref_words": g.n_ref_words,
                    "n_pairs": g.n_pairs,
                }
                for name, g in self.per_group.items()
            }
        return out


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    # b is the shorter sequence; keep one DP row of len(b)+1
    prev = list(range(len(b) + 1))
    for i, sym_a in enumerate(a, start=1):
        cur = [i]
        for j, sym_b in enumerate(b, start=1):
            if sym_a == sym_b:
                cur.append(prev[j - 1])
            else:
                cur.append(1 + min(prev[j - 1], prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def strip_eval_punct(text: str, strip_apostrophe: bool = False) -> str:
    """Remove scoring-exempt punctuation and tidy the spacing left behind."""
    drop = _EVAL_PUNCT + ("'" if strip_apostrophe else "")
    text = "".join(ch for ch in text if ch not in drop)
    return _WS_RE.sub(" ", text).strip()


def _checked(reference: str, hypothesis: str) -> None:
    if not reference and hypothesis:
        raise EmptyReferenceError(
            f"empty reference with non-empty hypothesis {hypothesis!r}"
        )


def cer_counts(reference: str, hypothesis: str, strip_apostrophe: bool = False) -> tuple[int, int]:
    """(char edits, reference char count) after punctuation stripping."""
    ref = strip_eval_punct(reference, strip_apostrophe)
    hyp = strip_eval_punct(hypothesis, strip_apostrophe)
    _checked(ref, hyp)
    return edit_distance(ref, hyp), len(ref)


def wer_counts(reference: str, hypothesis: str, strip_apostrophe: bool = False) -> tuple[int, int]:
    """(word edits, reference word count) after punctuation stripping."""
    ref = strip_eval_punct(reference, strip_apostrophe).split()
    hyp = strip_eval_punct(hypothesis, strip_apostrophe).split()
    _checked(ref, hyp)
    return edit_distance(ref, hyp), len(ref)


def cer(reference: str, hypothesis: str, strip_apostrophe: bool = False) -> float:
    """Character error rate; spaces count as characters."""
    edits, n = cer_counts(reference, hypothesis, strip_apostrophe)
    return edits / n if n else 0.0


def wer(reference: str, hypothesis: str, strip_apostrophe: bool = False) -> float:
    """Word error rate over maximal non-space runs."""
    edits, n = wer_counts(reference, hypothesis, strip_apostrophe)
    return edits / n if n else 0.0


def corpus_eval(
    pairs: Sequence[EvalPair],
    group_by: str | None = None,
    strip_apostrophe: bool = False,
) -> EvalReport:
    """Micro-averaged corpus CER/WER, optionally broken down by a label.

    Pairs missing the ``group_by`` label are excluded from the per-group
    rows but still count toward the aggregate.
    """
    if not pairs:
        raise EmptyCorpusError("no pairs to evaluate")

    tot_ce = tot_cn = tot_we = tot_wn = 0
    groups: dict[str, list[tuple[int, int, int, int]]] = {}
    for p in pairs:
        ce, cn = cer_counts(p.reference, p.hypothesis, strip_apostrophe)
        we, wn = wer_counts(p.reference, p.hypothesis, strip_apostrophe)
        tot_ce += ce
        tot_cn += cn
        tot_we += we
        tot_wn += wn
        if group_by is not None and group_by in p.labels:
            groups.setdefault(p.labels[group_by], []).append((ce, cn, we, wn))

    per_group = {}
    for value in sorted(groups):
        rows = groups[value]
        gce = sum(r[0] for r in rows)
        gcn = sum(r[1] for r in rows)
        gwe = sum(r[2] for r in rows)
        gwn = sum(r[3] for r in rows)
        per_group[value] = GroupScore(
            cer=gce / gcn if gcn else 0.0,
            wer=gwe / gwn if gwn else 0.0,
            n_ref_chars=gcn,
            n_ref_words=gwn,
            n_pairs=len(rows),
        )

    return EvalReport(
        cer=tot_ce / tot_cn if tot_cn else 0.0,
        wer=tot_we / tot_wn if tot_wn else 0.0,
        n_ref_chars=tot_cn,
        n_ref_words=tot_wn,
        n_pairs=len(pairs),
        per_group=per_group,
    )


def read_pairs_jsonl(path) -> list[EvalPair]:
    """Load {id, reference, hypothesis, labels} JSONL."""
    pairs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            pairs.append(
                EvalPair(
                    reference=raw["reference"],
                    hypothesis=raw["hypothesis"],
                    pair_id=raw.get("id"),
                    labels=raw.get("labels", {}),
                )
            )
    return pairs
