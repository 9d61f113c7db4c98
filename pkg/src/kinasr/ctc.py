"""CTC decoding over acoustic posteriorgrams.

Implements greedy decoding and prefix beam search in the log domain.  The
beam keeps, per label prefix, the probability mass of alignments ending in
blank and ending in the prefix's last token; identical prefixes reached
through different alignments merge by logaddexp.  With a wide enough beam
and no fusion terms the search is exact, which the exhaustive oracle below
verifies path-by-path on small inputs.

An optional language-model hook is fused into the ranking score only (the
pure CTC log-score is always reported separately): a scorer is any callable
``(prefix_ids: tuple[int, ...], next_id: int) -> float`` returning the
log-probability of extending the prefix with that token.
"""

from __future__ import annotations

import itertools
import json
import math
import struct
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    InvalidWidthError,
    KinasrError,
    TooLargeError,
    VocabMismatchError,
)
from .tokenizer import TokenSequence, Vocabulary, detokenize

NEG_INF = -math.inf

LmScorer = Callable[[tuple[int, ...], int], float]

_MAGIC = b"PGRM"
_HEADER = struct.Struct("<4sIIId")  # magic, version, T, V, frame_duration

# exhaustive_oracle guard: |V|**T paths are enumerated
_ORACLE_MAX_FRAMES = 8
_ORACLE_MAX_VOCAB = 5


def _logaddexp(a: float, b: float) -> float:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


@dataclass(frozen=True)
class Posteriorgram:
    """T x |V| matrix of per-frame natural-log probabilities, column 0 = blank."""

    frames: np.ndarray
    frame_duration: float = 0.01
    vocab_ref: str | None = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2:
            raise ValueError(f"posteriorgram must be 2-D, got shape {frames.shape}")
        if frames.shape[1] < 1:
            raise ValueError("posteriorgram needs at least the blank column")
        if frames.shape[0]:
            sums = np.exp(frames).sum(axis=1)
            bad = np.abs(sums - 1.0) > 1e-6
            if bad.any():
                t = int(np.argmax(bad))
                raise ValueError(
                    f"frame {t} probabilities sum to {sums[t]:.8f}, expected 1"
                )

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_vocab(self) -> int:
        return self.frames.shape[1]

    @classmethod
    def from_probs(cls, probs, frame_duration: float = 0.01, vocab_ref: str | None = None) -> "Posteriorgram":
        """Build from linear-domain probabilities (handy for fixtures)."""
        probs = np.asarray(probs, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return cls(np.log(probs), frame_duration=frame_duration, vocab_ref=vocab_ref)


@dataclass(frozen=True)
class NBestEntry:
    """One decoded hypothesis: pure CTC score plus optional fusion terms."""

    transcript: str
    ctc_log_score: float
    lm_log_prob: float | None = None
    score: float = 0.0
    token_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class DecodeResult:
    """N-best list sorted by descending ranking score (ties: shorter, then
    lexicographic token ids)."""

    nbest: tuple[NBestEntry, ...]
    frames_decoded: int

    @property
    def top(self) -> NBestEntry:
        return self.nbest[0]


@dataclass(frozen=True)
class DecodeConfig:
    beam_width: int = 24
    lm: LmScorer | None = None
    lm_weight: float = 0.0
    length_bonus: float = 0.0


def collapse(path: Sequence[int], blank_id: int = 0) -> TokenSequence:
    """Standard CTC squash: drop adjacent repeats, then drop blanks."""
    out: list[int] = []
    prev = None
    for tid in path:
        if tid != prev:
            if tid != blank_id:
                out.append(tid)
            prev = tid
    return TokenSequence(tuple(out))


def greedy_decode(post: Posteriorgram, vocab: Vocabulary) -> DecodeResult:
    """Collapse the per-frame argmax path; score is the path log-probability."""
    _check_vocab(post, vocab)
    if post.n_frames == 0:
        entry = NBestEntry(transcript="", ctc_log_score=0.0, score=0.0)
        return DecodeResult(nbest=(entry,), frames_decoded=0)
    ids = np.argmax(post.frames, axis=1)
    score = float(post.frames[np.arange(post.n_frames), ids].sum())
    seq = collapse(ids.tolist(), vocab.blank_id)
    entry = NBestEntry(
        transcript=detokenize(seq, vocab),
        ctc_log_score=score,
        score=score,
        token_ids=seq.ids,
    )
    return DecodeResult(nbest=(entry,), frames_decoded=post.n_frames)


def beam_search(
    post: Posteriorgram,
    vocab: Vocabulary,
    beam_width: int = 24,
    lm: LmScorer | None = None,
    lm_weight: float = 0.0,
    length_bonus: float = 0.0,
    on_frame: Callable[[int, dict], None] | None = None,
) -> DecodeResult:
    """Prefix beam search.

    At every frame each live prefix is extended with blank, a repeat of its
    last token, and every new token; identical prefixes merge by logaddexp
    and the top ``beam_width`` survive, ranked by

        ctc_log_score + lm_weight * lm_log_prob + length_bonus * |prefix|.

    ``on_frame(t, beams)`` is an instrumentation hook called after each
    frame's pruning with the live ``{prefix: (log_p_blank, log_p_nonblank,
    lm_log_prob)}`` map; tests use it to audit probability-mass bookkeeping.
    """
    if beam_width < 1:
        raise InvalidWidthError(f"beam width must be >= 1, got {beam_width}")
    _check_vocab(post, vocab)

    blank = vocab.blank_id
    nonblank_ids = [c for c in range(post.n_vocab) if c != blank]
    lm_cache: dict[tuple[tuple[int, ...], int], float] = {}

    def lm_step(prefix: tuple[int, ...], c: int) -> float:
        if lm is None:
            return 0.0
        key = (prefix, c)
        if key not in lm_cache:
            lm_cache[key] = float(lm(prefix, c))
        return lm_cache[key]

    # prefix -> [log_p_blank, log_p_nonblank, lm_log_prob]
    beams: dict[tuple[int, ...], list[float]] = {(): [0.0, NEG_INF, 0.0]}

    for t in range(post.n_frames):
        row = post.frames[t]
        p_blank = float(row[blank])
        nxt: dict[tuple[int, ...], list[float]] = {}

        for prefix, (pb, pnb, lmlp) in beams.items():
            total = _logaddexp(pb, pnb)

            cell = nxt.get(prefix)
            if cell is None:
                cell = nxt[prefix] = [NEG_INF, NEG_INF, lmlp]
            cell[0] = _logaddexp(cell[0], total + p_blank)

            last = prefix[-1] if prefix else None
            for c in nonblank_ids:
                p_tok = float(row[c])
                if p_tok == NEG_INF:
                    continue
                if c == last:
                    # repeat without separating blank collapses onto prefix
                    cell[1] = _logaddexp(cell[1], pnb + p_tok)
                    mass = pb + p_tok
                else:
                    mass = total + p_tok
                if mass == NEG_INF:
                    continue
                ext = prefix + (c,)
                ext_cell = nxt.get(ext)
                if ext_cell is None:
                    ext_cell = nxt[ext] = [NEG_INF, NEG_INF, lmlp + lm_step(prefix, c)]
                ext_cell[1] = _logaddexp(ext_cell[1], mass)

        beams = dict(_top_k(nxt, beam_width, lm_weight, length_bonus))
        if on_frame is not None:
            on_frame(t, beams)

    ranked = _top_k(beams, beam_width, lm_weight, length_bonus)
    nbest = tuple(
        NBestEntry(
            transcript=detokenize(TokenSequence(prefix), vocab),
            ctc_log_score=_logaddexp(pb, pnb),
            lm_log_prob=lmlp if lm is not None else None,
            score=_fused(pb, pnb, lmlp, len(prefix), lm_weight, length_bonus),
            token_ids=prefix,
        )
        for prefix, (pb, pnb, lmlp) in ranked
    )
    return DecodeResult(nbest=nbest, frames_decoded=post.n_frames)


def _fused(pb: float, pnb: float, lmlp: float, n: int, lm_weight: float, length_bonus: float) -> float:
    return _logaddexp(pb, pnb) + lm_weight * lmlp + length_bonus * n


def _top_k(beams: dict, k: int, lm_weight: float, length_bonus: float) -> list:
    def key(item):
        prefix, (pb, pnb, lmlp) = item
        return (-_fused(pb, pnb, lmlp, len(prefix), lm_weight, length_bonus), len(prefix), prefix)

    return sorted(beams.items(), key=key)[:k]


def exhaustive_oracle(post: Posteriorgram, vocab: Vocabulary) -> tuple[str, float]:
    """Enumerate every |V|**T alignment path, pool mass per collapsed
    labeling, and return the exact maximum-probability transcript.

    Test oracle only: guarded to T <= 8 and |V| <= 5.
    """
    _check_vocab(post, vocab)
    if post.n_frames > _ORACLE_MAX_FRAMES or post.n_vocab > _ORACLE_MAX_VOCAB:
        raise TooLargeError(
            f"oracle limited to T<={_ORACLE_MAX_FRAMES}, |V|<={_ORACLE_MAX_VOCAB}; "
            f"got T={post.n_frames}, |V|={post.n_vocab}"
        )
    if post.n_frames == 0:
        return "", 0.0

    totals: dict[tuple[int, ...], float] = {}
    for path in itertools.product(range(post.n_vocab), repeat=post.n_frames):
        logp = float(sum(post.frames[t, c] for t, c in enumerate(path)))
        if logp == NEG_INF:
            continue
        labeling = collapse(path, vocab.blank_id).ids
        prev = totals.get(labeling)
        totals[labeling] = logp if prev is None else _logaddexp(prev, logp)

    labeling, logp = min(totals.items(), key=lambda kv: (-kv[1], len(kv[0]), kv[0]))
    return detokenize(TokenSequence(labeling), vocab), logp


@dataclass(frozen=True)
class BatchItem:
    """Slot in a batch decode: exactly one of result/error is set."""

    index: int
    result: DecodeResult | None = None
    error: str | None = None


def batch_decode(
    posts: Sequence[Posteriorgram],
    vocab: Vocabulary,
    config: DecodeConfig | None = None,
) -> list[BatchItem]:
    """Element-wise beam search; per-item failures are collected, not raised."""
    config = config or DecodeConfig()
    out = []
    for i, post in enumerate(posts):
        try:
            result = beam_search(
                post,
                vocab,
                beam_width=config.beam_width,
                lm=config.lm,
                lm_weight=config.lm_weight,
                length_bonus=config.length_bonus,
            )
            out.append(BatchItem(index=i, result=result))
        except (KinasrError, ValueError) as exc:
            out.append(BatchItem(index=i, error=str(exc)))
    return out


def _check_vocab(post: Posteriorgram, vocab: Vocabulary) -> None:
    if post.n_vocab != len(vocab):
        raise VocabMismatchError(
            f"posteriorgram has {post.n_vocab} columns, vocabulary has {len(vocab)} tokens"
        )


# --- file formats ---

def save_posteriorgram(post: Posteriorgram, path) -> None:
    """Binary layout: header (magic, version, T, V, frame_duration) then
    row-major float32 log-probs."""
    with open(path, "wb") as f:
        f.write(_HEADER.pack(_MAGIC, 1, post.n_frames, post.n_vocab, post.frame_duration))
        f.write(post.frames.astype("<f4").tobytes(order="C"))


def load_posteriorgram(path) -> Posteriorgram:
    """Load binary or JSON posteriorgram (JSON: {probs|log_probs, frame_duration?})."""
    with open(path, "rb") as f:
        head = f.read(4)
        if head == _MAGIC:
            rest = f.read(_HEADER.size - 4)
            _, version, n_t, n_v, frame_duration = _HEADER.unpack(head + rest)
            if version != 1:
                raise ValueError(f"unsupported posteriorgram version {version}")
            data = np.frombuffer(f.read(), dtype="<f4")
            if data.size != n_t * n_v:
                raise ValueError(
                    f"posteriorgram payload has {data.size} floats, expected {n_t * n_v}"
                )
            frames = data.reshape(n_t, n_v).astype(np.float64)
            return Posteriorgram(frames, frame_duration=frame_duration)
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    frame_duration = float(raw.get("frame_duration", 0.01))
    vocab_ref = raw.get("vocab_ref")
    if "log_probs" in raw:
        return Posteriorgram(np.array(raw["log_probs"], dtype=np.float64),
                             frame_duration=frame_duration, vocab_ref=vocab_ref)
    if "probs" in raw:
        return Posteriorgram.from_probs(raw["probs"], frame_duration=frame_duration,
                                        vocab_ref=vocab_ref)
    raise ValueError("posteriorgram JSON needs 'probs' or 'log_probs'")


def nbest_jsonl_lines(utt_id: str, result: DecodeResult) -> list[str]:
    """Serialize an N-best list as {id, rank, transcript, ctc_log_score, lm_log_prob?}."""
    lines = []
    for rank, entry in enumerate(result.nbest):
        record: dict = {
            "id": utt_id,
            "rank": rank,
            "transcript": entry.transcript,
            "ctc_log_score": entry.ctc_log_score,
        }
        if entry.lm_log_prob is not None:
            record["lm_log_prob"] = entry.lm_log_prob
        lines.append(json.dumps(record, ensure_ascii=False))
    return lines
