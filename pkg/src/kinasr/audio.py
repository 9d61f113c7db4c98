"""Audio-side utilities: log-mel features, silence detection, random
segmentation of long clips, manifest post-processing filters and dataset
splitting.

All pipeline entry points take 16 kHz mono PCM; framing everywhere is a
25 ms window with a 10 ms hop.
"""

from __future__ import annotations

import random
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AudioFormatError,
    MissingTranscriptError,
    TooShortError,
)
from .manifest import ManifestEntry
from .tokenizer import syllable_count

SAMPLE_RATE = 16000
WIN_SAMPLES = 400   # 25 ms
HOP_SAMPLES = 160   # 10 ms
N_FFT = 1024
N_MELS = 80
LOG_FLOOR = 1e-10

# manifest post-processing bounds
MIN_AUDIO_SECONDS = 2.0
MAX_AUDIO_SECONDS = 30.0
MIN_TEXT_CHARS = 5
MAX_TEXT_CHARS = 400
RATE_SIGMA = 1.3


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise AudioFormatError(f"expected mono audio, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise AudioFormatError("waveform contains non-finite samples")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class SilenceMarker:
    """Seconds from clip start; candidate segmentation boundary."""

    time: float


def read_wav(path) -> Waveform:
    """Read PCM16 mono 16 kHz WAV."""
    with wave.open(str(path), "rb") as w:
        if w.getnchannels() != 1:
            raise AudioFormatError(f"{path}: expected mono, got {w.getnchannels()} channels")
        if w.getsampwidth() != 2:
            raise AudioFormatError(f"{path}: expected PCM16, got {8 * w.getsampwidth()}-bit")
        if w.getframerate() != SAMPLE_RATE:
            raise AudioFormatError(f"{path}: expected {SAMPLE_RATE} Hz, got {w.getframerate()}")
        raw = w.readframes(w.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return Waveform(samples, SAMPLE_RATE)


def write_wav(path, wav: Waveform) -> None:
    data = np.clip(wav.samples, -1.0, 1.0)
    pcm = (data * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(wav.sample_rate)
        w.writeframes(pcm.tobytes())


def _frame(samples: np.ndarray) -> np.ndarray:
    """(n_frames, WIN_SAMPLES) view; frames start every HOP_SAMPLES."""
    n = len(samples)
    if n < WIN_SAMPLES:
        raise TooShortError(f"need at least {WIN_SAMPLES} samples, got {n}")
    n_frames = 1 + (n - WIN_SAMPLES) // HOP_SAMPLES
    idx = np.arange(WIN_SAMPLES)[None, :] + HOP_SAMPLES * np.arange(n_frames)[:, None]
    return samples[idx]


def _mel_filterbank(n_mels: int = N_MELS, n_fft: int = N_FFT,
                    sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Triangular mel filters spanning 0 .. sample_rate/2, (n_mels, n_fft//2+1)."""
    def hz_to_mel(hz):
        return 2595.0 * np.log10(1.0 + np.asarray(hz) / 700.0)

    def mel_to_hz(mel):
        return 700.0 * (10.0 ** (np.asarray(mel) / 2595.0) - 1.0)

    f_max = sample_rate / 2.0
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(f_max), n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bin_freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)

    fb = np.zeros((n_mels, len(bin_freqs)))
    for m in range(n_mels):
        lo, center, hi = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        up = (bin_freqs - lo) / (center - lo)
        down = (hi - bin_freqs) / (hi - center)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


_FILTERBANK: np.ndarray | None = None


def logmel(wav: Waveform) -> np.ndarray:
    """Log mel-spectrogram: 1024-point STFT over 25 ms / 10 ms frames,
    80 mel filters, natural log floored at 1e-10.

    Returns (1 + floor((N - 400) / 160)) x 80 for N >= 400 samples.
    """
    global _FILTERBANK
    if wav.sample_rate != SAMPLE_RATE:
        raise AudioFormatError(f"expected {SAMPLE_RATE} Hz, got {wav.sample_rate}")
    frames = _frame(wav.samples) * np.hanning(WIN_SAMPLES)
    spectrum = np.fft.rfft(frames, n=N_FFT, axis=1)
    power = np.abs(spectrum) ** 2
    if _FILTERBANK is None:
        _FILTERBANK = _mel_filterbank()
    mel = power @ _FILTERBANK.T
    return np.log(np.maximum(mel, LOG_FLOOR))


def detect_silences(
    wav: Waveform,
    energy_db_threshold: float = -40.0,
    min_silence: float = 0.5,
) -> list[SilenceMarker]:
    """Mark long-enough pauses.

    Frames whose RMS energy (dBFS) is below the threshold form candidate
    intervals; each maximal interval at least ``min_silence`` long yields
    one marker at its midpoint.
    """
    if wav.sample_rate != SAMPLE_RATE:
        raise AudioFormatError(f"expected {SAMPLE_RATE} Hz, got {wav.sample_rate}")
    frames = _frame(wav.samples)
    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    db = 20.0 * np.log10(np.maximum(rms, 1e-12))
    silent = db < energy_db_threshold

    markers = []
    run_start = None
    for i, is_sil in enumerate(list(silent) + [False]):
        if is_sil and run_start is None:
            run_start = i
        elif not is_sil and run_start is not None:
            start = run_start * HOP_SAMPLES / SAMPLE_RATE
            end = ((i - 1) * HOP_SAMPLES + WIN_SAMPLES) / SAMPLE_RATE
            if end - start >= min_silence:
                markers.append(SilenceMarker(time=(start + end) / 2.0))
            run_start = None
    return markers


def random_segments(
    duration: float,
    min_len: float = 5.0,
    max_len: float = 25.0,
    seed: int = 0,
) -> list[tuple[float, float]]:
    """Cut [0, duration) into consecutive segments of uniform-random length
    in [min_len, max_len].

    Lengths are drawn while at least ``max_len`` remains; the leftover is
    emitted as the final segment when it is at least ``min_len``, merged
    into the previous segment when shorter, and dropped when the clip
    itself is shorter than ``min_len``.
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    rng = random.Random(seed)
    segments: list[list[float]] = []
    pos = 0.0
    while duration - pos >= max_len:
        length = rng.uniform(min_len, max_len)
        segments.append([pos, pos + length])
        pos += length
    remainder = duration - pos
    if remainder >= min_len:
        segments.append([pos, duration])
    elif remainder > 1e-9 and segments:
        segments[-1][1] = duration
    return [(s, e) for s, e in segments]


def filter_segments(
    entries: list[ManifestEntry],
    rate_stats: tuple[float, float] | None = None,
) -> tuple[list[ManifestEntry], list[tuple[ManifestEntry, str]]]:
    """Apply the post-processing filters: audio 2..30 s, text 5..400 chars,
    and syllable rate within 1.3 standard deviations of the mean.

    Rate statistics default to the mean/std over the entries that survive
    the length filters; pass ``rate_stats`` to pin them.  Returns
    (kept, [(entry, reason), ...]).
    """
    kept: list[ManifestEntry] = []
    rejected: list[tuple[ManifestEntry, str]] = []
    survivors: list[tuple[ManifestEntry, float]] = []

    for entry in entries:
        if entry.transcript is None:
            raise MissingTranscriptError(f"entry {entry.id} has no transcript")
        if entry.duration < MIN_AUDIO_SECONDS:
            rejected.append((entry, "too_short"))
        elif entry.duration > MAX_AUDIO_SECONDS:
            rejected.append((entry, "too_long"))
        elif len(entry.transcript) < MIN_TEXT_CHARS:
            rejected.append((entry, "text_too_short"))
        elif len(entry.transcript) > MAX_TEXT_CHARS:
            rejected.append((entry, "text_too_long"))
        else:
            survivors.append((entry, syllable_count(entry.transcript) / entry.duration))

    if survivors:
        if rate_stats is None:
            rates = np.array([rate for _, rate in survivors])
            rate_stats = (float(rates.mean()), float(rates.std()))
        mean, std = rate_stats
        for entry, rate in survivors:
            if abs(rate - mean) > RATE_SIGMA * std:
                rejected.append((entry, "rate_outlier"))
            else:
                kept.append(entry)
    return kept, rejected


def split_dataset(
    entries: list[ManifestEntry],
    ratios: tuple[float, float, float] = (0.90, 0.05, 0.05),
    seed: int = 0,
) -> tuple[list[ManifestEntry], list[ManifestEntry], list[ManifestEntry]]:
    """Seeded shuffle then contiguous split; floor-based sizes with the
    remainder going to train."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    if any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be non-negative, got {ratios}")
    shuffled = list(entries)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    # guard against float products like 5 * 0.2 == 0.9999...
    n_dev = int(n * ratios[1] + 1e-9)
    n_test = int(n * ratios[2] + 1e-9)
    n_train = n - n_dev - n_test
    train = shuffled[:n_train]
    dev = shuffled[n_train:n_train + n_dev]
    test = shuffled[n_train + n_dev:]
    return train, dev, test


def silences_to_dicts(markers: list[SilenceMarker]) -> list[dict]:
    return [{"time": m.time} for m in markers]


def entry_for_segment(doc_id: str, index: int, audio_ref: str,
                      start: float, end: float, transcript: str) -> ManifestEntry:
    return ManifestEntry(
        id=f"{doc_id}-{index:04d}",
        audio_ref=audio_ref,
        start=start,
        end=end,
        transcript=transcript,
    )


def load_segment_audio(wav: Waveform, start: float, end: float) -> Waveform:
    a = int(round(start * wav.sample_rate))
    b = int(round(end * wav.sample_rate))
    return Waveform(wav.samples[a:b], wav.sample_rate)


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
