import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinasr.audio import (
    Waveform,
    detect_silences,
    filter_segments,
    logmel,
    random_segments,
    read_wav,
    split_dataset,
    write_wav,
)
from kinasr.errors import AudioFormatError, MissingTranscriptError, TooShortError
from kinasr.manifest import ManifestEntry

SR = 16000


def tone(seconds, freq=440.0, amp=0.5):
    t = np.arange(int(seconds * SR)) / SR
    return amp * np.sin(2 * np.pi * freq * t)


def entry(eid, duration=10.0, transcript="abana bose baje neza", **kw):
    return ManifestEntry(id=eid, start=0.0, end=duration, transcript=transcript, **kw)


class TestWaveform:
    def test_rejects_nan(self):
        with pytest.raises(AudioFormatError):
            Waveform(np.array([0.0, np.nan]))

    def test_rejects_stereo(self):
        with pytest.raises(AudioFormatError):
            Waveform(np.zeros((2, 100)))

    def test_wav_round_trip(self, tmp_path):
        wav = Waveform(tone(0.25))
        path = tmp_path / "t.wav"
        write_wav(path, wav)
        loaded = read_wav(path)
        assert loaded.sample_rate == SR
        np.testing.assert_allclose(loaded.samples, wav.samples, atol=1e-3)


class TestLogmel:
    def test_one_second_is_98_frames(self):
        feats = logmel(Waveform(np.zeros(SR)))
        assert feats.shape == (98, 80)

    def test_zero_input_hits_floor(self):
        feats = logmel(Waveform(np.zeros(SR)))
        assert np.all(feats == np.log(1e-10))

    def test_single_frame_boundary(self):
        assert logmel(Waveform(np.zeros(400))).shape == (1, 80)

    def test_too_short(self):
        with pytest.raises(TooShortError):
            logmel(Waveform(np.zeros(399)))

    def test_finite_on_speechlike_input(self):
        rng = np.random.default_rng(0)
        wav = Waveform(np.clip(rng.normal(0, 0.1, SR), -1, 1))
        feats = logmel(wav)
        assert np.all(np.isfinite(feats))

    def test_frame_count_formula(self):
        for n in (400, 401, 560, 799, 800, 16000, 23999):
            feats = logmel(Waveform(np.zeros(n)))
            assert feats.shape[0] == 1 + (n - 400) // 160


class TestDetectSilences:
    def test_gap_marked_at_midpoint(self):
        sig = np.concatenate([tone(1.0), np.zeros(int(0.5 * SR)), tone(1.0)])
        markers = detect_silences(Waveform(sig), min_silence=0.3)
        assert len(markers) == 1
        assert markers[0].time == pytest.approx(1.25, abs=0.02)

    def test_continuous_tone_has_none(self):
        assert detect_silences(Waveform(tone(2.0)), min_silence=0.3) == []

    def test_short_gap_ignored(self):
        sig = np.concatenate([tone(1.0), np.zeros(int(0.1 * SR)), tone(1.0)])
        assert detect_silences(Waveform(sig), min_silence=0.3) == []

    def test_markers_sorted_and_inside_clip(self):
        sig = np.concatenate([tone(0.8), np.zeros(int(0.6 * SR)),
                              tone(0.8), np.zeros(int(0.7 * SR)), tone(0.8)])
        wav = Waveform(sig)
        markers = detect_silences(wav, min_silence=0.3)
        assert len(markers) == 2
        times = [m.time for m in markers]
        assert times == sorted(times)
        assert all(0 < t < wav.duration for t in times)

    def test_window_below_threshold_around_marker(self):
        sig = np.concatenate([tone(1.0), np.zeros(int(0.5 * SR)), tone(1.0)])
        wav = Waveform(sig)
        (marker,) = detect_silences(wav, min_silence=0.3)
        lo = int((marker.time - 0.15) * SR)
        hi = int((marker.time + 0.15) * SR)
        assert np.max(np.abs(wav.samples[lo:hi])) < 1e-6


class TestRandomSegments:
    def test_short_clip_dropped(self):
        assert random_segments(4.0, seed=1) == []

    def test_25s_is_one_or_two_segments(self):
        for seed in range(30):
            segs = random_segments(25.0, seed=seed)
            assert len(segs) in (1, 2)
            assert segs[0][0] == 0.0
            assert segs[-1][1] == pytest.approx(25.0)

    def test_deterministic_per_seed(self):
        assert random_segments(300.0, seed=9) == random_segments(300.0, seed=9)

    @given(st.floats(min_value=5.0, max_value=500.0), st.integers(0, 1000))
    @settings(max_examples=200)
    def test_coverage_and_bounds(self, duration, seed):
        segs = random_segments(duration, seed=seed)
        assert segs[0][0] == 0.0
        assert segs[-1][1] == pytest.approx(duration)
        for (s0, e0), (s1, e1) in zip(segs, segs[1:]):
            assert e0 == pytest.approx(s1)
        # every segment except a merged last one lies in [5, 25]
        for s, e in segs[:-1]:
            assert 5.0 - 1e-9 <= e - s <= 25.0 + 1e-9
        assert segs[-1][1] - segs[-1][0] <= 30.0 + 1e-9

    def test_100s_between_4_and_20_segments(self):
        for seed in range(20):
            assert 4 <= len(random_segments(100.0, seed=seed)) <= 20


class TestFilterSegments:
    def test_too_short(self):
        kept, rejected = filter_segments([entry("a", duration=1.5), entry("b")])
        assert [e.id for e in kept] == ["b"]
        assert rejected == [(entry("a", duration=1.5), "too_short")]

    def test_too_long(self):
        _, rejected = filter_segments([entry("a", duration=31.0), entry("b")])
        assert rejected[0][1] == "too_long"

    def test_text_bounds(self):
        _, rejected = filter_segments([
            entry("a", transcript="aba"),
            entry("b", transcript="a" * 401),
            entry("c"),
        ])
        assert {(e.id, reason) for e, reason in rejected} == {
            ("a", "text_too_short"), ("b", "text_too_long")}

    def test_rate_outlier(self):
        base = [entry(f"b{i}") for i in range(20)]
        outlier = entry("fast", transcript="aaaaa eeeee iiiii ooooo uuuuu aaaaa eeeee")
        kept, rejected = filter_segments(base + [outlier])
        assert ("fast", "rate_outlier") in {(e.id, r) for e, r in rejected}
        assert len(kept) == 20

    def test_missing_transcript(self):
        with pytest.raises(MissingTranscriptError):
            filter_segments([ManifestEntry(id="x", start=0, end=10)])

    def test_kept_is_fixpoint_with_same_stats(self):
        entries = [entry(f"e{i}", duration=5.0 + i) for i in range(10)]
        kept, _ = filter_segments(entries, rate_stats=(0.7, 0.5))
        kept2, rejected2 = filter_segments(kept, rate_stats=(0.7, 0.5))
        assert kept2 == kept
        assert rejected2 == []

    def test_partition(self):
        entries = [entry(f"e{i}", duration=float(i)) for i in range(1, 40)]
        kept, rejected = filter_segments(entries)
        assert len(kept) + len(rejected) == len(entries)
        ids = {e.id for e in kept} | {e.id for e, _ in rejected}
        assert ids == {e.id for e in entries}


class TestSplitDataset:
    def test_100_entries(self):
        entries = [entry(f"e{i}") for i in range(100)]
        train, dev, test = split_dataset(entries)
        assert (len(train), len(dev), len(test)) == (90, 5, 5)

    def test_single_entry_goes_to_train(self):
        train, dev, test = split_dataset([entry("only")])
        assert (len(train), len(dev), len(test)) == (1, 0, 0)

    def test_deterministic(self):
        entries = [entry(f"e{i}") for i in range(57)]
        assert split_dataset(entries, seed=4) == split_dataset(entries, seed=4)

    def test_disjoint_and_exhaustive(self):
        entries = [entry(f"e{i}") for i in range(31)]
        train, dev, test = split_dataset(entries, seed=2)
        ids = [e.id for e in train + dev + test]
        assert len(ids) == 31
        assert len(set(ids)) == 31

    def test_bad_ratios(self):
        with pytest.raises(ValueError):
            split_dataset([entry("a")], ratios=(0.5, 0.2, 0.2))
