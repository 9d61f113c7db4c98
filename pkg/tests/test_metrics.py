import functools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinasr.errors import EmptyCorpusError, EmptyReferenceError
from kinasr.metrics import (
    EvalPair,
    cer,
    cer_counts,
    corpus_eval,
    edit_distance,
    strip_eval_punct,
    wer,
    wer_counts,
)


def slow_edit_distance(a, b):
    """Independent oracle: plain recursive definition, memoized."""

    @functools.lru_cache(maxsize=None)
    def dist(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        sub = dist(i - 1, j - 1) + (a[i - 1] != b[j - 1])
        return min(sub, dist(i - 1, j) + 1, dist(i, j - 1) + 1)

    return dist(len(a), len(b))


short_text = st.text(alphabet="abc ", max_size=8)


class TestEditDistance:
    def test_identity(self):
        assert edit_distance("abc", "abc") == 0

    def test_pure_insertions(self):
        assert edit_distance("", "abc") == 3

    def test_one_substitution(self):
        assert edit_distance("umwana", "umwena") == 1

    @given(short_text, short_text)
    @settings(max_examples=300)
    def test_matches_oracle(self, a, b):
        assert edit_distance(a, b) == slow_edit_distance(a, b)

    @given(short_text, short_text)
    def test_symmetry(self, a, b):
        assert edit_distance(a, b) == edit_distance(b, a)

    @given(short_text, short_text, short_text)
    @settings(max_examples=200)
    def test_triangle_inequality(self, a, b, c):
        assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)

    @given(short_text, short_text)
    def test_zero_iff_equal(self, a, b):
        assert (edit_distance(a, b) == 0) == (a == b)

    def test_word_sequences(self):
        assert edit_distance(["mbese", "abana"], ["abana"]) == 1


class TestStripEvalPunct:
    def test_trailing_stop(self):
        assert strip_eval_punct("muraho.") == "muraho"

    def test_apostrophe_retained(self):
        assert strip_eval_punct("b'umwana") == "b'umwana"

    def test_apostrophe_strippable(self):
        assert strip_eval_punct("b'umwana", strip_apostrophe=True) == "bumwana"

    def test_empty(self):
        assert strip_eval_punct("") == ""

    def test_inner_punct_collapses_spaces(self):
        assert strip_eval_punct("abana . bose") == "abana bose"

    @given(st.text(alphabet="ab .,?!:'", max_size=40))
    def test_idempotent(self, text):
        once = strip_eval_punct(text)
        assert strip_eval_punct(once) == once


class TestCerWer:
    def test_cer_identity(self):
        assert cer("umwana", "umwana") == 0.0

    def test_cer_one_sub(self):
        assert cer("umwana", "umwena") == pytest.approx(1 / 6)

    def test_cer_ignores_punct(self):
        assert cer("muraho.", "muraho") == 0.0

    def test_wer_identity(self):
        assert wer("mbese abana bose", "mbese abana bose") == 0.0

    def test_wer_one_sub(self):
        assert wer("mbese abana bose", "mbese abyana bose") == pytest.approx(1 / 3)

    def test_wer_one_deletion(self):
        assert wer("mbese abana", "abana") == 0.5

    def test_empty_pair_scores_zero(self):
        assert cer("", "") == 0.0
        assert wer("", "") == 0.0

    def test_empty_reference_invalid(self):
        with pytest.raises(EmptyReferenceError):
            cer("", "abana")
        with pytest.raises(EmptyReferenceError):
            wer(".", "abana")

    def test_cer_can_exceed_one(self):
        assert cer("ab", "abcdefgh") > 1.0

    @given(st.text(alphabet="ab ", min_size=1, max_size=20),
           st.text(alphabet="ab ", max_size=20),
           st.sampled_from([".", ",", "?", "!", ":"]))
    @settings(max_examples=200)
    def test_punct_suffix_invariance(self, ref, hyp, mark):
        ref = "x" + ref  # keep the reference non-empty after stripping
        assert cer(ref + mark, hyp + mark) == cer(ref, hyp)
        assert wer(ref + mark, hyp + mark) == wer(ref, hyp)


class TestCorpusEval:
    def test_all_exact(self):
        pairs = [EvalPair("abana", "abana"), EvalPair("mbese", "mbese")]
        report = corpus_eval(pairs)
        assert report.cer == 0.0
        assert report.wer == 0.0

    def test_micro_average(self):
        # 6-char ref with 1 edit + 4-char ref with 1 edit -> 2/10
        pairs = [EvalPair("umwana", "umwena"), EvalPair("bose", "base")]
        assert corpus_eval(pairs).cer == pytest.approx(0.2)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            corpus_eval([])

    def test_group_rows(self):
        pairs = [
            EvalPair("abana", "abana", labels={"gender": "male"}),
            EvalPair("bose", "base", labels={"gender": "female"}),
            EvalPair("mbese", "mbese"),
        ]
        report = corpus_eval(pairs, group_by="gender")
        assert set(report.per_group) == {"male", "female"}
        assert report.per_group["male"].cer == 0.0
        assert report.per_group["female"].cer == 0.25
        # unlabeled pair still in the aggregate
        assert report.n_pairs == 3
        assert report.n_ref_chars == 14

    def test_strip_apostrophe_flag(self):
        pairs = [EvalPair("b'umwana", "bumwana")]
        assert corpus_eval(pairs).cer > 0.0
        assert corpus_eval(pairs, strip_apostrophe=True).cer == 0.0

    def test_micro_average_matches_recomputation(self):
        rng = random.Random(11)
        words = ["umwana", "abana", "mbese", "bose", "muraho", "inshuti"]
        pairs = []
        for _ in range(300):
            ref = " ".join(rng.choices(words, k=rng.randint(1, 6)))
            hyp = " ".join(rng.choices(words, k=rng.randint(1, 6)))
            pairs.append(EvalPair(ref, hyp))
        report = corpus_eval(pairs)
        ce = sum(cer_counts(p.reference, p.hypothesis)[0] for p in pairs)
        cn = sum(cer_counts(p.reference, p.hypothesis)[1] for p in pairs)
        we = sum(wer_counts(p.reference, p.hypothesis)[0] for p in pairs)
        wn = sum(wer_counts(p.reference, p.hypothesis)[1] for p in pairs)
        assert report.cer == ce / cn
        assert report.wer == we / wn
