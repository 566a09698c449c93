import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ngramcover import (
    QualityFileError,
    QualityRecord,
    builtin_quality,
    fill_missing_with_median,
    load_quality_file,
    perplexity,
    scores_from_records,
    superfilter_score,
    uniform_quality,
)

from conftest import make_instances


class TestPerplexity:
    def test_uniform_two_way(self):
        assert perplexity([math.log(0.5), math.log(0.5)]) == pytest.approx(2.0)

    def test_certain_events(self):
        assert perplexity([0.0, 0.0, 0.0]) == pytest.approx(1.0)

    def test_mixed_hand_value(self):
        value = perplexity([math.log(0.25), math.log(0.5)])
        assert value == pytest.approx(math.sqrt(8), rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            perplexity([])

    def test_positive_log_prob_rejected(self):
        with pytest.raises(ValueError):
            perplexity([0.1])

    @given(st.integers(2, 50), st.integers(1, 20))
    def test_iid_uniform_equals_m(self, m, length):
        assert perplexity([math.log(1 / m)] * length) == pytest.approx(m, rel=1e-9)

    @given(st.lists(st.floats(-30, 0), min_size=1, max_size=30))
    def test_at_least_one(self, log_probs):
        assert perplexity(log_probs) >= 1.0


class TestSuperfilterScore:
    def test_no_information(self):
        assert superfilter_score(2.0, 2.0) == 1.0

    def test_forced_arithmetic(self):
        assert superfilter_score(1.5, 3.0) == 0.5

    def test_above_one_not_clamped(self):
        assert superfilter_score(6.0, 2.0) == 3.0

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_inputs(self, bad):
        with pytest.raises(ValueError):
            superfilter_score(bad, 1.0)
        with pytest.raises(ValueError):
            superfilter_score(1.0, bad)

    @given(
        st.floats(0.1, 1e6),
        st.floats(0.1, 1e6),
        st.floats(0.001, 1000),
    )
    def test_scale_invariance(self, a, b, k):
        assert superfilter_score(k * a, k * b) == pytest.approx(
            superfilter_score(a, b), rel=1e-12
        )

    @given(st.floats(0.1, 1e6))
    def test_ratio_identity(self, a):
        assert superfilter_score(a, a) == 1.0


# Three-sentence toy corpus for the built-in bigram stand-in; small enough
# that the whole smoothed probability table is recomputed here with exact
# fractions, independently of the implementation.
TOY = make_instances(
    ["red blue", "blue red", "green"],
    ["red blue", "green", "blue red"],
)
# Fitted on instruction and response streams of TOY (BOS context "_"):
# bigram counts: (_,red)=2 (red,blue)=2 (_,blue)=2 (blue,red)=2 (_,green)=2
# context counts: _=6 red=2 blue=2 ; vocabulary size 3
_V = 3
_BI = {("_", "red"): 2, ("red", "blue"): 2, ("_", "blue"): 2,
       ("blue", "red"): 2, ("_", "green"): 2}
_CTX = {"_": 6, "red": 2, "blue": 2}


def _p(prev, cur):
    return Fraction(_BI.get((prev, cur), 0) + 1, _CTX.get(prev, 0) + _V)


def _ppl(probs):
    prod = math.prod(float(p) for p in probs)
    return prod ** (-1 / len(probs))


class TestBuiltinQuality:
    def test_repeated_instruction_scores_below_one(self):
        records = builtin_quality(TOY)
        plain = _ppl([_p("_", "red"), _p("red", "blue")])
        cond = _ppl([_p("blue", "red"), _p("red", "blue")])
        assert records[0].ppl_plain == pytest.approx(plain, rel=1e-9)
        assert records[0].ppl_conditional == pytest.approx(cond, rel=1e-9)
        assert records[0].score == pytest.approx(cond / plain, rel=1e-9)
        assert records[0].score == pytest.approx(math.sqrt(5 / 9), rel=1e-9)
        assert records[0].score < 1

    def test_unseen_transition_hits_smoothing_floor(self):
        # instance 2: instruction ends with "green", which never precedes
        # anything in the corpus, so the conditional first-token probability
        # is the floor 1 / (0 + V)
        records = builtin_quality(TOY)
        floor = Fraction(1, _V)
        cond = _ppl([floor, _p("blue", "red")])
        assert records[2].ppl_conditional == pytest.approx(cond, rel=1e-9)

    def test_single_token_response_closed_form(self):
        # instance 1: plain perplexity of a one-token response is
        # 1 / P(green | BOS) = (ctx(BOS) + V) / (count(BOS, green) + 1)
        records = builtin_quality(TOY)
        assert records[1].ppl_plain == pytest.approx(9 / 3, rel=1e-9)

    def test_empty_response_flagged(self):
        instances = make_instances(["a b", "c d"], ["a", ""])
        with pytest.warns(UserWarning, match="empty responses"):
            records = builtin_quality(instances)
        assert set(records) == {0}

    def test_deterministic(self):
        assert builtin_quality(TOY) == builtin_quality(TOY)


class TestQualityFile:
    def test_ratio_recomputed(self, write_jsonl):
        p = write_jsonl("q.jsonl", [{"id": 0, "ppl_conditional": 2.0, "ppl_plain": 4.0}])
        records = load_quality_file(p)
        assert records[0].score == 0.5

    def test_bare_score_trusted(self, write_jsonl):
        p = write_jsonl("q.jsonl", [{"id": 3, "score": 0.83}])
        records = load_quality_file(p)
        assert records[3].score == 0.83

    def test_duplicate_id(self, write_jsonl):
        p = write_jsonl(
            "q.jsonl", [{"id": 0, "score": 1.0}, {"id": 0, "score": 2.0}]
        )
        with pytest.raises(QualityFileError) as exc:
            load_quality_file(p)
        assert exc.value.line_number == 2

    def test_out_of_range_id(self, write_jsonl):
        p = write_jsonl("q.jsonl", [{"id": 7, "score": 0.83}])
        with pytest.raises(QualityFileError):
            load_quality_file(p, dataset_size=5)

    def test_non_positive_value(self, write_jsonl):
        p = write_jsonl("q.jsonl", [{"id": 0, "ppl_conditional": -2.0, "ppl_plain": 4.0}])
        with pytest.raises(QualityFileError):
            load_quality_file(p)

    def test_invalid_json(self, write_jsonl):
        p = write_jsonl("q.jsonl", "{broken\n")
        with pytest.raises(QualityFileError) as exc:
            load_quality_file(p)
        assert exc.value.line_number == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(QualityFileError):
            load_quality_file(tmp_path / "nope.jsonl")


class TestHelpers:
    def test_record_invariant_enforced(self):
        with pytest.raises(ValueError):
            QualityRecord(0, 2.0, 4.0, -1.0)

    def test_scores_projection(self):
        records = uniform_quality(TOY)
        assert scores_from_records(records) == {0: 1.0, 1: 1.0, 2: 1.0}

    def test_fill_missing_with_median(self):
        scores = {0: 0.2, 1: 0.4, 2: 0.9}
        filled = fill_missing_with_median(scores, range(5))
        assert filled[3] == filled[4] == 0.4
        assert filled[0] == 0.2

    def test_fill_missing_even_count(self):
        filled = fill_missing_with_median({0: 1.0, 1: 3.0}, [2])
        assert filled[2] == 2.0
