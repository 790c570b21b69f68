import math
import random
from collections import Counter

import pytest

from jobspan import cvalue_extract, cvalue_scores, identity_extract
from jobspan.cvalue import read_scores, write_scores
from jobspan.errors import DataFormatError

from oracle import VOCAB20, o_cvalue, random_corpus

TWO_TITLE = Counter({("hr", "manager"): 5, ("senior", "hr", "manager"): 5})


def test_classic_unigram_scores_zero():
    scores = cvalue_scores(Counter({("nurse",): 50}), min_count=5, length_weight="classic")
    assert scores[("nurse",)].cvalue == 0.0


def test_nested_bigram_smoothed():
    scores = cvalue_scores(TWO_TITLE, min_count=5, length_weight="smoothed")
    entry = scores[("hr", "manager")]
    assert entry.freq == 10
    assert entry.nest_count == 1
    assert entry.nested_freq_sum == 5
    assert entry.cvalue == pytest.approx(math.log2(3) * 5)


def test_non_nested_trigram_smoothed():
    scores = cvalue_scores(TWO_TITLE, min_count=5, length_weight="smoothed")
    entry = scores[("senior", "hr", "manager")]
    assert entry.nest_count == 0
    assert entry.cvalue == pytest.approx(math.log2(4) * 5) == pytest.approx(10.0)


def test_min_count_excludes_rare_candidates():
    scores = cvalue_scores(TWO_TITLE, min_count=6)
    assert ("senior", "hr", "manager") not in scores
    assert scores[("hr", "manager")].freq == 10
    # the excluded trigram no longer counts as a nest
    assert scores[("hr", "manager")].nest_count == 0


def test_freq_counts_every_occurrence_position():
    scores = cvalue_scores(Counter({("boss", "of", "boss"): 3}), min_count=5)
    assert scores[("boss",)].freq == 6


def test_extract_prefers_higher_cvalue():
    scores = cvalue_scores(TWO_TITLE, min_count=5, length_weight="smoothed")
    pred = cvalue_extract(scores, ("senior", "hr", "manager"), threshold=0.0)
    assert pred.tokens == ("senior", "hr", "manager")


def test_extract_no_scored_subspan():
    scores = cvalue_scores(TWO_TITLE, min_count=5)
    pred = cvalue_extract(scores, ("office", "hero"), threshold=0.0)
    assert pred.span is None


def test_extract_threshold_above_everything():
    scores = cvalue_scores(TWO_TITLE, min_count=5, length_weight="smoothed")
    pred = cvalue_extract(scores, ("senior", "hr", "manager"), threshold=1e9)
    assert pred.span is None


def test_extract_span_is_first_occurrence():
    scores = cvalue_scores(Counter({("ops", "lead"): 6}), min_count=5,
                           length_weight="smoothed")
    pred = cvalue_extract(scores, ("ops", "lead", "and", "ops", "lead"), 0.0)
    assert pred.span == (0, 2)


def test_non_nested_cvalue_increases_with_freq():
    low = cvalue_scores(Counter({("it", "support"): 5}), min_count=5)
    high = cvalue_scores(Counter({("it", "support"): 9}), min_count=5)
    assert high[("it", "support")].cvalue > low[("it", "support")].cvalue


def test_single_nest_with_equal_freq_scores_zero():
    # "data engineer" only ever occurs inside "senior data engineer": full
    # nestedness penalty wipes out the score under either weight.
    corpus = Counter({("senior", "data", "engineer"): 7})
    for weight in ("classic", "smoothed"):
        scores = cvalue_scores(corpus, min_count=7, length_weight=weight)
        entry = scores[("data", "engineer")]
        assert entry.freq == 7 and entry.nest_count == 1
        assert entry.cvalue == 0.0


def test_identity_extract_spans():
    assert identity_extract(("senior", "hr", "manager")).span == (0, 3)
    assert identity_extract(("neurologist",)).span == (0, 1)
    with pytest.raises(ValueError):
        identity_extract(())


def test_matches_oracle_on_random_corpora():
    for seed in range(6):
        rng = random.Random(seed)
        counts = random_corpus(rng, 50, VOCAB20[:6], max_len=4)
        for weight in ("classic", "smoothed"):
            expected = o_cvalue(counts, min_count=2, weight=weight)
            got = cvalue_scores(counts, min_count=2, length_weight=weight)
            assert set(got) == set(expected)
            for gram, (f, nests, nsum, value) in expected.items():
                entry = got[gram]
                assert (entry.freq, entry.nest_count, entry.nested_freq_sum) == (
                    f, nests, nsum,
                )
                assert entry.cvalue == pytest.approx(value)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        cvalue_scores(TWO_TITLE, min_count=0)
    with pytest.raises(ValueError):
        cvalue_scores(TWO_TITLE, length_weight="cubic")


def test_scores_file_roundtrip(tmp_path):
    scores = cvalue_scores(TWO_TITLE, min_count=5, length_weight="smoothed")
    path = tmp_path / "scores.tsv"
    write_scores(scores, path)
    assert read_scores(path) == scores


def test_scores_file_rejects_other_files(tmp_path):
    path = tmp_path / "scores.tsv"
    path.write_text("not a scores file\n", encoding="utf-8")
    with pytest.raises(DataFormatError):
        read_scores(path)
