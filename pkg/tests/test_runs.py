import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primewalk.primes import iter_events
from primewalk.runs import (
    RunAccumulator,
    RunHistogram,
    RunLengthObserver,
    feed,
    finalize,
    run_histogram,
    short_run_fraction,
)

from conftest import walk_primes_oracle


def two_pass_oracle(digits):
    """Independent run-length oracle over a materialized digit sequence."""
    hist = {}
    for digit, group in itertools.groupby(digits):
        key = (digit, sum(1 for _ in group))
        hist[key] = hist.get(key, 0) + 1
    return hist


class TestFeedFinalize:
    def test_alternating(self):
        acc, hist = RunAccumulator(), RunHistogram()
        feed(acc, hist, 3)
        feed(acc, hist, 7)
        assert hist.counts == {(3, 1): 1}
        finalize(acc, hist)
        assert hist.counts == {(3, 1): 1, (7, 1): 1}

    def test_pair_then_new(self):
        acc, hist = RunAccumulator(), RunHistogram()
        for d in (9, 9, 1):
            feed(acc, hist, d)
        assert hist.counts == {(9, 2): 1}
        assert (acc.current_digit, acc.current_length) == (1, 1)

    def test_finalize_commits_open_run(self):
        acc, hist = RunAccumulator(), RunHistogram()
        acc.current_digit, acc.current_length = 1, 3
        finalize(acc, hist)
        assert hist.counts == {(1, 3): 1}
        assert acc.current_digit is None

    def test_finalize_empty_acc(self):
        acc, hist = RunAccumulator(), RunHistogram()
        finalize(acc, hist)
        assert hist.counts == {}

    def test_single_digit(self):
        acc, hist = RunAccumulator(), RunHistogram()
        feed(acc, hist, 3)
        finalize(acc, hist)
        assert hist.counts == {(3, 1): 1}

    def test_bad_digit(self):
        with pytest.raises(ValueError):
            feed(RunAccumulator(), RunHistogram(), 2)


class TestRunHistogram:
    def test_primes_to_200_has_double_nine(self):
        # 139 and 149 are consecutive primes, both ending in 9
        hist = run_histogram(200)
        oracle = two_pass_oracle([p % 10 for p in walk_primes_oracle(200)])
        assert hist.counts == oracle
        assert hist.occurrences(9, 2) >= 1

    def test_partition_identity(self):
        for limit in (0, 10, 1000, 50_000):
            hist = run_histogram(limit)
            assert hist.total_events == sum(
                1 for _ in iter_events(limit)
            )

    def test_streaming_equals_two_pass_oracle(self):
        limit = 300_000
        digits = [e.digit for e in iter_events(limit)]
        assert run_histogram(limit).counts == two_pass_oracle(digits)

    @given(st.sampled_from([64, 512, 1 << 14]))
    @settings(max_examples=6, deadline=None)
    def test_segment_size_invariant(self, flags):
        assert (
            run_histogram(100_000, segment_flags=flags).counts
            == run_histogram(100_000).counts
        )

    def test_max_length_per_digit(self):
        hist = RunHistogram()
        hist.add(1, 3)
        hist.add(1, 1, 5)
        hist.add(7, 2)
        assert hist.max_length_per_digit == {1: 3, 3: 0, 7: 2, 9: 0}


class TestObserverStateRoundtrip:
    def test_split_feed_equals_single_feed(self):
        digits = np.array([p % 10 for p in walk_primes_oracle(5000)], dtype=np.int64)
        whole = RunLengthObserver()
        whole.feed_digits(digits)
        split = RunLengthObserver()
        for i in range(0, len(digits), 7):
            split.feed_digits(digits[i : i + 7])
        assert whole.finalized_histogram() == split.finalized_histogram()

    def test_state_roundtrip_preserves_open_run(self):
        obs = RunLengthObserver()
        obs.feed_digits(np.array([3, 3, 7], dtype=np.int64))
        restored = RunLengthObserver.from_state(obs.state())
        restored.feed_digits(np.array([7, 1], dtype=np.int64))
        obs.feed_digits(np.array([7, 1], dtype=np.int64))
        assert restored.finalized_histogram() == obs.finalized_histogram()
        assert restored.finalized_histogram().counts == {
            (3, 2): 1,
            (7, 2): 1,
            (1, 1): 1,
        }


class TestShortRunFraction:
    def test_all_short(self):
        hist = RunHistogram()
        hist.add(3, 1)
        hist.add(7, 1)
        assert short_run_fraction(hist) == 1.0

    def test_all_long(self):
        hist = RunHistogram()
        hist.add(1, 3)
        assert short_run_fraction(hist) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            short_run_fraction(RunHistogram())

    def test_realistic_fraction_dominates(self):
        hist = run_histogram(10**6)
        assert short_run_fraction(hist) > 0.9
