"""Run-length statistics of prime terminal digits.

A run is a maximal block of consecutive primes sharing the same last digit.
The stream is scanned once; the open run at the end of input is committed
on finalize so the runs partition the whole event sequence.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .primes import DEFAULT_SEGMENT_FLAGS, WALK_DIGITS, iter_walk_prime_arrays
from .walk import WalkObserver


@dataclass
class RunAccumulator:
    current_digit: int | None = None
    current_length: int = 0


class RunHistogram:
    """Occurrence counts per (digit, run length)."""

    def __init__(self):
        self.counts: dict[tuple[int, int], int] = {}

    def add(self, digit: int, length: int, occurrences: int = 1) -> None:
        key = (digit, length)
        self.counts[key] = self.counts.get(key, 0) + occurrences

    @property
    def total_runs(self) -> int:
        return sum(self.counts.values())

    @property
    def total_events(self) -> int:
        return sum(length * c for (_, length), c in self.counts.items())

    def max_length(self, digit: int) -> int:
        lengths = [ln for (d, ln) in self.counts if d == digit]
        return max(lengths) if lengths else 0

    @property
    def max_length_per_digit(self) -> dict[int, int]:
        return {d: self.max_length(d) for d in WALK_DIGITS}

    def occurrences(self, digit: int, length: int) -> int:
        return self.counts.get((digit, length), 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, RunHistogram) and self.counts == other.counts

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["digit", "length", "count"])
            for (d, ln), c in sorted(self.counts.items()):
                w.writerow([d, ln, c])

    def state(self) -> dict:
        items = sorted(self.counts.items())
        return {
            "digits": np.array([d for (d, _), _ in items], dtype=np.int64),
            "lengths": np.array([ln for (_, ln), _ in items], dtype=np.int64),
            "occurrences": np.array([c for _, c in items], dtype=np.int64),
        }

    @classmethod
    def from_state(cls, state: dict) -> "RunHistogram":
        h = cls()
        for d, ln, c in zip(state["digits"], state["lengths"], state["occurrences"]):
            h.add(int(d), int(ln), int(c))
        return h


def feed(acc: RunAccumulator, hist: RunHistogram, digit: int) -> None:
    """Consume one event; commits the previous run when the digit changes."""
    if digit not in WALK_DIGITS:
        raise ValueError(f"digit must be one of {WALK_DIGITS}, got {digit}")
    if digit == acc.current_digit:
        acc.current_length += 1
        return
    if acc.current_digit is not None:
        hist.add(acc.current_digit, acc.current_length)
    acc.current_digit = digit
    acc.current_length = 1


def finalize(acc: RunAccumulator, hist: RunHistogram) -> RunHistogram:
    """Commit the open run, if any, and clear the accumulator."""
    if acc.current_digit is not None:
        hist.add(acc.current_digit, acc.current_length)
        acc.current_digit = None
        acc.current_length = 0
    return hist


class RunLengthObserver(WalkObserver):
    """Streaming, vectorized run-length accumulator over digit batches."""

    def __init__(
        self, acc: RunAccumulator | None = None, hist: RunHistogram | None = None
    ):
        self.acc = acc or RunAccumulator()
        self.hist = hist or RunHistogram()

    def observe(self, primes, digits, xs, ys, x0, y0):
        if digits is None:
            raise ValueError("run-length statistics need a digit-driven walk")
        self.feed_digits(digits)

    def feed_digits(self, digits: np.ndarray) -> None:
        if len(digits) == 0:
            return
        starts = np.flatnonzero(np.diff(digits)) + 1
        starts = np.concatenate(([0], starts, [len(digits)]))
        run_digits = digits[starts[:-1]]
        run_lengths = np.diff(starts)
        # splice the carried open run with the batch's first run
        if self.acc.current_digit == int(run_digits[0]):
            run_lengths[0] += self.acc.current_length
        elif self.acc.current_digit is not None:
            self.hist.add(self.acc.current_digit, self.acc.current_length)
        self.acc.current_digit = int(run_digits[-1])
        self.acc.current_length = int(run_lengths[-1])
        if len(run_digits) > 1:
            packed = run_digits[:-1] * 10_000 + run_lengths[:-1]
            uniq, cnt = np.unique(packed, return_counts=True)
            for key, c in zip(uniq.tolist(), cnt.tolist()):
                self.hist.add(key // 10_000, key % 10_000, int(c))

    def finish(self, last_n, steps_taken):
        # deliberately no finalize: the open run must survive a resume;
        # use finalized_histogram() to read results
        pass

    def finalized_histogram(self) -> RunHistogram:
        """Snapshot with the open run committed; observer state untouched."""
        snap = RunHistogram()
        snap.counts = dict(self.hist.counts)
        if self.acc.current_digit is not None:
            snap.add(self.acc.current_digit, self.acc.current_length)
        return snap

    def state(self) -> dict:
        s = self.hist.state()
        s["acc_digit"] = self.acc.current_digit or 0
        s["acc_length"] = self.acc.current_length
        return s

    @classmethod
    def from_state(cls, state: dict) -> "RunLengthObserver":
        hist = RunHistogram.from_state(state)
        d = int(state["acc_digit"])
        acc = RunAccumulator(
            current_digit=d if d else None, current_length=int(state["acc_length"])
        )
        return cls(acc=acc, hist=hist)


def run_histogram(
    limit: int, *, segment_flags: int = DEFAULT_SEGMENT_FLAGS
) -> RunHistogram:
    """Full run-length histogram over the event stream up to `limit`."""
    obs = RunLengthObserver()
    for batch in iter_walk_prime_arrays(limit, segment_flags=segment_flags):
        obs.feed_digits(batch % 10)
    return obs.finalized_histogram()


def short_run_fraction(hist: RunHistogram) -> float:
    """Fraction of runs of length 1 or 2 among all runs."""
    total = hist.total_runs
    if total == 0:
        raise ValueError("histogram is empty")
    short = sum(c for (_, ln), c in hist.counts.items() if ln <= 2)
    return short / total
