"""Leading-digit (Benford) analysis of visit-count populations."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

BENFORD_EXPECTED = np.array([math.log10(1 + 1 / d) for d in range(1, 10)])


def benford_expected(d: int) -> float:
    """log10(1 + 1/d) for a leading digit d in 1..9."""
    if not 1 <= d <= 9:
        raise ValueError(f"leading digit must be in 1..9, got {d}")
    return float(BENFORD_EXPECTED[d - 1])


def leading_digit(n: int) -> int:
    """First decimal digit of a positive integer."""
    if n < 1:
        raise ValueError(f"leading digit needs a positive integer, got {n}")
    while n >= 10:
        n //= 10
    return n


def leading_digits(values: np.ndarray) -> np.ndarray:
    """Vectorized leading digits; exact (integer halving by powers of ten)."""
    v = np.asarray(values, dtype=np.int64).copy()
    if len(v) and v.min() < 1:
        raise ValueError("all values must be positive integers")
    big = v >= 10
    while big.any():
        v[big] //= 10
        big = v >= 10
    return v


@dataclass
class BenfordTable:
    observed: np.ndarray  # proportions, leading digits 1..9
    expected: np.ndarray
    sample_size: int
    max_abs_dev: float
    chi_square: float


def benford_table(values) -> BenfordTable:
    """Leading-digit proportions of a population of positive integers.

    Chi-square is computed against expected counts sample_size * P(d) and is
    informational; max_abs_dev is the comparison statistic.
    """
    v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if v.size == 0:
        raise ValueError("benford table needs a non-empty population")
    digits = leading_digits(v)
    counts = np.bincount(digits, minlength=10)[1:10].astype(np.float64)
    n = int(counts.sum())
    observed = counts / n
    expected_counts = n * BENFORD_EXPECTED
    chi_square = float(((counts - expected_counts) ** 2 / expected_counts).sum())
    return BenfordTable(
        observed=observed,
        expected=BENFORD_EXPECTED.copy(),
        sample_size=n,
        max_abs_dev=float(np.abs(observed - BENFORD_EXPECTED).max()),
        chi_square=chi_square,
    )


def write_benford_csv(table: BenfordTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "observed", "expected"])
        for d in range(1, 10):
            w.writerow(
                [d, f"{table.observed[d - 1]:.6f}", f"{table.expected[d - 1]:.6f}"]
            )
