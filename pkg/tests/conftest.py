import math

import pytest


def trial_division_primes(limit):
    """Independent oracle: all primes <= limit by trial division."""
    out = []
    for n in range(2, limit + 1):
        if all(n % d for d in range(2, math.isqrt(n) + 1)):
            out.append(n)
    return out


def walk_primes_oracle(limit):
    return [p for p in trial_division_primes(limit) if p not in (2, 5)]


@pytest.fixture(scope="session")
def primes_to_10000():
    return trial_division_primes(10_000)
