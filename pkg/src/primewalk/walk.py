"""Lattice walk engine: prime-digit driven rules and the random baseline.

A walk starts at the origin and takes one unit step per event.  The three
digit rules map the four terminal digits {1, 3, 7, 9} onto the four lattice
directions; the random baseline picks directions uniformly from a seeded
deterministic generator.  Observers are notified in batches (numpy arrays)
so large runs stay vectorized; a per-step adapter is provided for small
consumers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .primes import DEFAULT_SEGMENT_FLAGS, WALK_DIGITS, iter_walk_prime_arrays


class Direction(Enum):
    UP = (0, 1)
    DOWN = (0, -1)
    RIGHT = (1, 0)
    LEFT = (-1, 0)

    @property
    def delta(self) -> tuple[int, int]:
        return self.value


@dataclass(frozen=True)
class WalkRule:
    """Bijection from terminal digits onto lattice directions."""

    name: str
    mapping: tuple[tuple[int, Direction], ...]

    def __post_init__(self):
        digits = [d for d, _ in self.mapping]
        dirs = [v for _, v in self.mapping]
        if sorted(digits) != list(WALK_DIGITS) or len(set(dirs)) != 4:
            raise ValueError(f"rule {self.name!r} is not a digit->direction bijection")

    def direction(self, digit: int) -> Direction:
        for d, v in self.mapping:
            if d == digit:
                return v
        raise ValueError(f"digit must be one of {WALK_DIGITS}, got {digit}")

    def delta_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """dx/dy lookup tables indexed by digit (0..9)."""
        dx = np.zeros(10, dtype=np.int64)
        dy = np.zeros(10, dtype=np.int64)
        for d, v in self.mapping:
            dx[d], dy[d] = v.delta
        return dx, dy


A1 = WalkRule(
    "A1",
    ((1, Direction.DOWN), (3, Direction.UP), (7, Direction.RIGHT), (9, Direction.LEFT)),
)
A2 = WalkRule(
    "A2",
    ((1, Direction.RIGHT), (3, Direction.UP), (7, Direction.DOWN), (9, Direction.LEFT)),
)
A3 = WalkRule(
    "A3",
    ((1, Direction.LEFT), (3, Direction.UP), (7, Direction.RIGHT), (9, Direction.DOWN)),
)

RULES = {"a1": A1, "a2": A2, "a3": A3}


def rule_direction(rule: WalkRule, digit: int) -> Direction:
    return rule.direction(digit)


@dataclass(frozen=True)
class WalkState:
    x: int = 0
    y: int = 0
    steps_taken: int = 0
    last_n: int = 0


_I64_MAX = (1 << 63) - 1


def step(state: WalkState, digit: int, rule: WalkRule) -> WalkState:
    """Advance one event; returns the new state."""
    dx, dy = rule.direction(digit).delta
    x, y = state.x + dx, state.y + dy
    assert abs(x) <= _I64_MAX and abs(y) <= _I64_MAX
    return replace(state, x=x, y=y, steps_taken=state.steps_taken + 1)


@dataclass
class WalkSummary:
    final_x: int
    final_y: int
    steps_taken: int
    last_n: int
    elapsed: float


class WalkObserver:
    """Batch observer; subclass and override `observe`.

    `primes` is None for the random baseline (there is no driving integer);
    `xs`/`ys` hold the position after each step of the batch and (x0, y0) is
    the position before it.
    """

    def observe(
        self,
        primes: np.ndarray | None,
        digits: np.ndarray | None,
        xs: np.ndarray,
        ys: np.ndarray,
        x0: int,
        y0: int,
    ) -> None:
        raise NotImplementedError

    def finish(self, last_n: int, steps_taken: int) -> None:
        pass


class StepObserver(WalkObserver):
    """Adapter delivering one (prime, digit, old_pos, new_pos) call per step."""

    def on_step(self, prime, digit, old_pos, new_pos) -> None:
        raise NotImplementedError

    def observe(self, primes, digits, xs, ys, x0, y0):
        ps = primes.tolist() if primes is not None else [None] * len(xs)
        ds = digits.tolist() if digits is not None else [None] * len(xs)
        old = (x0, y0)
        for p, d, x, y in zip(ps, ds, xs.tolist(), ys.tolist()):
            self.on_step(p, d, old, (x, y))
            old = (x, y)


class WalkSession:
    """Incrementally executes a rule-driven walk over prime batches."""

    def __init__(
        self,
        rule: WalkRule,
        observers: Sequence[WalkObserver] = (),
        state: WalkState | None = None,
    ):
        self.rule = rule
        self.observers = list(observers)
        self.state = state or WalkState()
        self._dx, self._dy = rule.delta_tables()

    def feed(self, primes: np.ndarray) -> None:
        if len(primes) == 0:
            return
        digits = primes % 10
        xs = self.state.x + np.cumsum(self._dx[digits])
        ys = self.state.y + np.cumsum(self._dy[digits])
        for obs in self.observers:
            obs.observe(primes, digits, xs, ys, self.state.x, self.state.y)
        self.state = WalkState(
            x=int(xs[-1]),
            y=int(ys[-1]),
            steps_taken=self.state.steps_taken + len(primes),
            last_n=int(primes[-1]),
        )

    def finish(self, last_n: int) -> WalkState:
        self.state = replace(self.state, last_n=max(self.state.last_n, last_n))
        for obs in self.observers:
            obs.finish(self.state.last_n, self.state.steps_taken)
        return self.state


def run_walk(
    limit: int,
    rule: WalkRule,
    observers: Sequence[WalkObserver] = (),
    *,
    segment_flags: int = DEFAULT_SEGMENT_FLAGS,
    threads: int = 1,
    start: int = 2,
    state: WalkState | None = None,
) -> WalkSummary:
    """Run the walk over every prime in [start, limit]."""
    t0 = time.perf_counter()
    session = WalkSession(rule, observers, state=state)
    for batch in iter_walk_prime_arrays(
        limit, start=start, segment_flags=segment_flags, threads=threads
    ):
        session.feed(batch)
    final = session.finish(max(limit, 0))
    return WalkSummary(
        final_x=final.x,
        final_y=final.y,
        steps_taken=final.steps_taken,
        last_n=final.last_n,
        elapsed=time.perf_counter() - t0,
    )


# --- random baseline ---------------------------------------------------------

_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

# Fixed index -> direction table for floor(r / 0.25), mirroring the digit
# order 1, 3, 7, 9 of rule A1.
PEARSON_DIRECTIONS = (Direction.DOWN, Direction.UP, Direction.RIGHT, Direction.LEFT)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class RandomSource:
    """SplitMix64 stream of uniforms in [0, 1).

    The i-th output (i >= 1) mixes seed + i * GAMMA, so any block of the
    sequence can be regenerated from (seed, index) alone; uniforms use the
    top 53 bits.  Identical on every platform.
    """

    def __init__(self, seed: int, index: int = 0):
        self.seed = seed & _MASK
        self.index = index

    def next_float(self) -> float:
        self.index += 1
        return float(self.block_at(self.seed, self.index, 1)[0])

    @staticmethod
    def block_at(seed: int, start_index: int, n: int) -> np.ndarray:
        idx = np.arange(start_index, start_index + n, dtype=np.uint64)
        z = np.uint64(seed & _MASK) + idx * np.uint64(_GAMMA)
        return (_mix(z) >> np.uint64(11)) * (2.0 ** -53)


def pearson_direction(r: float) -> Direction:
    """Uniform r in [0, 1) -> one of the four directions via floor(r / 0.25)."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"r must lie in [0, 1), got {r}")
    return PEARSON_DIRECTIONS[int(r / 0.25)]


_PEARSON_DX = np.array([d.delta[0] for d in PEARSON_DIRECTIONS], dtype=np.int64)
_PEARSON_DY = np.array([d.delta[1] for d in PEARSON_DIRECTIONS], dtype=np.int64)


def run_random_walk(
    steps: int,
    seed: int,
    observers: Sequence[WalkObserver] = (),
    *,
    batch_size: int = 1 << 21,
    state: WalkState | None = None,
    uniforms: Iterable[float] | None = None,
) -> WalkSummary:
    """Execute `steps` uniform four-direction moves from the seeded source.

    `uniforms` substitutes an explicit sequence of r-values (testing hook);
    resuming from `state` continues the generator at index
    state.steps_taken + 1, so a resumed run replays the exact tail of the
    uninterrupted sequence.
    """
    t0 = time.perf_counter()
    st = state or WalkState()
    done = st.steps_taken
    x, y = st.x, st.y
    if uniforms is not None:
        rs = np.fromiter(uniforms, dtype=np.float64)
        if len(rs) < steps - done:
            raise ValueError("not enough uniforms supplied")
    while done < steps:
        n = min(batch_size, steps - done)
        if uniforms is not None:
            block = rs[done - st.steps_taken : done - st.steps_taken + n]
        else:
            block = RandomSource.block_at(seed, done + 1, n)
        if np.any((block < 0.0) | (block >= 1.0)):
            raise ValueError("uniform source produced r outside [0, 1)")
        idx = (block / 0.25).astype(np.int64)
        xs = x + np.cumsum(_PEARSON_DX[idx])
        ys = y + np.cumsum(_PEARSON_DY[idx])
        for obs in observers:
            obs.observe(None, None, xs, ys, x, y)
        x, y = int(xs[-1]), int(ys[-1])
        done += n
    for obs in observers:
        obs.finish(done, done)
    return WalkSummary(
        final_x=x,
        final_y=y,
        steps_taken=done,
        last_n=done,
        elapsed=time.perf_counter() - t0,
    )
