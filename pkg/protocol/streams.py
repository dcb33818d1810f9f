"""
Counter-based random numbers: every round owns one Philox block.

Round r of a session seeded with `seed` reads the four 64-bit words of Philox
counter block r + 1 under key `seed`. A partition starting at round s builds
its generator with counter s, so any split of the round range into partitions
yields the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from validators import validate_count, validate_seed

WORDS_PER_ROUND = 4

# word layout inside a round's block
ALICE_SETTING = 0
BOB_SETTING = 1
OUTCOME = 2
SACRIFICE = 3

_TO_UNIT = 2.0 ** -53


def _generator(seed: int, first_round: int) -> np.random.Philox:
    return np.random.Philox(key=seed, counter=first_round)


def round_uniforms(seed, start, stop) -> np.ndarray:
    """
    Uniform draws in [0, 1) for rounds start..stop-1, shape (stop - start, 4).

    Each 64-bit word is mapped through its top 53 bits.
    """
    seed = validate_seed(seed)
    start = validate_count(start, "start", minimum=0)
    stop = validate_count(stop, "stop", minimum=start)
    count = stop - start
    if count == 0:
        return np.empty((0, WORDS_PER_ROUND))

    raw = _generator(seed, start).random_raw(count * WORDS_PER_ROUND)
    return ((raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT).reshape(count, WORDS_PER_ROUND)


@dataclass(frozen=True)
class RoundStream:
    """The four uniforms that drive one round."""
    round: int
    alice_setting: float
    bob_setting: float
    outcome: float
    sacrifice: float


def round_stream(seed, round_index) -> RoundStream:
    u = round_uniforms(seed, round_index, round_index + 1)[0]
    return RoundStream(
        round=int(round_index),
        alice_setting=float(u[ALICE_SETTING]),
        bob_setting=float(u[BOB_SETTING]),
        outcome=float(u[OUTCOME]),
        sacrifice=float(u[SACRIFICE]),
    )


def partitions(n, workers):
    """Split range(n) into at most `workers` contiguous, ordered spans."""
    workers = max(1, min(int(workers), int(n))) if n else 1
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
