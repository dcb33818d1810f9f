"""
Protocol sessions: configuration, per-round measurement events, generation.

Each round Alice and Bob independently pick an analyzer setting from their
menus, the source emits a pair and one joint outcome is drawn from the closed
form joint probabilities. All randomness of round r comes from
streams.round_uniforms(seed, r, r + 1), so sessions are reproducible for any
number of worker threads.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from protocol import streams
from quantum_model import (
    JointOutcome,
    OUTCOMES,
    Party,
    ProductAttack,
    Protocol,
    SettingId,
    Singlet,
    outcome_table,
)
from validators import (
    ValidationError,
    validate_distribution,
    validate_margin,
    validate_n_pairs,
    validate_probability,
    validate_seed,
    validate_workers,
)

logger = logging.getLogger(__name__)

DEFAULT_SACRIFICE_FRACTION = 0.1


# ============== CONFIGURATION ==============

@dataclass(frozen=True)
class ProtocolConfig:
    variant: Protocol
    n_pairs: int
    seed: int
    sacrifice_fraction: float = DEFAULT_SACRIFICE_FRACTION
    alice_probabilities: Optional[tuple] = None
    bob_probabilities: Optional[tuple] = None
    margin: float = 0.0

    def __post_init__(self):
        variant = Protocol.parse(self.variant)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "n_pairs", validate_n_pairs(self.n_pairs))
        object.__setattr__(self, "seed", validate_seed(self.seed))
        object.__setattr__(self, "sacrifice_fraction",
                           validate_probability(self.sacrifice_fraction, "sacrifice_fraction"))
        object.__setattr__(self, "margin", validate_margin(self.margin))

        for attr, menu in (("alice_probabilities", variant.alice_menu),
                           ("bob_probabilities", variant.bob_menu)):
            probs = getattr(self, attr)
            if probs is None:
                probs = tuple(1.0 / len(menu) for _ in menu)
            probs = validate_distribution(probs, attr, expected_length=len(menu))
            object.__setattr__(self, attr, probs)

    @property
    def alice_menu(self) -> tuple:
        return self.variant.alice_menu

    @property
    def bob_menu(self) -> tuple:
        return self.variant.bob_menu

    @classmethod
    def from_dict(cls, data) -> "ProtocolConfig":
        if not isinstance(data, dict):
            raise ValidationError("Session config must be a JSON object", "config")
        for key in ("variant", "n_pairs", "seed"):
            if key not in data:
                raise ValidationError(f"{key} is required", key)

        probs = data.get("setting_probabilities") or {}
        if not isinstance(probs, dict):
            raise ValidationError("setting_probabilities must map alice/bob to lists", "setting_probabilities")
        unknown = set(probs) - {"alice", "bob"}
        if unknown:
            raise ValidationError(f"Unknown setting_probabilities keys: {', '.join(sorted(unknown))}",
                                  "setting_probabilities")

        return cls(
            variant=data["variant"],
            n_pairs=data["n_pairs"],
            seed=data["seed"],
            sacrifice_fraction=data.get("sacrifice_fraction", DEFAULT_SACRIFICE_FRACTION),
            alice_probabilities=probs.get("alice"),
            bob_probabilities=probs.get("bob"),
            margin=data.get("margin", 0.0),
        )

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "sacrifice_fraction": self.sacrifice_fraction,
            "setting_probabilities": {
                "alice": list(self.alice_probabilities),
                "bob": list(self.bob_probabilities),
            },
            "margin": self.margin,
        }


# ============== RECORDS ==============

@dataclass(frozen=True)
class RoundRecord:
    round: int
    a_setting: SettingId
    b_setting: SettingId
    outcome: JointOutcome


class SessionRecords(Sequence):
    """
    Column store of a session: setting indices (1..3) and outcome indices
    (JointOutcome order). Indexing yields RoundRecord objects.
    """

    def __init__(self, a_index, b_index, outcome):
        self.a_index = np.asarray(a_index, dtype=np.int8)
        self.b_index = np.asarray(b_index, dtype=np.int8)
        self.outcome = np.asarray(outcome, dtype=np.int8)
        if not (self.a_index.shape == self.b_index.shape == self.outcome.shape) or self.a_index.ndim != 1:
            raise ValidationError("Session columns must be equal-length vectors", "records")
        for column in (self.a_index, self.b_index, self.outcome):
            column.setflags(write=False)

    @classmethod
    def from_records(cls, records) -> "SessionRecords":
        """Accept a SessionRecords or any iterable of RoundRecord, in round order."""
        if isinstance(records, SessionRecords):
            return records
        rows = list(records)
        for position, rec in enumerate(rows):
            if rec.round != position:
                raise ValidationError(f"Record {position} carries round {rec.round}", "records")
            if rec.a_setting.party is not Party.ALICE or rec.b_setting.party is not Party.BOB:
                raise ValidationError(f"Record {position} has settings for the wrong party", "records")
        return cls(
            [r.a_setting.index for r in rows],
            [r.b_setting.index for r in rows],
            [r.outcome.index for r in rows],
        )

    def __len__(self):
        return int(self.outcome.shape[0])

    def __getitem__(self, item):
        if isinstance(item, slice):
            return [self[i] for i in range(*item.indices(len(self)))]
        n = len(self)
        if item < 0:
            item += n
        if not 0 <= item < n:
            raise IndexError("round index out of range")
        return RoundRecord(
            round=int(item),
            a_setting=SettingId(Party.ALICE, int(self.a_index[item])),
            b_setting=SettingId(Party.BOB, int(self.b_index[item])),
            outcome=OUTCOMES[int(self.outcome[item])],
        )

    def __eq__(self, other):
        if not isinstance(other, SessionRecords):
            return NotImplemented
        return (np.array_equal(self.a_index, other.a_index)
                and np.array_equal(self.b_index, other.b_index)
                and np.array_equal(self.outcome, other.outcome))

    __hash__ = None

    def cell_mask(self, a_setting: SettingId, b_setting: SettingId) -> np.ndarray:
        return (self.a_index == a_setting.index) & (self.b_index == b_setting.index)

    def cell_counts(self) -> dict:
        """Round count per (alice index, bob index) cell."""
        counts = {}
        for i in range(1, 4):
            for j in range(1, 4):
                c = int(np.count_nonzero((self.a_index == i) & (self.b_index == j)))
                if c:
                    counts[(i, j)] = c
        return counts


# ============== SAMPLING ==============

def _inverse_cdf(cdf, u):
    """Index of the first cdf entry exceeding u, clipped to the last bin."""
    return np.minimum(np.sum(np.asarray(u)[..., None] >= cdf, axis=-1), cdf.shape[-1] - 1)


def _check_source(source):
    if not isinstance(source, (Singlet, ProductAttack)):
        raise ValidationError(f"Unsupported source model {source!r}", "source")
    return source


def outcome_cdf(source, a_setting: SettingId, b_setting: SettingId) -> np.ndarray:
    return np.cumsum(outcome_table(source, a_setting.angle, b_setting.angle))


def sample_round(source, a_setting: SettingId, b_setting: SettingId, rng_state) -> JointOutcome:
    """
    Draw one joint outcome for the given settings.

    rng_state is a streams.RoundStream (its outcome word is used) or a bare
    uniform in [0, 1).
    """
    _check_source(source)
    u = rng_state.outcome if isinstance(rng_state, streams.RoundStream) else float(rng_state)
    if not 0.0 <= u < 1.0:
        raise ValidationError("rng_state uniform must lie in [0, 1)", "rng_state")
    cdf = outcome_cdf(source, a_setting, b_setting)
    return OUTCOMES[int(_inverse_cdf(cdf, u))]


def _cell_cdfs(config: ProtocolConfig, source) -> np.ndarray:
    """cdfs[i, j] for menu positions i (Alice) and j (Bob)."""
    return np.array([
        [outcome_cdf(source, a, b) for b in config.bob_menu]
        for a in config.alice_menu
    ])


def _generate(config, cdfs, start, stop):
    u = streams.round_uniforms(config.seed, start, stop)
    a_pos = _inverse_cdf(np.cumsum(config.alice_probabilities), u[:, streams.ALICE_SETTING])
    b_pos = _inverse_cdf(np.cumsum(config.bob_probabilities), u[:, streams.BOB_SETTING])
    outcome = _inverse_cdf(cdfs[a_pos, b_pos], u[:, streams.OUTCOME])

    a_lookup = np.array([s.index for s in config.alice_menu], dtype=np.int8)
    b_lookup = np.array([s.index for s in config.bob_menu], dtype=np.int8)
    return a_lookup[a_pos], b_lookup[b_pos], outcome.astype(np.int8)


def run_session(config: ProtocolConfig, source, workers=1) -> SessionRecords:
    """Generate config.n_pairs rounds; identical for every worker count."""
    if not isinstance(config, ProtocolConfig):
        raise ValidationError("run_session needs a ProtocolConfig", "config")
    _check_source(source)
    workers = validate_workers(workers)

    cdfs = _cell_cdfs(config, source)
    spans = streams.partitions(config.n_pairs, workers)
    logger.info("session %s: %d pairs, seed %d, %d partition(s)",
                config.variant.value, config.n_pairs, config.seed, len(spans))

    if len(spans) == 1:
        parts = [_generate(config, cdfs, *spans[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(lambda s: _generate(config, cdfs, *s), spans))

    return SessionRecords(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )
