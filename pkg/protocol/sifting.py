"""
Public discussion after a session: setting announcements, outcome disclosure
for test rounds, key extraction and empirical security estimators.

Round roles
- key:        matched settings (Ai, Bi), except sacrificed (A2,B2) rounds
- sacrificed: (A2,B2) rounds marked by the round's sacrifice word
              (u < sacrifice_fraction); outcomes disclosed, feed QBER and the
              (--) term of W~ / W~'
- test:       every off-diagonal cell; outcomes disclosed, feed W and W~'

Key bits: Alice writes 1 for +, Bob writes 1 for -, so ideal singlet keys agree.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from protocol import streams
from protocol.session import ProtocolConfig, SessionRecords
from quantum_model import JointOutcome, OUTCOMES, Protocol, SettingId, alice, bob
from security_metrics import QBER_CELL, W_CELLS, W_PRIME_CELLS, critical_qber, secure_original
from validators import ValidationError

logger = logging.getLogger(__name__)


# ============== ESTIMATES ==============

@dataclass(frozen=True)
class Estimate:
    value: Optional[float]
    std_error: Optional[float]
    count: int

    @property
    def available(self) -> bool:
        return self.value is not None

    @classmethod
    def unavailable(cls, count=0) -> "Estimate":
        return cls(None, None, count)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "count": self.count,
            "available": self.available,
        }


def _frequency(hits, count) -> Estimate:
    if count == 0:
        return Estimate.unavailable()
    p = hits / count
    return Estimate(p, math.sqrt(p * (1.0 - p) / count), int(count))


def estimate_probability(records, a_setting: SettingId, b_setting: SettingId,
                         outcome: JointOutcome, rounds=None) -> Estimate:
    """
    Cell-conditional frequency of `outcome` at (a_setting, b_setting) with its
    binomial standard error sqrt(p(1-p)/n). `rounds` optionally restricts the
    cell to a boolean mask. An empty cell gives an unavailable estimate.
    """
    records = SessionRecords.from_records(records)
    if not isinstance(outcome, JointOutcome):
        raise ValidationError(f"outcome must be a JointOutcome (got {outcome!r})", "outcome")

    mask = records.cell_mask(a_setting, b_setting)
    if rounds is not None:
        rounds = np.asarray(rounds, dtype=bool)
        if rounds.shape != mask.shape:
            raise ValidationError("rounds mask must cover every record", "rounds")
        mask &= rounds

    count = int(np.count_nonzero(mask))
    hits = int(np.count_nonzero(records.outcome[mask] == outcome.index))
    return _frequency(hits, count)


def combine(terms) -> Estimate:
    """Signed sum of independent estimates; unavailable if any term is."""
    value = 0.0
    variance = 0.0
    count = 0
    for sign, est in terms:
        if not est.available:
            return Estimate.unavailable(count)
        value += sign * est.value
        variance += est.std_error ** 2
        count += est.count
    return Estimate(value, math.sqrt(variance), count)


def _wigner_estimate(records, cells, minus_minus: Optional[Estimate] = None) -> Estimate:
    (i1, j1), (i2, j2), (i3, j3) = cells
    terms = [
        (1.0, estimate_probability(records, alice(i1), bob(j1), JointOutcome.PP)),
        (1.0, estimate_probability(records, alice(i2), bob(j2), JointOutcome.PP)),
    ]
    if minus_minus is not None:
        terms.append((1.0, minus_minus))
    terms.append((-1.0, estimate_probability(records, alice(i3), bob(j3), JointOutcome.PP)))
    return combine(terms)


# ============== TRANSCRIPT ==============

class MessageKind(Enum):
    SETTING_ANNOUNCE = "SettingAnnounce"
    DISCLOSURE_REQUEST = "DisclosureRequest"
    DISCLOSURE = "Disclosure"


@dataclass(frozen=True)
class SiftMessage:
    kind: MessageKind
    round: int
    payload: Optional[str]

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "round": self.round, "payload": self.payload}


class Transcript:
    """
    Classical-channel messages of the sifting phase, generated lazily:
    all setting announcements (Alice then Bob per round), then disclosure
    requests, then the disclosed outcomes, each in round order.
    """

    def __init__(self, records: SessionRecords, key_mask, disclosed_mask):
        self.records = records
        self.key_mask = key_mask
        self.disclosed_mask = disclosed_mask

    def __iter__(self):
        a_labels = {i: alice(i).label for i in range(1, 4)}
        b_labels = {i: bob(i).label for i in range(1, 4)}
        announce = MessageKind.SETTING_ANNOUNCE
        a_column = self.records.a_index.tolist()
        b_column = self.records.b_index.tolist()
        for r, (i, j) in enumerate(zip(a_column, b_column)):
            yield SiftMessage(announce, r, a_labels[i])
            yield SiftMessage(announce, r, b_labels[j])

        disclosed = np.flatnonzero(self.disclosed_mask).tolist()
        outcomes = self.records.outcome.tolist()
        for r in disclosed:
            yield SiftMessage(MessageKind.DISCLOSURE_REQUEST, r, None)
        for r in disclosed:
            yield SiftMessage(MessageKind.DISCLOSURE, r, OUTCOMES[outcomes[r]].name)

    def __len__(self):
        return 2 * len(self.records) + 2 * int(np.count_nonzero(self.disclosed_mask))


def verify_transcript(messages, key_rounds=()) -> set:
    """
    Check the disclosure discipline of a transcript.

    Returns: set of disclosed rounds
    Raises: ValidationError if an outcome is disclosed without a request or for a key round
    """
    requested = set()
    disclosed = set()
    keys = {int(r) for r in key_rounds}
    for msg in messages:
        if msg.kind is MessageKind.DISCLOSURE_REQUEST:
            requested.add(msg.round)
        elif msg.kind is MessageKind.DISCLOSURE:
            if msg.round not in requested:
                raise ValidationError(f"Round {msg.round} disclosed without a request", "transcript")
            if msg.round in keys:
                raise ValidationError(f"Key round {msg.round} was disclosed", "transcript")
            disclosed.add(msg.round)
    return disclosed


# ============== RESULT ==============

@dataclass(frozen=True)
class SiftingResult:
    variant: str
    n_pairs: int
    sacrifice_fraction: float
    alice_key: str
    bob_key: str
    key_errors: int
    est_w: Estimate
    est_w_tilde: Estimate
    est_w_tilde_prime: Optional[Estimate]
    est_qber: Estimate
    key_rounds: int
    sacrificed_rounds: int
    test_rounds: int
    key_fraction: float
    utilization: float
    disclosed_fraction: float
    verdicts: dict
    cell_counts: dict

    @property
    def discarded_fraction(self) -> float:
        return 1.0 - self.utilization

    @property
    def key_length(self) -> int:
        return len(self.alice_key)

    def to_dict(self, include_keys=False) -> dict:
        data = {
            "variant": self.variant,
            "n_pairs": self.n_pairs,
            "sacrifice_fraction": self.sacrifice_fraction,
            "key_length": self.key_length,
            "key_errors": self.key_errors,
            "alice_key_sha256": hashlib.sha256(self.alice_key.encode("ascii")).hexdigest(),
            "bob_key_sha256": hashlib.sha256(self.bob_key.encode("ascii")).hexdigest(),
            "estimates": {
                "w": self.est_w.to_dict(),
                "w_tilde": self.est_w_tilde.to_dict(),
                "w_tilde_prime": None if self.est_w_tilde_prime is None else self.est_w_tilde_prime.to_dict(),
                "qber": self.est_qber.to_dict(),
            },
            "accounting": {
                "key_rounds": self.key_rounds,
                "sacrificed_rounds": self.sacrificed_rounds,
                "test_rounds": self.test_rounds,
                "key_fraction": self.key_fraction,
                "utilization": self.utilization,
                "disclosed_fraction": self.disclosed_fraction,
                "discarded_fraction": self.discarded_fraction,
            },
            "cell_counts": {f"A{i}B{j}": c for (i, j), c in sorted(self.cell_counts.items())},
            "verdicts": dict(self.verdicts),
        }
        if include_keys:
            data["alice_key"] = self.alice_key
            data["bob_key"] = self.bob_key
        return data


def _bits_to_str(bits) -> str:
    return (np.asarray(bits, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


def _verdicts(est_w, est_w_tilde, est_w_tilde_prime, est_qber, margin) -> dict:
    """Point-estimate verdicts; None wherever an input estimator is unavailable."""
    naive = est_w.value < 0 if est_w.available else None
    modified = est_w_tilde.value < 0 if est_w_tilde.available else None
    prime = None
    if est_w_tilde_prime is not None and est_w_tilde_prime.available:
        prime = est_w_tilde_prime.value < 0

    original = None
    crit = None
    if est_w.available:
        crit = critical_qber(est_w.value)
        if est_qber.available:
            original = secure_original(est_w.value, est_qber.value, margin)

    stricter = None
    if modified is not None and original is not None:
        stricter = modified and not original

    return {
        "naive_wigner_violated": naive,
        "modified_wigner_violated": modified,
        "modified_prime_violated": prime,
        "original_protocol_secure": original,
        "eq5_stricter_than_modified": stricter,
        "critical_qber": crit,
    }


# ============== SIFTING ==============

def sift(records, config: ProtocolConfig):
    """
    Run the public discussion over a finished session.

    Returns: (SiftingResult, Transcript)
    """
    if not isinstance(config, ProtocolConfig):
        raise ValidationError("sift needs a ProtocolConfig", "config")
    records = SessionRecords.from_records(records)
    n = len(records)
    if n != config.n_pairs:
        raise ValidationError(f"Session has {n} records but config expects {config.n_pairs}", "records")

    a, b, out = records.a_index, records.b_index, records.outcome
    matched = a == b
    qi, qj = QBER_CELL
    marks = streams.round_uniforms(config.seed, 0, n)[:, streams.SACRIFICE]
    sacrificed = (a == qi) & (b == qj) & (marks < config.sacrifice_fraction)
    key_mask = matched & ~sacrificed
    test_mask = ~matched
    disclosed_mask = test_mask | sacrificed

    # Alice: + -> 1 (outcomes PP, PM); Bob: - -> 1 (outcomes PM, MM)
    alice_bits = out[key_mask] < 2
    bob_bits = (out[key_mask] % 2) == 1
    key_errors = int(np.count_nonzero(alice_bits != bob_bits))

    a2, b2 = alice(qi), bob(qj)
    minus_minus = estimate_probability(records, a2, b2, JointOutcome.MM, rounds=sacrificed)
    if minus_minus.available:
        q_hits = int(np.count_nonzero(np.isin(out[sacrificed], (JointOutcome.PP.index, JointOutcome.MM.index))))
        est_qber = _frequency(q_hits, minus_minus.count)
    else:
        est_qber = Estimate.unavailable()

    est_w = _wigner_estimate(records, W_CELLS)
    est_w_tilde = _wigner_estimate(records, W_CELLS, minus_minus) if minus_minus.available \
        else Estimate.unavailable()
    est_w_tilde_prime = None
    if config.variant is Protocol.EXTENDED9:
        est_w_tilde_prime = _wigner_estimate(records, W_PRIME_CELLS, minus_minus) if minus_minus.available \
            else Estimate.unavailable()

    key_rounds = int(np.count_nonzero(key_mask))
    sacrificed_rounds = int(np.count_nonzero(sacrificed))
    test_rounds = int(np.count_nonzero(test_mask))

    result = SiftingResult(
        variant=config.variant.value,
        n_pairs=n,
        sacrifice_fraction=config.sacrifice_fraction,
        alice_key=_bits_to_str(alice_bits),
        bob_key=_bits_to_str(bob_bits),
        key_errors=key_errors,
        est_w=est_w,
        est_w_tilde=est_w_tilde,
        est_w_tilde_prime=est_w_tilde_prime,
        est_qber=est_qber,
        key_rounds=key_rounds,
        sacrificed_rounds=sacrificed_rounds,
        test_rounds=test_rounds,
        key_fraction=key_rounds / n,
        utilization=(key_rounds + sacrificed_rounds + test_rounds) / n,
        disclosed_fraction=(sacrificed_rounds + test_rounds) / n,
        verdicts=_verdicts(est_w, est_w_tilde, est_w_tilde_prime, est_qber, config.margin),
        cell_counts=records.cell_counts(),
    )
    if not est_w_tilde.available:
        logger.warning("no sacrificed (A2,B2) rounds: W~ and QBER unavailable, verdicts withheld")
    logger.info("sift: key %d bits (%d errors), W=%r W~=%r QBER=%r",
                result.key_length, key_errors, est_w.value, est_w_tilde.value, est_qber.value)
    return result, Transcript(records, key_mask, disclosed_mask)
