"""
Wigner-test security functionals evaluated in closed form.

W   = p(A1,B2)(++) + p(A2,B3)(++) - p(A1,B3)(++)
W~  = W + p(A2,B2)(--)                         >= 0 for local-realistic sources
W~' = p(A3,B2)(++) + p(A2,B1)(++) + p(A2,B2)(--) - p(A3,B1)(++)
QBER = p(A2,B2)(++) + p(A2,B2)(--)

The original protocol is only secure when W < -QBER (strict), optionally
tightened by a non-negative margin.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Optional

from quantum_model import (
    JointOutcome,
    Protocol,
    SourceModel,
    alice,
    bob,
    setting_prob,
)
from validators import validate_margin, validate_probability, ValidationError

logger = logging.getLogger(__name__)

PP = JointOutcome.PP
MM = JointOutcome.MM

# (alice index, bob index) cells; the last cell of each triple enters with a minus sign
W_CELLS = ((1, 2), (2, 3), (1, 3))
W_PRIME_CELLS = ((3, 2), (2, 1), (3, 1))
QBER_CELL = (2, 2)


def _p(source, cell, outcome):
    i, j = cell
    return setting_prob(source, alice(i), bob(j), outcome)


def _wigner_combination(source, cells) -> float:
    plus_1, plus_2, minus = cells
    return _p(source, plus_1, PP) + _p(source, plus_2, PP) - _p(source, minus, PP)


# ============== PARAMETERS ==============

def wigner_w(source: SourceModel) -> float:
    """The Wigner parameter W; -1/8 for the singlet, >= 0 under perfect anticorrelation."""
    return _wigner_combination(source, W_CELLS)


def modified_wigner(source: SourceModel) -> float:
    """W plus the (A2,B2) double-minus coincidence probability."""
    return wigner_w(source) + _p(source, QBER_CELL, MM)


def mirrored_modified_wigner(source: SourceModel) -> float:
    """The second test parameter of the nine-cell protocol, built on the mirrored setting triple."""
    return _wigner_combination(source, W_PRIME_CELLS) + _p(source, QBER_CELL, MM)


def qber(source: SourceModel) -> float:
    """Probability of correlated outcomes (++ or --) at the (A2,B2) key setting."""
    return _p(source, QBER_CELL, MM) + _p(source, QBER_CELL, PP)


# ============== CRITERIA ==============

def secure_original(w, qber_value, margin=0.0) -> bool:
    """True iff w < -qber - margin. The boundary w == -qber counts as insecure."""
    qber_value = validate_probability(qber_value, "qber")
    margin = validate_margin(margin)
    return float(w) < -qber_value - margin


def critical_qber(w) -> float:
    """
    Largest QBER the original protocol can tolerate for a given W.

    Above this value the key is insecure even when the Wigner inequality is violated.
    """
    return max(0.0, -float(w))


# ============== REPORT ==============

@dataclass(frozen=True)
class SecurityReport:
    protocol: str
    w: float
    w_tilde: float
    w_tilde_prime: Optional[float]
    qber: float
    critical_qber: float
    naive_wigner_violated: bool
    modified_wigner_violated: bool
    modified_prime_violated: Optional[bool]
    original_protocol_secure: bool
    eq5_stricter_than_modified: bool
    margin: float = 0.0

    @property
    def secure(self) -> bool:
        """Modified test passes (both parameters for the nine-cell protocol)."""
        if self.modified_prime_violated is None:
            return self.modified_wigner_violated
        return self.modified_wigner_violated and self.modified_prime_violated

    def to_dict(self) -> dict:
        data = asdict(self)
        data["secure"] = self.secure
        return data


def security_report(source: SourceModel, protocol=Protocol.ORIGINAL4, margin=0.0) -> SecurityReport:
    """Evaluate every functional and both security criteria for one source."""
    protocol = Protocol.parse(protocol)
    margin = validate_margin(margin)

    w = wigner_w(source)
    w_tilde = modified_wigner(source)
    q = qber(source)
    if q > 1.0 + 1e-12:
        raise ValidationError(f"QBER out of range ({q!r}); source is not normalized", "source")
    q = min(q, 1.0)

    w_tilde_prime = None
    prime_violated = None
    if protocol is Protocol.EXTENDED9:
        w_tilde_prime = mirrored_modified_wigner(source)
        prime_violated = w_tilde_prime < 0

    modified_violated = w_tilde < 0
    original_secure = secure_original(w, q, margin)

    report = SecurityReport(
        protocol=protocol.value,
        w=w,
        w_tilde=w_tilde,
        w_tilde_prime=w_tilde_prime,
        qber=q,
        critical_qber=critical_qber(w),
        naive_wigner_violated=w < 0,
        modified_wigner_violated=modified_violated,
        modified_prime_violated=prime_violated,
        original_protocol_secure=original_secure,
        eq5_stricter_than_modified=modified_violated and not original_secure,
        margin=margin,
    )
    logger.debug("security report for %s: W=%r W~=%r QBER=%r", protocol.value, w, w_tilde, q)
    return report
