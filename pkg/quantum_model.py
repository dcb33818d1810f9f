"""
Joint detection probabilities for polarization-entangled photon pairs.

Two sources are modelled:
- the ideal singlet |psi-> = (|H_A V_B> - |V_A H_B>)/sqrt(2)
- Eve's separable pairs, a finite mixture of product states |Phi_A>|Phi_B>

Each party's analyzer is a rotation by alpha followed by a polarizing beam
splitter (H -> detector +, V -> detector -). The rotation is folded into the
single-photon rule m(Phi, alpha, +) = cos^2(Phi - alpha),
m(Phi, alpha, -) = sin^2(Phi - alpha).

Angles are plain floats in radians and are never reduced; every probability
is pi-periodic in every angle through the trigonometric forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from validators import ValidationError, validate_angle, validate_atoms

Angle = float


# ============== OUTCOMES ==============

class Polarity(Enum):
    PLUS = "+"
    MINUS = "-"


class JointOutcome(Enum):
    """Which pair of detectors fired. Declaration order is the sampling order."""
    PP = (Polarity.PLUS, Polarity.PLUS)
    PM = (Polarity.PLUS, Polarity.MINUS)
    MP = (Polarity.MINUS, Polarity.PLUS)
    MM = (Polarity.MINUS, Polarity.MINUS)

    @property
    def a(self) -> Polarity:
        return self.value[0]

    @property
    def b(self) -> Polarity:
        return self.value[1]

    @property
    def index(self) -> int:
        return _OUTCOME_INDEX[self]

    @classmethod
    def from_index(cls, index: int) -> "JointOutcome":
        return OUTCOMES[index]

    @classmethod
    def from_label(cls, label: str) -> "JointOutcome":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValidationError(f"Unknown outcome '{label}', expected one of PP, PM, MP, MM", "outcome")


OUTCOMES = tuple(JointOutcome)
_OUTCOME_INDEX = {o: i for i, o in enumerate(OUTCOMES)}


# ============== ANALYZER SETTINGS ==============

class Party(Enum):
    ALICE = "A"
    BOB = "B"


# index 1 -> -pi/6, 2 -> 0, 3 -> pi/6 for both parties
SETTING_ANGLES = {1: -math.pi / 6, 2: 0.0, 3: math.pi / 6}


@dataclass(frozen=True)
class SettingId:
    party: Party
    index: int

    def __post_init__(self):
        if self.index not in SETTING_ANGLES:
            raise ValidationError(f"Setting index must be 1, 2 or 3 (got {self.index})", "setting")

    @property
    def angle(self) -> Angle:
        return SETTING_ANGLES[self.index]

    @property
    def label(self) -> str:
        return f"{self.party.value}{self.index}"

    @classmethod
    def from_label(cls, label: str) -> "SettingId":
        text = (label or "").strip().upper()
        if len(text) != 2 or text[0] not in "AB" or text[1] not in "123":
            raise ValidationError(f"Unknown setting '{label}', expected A1..A3 or B1..B3", "setting")
        return cls(Party(text[0]), int(text[1]))

    def __str__(self):
        return self.label


def alice(index: int) -> SettingId:
    return SettingId(Party.ALICE, index)


def bob(index: int) -> SettingId:
    return SettingId(Party.BOB, index)


class Protocol(Enum):
    """Setting menus: the four-cell Wigner protocol and the nine-cell extension."""
    ORIGINAL4 = "Original4"
    EXTENDED9 = "Extended9"

    @property
    def alice_menu(self) -> tuple:
        if self is Protocol.ORIGINAL4:
            return (alice(1), alice(2))
        return (alice(1), alice(2), alice(3))

    @property
    def bob_menu(self) -> tuple:
        if self is Protocol.ORIGINAL4:
            return (bob(2), bob(3))
        return (bob(1), bob(2), bob(3))

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, Protocol):
            return value
        for member in cls:
            if str(value).strip().lower() == member.value.lower():
                return member
        raise ValidationError(
            f"protocol must be one of: {', '.join(m.value for m in cls)}", "protocol"
        )


# ============== SOURCES ==============

@dataclass(frozen=True)
class AttackDistribution:
    """Finite mixture of polarization point masses (phi_a, phi_b, weight)."""
    atoms: tuple
    _columns: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = validate_atoms(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        columns = np.array(atoms, dtype=float).T
        columns.setflags(write=False)
        object.__setattr__(self, "_columns", columns)

    @classmethod
    def delta(cls, phi_a, phi_b) -> "AttackDistribution":
        return cls(((phi_a, phi_b, 1.0),))

    @classmethod
    def from_records(cls, records) -> "AttackDistribution":
        """Build from a JSON-style list of {phi_a, phi_b, weight} dicts."""
        return cls(tuple(records))

    @property
    def phi_a(self) -> np.ndarray:
        return self._columns[0]

    @property
    def phi_b(self) -> np.ndarray:
        return self._columns[1]

    @property
    def weights(self) -> np.ndarray:
        return self._columns[2]

    def reflected(self) -> "AttackDistribution":
        """Mirror image under Phi -> -Phi."""
        return AttackDistribution(tuple((-a, -b, w) for a, b, w in self.atoms))

    def to_records(self) -> list:
        return [{"phi_a": a, "phi_b": b, "weight": w} for a, b, w in self.atoms]


@dataclass(frozen=True)
class Singlet:
    """The ideal maximally entangled source."""

    @property
    def label(self) -> str:
        return "singlet"


@dataclass(frozen=True)
class ProductAttack:
    """Eve replaces the source with separable pairs drawn from a distribution."""
    distribution: AttackDistribution

    def __post_init__(self):
        if not isinstance(self.distribution, AttackDistribution):
            raise ValidationError("ProductAttack needs an AttackDistribution", "source")

    @property
    def label(self) -> str:
        n = len(self.distribution.atoms)
        return f"product attack ({n} atom{'s' if n != 1 else ''})"


SourceModel = Union[Singlet, ProductAttack]


def reflect_source(source: SourceModel) -> SourceModel:
    """Apply Phi -> -Phi to the source; the singlet is its own mirror image."""
    if isinstance(source, ProductAttack):
        return ProductAttack(source.distribution.reflected())
    return source


# ============== PROBABILITIES ==============

def _check_outcome(outcome) -> JointOutcome:
    if not isinstance(outcome, JointOutcome):
        raise ValidationError(f"outcome must be a JointOutcome (got {outcome!r})", "outcome")
    return outcome


def singlet_joint_prob(alpha_a, alpha_b, outcome) -> float:
    """
    Singlet joint detection probability:
    1/2 sin^2(alpha_a - alpha_b) for ++ and --, 1/2 cos^2(alpha_a - alpha_b) for +- and -+.
    """
    alpha_a = validate_angle(alpha_a, "alpha_a")
    alpha_b = validate_angle(alpha_b, "alpha_b")
    outcome = _check_outcome(outcome)

    delta = alpha_a - alpha_b
    if outcome.a is outcome.b:
        return 0.5 * math.sin(delta) ** 2
    return 0.5 * math.cos(delta) ** 2


def single_photon_prob(phi, alpha, polarity: Polarity) -> float:
    """Probability that a photon polarized at phi fires detector `polarity` behind an analyzer at alpha."""
    if polarity is Polarity.PLUS:
        return math.cos(phi - alpha) ** 2
    return math.sin(phi - alpha) ** 2


def product_joint_prob(phi_a, phi_b, alpha_a, alpha_b, outcome) -> float:
    """Joint probability for the product state |phi_a>|phi_b>; factorizes per party."""
    phi_a = validate_angle(phi_a, "phi_a")
    phi_b = validate_angle(phi_b, "phi_b")
    alpha_a = validate_angle(alpha_a, "alpha_a")
    alpha_b = validate_angle(alpha_b, "alpha_b")
    outcome = _check_outcome(outcome)

    return single_photon_prob(phi_a, alpha_a, outcome.a) * single_photon_prob(phi_b, alpha_b, outcome.b)


def _mixture_marginals(distribution: AttackDistribution, alpha_a, alpha_b):
    # sin^2 evaluated directly, not as 1 - cos^2, so exact zeros survive
    da = distribution.phi_a - alpha_a
    db = distribution.phi_b - alpha_b
    return np.cos(da) ** 2, np.sin(da) ** 2, np.cos(db) ** 2, np.sin(db) ** 2


def outcome_table(source: SourceModel, alpha_a, alpha_b) -> np.ndarray:
    """
    All four joint probabilities in JointOutcome order (PP, PM, MP, MM).

    For mixtures the sum over atoms runs in atom order, so identical inputs
    give bit-identical tables.
    """
    alpha_a = validate_angle(alpha_a, "alpha_a")
    alpha_b = validate_angle(alpha_b, "alpha_b")

    if isinstance(source, Singlet):
        delta = alpha_a - alpha_b
        same = 0.5 * math.sin(delta) ** 2
        diff = 0.5 * math.cos(delta) ** 2
        return np.array([same, diff, diff, same])

    if isinstance(source, ProductAttack):
        w = source.distribution.weights
        pa, ma, pb, mb = _mixture_marginals(source.distribution, alpha_a, alpha_b)
        return np.array([
            float(np.dot(w, pa * pb)),
            float(np.dot(w, pa * mb)),
            float(np.dot(w, ma * pb)),
            float(np.dot(w, ma * mb)),
        ])

    raise ValidationError(f"Unsupported source model {source!r}", "source")


def joint_prob(source: SourceModel, alpha_a, alpha_b, outcome) -> float:
    """Joint detection probability for any source model."""
    outcome = _check_outcome(outcome)
    return float(outcome_table(source, alpha_a, alpha_b)[outcome.index])


def setting_prob(source: SourceModel, a_setting: SettingId, b_setting: SettingId, outcome) -> float:
    """joint_prob addressed by protocol setting ids instead of raw angles."""
    return joint_prob(source, a_setting.angle, b_setting.angle, outcome)
