"""
Eve's attack models and the attack functionals W_eve and W~_eve.

Eve prepares each photon of a pair in a definite linear polarization
(Phi_A, Phi_B), possibly varying from pair to pair. The functionals are
averages of closed-form integrands over her distribution; the integrands are
written out here independently of quantum_model so the two code paths can be
cross-checked.

Integrands accept scalars or NumPy arrays (grid scans evaluate whole blocks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from quantum_model import AttackDistribution, ProductAttack
from validators import ValidationError, validate_angle

SIXTH_PI = math.pi / 6


def _as_finite(value, field_name):
    if np.isscalar(value):
        return validate_angle(value, field_name)
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{field_name} must be finite", field_name)
    return arr


def _cos2(x):
    return np.cos(x) ** 2


# ============== INTEGRANDS ==============

def w_eve_integrand(phi_a, phi_b):
    """cos^2(Pa+pi/6)cos^2(Pb) + cos^2(Pa)cos^2(Pb-pi/6) - cos^2(Pa+pi/6)cos^2(Pb-pi/6)"""
    phi_a = _as_finite(phi_a, "phi_a")
    phi_b = _as_finite(phi_b, "phi_b")

    a1 = _cos2(phi_a + SIXTH_PI)
    a2 = _cos2(phi_a)
    b2 = _cos2(phi_b)
    b3 = _cos2(phi_b - SIXTH_PI)
    value = a1 * b2 + a2 * b3 - a1 * b3
    return float(value) if np.ndim(value) == 0 else value


def wtilde_eve_integrand(phi_a, phi_b):
    """w_eve_integrand plus the (A2,B2) double-minus term sin^2(Pa) sin^2(Pb)."""
    phi_a = _as_finite(phi_a, "phi_a")
    phi_b = _as_finite(phi_b, "phi_b")
    value = w_eve_integrand(phi_a, phi_b) + np.sin(phi_a) ** 2 * np.sin(phi_b) ** 2
    return float(value) if np.ndim(value) == 0 else value


# ============== ATTACK MODELS ==============

@dataclass(frozen=True)
class GeneralAttack:
    """Eve controls the polarization of both photons (any product-state mixture)."""
    distribution: AttackDistribution

    def __post_init__(self):
        if not isinstance(self.distribution, AttackDistribution):
            raise ValidationError("GeneralAttack needs an AttackDistribution", "distribution")

    def to_source(self) -> ProductAttack:
        return ProductAttack(self.distribution)


@dataclass(frozen=True)
class InterceptResendAttack:
    """
    Eve measures Alice's photon in basis phi_a and resends; anticorrelation
    in her basis survives, so Bob's photon sits at phi_a - pi/2.
    """
    phi_a: float

    def __post_init__(self):
        object.__setattr__(self, "phi_a", validate_angle(self.phi_a, "phi_a"))

    @property
    def phi_b(self) -> float:
        return self.phi_a - math.pi / 2

    def to_distribution(self) -> AttackDistribution:
        """
        Both branches of Eve's measurement: Alice's photon found along phi_a
        (Bob's along phi_a - pi/2), or along phi_a + pi/2 (Bob's along phi_a).
        """
        return AttackDistribution((
            (self.phi_a, self.phi_b, 0.5),
            (self.phi_a + math.pi / 2, self.phi_a, 0.5),
        ))

    def to_source(self) -> ProductAttack:
        return ProductAttack(self.to_distribution())


def _check_attack(attack) -> AttackDistribution:
    if isinstance(attack, GeneralAttack):
        return attack.distribution
    if isinstance(attack, AttackDistribution):
        return attack
    raise ValidationError(f"Expected a GeneralAttack (got {type(attack).__name__})", "attack")


# ============== FUNCTIONALS ==============

def w_eve(attack) -> float:
    """Weighted average of w_eve_integrand over Eve's atoms (atom order fixed)."""
    dist = _check_attack(attack)
    return float(np.dot(dist.weights, w_eve_integrand(dist.phi_a, dist.phi_b)))


def wtilde_eve(attack) -> float:
    dist = _check_attack(attack)
    return float(np.dot(dist.weights, wtilde_eve_integrand(dist.phi_a, dist.phi_b)))


def intercept_resend_w_eve(attack) -> float:
    """W_eve of single-channel intercept-resend; equals 1/16 for every basis."""
    if not isinstance(attack, InterceptResendAttack):
        attack = InterceptResendAttack(attack)
    return w_eve_integrand(attack.phi_a, attack.phi_b)


def intercept_resend_integrand(phi_a, phi_b=None):
    """Two-angle wrapper for grid search; the Bob angle is implied by phi_a and ignored."""
    phi_a = _as_finite(phi_a, "phi_a")
    value = w_eve_integrand(phi_a, phi_a - math.pi / 2)
    if phi_b is not None:
        shape = np.broadcast_shapes(np.shape(phi_a), np.shape(phi_b))
        if shape:
            value = np.broadcast_to(value, shape).copy()
    return value
