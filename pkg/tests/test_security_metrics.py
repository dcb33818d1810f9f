"""Unit tests for security_metrics.py: closed-form W, W~, W~', QBER and the security criteria."""

import math

import numpy as np
import pytest

from adversary import wtilde_eve_integrand
from quantum_model import AttackDistribution, ProductAttack, Protocol, Singlet, reflect_source
from security_metrics import (
    critical_qber,
    mirrored_modified_wigner,
    modified_wigner,
    qber,
    secure_original,
    security_report,
    wigner_w,
)
from validators import ValidationError


def _random_attack(rng, n_atoms):
    angles = rng.uniform(-math.pi, math.pi, size=(n_atoms, 2))
    weights = rng.dirichlet(np.ones(n_atoms))
    weights[-1] = 1.0 - math.fsum(weights[:-1])
    return ProductAttack(AttackDistribution(tuple(
        (float(a), float(b), float(w)) for (a, b), w in zip(angles, weights)
    )))


# ── singlet ──────────────────────────────────────────────────────

class TestSinglet:
    def test_w(self, singlet):
        assert wigner_w(singlet) == pytest.approx(-0.125, abs=1e-15)

    def test_modified_w(self, singlet):
        assert modified_wigner(singlet) == pytest.approx(-0.125, abs=1e-15)

    def test_mirrored_w(self, singlet):
        assert mirrored_modified_wigner(singlet) == pytest.approx(-0.125, abs=1e-15)

    def test_qber_exactly_zero(self, singlet):
        assert qber(singlet) == 0.0

    def test_report(self, singlet):
        report = security_report(singlet, "Extended9")
        assert report.naive_wigner_violated
        assert report.modified_wigner_violated
        assert report.modified_prime_violated
        assert report.original_protocol_secure
        assert not report.eq5_stricter_than_modified
        assert report.critical_qber == pytest.approx(0.125, abs=1e-15)
        assert report.secure


# ── the counterexample attack ────────────────────────────────────

class TestCounterexample:
    def test_w_violates_naive_inequality(self, counterexample):
        assert wigner_w(counterexample) == pytest.approx(-0.1995, abs=5e-5)

    def test_modified_w_positive(self, counterexample):
        assert modified_wigner(counterexample) == pytest.approx(0.6187, abs=1e-4)

    def test_qber(self, counterexample):
        assert qber(counterexample) == pytest.approx(0.8273, abs=1e-4)

    def test_report_flags_insecure(self, counterexample):
        report = security_report(counterexample)
        assert report.protocol == "Original4"
        assert report.naive_wigner_violated
        assert not report.modified_wigner_violated
        assert not report.original_protocol_secure
        assert report.w_tilde_prime is None
        assert report.modified_prime_violated is None
        assert not report.secure

    def test_report_dict(self, counterexample):
        data = security_report(counterexample).to_dict()
        assert data["secure"] is False
        assert set(data) >= {"w", "w_tilde", "w_tilde_prime", "qber", "critical_qber", "margin"}


# ── criteria ─────────────────────────────────────────────────────

class TestSecureOriginal:
    def test_strictly_below(self):
        assert secure_original(-0.25, 0.2)

    def test_boundary_is_insecure(self):
        assert not secure_original(-0.2, 0.2)

    def test_margin_tightens(self):
        assert not secure_original(-0.25, 0.2, margin=0.05)
        assert secure_original(-0.26, 0.2, margin=0.05)

    def test_qber_range_checked(self):
        with pytest.raises(ValidationError):
            secure_original(-0.5, 1.5)

    def test_negative_margin_rejected(self):
        with pytest.raises(ValidationError):
            secure_original(-0.5, 0.1, margin=-0.1)


class TestCriticalQber:
    def test_negative_w(self):
        assert critical_qber(-0.125) == 0.125

    def test_non_negative_w_tolerates_nothing(self):
        assert critical_qber(0.3) == 0.0


# ── properties over random attacks ───────────────────────────────

class TestAttackProperties:
    @pytest.mark.parametrize("n_atoms", [1, 8])
    def test_qber_plus_w_non_negative(self, n_atoms):
        rng = np.random.default_rng(100 + n_atoms)
        for _ in range(300):
            source = _random_attack(rng, n_atoms)
            assert qber(source) + wigner_w(source) >= -1e-12

    @pytest.mark.parametrize("n_atoms", [1, 8])
    def test_modified_w_bounded_by_w_plus_qber(self, n_atoms):
        rng = np.random.default_rng(200 + n_atoms)
        for _ in range(300):
            source = _random_attack(rng, n_atoms)
            assert modified_wigner(source) <= wigner_w(source) + qber(source) + 1e-12

    def test_modified_w_non_negative_for_product_attacks(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            assert modified_wigner(_random_attack(rng, 4)) >= 0.0

    def test_modified_w_stays_above_attack_minimum(self):
        # single atoms: W~ of a delta source is the W~_eve integrand at its angles
        rng = np.random.default_rng(11)
        angles = rng.uniform(0, math.pi, size=(100_000, 2))
        values = wtilde_eve_integrand(angles[:, 0], angles[:, 1])
        assert values.min() >= 0.04428 - 5e-4
        for phi_a, phi_b in angles[:20]:
            source = ProductAttack(AttackDistribution.delta(float(phi_a), float(phi_b)))
            assert modified_wigner(source) >= 0.04428 - 5e-4

    def test_mirrored_equals_modified_of_reflection(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            source = _random_attack(rng, 3)
            assert mirrored_modified_wigner(source) == pytest.approx(
                modified_wigner(reflect_source(source)), abs=1e-12)

    def test_protocol_accepts_enum(self, singlet):
        assert security_report(singlet, Protocol.EXTENDED9).w_tilde_prime is not None
