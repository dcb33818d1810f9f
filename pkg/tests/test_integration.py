"""Integration tests: full runs that reproduce the headline numbers of the workbench."""

import math

import numpy as np
import pytest

import optimizer
from adversary import intercept_resend_w_eve, w_eve_integrand, wtilde_eve_integrand
from protocol.export import to_json
from protocol.session import run_session
from protocol.sifting import sift
from quantum_model import Singlet
from security_metrics import mirrored_modified_wigner, modified_wigner, qber, security_report, wigner_w
from session_config import load_session_config


def _session_json(spec, workers=1):
    records = run_session(spec.config, spec.source, workers=workers)
    result, _ = sift(records, spec.config)
    return result, to_json(result.to_dict())


class TestClosedFormSinglet:
    def test_all_parameters(self):
        s = Singlet()
        for value in (wigner_w(s), modified_wigner(s), mirrored_modified_wigner(s)):
            assert abs(value + 0.125) <= 1e-15
        assert qber(s) == 0.0


class TestCounterexampleAttack:
    def test_naive_violation_is_not_security(self, counterexample):
        report = security_report(counterexample)
        assert report.w == pytest.approx(-0.1995, abs=5e-5)
        assert report.w_tilde == pytest.approx(0.6187, abs=1e-4)
        assert report.naive_wigner_violated
        assert not report.modified_wigner_violated
        assert not report.original_protocol_secure


class TestInterceptResendBound:
    def test_search_finds_one_sixteenth(self):
        result = optimizer.find_min_intercept_resend()
        assert abs(result.min_value - 0.0625) <= 1e-9

    def test_constancy(self):
        rng = np.random.default_rng(16)
        for phi in rng.uniform(0, 2 * math.pi, size=10_000):
            assert abs(intercept_resend_w_eve(float(phi)) - 1 / 16) <= 1e-12


class TestModifiedParameterMinimum:
    @pytest.mark.slow
    def test_search_against_brute_force_oracle(self):
        result = optimizer.find_min_wtilde_eve()
        assert result.min_value == pytest.approx(0.04428, abs=5e-4)

        n = 4000
        nodes = (np.arange(n) + 0.5) * (math.pi / n)
        oracle = math.inf
        for start in range(0, n, 250):
            phi_a, phi_b = np.meshgrid(nodes[start:start + 250], nodes, indexing="ij")
            oracle = min(oracle, float(wtilde_eve_integrand(phi_a, phi_b).min()))

        assert oracle == pytest.approx(0.04428, abs=5e-4)
        assert result.min_value <= oracle + 1e-12
        assert oracle - result.min_value <= 1e-6


class TestEq5PropertySuite:
    """qber + W >= 0 and W~ = W + p22(--) <= W + qber for random product attacks."""

    @staticmethod
    def _check(phi_a, phi_b, weights):
        w = np.sum(weights * w_eve_integrand(phi_a, phi_b), axis=1)
        w_tilde = np.sum(weights * wtilde_eve_integrand(phi_a, phi_b), axis=1)
        minus_minus = np.sum(weights * np.sin(phi_a) ** 2 * np.sin(phi_b) ** 2, axis=1)
        plus_plus = np.sum(weights * np.cos(phi_a) ** 2 * np.cos(phi_b) ** 2, axis=1)
        q = minus_minus + plus_plus

        assert np.all(q + w >= -1e-12)
        assert np.all(np.abs(w_tilde - (w + minus_minus)) <= 1e-12)
        assert np.all(w_tilde <= w + q + 1e-12)

    def test_single_atom_attacks(self):
        rng = np.random.default_rng(55)
        angles = rng.uniform(0, math.pi, size=(100_000, 1, 2))
        self._check(angles[..., 0], angles[..., 1], np.ones((100_000, 1)))

    def test_eight_atom_attacks(self):
        rng = np.random.default_rng(56)
        angles = rng.uniform(0, math.pi, size=(100_000, 8, 2))
        weights = rng.dirichlet(np.ones(8), size=100_000)
        self._check(angles[..., 0], angles[..., 1], weights)

    def test_library_path_agrees(self, counterexample):
        # the vectorized closed forms above match the source-model path
        phi_a, phi_b = 0.6 * math.pi, 0.4 * math.pi
        assert qber(counterexample) == pytest.approx(
            math.cos(phi_a) ** 2 * math.cos(phi_b) ** 2 + math.sin(phi_a) ** 2 * math.sin(phi_b) ** 2, abs=1e-15)


class TestMonteCarloFidelity:
    def test_full_sacrifice(self, sample_dir):
        spec = load_session_config(sample_dir / "extended9_singlet_full_sacrifice.json")
        assert spec.config.n_pairs == 900_000
        result, _ = _session_json(spec)

        assert abs(result.est_w_tilde.value + 0.125) <= 0.01
        assert result.est_qber.value == 0.0
        assert result.key_fraction == pytest.approx(2 / 9, abs=0.01)
        assert result.utilization == 1.0
        assert result.key_errors == 0
        assert result.verdicts["modified_wigner_violated"] is True
        assert result.verdicts["modified_prime_violated"] is True

    def test_no_sacrifice(self, sample_dir):
        spec = load_session_config(sample_dir / "extended9_singlet_no_sacrifice.json")
        result, _ = _session_json(spec)

        assert result.key_fraction == pytest.approx(1 / 3, abs=0.01)
        assert not result.est_w_tilde.available
        assert result.verdicts["modified_wigner_violated"] is None

    @pytest.mark.slow
    def test_estimator_consistency(self):
        from protocol.session import ProtocolConfig
        source = Singlet()
        errors = []
        for n in (10_000, 1_000_000):
            config = ProtocolConfig(variant="Extended9", n_pairs=n, seed=99, sacrifice_fraction=1.0)
            result, _ = sift(run_session(config, source), config)
            deviation = abs(result.est_w_tilde.value + 0.125)
            assert deviation <= 5 * result.est_w_tilde.std_error
            errors.append(result.est_w_tilde.std_error)
        assert errors[1] == pytest.approx(errors[0] / 10, rel=0.2)


class TestAttackDetection:
    def test_counterexample_session(self, sample_dir):
        spec = load_session_config(sample_dir / "original4_counterexample.json")
        result, _ = _session_json(spec)

        assert result.est_w.value + 5 * result.est_w.std_error < 0
        assert result.verdicts["naive_wigner_violated"] is True
        assert result.verdicts["original_protocol_secure"] is False
        assert result.verdicts["modified_wigner_violated"] is False


class TestDeterminism:
    @pytest.mark.slow
    @pytest.mark.parametrize("name", [
        "extended9_singlet_full_sacrifice.json",
        "original4_counterexample.json",
    ])
    def test_byte_identical_across_worker_counts(self, sample_dir, name):
        spec = load_session_config(sample_dir / name)
        outputs = {workers: _session_json(spec, workers)[1] for workers in (1, 2, 8)}
        assert outputs[1] == outputs[2] == outputs[8]
