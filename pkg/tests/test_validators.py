"""Unit tests for validators.py: angle parsing, numeric ranges and error types."""

import math
import pytest
from validators import (
    ValidationError,
    NumericalError,
    parse_pi_angle,
    validate_angle,
    validate_probability,
    validate_distribution,
    validate_atoms,
    validate_count,
    validate_n_pairs,
    validate_resolution,
    validate_seed,
    validate_workers,
    validate_tolerance,
    validate_margin,
    validate_choice,
)


# ── error types ──────────────────────────────────────────────────

class TestErrorTypes:
    def test_validation_error_carries_field(self):
        e = ValidationError("bad", "phi_a")
        assert e.message == "bad"
        assert e.field == "phi_a"
        assert str(e) == "bad"

    def test_numerical_error_carries_point(self):
        e = NumericalError("nan", (0.1, 0.2))
        assert e.point == (0.1, 0.2)


# ── parse_pi_angle / validate_angle ──────────────────────────────

class TestParsePiAngle:
    def test_decimal_multiple(self):
        assert parse_pi_angle("0.6pi") == 0.6 * math.pi

    def test_bare_pi(self):
        assert parse_pi_angle("pi") == math.pi

    def test_negative_fraction(self):
        assert parse_pi_angle("-pi/6") == -math.pi / 6

    def test_case_and_spaces(self):
        assert parse_pi_angle(" 2 * PI / 3 ") == 2 * math.pi / 3

    def test_division_by_zero(self):
        with pytest.raises(ValidationError, match="divides by zero"):
            parse_pi_angle("pi/0")

    def test_garbage_rejected(self):
        with pytest.raises(ValidationError, match="multiple of pi"):
            parse_pi_angle("tau")


class TestValidateAngle:
    def test_float(self):
        assert validate_angle(0.25) == 0.25

    def test_numeric_string(self):
        assert validate_angle("1.5") == 1.5

    def test_pi_string(self):
        assert validate_angle("0.25pi") == math.pi / 4

    def test_not_reduced_modulo_pi(self):
        assert validate_angle(7.0) == 7.0

    def test_none_raises(self):
        with pytest.raises(ValidationError, match="required"):
            validate_angle(None)

    def test_nan_raises(self):
        with pytest.raises(ValidationError, match="finite"):
            validate_angle(float("nan"))

    def test_inf_string_raises(self):
        with pytest.raises(ValidationError, match="finite"):
            validate_angle("inf")

    def test_bool_raises(self):
        with pytest.raises(ValidationError):
            validate_angle(True)

    def test_field_name_in_error(self):
        with pytest.raises(ValidationError) as exc:
            validate_angle("north", "phi_b")
        assert exc.value.field == "phi_b"


# ── probabilities and distributions ──────────────────────────────

class TestValidateProbability:
    def test_bounds_inclusive(self):
        assert validate_probability(0) == 0.0
        assert validate_probability("1") == 1.0

    def test_above_one(self):
        with pytest.raises(ValidationError, match=r"\[0, 1\]"):
            validate_probability(1.01)

    def test_negative(self):
        with pytest.raises(ValidationError, match=r"\[0, 1\]"):
            validate_probability(-0.1)

    def test_non_numeric(self):
        with pytest.raises(ValidationError, match="valid number"):
            validate_probability("half")


class TestValidateDistribution:
    def test_uniform_thirds(self):
        assert validate_distribution([1 / 3, 1 / 3, 1 / 3], "p") == (1 / 3, 1 / 3, 1 / 3)

    def test_wrong_length(self):
        with pytest.raises(ValidationError, match="must have 2 entries"):
            validate_distribution([0.2, 0.3, 0.5], "alice", expected_length=2)

    def test_sum_checked(self):
        with pytest.raises(ValidationError, match="sum to 1"):
            validate_distribution([0.5, 0.4], "bob")

    def test_empty(self):
        with pytest.raises(ValidationError, match="must not be empty"):
            validate_distribution([], "bob")

    def test_string_rejected(self):
        with pytest.raises(ValidationError, match="list of probabilities"):
            validate_distribution("0.5,0.5", "bob")


class TestValidateAtoms:
    def test_tuples(self):
        assert validate_atoms([(0.0, 1.0, 1.0)]) == ((0.0, 1.0, 1.0),)

    def test_dicts_with_pi_notation(self):
        atoms = validate_atoms([{"phi_a": "0.6pi", "phi_b": "0.4pi", "weight": 1}])
        assert atoms == ((0.6 * math.pi, 0.4 * math.pi, 1.0),)

    def test_zero_weight_allowed(self):
        atoms = validate_atoms([(0.0, 0.0, 1.0), (1.0, 1.0, 0.0)])
        assert len(atoms) == 2

    def test_empty_rejected(self):
        with pytest.raises(ValidationError, match="At least one atom"):
            validate_atoms([])

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="sum to 1"):
            validate_atoms([(0.0, 0.0, 0.5), (1.0, 1.0, 0.4)])

    def test_weight_sum_tolerance(self):
        validate_atoms([(0.0, 0.0, 0.1)] * 10)

    def test_negative_weight(self):
        with pytest.raises(ValidationError):
            validate_atoms([(0.0, 0.0, 1.5), (1.0, 1.0, -0.5)])

    def test_missing_key(self):
        with pytest.raises(ValidationError, match="missing weight"):
            validate_atoms([{"phi_a": 0.0, "phi_b": 0.0}])

    def test_wrong_arity(self):
        with pytest.raises(ValidationError, match=r"\(phi_a, phi_b, weight\)"):
            validate_atoms([(0.0, 1.0)])

    def test_nan_angle(self):
        with pytest.raises(ValidationError, match="finite"):
            validate_atoms([(float("nan"), 0.0, 1.0)])


# ── counts, seeds, tolerances ────────────────────────────────────

class TestValidateCount:
    def test_integer_string(self):
        assert validate_count("12", "n") == 12

    def test_integral_float(self):
        assert validate_count(900000.0, "n") == 900000

    def test_fractional_float(self):
        with pytest.raises(ValidationError, match="must be an integer"):
            validate_count(2.5, "n")

    def test_minimum(self):
        with pytest.raises(ValidationError, match="at least 1"):
            validate_n_pairs(0)

    def test_maximum(self):
        with pytest.raises(ValidationError, match="exceeds maximum"):
            validate_count(11, "n", maximum=10)

    def test_resolution_needs_two(self):
        with pytest.raises(ValidationError):
            validate_resolution(1)
        assert validate_resolution(2) == 2

    def test_seed_range(self):
        assert validate_seed(0) == 0
        assert validate_seed(2**64 - 1) == 2**64 - 1
        with pytest.raises(ValidationError):
            validate_seed(2**64)
        with pytest.raises(ValidationError):
            validate_seed(-1)

    def test_workers(self):
        assert validate_workers(8) == 8
        with pytest.raises(ValidationError):
            validate_workers(0)


class TestValidateTolerance:
    def test_positive(self):
        assert validate_tolerance("1e-10") == 1e-10

    def test_zero_rejected(self):
        with pytest.raises(ValidationError, match="positive"):
            validate_tolerance(0)


class TestValidateMargin:
    def test_default_zero(self):
        assert validate_margin(None) == 0.0
        assert validate_margin("") == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValidationError, match="non-negative"):
            validate_margin(-0.01)


class TestValidateChoice:
    def test_case_insensitive(self):
        assert validate_choice("extended9", ("Original4", "Extended9"), "variant") == "Extended9"

    def test_unknown(self):
        with pytest.raises(ValidationError, match="must be one of"):
            validate_choice("Table1", ("Original4", "Extended9"), "variant")
