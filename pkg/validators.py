# validators.py - Centralized Validation Module for the Wigner-test workbench
# Every user-facing value (angles, weights, counts, seeds, config fields) passes through here

import math
import re


class ValidationError(Exception):
    """Raised when an input value is rejected"""
    def __init__(self, message, field=None):
        self.message = message
        self.field = field
        super().__init__(self.message)


class NumericalError(Exception):
    """Raised when a computation produces a non-finite value"""
    def __init__(self, message, point=None):
        self.message = message
        self.point = point
        super().__init__(self.message)


# ============== ANGLE VALIDATION ==============

_PI_FORM = re.compile(
    r"^\s*(?P<coef>[+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi"
    r"(?:\s*/\s*(?P<div>\d+(?:\.\d*)?))?\s*$",
    re.IGNORECASE,
)


def parse_pi_angle(text, field_name="angle"):
    """
    Parse the multiples-of-pi notation used in attack files: "0.6pi", "-pi/6", "pi"

    Returns: float - angle in radians
    Raises: ValidationError if the text is not in pi notation
    """
    match = _PI_FORM.match(text)
    if not match:
        raise ValidationError(f"{field_name} must be a number or a multiple of pi like '0.6pi'", field_name)

    coef = match.group("coef")
    if coef in ("", "+"):
        factor = 1.0
    elif coef == "-":
        factor = -1.0
    else:
        factor = float(coef)

    div = match.group("div")
    if div is not None:
        divisor = float(div)
        if divisor == 0:
            raise ValidationError(f"{field_name} divides by zero", field_name)
        factor /= divisor

    return factor * math.pi


def validate_angle(value, field_name="angle"):
    """
    Validate an angle in radians
    - Accepts int/float or a pi-notation string
    - Rejects NaN and infinities
    - Does not reduce modulo pi (probabilities are periodic already)

    Returns: float - angle in radians
    Raises: ValidationError if validation fails
    """
    if value is None or value == '':
        raise ValidationError(f"{field_name} is required", field_name)

    if isinstance(value, bool):
        raise ValidationError(f"{field_name} must be a number", field_name)

    if isinstance(value, str):
        stripped = value.strip()
        try:
            angle = float(stripped)
        except ValueError:
            angle = parse_pi_angle(stripped, field_name)
    else:
        try:
            angle = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{field_name} must be a valid number", field_name)

    if not math.isfinite(angle):
        raise ValidationError(f"{field_name} must be finite", field_name)

    return angle


# ============== PROBABILITY / WEIGHT VALIDATION ==============

def validate_probability(value, field_name="probability"):
    """
    Validate a value in [0, 1]

    Returns: float
    Raises: ValidationError if validation fails
    """
    if value is None or value == '' or isinstance(value, bool):
        raise ValidationError(f"{field_name} is required", field_name)

    try:
        p = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field_name} must be a valid number", field_name)

    if not math.isfinite(p) or p < 0.0 or p > 1.0:
        raise ValidationError(f"{field_name} must lie in [0, 1]", field_name)

    return p


def validate_weight(value, field_name="weight"):
    """Mixture weights are probabilities; zero weights are allowed."""
    return validate_probability(value, field_name)


def validate_distribution(values, field_name, expected_length=None, tolerance=1e-12):
    """
    Validate a finite probability vector
    - Every entry in [0, 1]
    - Entries sum to 1 within tolerance

    Returns: tuple of floats
    Raises: ValidationError if validation fails
    """
    if values is None or isinstance(values, (str, bytes)):
        raise ValidationError(f"{field_name} must be a list of probabilities", field_name)

    try:
        items = list(values)
    except TypeError:
        raise ValidationError(f"{field_name} must be a list of probabilities", field_name)

    if not items:
        raise ValidationError(f"{field_name} must not be empty", field_name)

    if expected_length is not None and len(items) != expected_length:
        raise ValidationError(
            f"{field_name} must have {expected_length} entries, got {len(items)}", field_name
        )

    probs = tuple(validate_probability(v, f"{field_name}[{i}]") for i, v in enumerate(items))

    total = math.fsum(probs)
    if abs(total - 1.0) > tolerance:
        raise ValidationError(f"{field_name} must sum to 1 (got {total!r})", field_name)

    return probs


def validate_atoms(atoms, field_name="atoms"):
    """
    Validate the atoms of an attack distribution
    - At least one atom
    - Each atom has finite phi_a, phi_b and a weight in [0, 1]
    - Weights sum to 1 within 1e-12

    Accepts tuples (phi_a, phi_b, weight) or dicts with those keys.

    Returns: tuple of (phi_a, phi_b, weight) float triples
    Raises: ValidationError if validation fails
    """
    if atoms is None or isinstance(atoms, (str, bytes, dict)):
        raise ValidationError(f"{field_name} must be a list of atoms", field_name)

    try:
        items = list(atoms)
    except TypeError:
        raise ValidationError(f"{field_name} must be a list of atoms", field_name)

    if not items:
        raise ValidationError("At least one atom is required", field_name)

    validated = []
    for i, atom in enumerate(items):
        if isinstance(atom, dict):
            missing = [k for k in ("phi_a", "phi_b", "weight") if k not in atom]
            if missing:
                raise ValidationError(
                    f"Atom {i + 1} is missing {', '.join(missing)}", field_name
                )
            raw = (atom["phi_a"], atom["phi_b"], atom["weight"])
        else:
            try:
                raw = tuple(atom)
            except TypeError:
                raise ValidationError(f"Atom {i + 1} must be (phi_a, phi_b, weight)", field_name)
            if len(raw) != 3:
                raise ValidationError(f"Atom {i + 1} must be (phi_a, phi_b, weight)", field_name)

        validated.append((
            validate_angle(raw[0], f"phi_a (atom {i + 1})"),
            validate_angle(raw[1], f"phi_b (atom {i + 1})"),
            validate_weight(raw[2], f"weight (atom {i + 1})"),
        ))

    total = math.fsum(w for _, _, w in validated)
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"Atom weights must sum to 1 (got {total!r})", field_name)

    return tuple(validated)


# ============== COUNT / SEED VALIDATION ==============

def validate_count(value, field_name, minimum=1, maximum=None):
    """
    Validate integer counts (round counts, grid resolutions, iteration caps)

    Returns: int
    Raises: ValidationError if validation fails
    """
    if value is None or value == '' or isinstance(value, bool):
        raise ValidationError(f"{field_name} is required", field_name)

    if isinstance(value, float):
        if not value.is_integer():
            raise ValidationError(f"{field_name} must be an integer", field_name)
        value = int(value)

    try:
        count = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field_name} must be a valid integer", field_name)

    if count < minimum:
        raise ValidationError(f"{field_name} must be at least {minimum}", field_name)

    if maximum is not None and count > maximum:
        raise ValidationError(f"{field_name} exceeds maximum allowed value of {maximum:,}", field_name)

    return count


def validate_n_pairs(value, maximum=None):
    return validate_count(value, "n_pairs", minimum=1, maximum=maximum)


def validate_resolution(value):
    return validate_count(value, "resolution", minimum=2)


def validate_seed(value):
    """
    Validate a 64-bit unsigned seed

    Returns: int in [0, 2**64)
    Raises: ValidationError if validation fails
    """
    return validate_count(value, "seed", minimum=0, maximum=2**64 - 1)


def validate_workers(value):
    return validate_count(value, "workers", minimum=1, maximum=256)


# ============== TOLERANCE / MARGIN VALIDATION ==============

def validate_tolerance(value, field_name="tolerance"):
    """
    Validate a strictly positive finite tolerance

    Returns: float
    Raises: ValidationError if validation fails
    """
    try:
        tol = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field_name} must be a valid number", field_name)

    if not math.isfinite(tol) or tol <= 0:
        raise ValidationError(f"{field_name} must be a positive finite number", field_name)

    return tol


def validate_margin(value, field_name="margin"):
    """
    Validate the security margin of the QBER + W test (finite, >= 0)

    Returns: float
    Raises: ValidationError if validation fails
    """
    if value is None or value == '':
        return 0.0

    try:
        margin = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field_name} must be a valid number", field_name)

    if not math.isfinite(margin) or margin < 0:
        raise ValidationError(f"{field_name} must be a non-negative finite number", field_name)

    return margin


# ============== CHOICE VALIDATION ==============

def validate_choice(value, choices, field_name):
    """
    Validate that value is one of the allowed string choices (case-insensitive)

    Returns: str - the canonical spelling from choices
    Raises: ValidationError if validation fails
    """
    if value is None or (isinstance(value, str) and value.strip() == ''):
        raise ValidationError(f"{field_name} is required", field_name)

    lookup = {c.lower(): c for c in choices}
    key = str(value).strip().lower()
    if key not in lookup:
        raise ValidationError(
            f"{field_name} must be one of: {', '.join(choices)}", field_name
        )
    return lookup[key]
