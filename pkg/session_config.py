"""Load session configs and attack files (JSON) into library objects."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from adversary import InterceptResendAttack
from protocol.session import ProtocolConfig
from quantum_model import AttackDistribution, ProductAttack, Singlet
from validators import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SessionSpec:
    """A ProtocolConfig plus the source it runs against."""
    config: ProtocolConfig
    source: object
    source_spec: object

    def to_dict(self) -> dict:
        data = self.config.to_dict()
        data["source"] = self.source_spec
        return data


def read_json(path, field_name="file"):
    """
    Read and parse a JSON file.

    Raises: OSError if the file cannot be read; ValidationError if it is not JSON
    """
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path.name} is not valid JSON: {e.msg} (line {e.lineno})", field_name)


def load_attack_file(path) -> AttackDistribution:
    """Attack files hold a JSON array of {phi_a, phi_b, weight} atoms."""
    data = read_json(path, "attack")
    if not isinstance(data, list):
        raise ValidationError("Attack file must contain a JSON array of atoms", "attack")
    return AttackDistribution.from_records(data)


def parse_source(spec, base_dir=None):
    """
    Build a SourceModel from its config form:
    "singlet" | {"attack": [...]} | {"attack_file": path} | {"intercept_resend": angle}
    """
    if isinstance(spec, str):
        if spec.strip().lower() == "singlet":
            return Singlet()
        raise ValidationError(f"Unknown source '{spec}'", "source")

    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValidationError(
            "source must be 'singlet' or one of {attack}, {attack_file}, {intercept_resend}", "source"
        )

    (kind, value), = spec.items()
    if kind == "attack":
        return ProductAttack(AttackDistribution.from_records(value))
    if kind == "attack_file":
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return ProductAttack(load_attack_file(path))
    if kind == "intercept_resend":
        return InterceptResendAttack(value).to_source()
    raise ValidationError(f"Unknown source kind '{kind}'", "source")


def session_spec_from_dict(data, base_dir=None) -> SessionSpec:
    if not isinstance(data, dict):
        raise ValidationError("Session config must be a JSON object", "config")
    if "source" not in data:
        raise ValidationError("source is required", "source")
    known = {"variant", "n_pairs", "seed", "sacrifice_fraction", "setting_probabilities", "margin", "source"}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"Unknown config keys: {', '.join(sorted(unknown))}", "config")

    config = ProtocolConfig.from_dict(data)
    source = parse_source(data["source"], base_dir)
    return SessionSpec(config=config, source=source, source_spec=data["source"])


def load_session_config(path) -> SessionSpec:
    """Read a session config file; relative attack_file paths resolve next to it."""
    path = Path(path)
    data = read_json(path, "config")
    spec = session_spec_from_dict(data, base_dir=path.resolve().parent)
    logger.debug("loaded session config %s: %s", path, spec.config)
    return spec
