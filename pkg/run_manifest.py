"""Run manifests: everything needed to re-create a command's output files."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from validators import ValidationError

ARTIFACT_VERSION = "1.0.0"
MANIFEST_NAME = "manifest.json"


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: Optional[int] = None
    version: str = ARTIFACT_VERSION
    outputs: dict = field(default_factory=dict)

    def record_output(self, name: str, path) -> None:
        """Register an output file with its digest (call after the file is closed)."""
        self.outputs[name] = {"path": str(path), "sha256": file_sha256(path)}

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "parameters": self.parameters,
            "outputs": self.outputs,
        }

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValidationError(f"Manifest is not valid JSON: {e.msg}", "manifest")
        if not isinstance(data, dict) or "command" not in data or "parameters" not in data:
            raise ValidationError("Manifest must contain command and parameters", "manifest")
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            seed=data.get("seed"),
            version=data.get("version", ARTIFACT_VERSION),
            outputs=data.get("outputs", {}),
        )

    def verify_outputs(self) -> dict:
        """name -> True/False: does the file on disk still match its recorded digest."""
        status = {}
        for name, entry in self.outputs.items():
            path = Path(entry["path"])
            status[name] = path.is_file() and file_sha256(path) == entry["sha256"]
        return status
