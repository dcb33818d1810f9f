#!/usr/bin/env python3
"""
Sample Input Generation Script
Writes the ready-made attack files and session configs under sample_inputs/
"""

import json
import sys
from pathlib import Path

from adversary import InterceptResendAttack
from quantum_model import AttackDistribution

SAMPLE_DIR = Path(__file__).resolve().parent / "sample_inputs"

# Seed shared by the demonstration sessions
DEMO_SEED = 20040101

DELTA_06_04 = [{"phi_a": "0.6pi", "phi_b": "0.4pi", "weight": 1}]

# Weights sum to 0.9: loading this file must fail with an input error
MALFORMED = [
    {"phi_a": "0.6pi", "phi_b": "0.4pi", "weight": 0.5},
    {"phi_a": "0.1pi", "phi_b": "0.3pi", "weight": 0.4},
]


def intercept_resend_atoms(phi_a):
    """Two-atom product source equivalent to measuring both photons along phi_a"""
    distribution = InterceptResendAttack(phi_a).to_distribution()
    return distribution.to_records()


def session_config(variant, n_pairs, sacrifice_fraction, source):
    return {
        "variant": variant,
        "n_pairs": n_pairs,
        "seed": DEMO_SEED,
        "sacrifice_fraction": sacrifice_fraction,
        "margin": 0.0,
        "source": source,
    }


def sample_files():
    """file name -> JSON document"""
    return {
        "delta_06_04.json": DELTA_06_04,
        "intercept_resend_quarter_pi.json": intercept_resend_atoms("0.25pi"),
        "malformed.json": MALFORMED,
        "extended9_singlet_full_sacrifice.json": session_config("Extended9", 900_000, 1.0, "singlet"),
        "extended9_singlet_no_sacrifice.json": session_config("Extended9", 900_000, 0.0, "singlet"),
        "original4_counterexample.json": session_config(
            "Original4", 1_000_000, 1.0, {"attack_file": "delta_06_04.json"}
        ),
    }


def generate_samples(target=SAMPLE_DIR):
    target = Path(target)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, document in sample_files().items():
        path = target / name
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
        written.append(path)
        print(f"  wrote {path}")

    # sanity check: the well-formed attack files load
    for name in ("delta_06_04.json", "intercept_resend_quarter_pi.json"):
        AttackDistribution.from_records(json.loads((target / name).read_text(encoding="utf-8")))
    return written


if __name__ == "__main__":
    print("=" * 50)
    print("SAMPLE INPUT GENERATION SCRIPT")
    print("=" * 50)
    out = sys.argv[1] if len(sys.argv) > 1 else SAMPLE_DIR
    files = generate_samples(out)
    print(f"\n{len(files)} files written.")
