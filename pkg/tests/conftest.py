import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from app import app as flask_app
from protocol.session import ProtocolConfig
from quantum_model import AttackDistribution, ProductAttack, Singlet

SAMPLE_DIR = Path(__file__).resolve().parent.parent / "sample_inputs"


@pytest.fixture()
def app():
    flask_app.config.update({
        "TESTING": True,
    })
    return flask_app


@pytest.fixture()
def client(app):
    return app.test_client()


@pytest.fixture()
def sample_dir():
    return SAMPLE_DIR


@pytest.fixture()
def singlet():
    return Singlet()


@pytest.fixture()
def counterexample():
    """Eve's single-atom attack at (0.6 pi, 0.4 pi)."""
    return ProductAttack(AttackDistribution.delta("0.6pi", "0.4pi"))


@pytest.fixture()
def small_extended9():
    """Extended9 config small enough for unit tests."""
    return ProtocolConfig(variant="Extended9", n_pairs=20_000, seed=7, sacrifice_fraction=0.5)


@pytest.fixture()
def small_original4():
    return ProtocolConfig(variant="Original4", n_pairs=20_000, seed=11, sacrifice_fraction=1.0)
