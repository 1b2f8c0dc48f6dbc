"""Shared test fixtures for the Nambu dynamics toolkit tests."""

import json
from pathlib import Path

import numpy as np
import pytest

from core.matrixcore import PAULI, DensityMatrix, HermitianMatrix, pure_state, random_density
from core.rng import SEED_ENV_VAR, SeededStream

# Project root
ROOT = Path(__file__).parent.parent

CONFIGS_DIR = ROOT / "configs"


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    """Tests pin their own seeds; an exported NAMBUQ_SEED must not leak in."""
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture
def configs_dir():
    return CONFIGS_DIR


@pytest.fixture
def sigma_x():
    return HermitianMatrix(PAULI["X"])


@pytest.fixture
def sigma_y():
    return HermitianMatrix(PAULI["Y"])


@pytest.fixture
def sigma_z():
    return HermitianMatrix(PAULI["Z"])


@pytest.fixture
def plus_state():
    """|+><+|."""
    return pure_state(np.array([1.0, 1.0]) / np.sqrt(2.0))


@pytest.fixture
def minus_state():
    """|-><-|."""
    return pure_state(np.array([1.0, -1.0]) / np.sqrt(2.0))


@pytest.fixture
def mixed_qubit():
    return DensityMatrix(np.diag([0.7, 0.3]))


@pytest.fixture
def stream():
    return SeededStream(1)


@pytest.fixture
def mixed_qutrit():
    """Full-rank 3x3 state, every eigenvalue >= 0.02."""
    return random_density(3, 3, 5, min_eigenvalue=0.02)


@pytest.fixture
def mixed_two_qubits():
    return random_density(4, 4, 9, min_eigenvalue=0.02)


@pytest.fixture
def write_config(tmp_path):
    """Write a config dict as JSON and return its path."""
    def _write(config, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(config))
        return str(path)
    return _write


@pytest.fixture
def qubit_config():
    """alpha = 2 qubit config: sigma_z Hamiltonian, |+> initial state."""
    return {
        "hamiltonian": {"pauli": "Z"},
        "rho0": [[0.5, 0.5], [0.5, 0.5]],
        "generator": {"kind": "renyi_hom", "alpha": 2.0},
        "t_final": 1.0,
        "dt": 1e-3,
        "record_every": 100,
        "outputs": [{"label": "sigma_x", "matrix": {"pauli": "X"}}],
    }
