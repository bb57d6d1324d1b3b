"""Shared fixtures and reference helpers."""
import numpy as np
import pytest

from subspace_witness.core.config import config
from subspace_witness.quantum.states import PhaseSetting, SubspaceSpec, target_state


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def fresh_config(monkeypatch):
    """Rebuild the global config from the environment and restore it afterwards."""
    yield config
    monkeypatch.undo()
    config.reload()


def grid_alpha(spec: SubspaceSpec, step_deg: float = 1.0) -> float:
    """Brute-force max |<target|product>|^2 for n <= 3.

    Qubit 1 runs over a Bloch-angle grid; for each grid point the best state of
    the remaining qubits follows from the largest singular value of the
    contracted amplitude matrix.
    """
    psi = target_state(spec, PhaseSetting.zeros(spec.n)).amplitudes.reshape((2,) * spec.n)
    theta = np.deg2rad(np.arange(0.0, 180.0 + step_deg / 2, step_deg))
    phi = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    t, p = np.meshgrid(theta, phi, indexing="ij")
    chi = np.stack([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)], axis=-1).reshape(-1, 2)
    rest = np.tensordot(chi.conj(), psi, axes=([1], [0])).reshape(len(chi), 2, -1)
    top = np.linalg.svd(rest, compute_uv=False)[:, 0]
    return float(np.max(top**2))


@pytest.fixture
def alpha_by_grid():
    return grid_alpha
