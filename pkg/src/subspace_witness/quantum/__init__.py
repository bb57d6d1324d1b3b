"""
Quantum simulation and witness modules

Dense density-matrix algebra, target-state families, witnesses, protocol
simulation, reconstruction and entanglement measures.
"""

from .qcore import DensityMatrix, PureState, conjugate, expect, hermitian_eigen, kron
from .states import PhaseSetting, SubspaceSpec, spec_from_name, target_state
from .witness import WitnessReport, alpha_separable, fidelity, state_witness, subspace_witness
from .reconstruct import ReconstructionResult, Schedule, assemble, solve
from .measures import concurrence, gme_bound_ghz3

__all__ = [
    "DensityMatrix",
    "PureState",
    "conjugate",
    "expect",
    "hermitian_eigen",
    "kron",
    "PhaseSetting",
    "SubspaceSpec",
    "spec_from_name",
    "target_state",
    "WitnessReport",
    "alpha_separable",
    "fidelity",
    "state_witness",
    "subspace_witness",
    "ReconstructionResult",
    "Schedule",
    "assemble",
    "solve",
    "concurrence",
    "gme_bound_ghz3",
]
