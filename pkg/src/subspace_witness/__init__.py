"""
Subspace Witness

Entanglement detection with fidelity-based state witnesses and their
phase-minimised subspace variant, on simulated density matrices.
"""

__version__ = "0.1.0"
__description__ = "State and subspace entanglement witnesses with measurement-schedule reconstruction"

from .core.config import Config
from .core.exceptions import WitnessException

__all__ = [
    "Config",
    "WitnessException",
]
