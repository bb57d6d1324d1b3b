"""Entanglement measures and witness-derived bounds."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.optimize import bisect

from ..core.exceptions import DimensionMismatch, OutOfRange
from .qcore import DensityMatrix, pauli_product, psd_sqrt
from .states import PhaseSetting, ghz_spec, rho_phi, target_state


@dataclass(frozen=True)
class ConcurrenceReport:
    value: float
    lambdas: tuple[float, float, float, float]


def _require_qubits(rho: DensityMatrix, n: int) -> None:
    if rho.n != n:
        raise DimensionMismatch(f"expected a {n}-qubit state", details={"n": rho.n})


def concurrence(rho: DensityMatrix) -> ConcurrenceReport:
    """Wootters concurrence.

    The lambdas are the square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho),
    taken here as the singular values of sqrt(rho) sqrt(rho~) so that near-zero
    eigenvalues are not amplified by a square root.
    """
    _require_qubits(rho, 2)
    yy = pauli_product("yy")
    root = psd_sqrt(rho.matrix)
    flipped_root = yy @ root.conj() @ yy
    lambdas = np.linalg.svd(root @ flipped_root, compute_uv=False)
    value = max(0.0, float(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]))
    return ConcurrenceReport(value, tuple(float(x) for x in lambdas))  # type: ignore[arg-type]


def bound_from_witness(w: float) -> float:
    """C2 >= max(0, -2 W) for a Bell-state fidelity witness with alpha = 1/2."""
    return max(0.0, -2.0 * w)


@dataclass(frozen=True)
class RadicandNegative:
    """The closed form asks for sqrt(a - b eps) with a - b eps < 0."""

    a: float
    b: float
    eps: float

    @property
    def radicand(self) -> float:
        return self.a - self.b * self.eps


@dataclass(frozen=True)
class AppendixBParams:
    eps: float
    theta: float
    phi0: float

    def __post_init__(self) -> None:
        if self.eps < 0:
            raise OutOfRange("eps must be non-negative", details={"eps": self.eps})
        if self.b2 < 0:
            raise OutOfRange("b2 is negative for these parameters", details={"eps": self.eps, "b2": self.b2})

    @property
    def _s(self) -> float:
        return float(np.sin(self.phi0) ** 2 * (1 + np.cos(2 * self.theta)))

    @property
    def a(self) -> float:
        return (1 - self.eps**2 * self._s) / 4

    @property
    def b1(self) -> float:
        # clipped: rounding at the special point can leave -1e-16
        return max(0.0, 2 - self._s)

    @property
    def b2(self) -> float:
        return 2 - self._s * self.eps**2

    @property
    def b(self) -> float:
        return float(np.sqrt(self.b1 * max(0.0, self.b2))) / 2


def appendix_b_concurrence(params: AppendixBParams) -> float | RadicandNegative:
    """sqrt(a + b|eps|) - sqrt(a - b|eps|), evaluated as written."""
    a, b, eps = params.a, params.b, abs(params.eps)
    if a - b * eps < 0:
        return RadicandNegative(a, b, eps)
    return float(np.sqrt(a + b * eps) - np.sqrt(a - b * eps))


def sign_criterion(params: AppendixBParams, tol: float = 1e-10) -> bool:
    return params.b > tol and params.eps > tol


def gme_bound_ghz3(rho: DensityMatrix) -> float:
    """|<000|rho|111>| minus sqrt(rho_kk rho_k'k') over the spin-flip pairs outside the GHZ labels."""
    _require_qubits(rho, 3)
    m = rho.matrix
    diag = np.clip(np.real(np.diag(m)), 0.0, None)
    pairs = ((1, 6), (2, 5), (3, 4))
    return float(abs(m[0, 7]) - sum(np.sqrt(diag[k] * diag[kbar]) for k, kbar in pairs))


def ghz3_white_noise(p: float) -> DensityMatrix:
    ghz = target_state(ghz_spec(3), PhaseSetting.zeros(3)).projector()
    return DensityMatrix(p * ghz + (1 - p) * np.eye(8) / 8)


def ghz3_white_noise_threshold(tol: float = 1e-14) -> float:
    """Visibility p at which the GHZ3 bound crosses zero (3/7)."""
    return float(bisect(lambda p: gme_bound_ghz3(ghz3_white_noise(p)), 0.0, 1.0, xtol=tol))


def appendix_b_grid(
    eps_values: Sequence[float] | NDArray[np.float64],
    theta_values: Sequence[float] | NDArray[np.float64],
    phi0_values: Sequence[float] | NDArray[np.float64],
) -> pd.DataFrame:
    """Printed closed form, oracle concurrence and sign criterion side by side."""
    rows = []
    for eps in eps_values:
        for theta in theta_values:
            for phi0 in phi0_values:
                params = AppendixBParams(float(eps), float(theta), float(phi0))
                printed = appendix_b_concurrence(params)
                negative = isinstance(printed, RadicandNegative)
                rows.append(
                    {
                        "eps": params.eps,
                        "theta": params.theta,
                        "phi0": params.phi0,
                        "a": params.a,
                        "b": params.b,
                        "printed": np.nan if negative else printed,
                        "radicand_negative": negative,
                        "oracle": concurrence(rho_phi(params.eps, params.theta, params.phi0)).value,
                        "sign_criterion": sign_criterion(params),
                    }
                )
    return pd.DataFrame(rows)
