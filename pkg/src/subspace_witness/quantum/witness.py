"""Fidelity-based state and subspace witnesses.

A fidelity with a phase-rotated target splits into the population term P and
the coherence term C(phi) = 2 sum_{j<k} a_j a_k (Re rho_jk cos phi_kj + Im rho_jk sin phi_kj),
with phi_kj = phi_k - phi_j. The subspace witness maximises C over the phases
reachable with local z control.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.optimize import minimize

from ..core.config import config
from ..core.exceptions import DimensionMismatch, OptimizerDidNotConverge, OutOfRange
from ..core.logging_config import get_logger
from .qcore import DensityMatrix, PureState, random_product_density
from .states import PhaseSetting, SubspaceSpec, target_state

logger = get_logger(__name__)

SubspaceMode = Literal["constrained", "magnitude-sum"]

# max |<W3|product>|^2, cross-checked by alternating ascent and a Bloch-angle grid
W3_ALPHA_REFERENCE = 4.0 / 9.0


@dataclass(frozen=True)
class CoherenceTable:
    """Coherences rho_jk between subspace labels, keyed by label index pair (j < k)."""

    entries: dict[tuple[int, int], complex]
    populations: tuple[float, ...] | None = None

    @classmethod
    def from_density(cls, rho: DensityMatrix, spec: SubspaceSpec) -> "CoherenceTable":
        block = subspace_block(rho, spec)
        entries = {(j, k): complex(block[j, k]) for j, k in spec.pairs}
        return cls(entries, tuple(np.real(np.diag(block)).tolist()))

    def missing(self, spec: SubspaceSpec) -> list[tuple[int, int]]:
        return [pair for pair in spec.pairs if pair not in self.entries]

    def arrays(self, spec: SubspaceSpec) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        values = np.array([self.entries[pair] for pair in spec.pairs], dtype=np.complex128)
        return values.real, values.imag

    def cauchy_schwarz_violations(self, tol: float = 1e-9) -> list[tuple[int, int]]:
        """Pairs with |rho_jk| > sqrt(rho_jj rho_kk); empty when populations are unknown."""
        if self.populations is None:
            return []
        pops = np.clip(np.asarray(self.populations), 0.0, None)
        return [
            (j, k)
            for (j, k), value in self.entries.items()
            if abs(value) > np.sqrt(pops[j] * pops[k]) + tol
        ]


@dataclass(frozen=True)
class WitnessReport:
    alpha: float
    fidelity: float
    population_P: float
    coherence_C: float
    value: float
    mode: str
    label_phases: tuple[float, ...] | None = None
    converged: bool = True
    guaranteed: bool = True

    def to_row(self) -> dict[str, float | str]:
        return {
            "mode": self.mode,
            "alpha": self.alpha,
            "P": self.population_P,
            "C": self.coherence_C,
            "fidelity": self.fidelity,
            "value": self.value,
        }


@dataclass(frozen=True)
class CoherenceOptimum:
    value: float
    label_phases: tuple[float, ...]
    converged: bool
    start_index: int


@dataclass(frozen=True)
class AlphaResult:
    value: float
    converged: bool
    best_restart: int
    history: tuple[float, ...] = field(default=())

    def __float__(self) -> float:
        return self.value


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise OutOfRange("alpha must lie in (0, 1)", details={"alpha": alpha})


def _check_dims(rho: DensityMatrix, spec: SubspaceSpec) -> None:
    if rho.n != spec.n:
        raise DimensionMismatch(
            "state and subspace qubit counts differ",
            details={"rho_qubits": rho.n, "spec_qubits": spec.n},
        )


def subspace_block(rho: DensityMatrix, spec: SubspaceSpec) -> NDArray[np.complex128]:
    _check_dims(rho, spec)
    idx = spec.indices
    return np.asarray(rho.matrix[np.ix_(idx, idx)])


def fidelity(rho: DensityMatrix, psi: PureState) -> float:
    if rho.dim != psi.dim:
        raise DimensionMismatch("state and target dimensions differ", details={"rho": rho.dim, "psi": psi.dim})
    amps = psi.amplitudes
    return float(np.real(np.vdot(amps, rho.matrix @ amps)))


def _pair_arrays(spec: SubspaceSpec) -> tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.float64]]:
    pairs = np.array(spec.pairs, dtype=np.int64)
    j, k = pairs[:, 0], pairs[:, 1]
    a = spec.amps
    return j, k, 2.0 * a[j] * a[k]


def coherence_value(table: CoherenceTable, spec: SubspaceSpec, label_phases: NDArray[np.float64]) -> float:
    j, k, w = _pair_arrays(spec)
    re, im = table.arrays(spec)
    dphi = label_phases[k] - label_phases[j]
    return float(np.sum(w * (re * np.cos(dphi) + im * np.sin(dphi))))


def coherence_gradient(table: CoherenceTable, spec: SubspaceSpec, label_phases: NDArray[np.float64]) -> NDArray[np.float64]:
    """dC/dphi_m for each label phase."""
    j, k, w = _pair_arrays(spec)
    re, im = table.arrays(spec)
    dphi = label_phases[k] - label_phases[j]
    term = w * (-re * np.sin(dphi) + im * np.cos(dphi))
    grad = np.zeros(spec.d)
    np.add.at(grad, k, term)
    np.add.at(grad, j, -term)
    return grad


def magnitude_sum(table: CoherenceTable, spec: SubspaceSpec) -> float:
    _, _, w = _pair_arrays(spec)
    re, im = table.arrays(spec)
    return float(np.sum(w * np.hypot(re, im)))


def population(rho: DensityMatrix, spec: SubspaceSpec) -> float:
    block = subspace_block(rho, spec)
    return float(np.sum(spec.amps**2 * np.real(np.diag(block))))


def decompose(rho: DensityMatrix, spec: SubspaceSpec, phases: PhaseSetting) -> tuple[float, float]:
    """Return (P, C) with P + C equal to the fidelity with target_state(spec, phases)."""
    table = CoherenceTable.from_density(rho, spec)
    return population(rho, spec), coherence_value(table, spec, phases.induced_phases(spec))


def is_label_torus(spec: SubspaceSpec) -> bool:
    """True when local z phases reach every relative label phase."""
    relative = (spec.bits[1:] - spec.bits[0]).astype(np.float64)
    return bool(np.linalg.matrix_rank(relative) == spec.d - 1)


def phase_map(spec: SubspaceSpec) -> NDArray[np.float64]:
    """Matrix taking optimiser coordinates to label phases.

    When local z phases reach every relative label phase the optimiser runs on
    the (d-1)-torus of label phases with phi_0 = 0; otherwise it runs on the
    n per-qubit phases so every candidate stays locally equivalent to the target.
    """
    if is_label_torus(spec):
        return np.vstack([np.zeros((1, spec.d - 1)), np.eye(spec.d - 1)])
    return spec.bits.astype(np.float64)


def maximize_coherence(
    table: CoherenceTable,
    spec: SubspaceSpec,
    starts: int | None = None,
    seed: int = 0,
) -> CoherenceOptimum:
    """Multi-start quasi-Newton ascent of C on the phase torus."""
    opt = config.optimizer
    starts = opt.starts if starts is None else starts
    mapping = phase_map(spec)
    rng = np.random.default_rng(seed)

    def objective(x: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        phases = mapping @ x
        return -coherence_value(table, spec, phases), -(mapping.T @ coherence_gradient(table, spec, phases))

    # first start aligns every coherence with label 0
    re, im = table.arrays(spec)
    anchor = np.zeros(spec.d)
    for (j, k), r, i in zip(spec.pairs, re, im):
        if j == 0:
            anchor[k] = np.arctan2(i, r)
    first = np.linalg.lstsq(mapping, anchor, rcond=None)[0]
    initial = [first] + [rng.uniform(0.0, 2 * np.pi, mapping.shape[1]) for _ in range(starts - 1)]

    best: CoherenceOptimum | None = None
    for index, x0 in enumerate(initial):
        result = minimize(
            objective,
            x0,
            jac=True,
            method="BFGS",
            options={"gtol": opt.tol * 1e2, "maxiter": opt.max_iter},
        )
        value = -float(result.fun)
        grad_norm = float(np.linalg.norm(result.jac))
        converged = bool(result.success) or grad_norm <= np.sqrt(opt.tol)
        phases = np.mod(mapping @ result.x, 2 * np.pi)
        if best is None or value > best.value + opt.tol:
            best = CoherenceOptimum(value, tuple(phases.tolist()), converged, index)

    assert best is not None
    logger.debug("coherence maximised", value=best.value, start_index=best.start_index, d=spec.d)
    return best


def state_witness(rho: DensityMatrix, spec: SubspaceSpec, phases: PhaseSetting, alpha: float) -> WitnessReport:
    _check_alpha(alpha)
    p, c = decompose(rho, spec, phases)
    f = p + c
    return WitnessReport(
        alpha=alpha,
        fidelity=f,
        population_P=p,
        coherence_C=c,
        value=alpha - f,
        mode="state",
        label_phases=tuple(phases.induced_phases(spec).tolist()),
    )


def witness_from_table(
    table: CoherenceTable,
    population_p: float,
    spec: SubspaceSpec,
    alpha: float,
    mode: SubspaceMode = "constrained",
    seed: int = 0,
) -> WitnessReport:
    """Subspace witness from a coherence table and population (exact or reconstructed)."""
    _check_alpha(alpha)
    if mode not in ("constrained", "magnitude-sum"):
        raise OutOfRange(f"unknown subspace witness mode {mode!r}", details={"mode": mode})

    violations = table.cauchy_schwarz_violations()
    if violations:
        logger.warning("coherence table violates Cauchy-Schwarz", pairs=[list(p) for p in violations])

    label = f"subspace-{mode}"
    if spec.d == 2:
        re, im = table.arrays(spec)
        c = magnitude_sum(table, spec)
        phases = (0.0, float(np.mod(np.arctan2(im[0], re[0]), 2 * np.pi)))
        return _report(alpha, population_p, c, label, phases, True, True)

    if mode == "magnitude-sum":
        return _report(alpha, population_p, magnitude_sum(table, spec), label, None, True, False)

    best = maximize_coherence(table, spec, seed=seed)
    report = _report(alpha, population_p, best.value, label, best.label_phases, best.converged, True)
    if not best.converged:
        raise OptimizerDidNotConverge(
            "phase optimisation did not converge",
            details={"best": report.to_row(), "start_index": best.start_index},
        )
    return report


def _report(
    alpha: float,
    p: float,
    c: float,
    mode: str,
    phases: tuple[float, ...] | None,
    converged: bool,
    guaranteed: bool,
) -> WitnessReport:
    f = p + c
    return WitnessReport(alpha, f, p, c, alpha - f, mode, phases, converged, guaranteed)


def subspace_witness(
    rho: DensityMatrix,
    spec: SubspaceSpec,
    alpha: float,
    mode: SubspaceMode = "constrained",
    seed: int = 0,
) -> WitnessReport:
    table = CoherenceTable.from_density(rho, spec)
    return witness_from_table(table, population(rho, spec), spec, alpha, mode, seed)


def _contract_except(tensor: NDArray[np.complex128], chis: list[NDArray[np.complex128]], skip: int) -> NDArray[np.complex128]:
    out = tensor
    for m in reversed(range(len(chis))):
        if m != skip:
            out = np.tensordot(out, chis[m], axes=([m], [0]))
    return out


def alpha_separable(
    spec: SubspaceSpec,
    restarts: int | None = None,
    tol: float | None = None,
    seed: int = 0,
) -> AlphaResult:
    """Largest squared overlap of the phase-free target with a product state.

    Alternating ascent: with all but one qubit fixed, the optimal single-qubit
    state is the normalised conjugate of the partial inner product.
    """
    opt = config.optimizer
    restarts = opt.alpha_restarts if restarts is None else restarts
    tol = opt.alpha_tol if tol is None else tol
    if restarts < 1:
        raise OutOfRange("restarts must be >= 1", details={"restarts": restarts})

    psi = target_state(spec, PhaseSetting.zeros(spec.n))
    tensor = psi.amplitudes.conj().reshape((2,) * spec.n)
    rng = np.random.default_rng(seed)

    best_value, best_restart, best_converged = -1.0, 0, False
    best_history: list[float] = []
    for restart in range(restarts):
        chis = []
        for _ in range(spec.n):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            chis.append(v / np.linalg.norm(v))
        history: list[float] = []
        converged = False
        current = 0.0
        for _ in range(opt.alpha_max_sweeps):
            for m in range(spec.n):
                v = _contract_except(tensor, chis, m)
                norm = float(np.linalg.norm(v))
                if norm > 0.0:
                    chis[m] = v.conj() / norm
                current = norm**2
            history.append(current)
            if len(history) > 1 and history[-1] - history[-2] <= tol:
                converged = True
                break
        if current > best_value + tol:
            best_value, best_restart, best_converged = current, restart, converged
            best_history = history

    logger.debug("alpha estimated", value=best_value, restart=best_restart, converged=best_converged)
    return AlphaResult(best_value, best_converged, best_restart, tuple(best_history))


def phase_sweep(rho: DensityMatrix, spec: SubspaceSpec, phis: NDArray[np.float64]) -> pd.DataFrame:
    """Fidelity versus a z phase on the last qubit (the Bell/GHZ control phase)."""
    rows = []
    for phi in phis:
        thetas = [0.0] * spec.n
        thetas[-1] = float(phi)
        p, c = decompose(rho, spec, PhaseSetting(tuple(thetas)))
        rows.append({"phi": float(phi), "P": p, "C": c, "fidelity": p + c})
    return pd.DataFrame(rows)


def search_magnitude_sum_counterexamples(
    spec: SubspaceSpec,
    samples: int,
    seed: int = 0,
    alpha: float | None = None,
) -> pd.DataFrame:
    """Random product states whose magnitude-sum witness value is negative.

    An empty frame means no counterexample was found in ``samples`` draws.
    """
    alpha = alpha_separable(spec, seed=seed).value if alpha is None else alpha
    rng = np.random.default_rng(seed)
    found = []
    for sample in range(samples):
        rho = random_product_density(spec.n, rng)
        table = CoherenceTable.from_density(rho, spec)
        value = alpha - (population(rho, spec) + magnitude_sum(table, spec))
        if value < -1e-9:
            found.append({"sample": sample, "alpha": alpha, "value": value})
    logger.info("magnitude-sum counterexample search finished", samples=samples, found=len(found))
    return pd.DataFrame(found, columns=["sample", "alpha", "value"])
