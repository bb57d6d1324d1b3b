"""Phase schedules and linear reconstruction of subspace coherences.

Each fidelity measured with a phase setting is linear in the unknowns
x = (P, Re rho_jk ..., Im rho_jk ...), pairs in lexicographic (j, k) order:

    F(phi) = P + sum_{j<k} 2 a_j a_k (Re rho_jk cos phi_kj + Im rho_jk sin phi_kj)

The column order is part of the CSV contract and must not change.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Literal, Sequence

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from ..core.exceptions import (
    IncompleteReconstruction,
    Infeasible,
    InvalidSubspace,
    LengthMismatch,
    OutOfRange,
    RankDeficient,
    ValidationException,
)
from ..core.logging_config import get_logger
from .protocol import Shots, hhcp_signal, optimal_time, sample_fidelity, sample_shots
from .qcore import DensityMatrix, expect, pauli_product
from .states import PhaseSetting, SubspaceSpec, bell_spec, target_state
from .witness import CoherenceTable, SubspaceMode, WitnessReport, fidelity, is_label_torus, witness_from_table

logger = get_logger(__name__)

Part = Literal["real", "imaginary", "mixed"]

HALF_PI = np.pi / 2
REAL_ALPHABET = (0.0, np.pi)
# tried in order until the joint system reaches full rank
IMAGINARY_TIERS = (
    (HALF_PI, 3 * HALF_PI),
    (0.0, HALF_PI),
    (0.0, HALF_PI, np.pi, 3 * HALF_PI),
)


def unknown_names(spec: SubspaceSpec) -> list[str]:
    re = [f"Re_{j}_{k}" for j, k in spec.pairs]
    im = [f"Im_{j}_{k}" for j, k in spec.pairs]
    return ["P", *re, *im]


@dataclass(frozen=True)
class Schedule:
    settings: tuple[PhaseSetting, ...]
    part: Part

    def __post_init__(self) -> None:
        if not self.settings:
            raise ValidationException("schedule must not be empty", error_code="EMPTY_SCHEDULE")
        keys = [s.thetas for s in self.settings]
        if len(set(keys)) != len(keys):
            raise ValidationException("schedule settings must be distinct", error_code="DUPLICATE_SETTING")

    def __len__(self) -> int:
        return len(self.settings)

    def label_phase_bits(self, spec: SubspaceSpec) -> list[str]:
        """Relative label phases of labels 1..d-1 as bits (0 or pi); binary schedules only."""
        out = []
        for setting in self.settings:
            phases = setting.induced_phases(spec)
            multiples = (phases[1:] - phases[0]) / np.pi
            rounded = np.round(multiples)
            if np.any(np.abs(multiples - rounded) > 1e-9):
                raise ValidationException("setting is not on the {0, pi} alphabet", error_code="NOT_BINARY")
            out.append("".join(str(int(b) % 2) for b in rounded))
        return out

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for index, setting in enumerate(self.settings):
            row: dict[str, float | int] = {"setting_index": index}
            row.update({f"theta_{m + 1}": t for m, t in enumerate(setting.thetas)})
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass(frozen=True)
class DesignSystem:
    matrix: NDArray[np.float64]
    rhs: NDArray[np.float64]
    spec: SubspaceSpec
    names: tuple[str, ...]
    sigmas: NDArray[np.float64] | None = None
    nuisance: tuple[str, ...] = ()

    @property
    def unknown_count(self) -> int:
        return self.spec.d * (self.spec.d - 1) + 1


@dataclass(frozen=True)
class ReconstructionResult:
    P_hat: float
    coherences: CoherenceTable
    residual_norm: float
    condition_number: float
    names: tuple[str, ...]
    estimates: NDArray[np.float64]
    standard_errors: NDArray[np.float64] | None = None
    nuisance: dict[str, float] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        errors = self.standard_errors if self.standard_errors is not None else np.full(len(self.names), np.nan)
        return pd.DataFrame({"unknown": list(self.names), "estimate": self.estimates, "std_error": errors})


@dataclass(frozen=True)
class FeasibilityReport:
    unknowns: int
    equations: int
    real_needed: int
    imaginary_needed: int
    reachable_settings: int
    tomography_parameters: int

    @property
    def raw_count_feasible(self) -> bool:
        return self.unknowns <= self.equations

    @property
    def uses_bell_schedule(self) -> bool:
        # binary phases cannot separate Im from Re for a single coherence
        return self.unknowns == 3

    @property
    def part_split_feasible(self) -> bool:
        return self.real_needed <= self.reachable_settings and self.imaginary_needed <= self.reachable_settings

    @property
    def feasible(self) -> bool:
        return self.uses_bell_schedule or self.part_split_feasible


def _exact_trig(phi: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """cos and sin with exact zeros and ones at multiples of pi/2."""
    cos, sin = np.cos(phi), np.sin(phi)
    quarters = phi / HALF_PI
    nearest = np.round(quarters)
    on_grid = np.abs(quarters - nearest) < 1e-9
    table_cos = np.array([1.0, 0.0, -1.0, 0.0])
    table_sin = np.array([0.0, 1.0, 0.0, -1.0])
    q = np.mod(nearest.astype(np.int64), 4)
    return np.where(on_grid, table_cos[q], cos), np.where(on_grid, table_sin[q], sin)


def design_row(spec: SubspaceSpec, setting: PhaseSetting) -> NDArray[np.float64]:
    phases = setting.induced_phases(spec)
    pairs = np.array(spec.pairs)
    j, k = pairs[:, 0], pairs[:, 1]
    w = 2.0 * spec.amps[j] * spec.amps[k]
    cos, sin = _exact_trig(phases[k] - phases[j])
    return np.concatenate([[1.0], w * cos, w * sin])


def _gf2_rank(rows: NDArray[np.int64]) -> int:
    m = np.array(rows, dtype=np.int64) % 2
    rank = 0
    for col in range(m.shape[1]):
        pivots = np.flatnonzero(m[rank:, col]) + rank
        if pivots.size == 0:
            continue
        m[[rank, pivots[0]]] = m[[pivots[0], rank]]
        others = np.flatnonzero(m[:, col])
        others = others[others != rank]
        m[others] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


def feasible(spec: SubspaceSpec) -> FeasibilityReport:
    d = spec.d
    relative = spec.bits[1:] - spec.bits[0]
    return FeasibilityReport(
        unknowns=d * (d - 1) + 1,
        equations=2 ** (d - 1),
        real_needed=d * (d - 1) // 2 + 1,
        imaginary_needed=d * (d - 1) // 2,
        reachable_settings=2 ** _gf2_rank(relative),
        tomography_parameters=4**spec.n - 1,
    )


def _setting_for_label_phases(spec: SubspaceSpec, phases: NDArray[np.float64]) -> PhaseSetting:
    thetas = np.linalg.lstsq(spec.bits.astype(float), phases, rcond=None)[0]
    setting = PhaseSetting(tuple(thetas.tolist()))
    induced = setting.induced_phases(spec)
    gap = np.angle(np.exp(1j * (induced - phases)))
    if np.max(np.abs(gap)) > 1e-9:
        raise InvalidSubspace("label phases are not reachable with local z phases", details={"phases": phases.tolist()})
    return setting


def _ordered_patterns(length: int, letters: int) -> Iterator[tuple[int, ...]]:
    """All-zero pattern first; for two letters each pattern is followed by its complement."""
    if letters != 2:
        yield from product(range(letters), repeat=length)
        return
    seen: set[tuple[int, ...]] = set()
    for m in range(2**length):
        pattern = tuple((m >> (length - 1 - i)) & 1 for i in range(length))
        if m == 0:
            seen.add(pattern)
            yield pattern
            continue
        for candidate in (pattern, tuple(1 - b for b in pattern)):
            if candidate not in seen:
                seen.add(candidate)
                yield candidate


def _candidates(spec: SubspaceSpec, alphabet: Sequence[float]) -> Iterator[PhaseSetting]:
    if is_label_torus(spec):
        for pattern in _ordered_patterns(spec.d - 1, len(alphabet)):
            phases = np.array([0.0, *(alphabet[i] for i in pattern)])
            yield _setting_for_label_phases(spec, phases)
    else:
        for pattern in _ordered_patterns(spec.n, len(alphabet)):
            yield PhaseSetting(tuple(alphabet[i] for i in pattern))


def _greedy_complete(
    spec: SubspaceSpec,
    alphabets: Sequence[Sequence[float]],
    rows: list[NDArray[np.float64]],
    target: int,
) -> list[PhaseSetting]:
    chosen: list[PhaseSetting] = []
    seen: set[tuple[float, ...]] = set()
    rank = np.linalg.matrix_rank(np.array(rows)) if rows else 0
    for alphabet in alphabets:
        for setting in _candidates(spec, alphabet):
            if rank >= target:
                return chosen
            if setting.thetas in seen:
                continue
            seen.add(setting.thetas)
            row = design_row(spec, setting)
            trial = np.linalg.matrix_rank(np.array([*rows, row]))
            if trial > rank:
                rows.append(row)
                chosen.append(setting)
                rank = trial
    if rank < target:
        raise Infeasible(
            "phase alphabet cannot reach the required rank",
            details={"rank": int(rank), "required": target, "d": spec.d},
        )
    return chosen


def _real_stage(spec: SubspaceSpec) -> tuple[list[PhaseSetting], list[NDArray[np.float64]]]:
    report = feasible(spec)
    if report.real_needed > report.reachable_settings:
        raise Infeasible("too few distinct binary settings for the real parts", details=report.__dict__)
    rows: list[NDArray[np.float64]] = []
    return _greedy_complete(spec, [REAL_ALPHABET], rows, report.real_needed), rows


def binary_schedule(spec: SubspaceSpec, part: Literal["real", "imaginary"]) -> Schedule:
    """Real stage: {0, pi} settings for P and Re rho_jk. Imaginary stage: settings
    completing the joint system, preferring {pi/2, 3pi/2} phases."""
    if part not in ("real", "imaginary"):
        raise OutOfRange(f"part must be real or imaginary, got {part!r}")
    real, rows = _real_stage(spec)
    if part == "real":
        return Schedule(tuple(real), "real")
    report = feasible(spec)
    if report.imaginary_needed > report.reachable_settings:
        raise Infeasible("too few distinct settings for the imaginary parts", details=report.__dict__)
    imaginary = _greedy_complete(spec, IMAGINARY_TIERS, rows, report.unknowns)
    return Schedule(tuple(imaginary), "imaginary")


def appendix_c_schedule(spec: SubspaceSpec) -> Schedule:
    """Real and imaginary stages combined: d(d-1)+1 settings."""
    real = binary_schedule(spec, "real")
    imaginary = binary_schedule(spec, "imaginary")
    return Schedule(real.settings + imaginary.settings, "mixed")


def phase_sweep_schedule(spec: SubspaceSpec, phis: Sequence[float]) -> Schedule:
    """Settings with the control phase on the last qubit."""
    settings = []
    for phi in phis:
        thetas = [0.0] * spec.n
        thetas[-1] = float(phi)
        settings.append(PhaseSetting(tuple(thetas)))
    return Schedule(tuple(settings), "mixed")


def bell_schedule(spec: SubspaceSpec | None = None) -> Schedule:
    """phi = 0, pi/2, pi: C(0) = Re, C(pi/2) = Im, C(pi) = -Re."""
    spec = bell_spec() if spec is None else spec
    if spec.d != 2:
        raise InvalidSubspace("the three-point schedule needs a two-label subspace", details={"d": spec.d})
    return phase_sweep_schedule(spec, (0.0, HALF_PI, np.pi))


def assemble(
    spec: SubspaceSpec,
    schedule: Schedule,
    measurements: Sequence[float],
    sigmas: Sequence[float] | None = None,
) -> DesignSystem:
    rhs = np.asarray(measurements, dtype=float)
    if rhs.size != len(schedule):
        raise LengthMismatch(
            "one measurement per schedule setting required",
            details={"settings": len(schedule), "measurements": int(rhs.size)},
        )
    bad = np.flatnonzero((rhs < -1e-9) | (rhs > 1 + 1e-9))
    if bad.size:
        raise OutOfRange("fidelities must lie in [0, 1]", details={"rows": bad.tolist()})
    sig = None
    if sigmas is not None:
        sig = np.asarray(sigmas, dtype=float)
        if sig.size != rhs.size:
            raise LengthMismatch("one sigma per measurement required", details={"sigmas": int(sig.size)})
    matrix = np.vstack([design_row(spec, s) for s in schedule.settings])
    return DesignSystem(matrix, rhs, spec, tuple(unknown_names(spec)), sig)


def solve(system: DesignSystem) -> ReconstructionResult:
    """Least squares through the normal equations (Cholesky)."""
    a, b = system.matrix, system.rhs
    columns = a.shape[1]
    rank = int(np.linalg.matrix_rank(a))
    if rank < columns:
        raise RankDeficient(
            "design matrix does not determine every unknown",
            details={"rank": rank, "unknowns": columns, "null_dimension": columns - rank},
        )
    gram = a.T @ a
    factor = cho_factor(gram)
    x = cho_solve(factor, a.T @ b)
    residual = float(np.linalg.norm(a @ x - b))
    cond = float(np.linalg.cond(a))

    errors = None
    if system.sigmas is not None:
        inv_gram = cho_solve(factor, np.eye(columns))
        meat = a.T @ (system.sigmas[:, None] ** 2 * a)
        errors = np.sqrt(np.clip(np.diag(inv_gram @ meat @ inv_gram), 0.0, None))

    spec = system.spec
    m = len(spec.pairs)
    physical = 1 + 2 * m
    entries = {pair: complex(x[1 + i], x[1 + m + i]) for i, pair in enumerate(spec.pairs)}
    nuisance = {name: float(x[physical + i]) for i, name in enumerate(system.nuisance)}
    logger.debug("system solved", rank=rank, residual=residual, condition_number=cond)
    return ReconstructionResult(
        P_hat=float(x[0]),
        coherences=CoherenceTable(entries),
        residual_norm=residual,
        condition_number=cond,
        names=system.names + system.nuisance,
        estimates=x,
        standard_errors=errors,
        nuisance=nuisance,
    )


def ws_from_result(
    result: ReconstructionResult,
    spec: SubspaceSpec,
    alpha: float,
    mode: SubspaceMode = "constrained",
    seed: int = 0,
) -> WitnessReport:
    missing = result.coherences.missing(spec)
    if missing:
        raise IncompleteReconstruction(
            "reconstruction lacks coherences for the subspace",
            details={"missing": [list(p) for p in missing]},
        )
    return witness_from_table(result.coherences, result.P_hat, spec, alpha, mode, seed)


def simulate_fidelities(
    rho: DensityMatrix,
    spec: SubspaceSpec,
    schedule: Schedule,
    shots: Shots,
    rng: np.random.Generator,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sampled fidelities per setting and their binomial standard errors."""
    values, sigmas = [], []
    for setting in schedule.settings:
        exact = fidelity(rho, target_state(spec, setting))
        sampled = sample_fidelity(exact, shots, rng)
        values.append(sampled)
        sigmas.append(0.0 if shots == float("inf") else np.sqrt(sampled * (1 - sampled) / shots))
    return np.array(values), np.array(sigmas)


def fit_phase_sweep(spec: SubspaceSpec, phis: Sequence[float], fidelities: Sequence[float]) -> ReconstructionResult:
    """Linear least squares of F(phi) = P + Re cos phi + Im sin phi (scaled) over a dense sweep."""
    if spec.d != 2:
        raise InvalidSubspace("phase sweeps fit a single coherence", details={"d": spec.d})
    schedule = phase_sweep_schedule(spec, phis)
    return solve(assemble(spec, schedule, fidelities))


HHCP_PHASES = (0.0, HALF_PI, np.pi)


def hhcp_system(zz: float, signals: Sequence[float], phases: Sequence[float] = HHCP_PHASES) -> DesignSystem:
    """One sigma^z sigma^z setting plus phase settings sharing the offset <Z1 - Z2>/2.

    Rows: <ZZ> + 1 = 4P and S(phi) = offset + 2 Re rho_14 cos phi + 2 Im rho_14 sin phi.
    """
    if len(signals) != len(phases):
        raise LengthMismatch("one signal per phase required", details={"phases": len(phases), "signals": len(signals)})
    cos, sin = _exact_trig(np.asarray(phases, dtype=float))
    rows = [[4.0, 0.0, 0.0, 0.0]] + [[0.0, 2 * c, 2 * s, 1.0] for c, s in zip(cos, sin)]
    rhs = np.array([zz + 1.0, *signals], dtype=float)
    spec = bell_spec()
    return DesignSystem(np.array(rows), rhs, spec, tuple(unknown_names(spec)), nuisance=("offset",))


def simulate_hhcp(
    rho: DensityMatrix,
    d: float,
    shots: Shots,
    rng: np.random.Generator,
    phases: Sequence[float] = HHCP_PHASES,
) -> tuple[float, list[float]]:
    """Sampled <ZZ> and HHCP signals at the optimal time."""
    zz = sample_shots(expect(rho, pauli_product("zz")), shots, rng)
    t = optimal_time(d)
    signals = [sample_shots(hhcp_signal(rho, phi, d, t), shots, rng) for phi in phases]
    return zz, signals
