"""Target states and parameterised state families.

A ``SubspaceSpec`` fixes the ordered basis labels and real amplitudes of a
target family; a ``PhaseSetting`` carries one z-phase per qubit and induces
the label phase ``phi_k = k . theta``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import (
    DimensionMismatch,
    InvalidExcitation,
    InvalidSubspace,
    NotPositive,
    OutOfRange,
    ValidationException,
)
from .qcore import DensityMatrix, PureState, basis_index, pauli_product

TWO_PI = 2.0 * np.pi
SQRT_HALF = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class SubspaceSpec:
    n: int
    basis: tuple[str, ...]
    amplitudes: tuple[float, ...]

    def __post_init__(self) -> None:
        basis = tuple(str(label) for label in self.basis)
        amps = tuple(float(a) for a in self.amplitudes)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", amps)

        if len(basis) < 2:
            raise InvalidSubspace("subspace needs at least two basis labels", details={"d": len(basis)})
        if len(basis) != len(amps):
            raise InvalidSubspace(
                "labels and amplitudes differ in length",
                details={"labels": len(basis), "amplitudes": len(amps)},
            )
        if len(set(basis)) != len(basis):
            raise InvalidSubspace("basis labels must be distinct", details={"basis": list(basis)})
        bad = [label for label in basis if len(label) != self.n or set(label) - {"0", "1"}]
        if bad:
            raise InvalidSubspace(f"labels must be {self.n}-bit strings", details={"invalid": bad})
        if any(not a > 0 for a in amps):
            raise InvalidSubspace("amplitudes must be positive", details={"amplitudes": list(amps)})
        norm = sum(a * a for a in amps)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidSubspace("squared amplitudes must sum to 1", details={"sum": norm})

    @property
    def d(self) -> int:
        return len(self.basis)

    @property
    def indices(self) -> NDArray[np.int64]:
        return np.array([basis_index(label) for label in self.basis], dtype=np.int64)

    @property
    def bits(self) -> NDArray[np.int64]:
        return np.array([[int(b) for b in label] for label in self.basis], dtype=np.int64)

    @property
    def amps(self) -> NDArray[np.float64]:
        return np.array(self.amplitudes, dtype=np.float64)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Label index pairs (j, k), j < k, in lexicographic order."""
        return list(combinations(range(self.d), 2))

    @classmethod
    def uniform(cls, basis: Sequence[str]) -> "SubspaceSpec":
        d = len(basis)
        if d == 0:
            raise InvalidSubspace("empty basis")
        return cls(len(basis[0]), tuple(basis), tuple([1.0 / np.sqrt(d)] * d))

    def to_text(self) -> str:
        return "".join(f"{label} {amp:.17g}\n" for label, amp in zip(self.basis, self.amplitudes))

    @classmethod
    def from_text(cls, text: str) -> "SubspaceSpec":
        """Parse ``label amplitude`` lines; amplitudes are renormalised."""
        labels: list[str] = []
        weights: list[float] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidSubspace(f"line {lineno}: expected 'label amplitude'", details={"line": raw})
            try:
                weights.append(float(parts[1]))
            except ValueError:
                raise InvalidSubspace(f"line {lineno}: amplitude is not a number", details={"line": raw})
            labels.append(parts[0])
        if not labels:
            raise InvalidSubspace("no basis labels found")
        w = np.array(weights)
        if np.any(w <= 0):
            raise InvalidSubspace("amplitudes must be positive", details={"amplitudes": weights})
        w = w / np.linalg.norm(w)
        return cls(len(labels[0]), tuple(labels), tuple(w.tolist()))

    def save(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.to_text(), encoding="utf-8")
        return target

    @classmethod
    def load(cls, path: str | Path) -> "SubspaceSpec":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class PhaseSetting:
    """Per-qubit z-phases (radians), canonicalised into [0, 2 pi)."""

    thetas: tuple[float, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.thetas, dtype=np.float64).ravel()
        if not np.all(np.isfinite(arr)):
            raise OutOfRange("phase setting has non-finite entries", details={"thetas": arr.tolist()})
        canon = np.mod(arr, TWO_PI)
        # values a rounding step below 2 pi fold back to 0
        canon[np.isclose(canon, TWO_PI, rtol=0.0, atol=1e-15)] = 0.0
        object.__setattr__(self, "thetas", tuple(canon.tolist()))

    @property
    def n(self) -> int:
        return len(self.thetas)

    @classmethod
    def zeros(cls, n: int) -> "PhaseSetting":
        return cls(tuple([0.0] * n))

    def induced_phases(self, spec: SubspaceSpec) -> NDArray[np.float64]:
        if self.n != spec.n:
            raise DimensionMismatch(
                "phase setting and subspace qubit counts differ",
                details={"setting": self.n, "spec": spec.n},
            )
        return spec.bits @ np.asarray(self.thetas)

    @classmethod
    def from_label_phases(cls, spec: SubspaceSpec, phases: Sequence[float]) -> "PhaseSetting":
        """Realise per-label phases with single-qubit phases; single-excitation specs only."""
        if len(phases) != spec.d:
            raise DimensionMismatch("one phase per basis label required", details={"d": spec.d, "got": len(phases)})
        bits = spec.bits
        if np.any(bits.sum(axis=1) != 1):
            raise ValidationException(
                "label phases map onto qubit phases only for single-excitation subspaces",
                error_code="LABEL_PHASES_UNSUPPORTED",
            )
        thetas = np.zeros(spec.n)
        for row, phase in zip(bits, phases):
            thetas[int(np.argmax(row))] = phase
        return cls(tuple(thetas.tolist()))


@dataclass(frozen=True)
class BellParams:
    branch: Literal["phi", "psi"] = "phi"
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.branch not in ("phi", "psi"):
            raise ValidationException(f"unknown Bell branch {self.branch!r}", error_code="BELL_BRANCH")
        if not np.isfinite(self.phi):
            raise OutOfRange("Bell phase must be finite", details={"phi": self.phi})


def bell_spec(branch: Literal["phi", "psi"] = "phi") -> SubspaceSpec:
    basis = ("00", "11") if branch == "phi" else ("01", "10")
    return SubspaceSpec(2, basis, (SQRT_HALF, SQRT_HALF))


def ghz_spec(n: int) -> SubspaceSpec:
    if n < 2:
        raise OutOfRange("GHZ states need at least two qubits", details={"n": n})
    return SubspaceSpec(n, ("0" * n, "1" * n), (SQRT_HALF, SQRT_HALF))


def dicke(n: int, k: int) -> SubspaceSpec:
    """Weight-k labels in ascending index order, uniform amplitudes."""
    if not 0 < k < n:
        raise InvalidExcitation(f"need 0 < k < n, got n={n}, k={k}", details={"n": n, "k": k})
    labels = []
    for ones in combinations(range(n), k):
        bits = ["0"] * n
        for pos in ones:
            bits[pos] = "1"
        labels.append("".join(bits))
    labels.sort(key=basis_index)
    amp = 1.0 / np.sqrt(comb(n, k))
    return SubspaceSpec(n, tuple(labels), tuple([amp] * len(labels)))


def w_spec(n: int) -> SubspaceSpec:
    return dicke(n, 1)


def bell(params: BellParams) -> PureState:
    k, kbar = (0, 3) if params.branch == "phi" else (1, 2)
    amps = np.zeros(4, dtype=np.complex128)
    amps[k] = SQRT_HALF
    amps[kbar] = np.exp(-1j * params.phi) * SQRT_HALF
    return PureState(amps)


def target_state(spec: SubspaceSpec, phases: PhaseSetting) -> PureState:
    amps = np.zeros(2**spec.n, dtype=np.complex128)
    amps[spec.indices] = spec.amps * np.exp(-1j * phases.induced_phases(spec))
    return PureState(amps)


def canonical(psi: PureState) -> PureState:
    """Fix the global phase so the first non-zero amplitude is real and positive."""
    amps = np.array(psi.amplitudes)
    lead = amps[np.flatnonzero(np.abs(amps) > 1e-15)[0]]
    return PureState(amps * (abs(lead) / lead))


def _bell_basis() -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    plus = np.zeros(4, dtype=np.complex128)
    minus = np.zeros(4, dtype=np.complex128)
    plus[[0, 3]] = [SQRT_HALF, SQRT_HALF]
    minus[[0, 3]] = [SQRT_HALF, -SQRT_HALF]
    return plus, minus


def rho_phi(eps: float, theta: float, phi0: float) -> DensityMatrix:
    """Generic state on span{|00>, |11>} written in the Phi+/Phi- Pauli frame."""
    if eps < 0:
        raise OutOfRange("eps must be non-negative", details={"eps": eps})
    if not -1e-12 <= phi0 <= np.pi + 1e-12:
        raise OutOfRange("phi0 must lie in [0, pi]", details={"phi0": phi0})
    plus, minus = _bell_basis()
    pm = np.outer(plus, minus.conj())
    mp = pm.conj().T
    frame_x = pm + mp
    frame_y = -1j * pm + 1j * mp
    frame_z = np.outer(plus, plus.conj()) - np.outer(minus, minus.conj())
    identity = np.outer(plus, plus.conj()) + np.outer(minus, minus.conj())
    bloch = (
        np.sin(phi0) * np.cos(theta) * frame_x
        + np.sin(phi0) * np.sin(theta) * frame_y
        + np.cos(phi0) * frame_z
    )
    try:
        return DensityMatrix(identity / 2 + (eps / 2) * bloch)
    except NotPositive as e:
        raise NotPositive(
            "rho_phi is not positive for eps > 1",
            details={"eps": eps, "theta": theta, "phi0": phi0, **e.details},
        )


def from_correlators(zz: float, xx: float, yy: float) -> DensityMatrix:
    """Bell-diagonal state with the given two-body correlators."""
    rho = (
        np.eye(4, dtype=np.complex128)
        + zz * pauli_product("zz")
        + xx * pauli_product("xx")
        + yy * pauli_product("yy")
    ) / 4
    return DensityMatrix(rho)


def bell_mixture(population: float, coherence: complex, branch: Literal["phi", "psi"] = "phi") -> DensityMatrix:
    """State with subspace population P and coherence rho_{k kbar}; leftover weight sits on the other pair."""
    if not 0.0 <= population <= 0.5:
        raise OutOfRange("population must lie in [0, 1/2]", details={"population": population})
    k, kbar = (0, 3) if branch == "phi" else (1, 2)
    others = [i for i in range(4) if i not in (k, kbar)]
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[k, k] = rho[kbar, kbar] = population
    rho[others[0], others[0]] = rho[others[1], others[1]] = 0.5 - population
    rho[k, kbar] = coherence
    rho[kbar, k] = np.conj(coherence)
    return DensityMatrix(rho)


_NAMED = re.compile(r"^(?P<family>bell|bell-phi|bell-psi|ghz|w)(?P<n>\d*)$")


def spec_from_name(name: str) -> SubspaceSpec:
    """Resolve ``bell``, ``bell-psi``, ``ghz3``, ``w4``, ``dicke:6:3`` or a spec file path."""
    key = name.strip().lower()
    if key.startswith("dicke:"):
        try:
            _, n, k = key.split(":")
            return dicke(int(n), int(k))
        except ValueError:
            raise ValidationException(f"expected dicke:<n>:<k>, got {name!r}", error_code="SPEC_NAME")
    match = _NAMED.match(key)
    if match:
        family, digits = match.group("family"), match.group("n")
        if family.startswith("bell"):
            return bell_spec("psi" if family == "bell-psi" else "phi")
        if not digits:
            raise ValidationException(f"{family} needs a qubit count, e.g. {family}3", error_code="SPEC_NAME")
        return ghz_spec(int(digits)) if family == "ghz" else w_spec(int(digits))
    path = Path(name)
    if path.exists():
        return SubspaceSpec.load(path)
    raise ValidationException(f"unknown subspace {name!r}", error_code="SPEC_NAME", details={"name": name})
