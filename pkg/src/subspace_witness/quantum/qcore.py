"""Dense complex linear algebra for registers of up to ten qubits.

Basis ordering: qubit 1 is the leftmost label bit and the most significant
bit of the matrix index, so ``|00>..|11>`` map to indices 0..3 and the
two-qubit coherence of interest is ``rho[0, 3]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import unitary_group

from ..core.config import config
from ..core.exceptions import (
    DimensionMismatch,
    LinearAlgebraException,
    NonHermitian,
    NonHermitianObservable,
    NonUnitary,
    NotNormalized,
    NotPositive,
    NumericalException,
)

ComplexMatrix = NDArray[np.complex128]
RealVector = NDArray[np.float64]

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = {"i": I2, "x": SX, "y": SY, "z": SZ}


def as_matrix(m: ArrayLike) -> ComplexMatrix:
    """Coerce to a finite square complex matrix."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(
            f"expected a square matrix, got shape {arr.shape}",
            details={"shape": list(arr.shape)},
        )
    if not np.all(np.isfinite(arr)):
        raise LinearAlgebraException("matrix has non-finite entries", error_code="NON_FINITE")
    return arr


def qubit_count(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two", details={"dim": dim})
    return n


def basis_index(label: str) -> int:
    return int(label, 2)


def basis_label(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def kron(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(ops: Iterable[ArrayLike]) -> ComplexMatrix:
    return reduce(kron, ops)


def embed(op: ArrayLike, qubit: int, n: int) -> ComplexMatrix:
    """Place a single-qubit operator on ``qubit`` (1-based, leftmost first)."""
    if not 1 <= qubit <= n:
        raise DimensionMismatch(f"qubit {qubit} outside register of {n}", details={"qubit": qubit, "n": n})
    ops: list[ArrayLike] = [I2] * n
    ops[qubit - 1] = op
    return kron_all(ops)


def pauli_product(letters: str) -> ComplexMatrix:
    """``pauli_product("zz")`` is sigma_1^z sigma_2^z; ``"i"`` marks identity."""
    return kron_all(PAULI[c] for c in letters.lower())


def _max_abs(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m: ArrayLike, tol: float | None = None) -> bool:
    tol = config.numerics.hermitian_tol if tol is None else tol
    arr = as_matrix(m)
    return _max_abs(arr - arr.conj().T) <= tol


def is_unitary(u: ArrayLike, tol: float | None = None) -> bool:
    tol = config.numerics.unitary_tol if tol is None else tol
    arr = as_matrix(u)
    return _max_abs(arr @ arr.conj().T - np.eye(arr.shape[0])) <= tol


def conjugate(m: ArrayLike, u: ArrayLike) -> ComplexMatrix:
    """Return ``U M U^dagger``."""
    m_arr, u_arr = as_matrix(m), as_matrix(u)
    if m_arr.shape != u_arr.shape:
        raise DimensionMismatch(
            "operator and unitary dimensions differ",
            details={"m": m_arr.shape[0], "u": u_arr.shape[0]},
        )
    deviation = _max_abs(u_arr @ u_arr.conj().T - np.eye(u_arr.shape[0]))
    if deviation > config.numerics.unitary_tol:
        raise NonUnitary("U U^dagger differs from identity", details={"max_deviation": deviation})
    return u_arr @ m_arr @ u_arr.conj().T


def expect(rho: Union["DensityMatrix", ArrayLike], m: ArrayLike) -> float:
    """tr(rho M) for Hermitian M."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    m_arr = as_matrix(m)
    if r.shape != m_arr.shape:
        raise DimensionMismatch(
            "state and observable dimensions differ",
            details={"rho": r.shape[0], "m": m_arr.shape[0]},
        )
    tol = config.numerics.hermitian_tol
    if not is_hermitian(m_arr, tol):
        raise NonHermitianObservable("observable is not Hermitian")
    value = np.einsum("ij,ji->", r, m_arr)
    if abs(value.imag) >= tol:
        raise NonHermitianObservable(
            "expectation value has an imaginary part",
            details={"imag": float(value.imag)},
        )
    return float(value.real)


def _jacobi_hermitian(h: ComplexMatrix, tol: float, max_sweeps: int) -> tuple[RealVector, ComplexMatrix]:
    # cyclic sweeps of complex Givens rotations; each (p, q) step first removes the
    # phase of a_pq then applies the real symmetric rotation
    a = np.array(h, dtype=np.complex128, copy=True)
    dim = a.shape[0]
    v = np.eye(dim, dtype=np.complex128)
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
    skip = 1e-3 * tol * scale / dim
    previous = np.inf

    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        # stop at tolerance, or once rounding noise stops the off-diagonal norm shrinking
        if off <= tol * scale or (off >= previous and off <= 1e-8 * scale):
            break
        previous = off
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                theta = 0.5 * np.arctan2(2.0 * mag, a[q, q].real - a[p, p].real)
                c, s = np.cos(theta), np.sin(theta)
                phase = np.conj(apq) / mag
                g = np.array([[c, s], [-s * phase, c * phase]], dtype=np.complex128)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        raise NumericalException(
            "Jacobi eigensolver did not converge",
            error_code="JACOBI_NOT_CONVERGED",
            details={"max_sweeps": max_sweeps, "dim": dim},
        )

    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def hermitian_eigen(h: ArrayLike, vectors: bool = False) -> RealVector | tuple[RealVector, ComplexMatrix]:
    """Ascending eigenvalues of a Hermitian matrix, eigenvectors as columns on request."""
    arr = as_matrix(h)
    if not is_hermitian(arr):
        raise NonHermitian("matrix is not Hermitian", details={"max_deviation": _max_abs(arr - arr.conj().T)})
    arr = 0.5 * (arr + arr.conj().T)
    numerics = config.numerics
    if arr.shape[0] > numerics.jacobi_max_dim:
        values, vecs = np.linalg.eigh(arr)
    else:
        values, vecs = _jacobi_hermitian(arr, numerics.jacobi_tol, numerics.jacobi_max_sweeps)
    return (values, vecs) if vectors else values


def psd_sqrt(m: ArrayLike) -> ComplexMatrix:
    """Matrix square root; eigenvalues at or below the rounding threshold are set to zero."""
    values, vecs = hermitian_eigen(m, vectors=True)
    threshold = values.size * np.finfo(float).eps * max(float(np.max(np.abs(values))), 1.0)
    roots = np.where(values > threshold, np.sqrt(np.clip(values, 0.0, None)), 0.0)
    return (vecs * roots) @ vecs.conj().T


def validate_density(m: ArrayLike) -> ComplexMatrix:
    arr = as_matrix(m)
    qubit_count(arr.shape[0])
    numerics = config.numerics
    if not is_hermitian(arr, numerics.hermitian_tol):
        raise NonHermitian("density matrix is not Hermitian")
    trace = np.trace(arr)
    if abs(trace - 1.0) > numerics.trace_tol:
        raise NotNormalized("density matrix trace is not 1", details={"trace": complex(trace)})
    smallest = float(hermitian_eigen(arr)[0])
    if smallest < numerics.psd_floor:
        raise NotPositive(
            "density matrix has a negative eigenvalue",
            details={"min_eigenvalue": smallest, "floor": numerics.psd_floor},
        )
    return arr


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated, read-only density operator on n qubits."""

    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        arr = validate_density(self.matrix).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n(self) -> int:
        return qubit_count(self.dim)

    def element(self, j: int, k: int) -> complex:
        return complex(self.matrix[j, k])

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    def eigenvalues(self) -> RealVector:
        return hermitian_eigen(self.matrix)  # type: ignore[return-value]

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2**n, dtype=np.complex128) / 2**n)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel().copy()
        qubit_count(amps.size)
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > config.numerics.norm_tol:
            raise NotNormalized("state vector is not normalized", details={"norm": norm})
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @property
    def n(self) -> int:
        return qubit_count(self.dim)

    def projector(self) -> ComplexMatrix:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.projector())

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def local_z_unitary(angles: Iterable[float]) -> ComplexMatrix:
    """Product of exp(-i theta_m sigma_z / 2), one angle per qubit."""
    return kron_all(np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]) for t in angles)


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state; full rank unless ``rank`` is given."""
    dim = 2**n
    cols = dim if rank is None else rank
    g = rng.normal(size=(dim, cols)) + 1j * rng.normal(size=(dim, cols))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(n: int, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return PureState(v / np.linalg.norm(v))


def random_local_unitary(n: int, rng: np.random.Generator) -> ComplexMatrix:
    return kron_all(unitary_group.rvs(2, random_state=rng) for _ in range(n))


def random_product_density(n: int, rng: np.random.Generator) -> DensityMatrix:
    factors = []
    for _ in range(n):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        r = g @ g.conj().T
        factors.append(r / np.trace(r).real)
    return DensityMatrix(kron_all(factors))
