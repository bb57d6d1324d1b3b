"""Pulse-level simulation of the two-qubit readout protocols.

Operators are built in the Heisenberg picture: a sequence U followed by a
sigma_1^z readout measures M' = U^dagger sigma_1^z U. Each measured operator
has a closed form and a brute-force conjugation, and the two are cross-checked
in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.linalg import expm
from scipy.optimize import curve_fit, minimize_scalar

from ..core.exceptions import DimensionMismatch, FitDidNotConverge, OutOfRange
from ..core.logging_config import get_logger
from .qcore import (
    I2,
    SX,
    SY,
    SZ,
    ComplexMatrix,
    DensityMatrix,
    conjugate,
    embed,
    expect,
    kron,
    kron_all,
    local_z_unitary,
    pauli_product,
)

logger = get_logger(__name__)

Method = Literal["numeric", "closed"]


@dataclass(frozen=True)
class PulseSpec:
    coupling_d: float
    duration_t: float
    axis_phase_phi: float = 0.0
    pi_pulse_inserted: bool = True

    def __post_init__(self) -> None:
        if not self.coupling_d > 0:
            raise OutOfRange("coupling d must be positive", details={"d": self.coupling_d})
        if self.duration_t < 0:
            raise OutOfRange("duration must be non-negative", details={"t": self.duration_t})

    @property
    def dt(self) -> float:
        return self.coupling_d * self.duration_t


@dataclass(frozen=True)
class DecayModel:
    """Envelope exp(-(t/T)^p); exponential decay has p = 1."""

    kind: Literal["exponential", "stretched"]
    T: float
    exponent_p: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("exponential", "stretched"):
            raise OutOfRange(f"unknown decay kind {self.kind!r}", details={"kind": self.kind})
        if not self.T > 0:
            raise OutOfRange("decay time must be positive", details={"T": self.T})
        if self.exponent_p < 1:
            raise OutOfRange("decay exponent must be >= 1", details={"p": self.exponent_p})
        if self.kind == "exponential" and self.exponent_p != 1.0:
            raise OutOfRange("exponential decay has exponent 1", details={"p": self.exponent_p})

    def envelope(self, t: float | NDArray[np.float64]) -> float | NDArray[np.float64]:
        return np.exp(-((np.asarray(t) / self.T) ** self.exponent_p))


def optimal_time(d: float) -> float:
    """t = 2 pi / (4 d), where the sin dt terms peak."""
    return np.pi / (2.0 * d)


def _x_axis_rotation(phi: float, angle: float) -> ComplexMatrix:
    """R_phi(angle) on qubit 1 of two."""
    axis = np.cos(phi) * SX + np.sin(phi) * SY
    return embed(expm(-0.5j * angle * axis), 1, 2)


def _ising(d: float, t: float) -> ComplexMatrix:
    return expm(-1j * t * d * pauli_product("zz") / 2)


def correlator_unitary(spec: PulseSpec) -> ComplexMatrix:
    if spec.pi_pulse_inserted:
        half = _ising(spec.coupling_d, spec.duration_t / 2)
        free = half @ pauli_product("yy") @ half
    else:
        free = _ising(spec.coupling_d, spec.duration_t)
    return _x_axis_rotation(spec.axis_phase_phi, np.pi / 2) @ free @ _x_axis_rotation(np.pi / 2, np.pi / 2)


def correlator_operator(spec: PulseSpec, method: Method = "numeric") -> ComplexMatrix:
    """Effective operator measured by the correlator sequence.

    closed form: cos phi [cos dt Y1 + sin dt Z1Z2] +/- sin phi [cos dt Z1 - sin dt Y1Z2],
    with the minus sign when the refocusing pi pulse is left out.
    """
    if method == "numeric":
        u = correlator_unitary(spec)
        return conjugate(embed(SZ, 1, 2), u.conj().T)
    c, s = np.cos(spec.dt), np.sin(spec.dt)
    sign = 1.0 if spec.pi_pulse_inserted else -1.0
    phi = spec.axis_phase_phi
    return np.cos(phi) * (c * embed(SY, 1, 2) + s * pauli_product("zz")) + sign * np.sin(phi) * (
        c * embed(SZ, 1, 2) - s * pauli_product("yz")
    )


def correlator_signal(rho: DensityMatrix, spec: PulseSpec, decay: DecayModel | None = None) -> float:
    value = expect(rho, correlator_operator(spec))
    if decay is not None:
        value *= float(decay.envelope(spec.duration_t))
    return value


def basis_rotation(axis: Literal["x", "y", "z"]) -> ComplexMatrix:
    """Two-qubit pre-rotation mapping the sigma^a sigma^a correlator onto sigma^z sigma^z."""
    if axis == "z":
        single = I2
    elif axis == "x":
        single = expm(0.25j * np.pi * SY)
    elif axis == "y":
        single = expm(-0.25j * np.pi * SX)
    else:
        raise OutOfRange(f"unknown correlator axis {axis!r}", details={"axis": axis})
    return kron(single, single)


def correlator_scan(
    rho: DensityMatrix,
    axis: Literal["x", "y", "z"],
    d: float,
    times: NDArray[np.float64],
    decay: DecayModel | None = None,
) -> pd.DataFrame:
    """Signal of the correlator sequence (phi = 0) over free-evolution times."""
    rotated = DensityMatrix(conjugate(rho.matrix, basis_rotation(axis)))
    signals = [correlator_signal(rotated, PulseSpec(d, float(t)), decay) for t in times]
    return pd.DataFrame({"t_s": np.asarray(times, dtype=float), "signal": signals})


@dataclass(frozen=True)
class CorrelatorFit:
    correlator: float
    local_term: float
    omega: float
    T: float
    residual_norm: float


def fit_correlator_trace(times: NDArray[np.float64], signals: NDArray[np.float64], d: float) -> CorrelatorFit:
    """Fit e^{-t/T}(A sin(w t) + B cos(w t)); A is the two-body correlator."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(signals, dtype=float)
    if t.size != y.size:
        raise DimensionMismatch("times and signals differ in length", details={"t": t.size, "y": y.size})
    if t.size < 4:
        raise FitDidNotConverge("need at least four points", details={"points": int(t.size)})
    scale = float(t.max())

    def model(x: NDArray[np.float64], a: float, b: float, w: float, tau: float) -> NDArray[np.float64]:
        return np.exp(-x / tau) * (a * np.sin(w * x) + b * np.cos(w * x))

    p0 = [float(np.max(np.abs(y))), 0.0, d * scale, 1.0]
    try:
        popt, _ = curve_fit(model, t / scale, y, p0=p0, ftol=1e-14, xtol=1e-14, gtol=1e-14, maxfev=20000)
    except (RuntimeError, ValueError) as e:
        raise FitDidNotConverge("correlator trace fit failed", details={"reason": str(e)})
    residual = float(np.linalg.norm(model(t / scale, *popt) - y))
    return CorrelatorFit(float(popt[0]), float(popt[1]), float(popt[2] / scale), float(popt[3] * scale), residual)


def hhcp_propagator(d: float, t: float, sign: int = 1) -> ComplexMatrix:
    """exp(-i H t) with H = d (XX + sign YY) / 4.

    With this normalisation the sign=+1 block on {01, 10} is
    cos(dt/2) - i sin(dt/2) sigma^x, so a full swap needs dt = pi. The gate
    times quoted with the signal formulas (hhcp_gate_time) are half of that.
    """
    if not d > 0:
        raise OutOfRange("coupling d must be positive", details={"d": d})
    if t < 0:
        raise OutOfRange("evolution time must be non-negative", details={"t": t})
    if sign not in (1, -1):
        raise OutOfRange("sign must be +1 or -1", details={"sign": sign})
    h = d * (pauli_product("xx") + sign * pauli_product("yy")) / 4
    return expm(-1j * t * h)


def hhcp_gate_time(d: float, gate: Literal["sqrt_iswap", "iswap"]) -> float:
    """Times at which the HHCP signal formulas place sqrt(iSWAP) (dt = pi/4) and iSWAP (dt = pi/2)."""
    points = {"sqrt_iswap": np.pi / 4, "iswap": np.pi / 2}
    if gate not in points:
        raise OutOfRange(f"unknown gate {gate!r}", details={"gate": gate})
    return points[gate] / d


def hhcp_unitary(phi: float, d: float, t: float) -> ComplexMatrix:
    # the qubit-1 z phase is offset by a quarter turn so that phi = 0 reads Re(rho_14)
    # and S(pi/2) - offset = +2 Im(rho_14); with psi = phi - pi/2 instead the same
    # Im reading sits at phi = -pi/2
    psi = -phi - np.pi / 2
    rz = embed(expm(-0.5j * psi * SZ), 1, 2)
    return rz @ hhcp_propagator(d, t, sign=-1) @ rz.conj().T


def hhcp_operator(phi: float, d: float, t: float, method: Method = "numeric") -> ComplexMatrix:
    """Operator measured by the HHCP readout.

    closed form: 2M' = (Z1 - Z2) + (Z1 + Z2) cos dt + (XX - YY) cos phi sin dt
                       - (XY + YX) sin phi sin dt
    """
    if method == "numeric":
        return conjugate(embed(SZ, 1, 2), hhcp_unitary(phi, d, t).conj().T)
    c, s = np.cos(d * t), np.sin(d * t)
    z1, z2 = embed(SZ, 1, 2), embed(SZ, 2, 2)
    cross = pauli_product("xy") + pauli_product("yx")
    two_m = (
        (z1 - z2)
        + (z1 + z2) * c
        + (pauli_product("xx") - pauli_product("yy")) * np.cos(phi) * s
        - cross * np.sin(phi) * s
    )
    return two_m / 2


def hhcp_signal(rho: DensityMatrix, phi: float, d: float, t: float) -> float:
    return expect(rho, hhcp_operator(phi, d, t))


def hhcp_offset(rho: DensityMatrix) -> float:
    """<Z1 - Z2>/2, the phase-independent part of the signal at the optimal time."""
    return expect(rho, (embed(SZ, 1, 2) - embed(SZ, 2, 2)) / 2)


@dataclass(frozen=True)
class EchoScanResult:
    taus: NDArray[np.float64]
    signals: NDArray[np.float64]
    fitted_amplitude: float
    fitted_T2: float
    fitted_phase: float
    exponent_p: float
    nu: float
    residual_norm: float
    phase_degenerate: bool = False

    def fitted(self, taus: NDArray[np.float64] | None = None) -> NDArray[np.float64]:
        x = self.taus if taus is None else np.asarray(taus, dtype=float)
        env = np.exp(-((x / self.fitted_T2) ** self.exponent_p))
        return self.fitted_amplitude * np.cos(2 * np.pi * self.nu * x - self.fitted_phase) * env

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"tau_s": self.taus, "signal": self.signals, "fit": self.fitted()})


def echo_signal(rho0: DensityMatrix, nu: float, decay: DecayModel, taus: NDArray[np.float64]) -> NDArray[np.float64]:
    """2 C(2 pi nu tau) times the decay envelope, from rho0's |00><11| coherence."""
    coherence = rho0.element(0, 3)
    phi = 2 * np.pi * nu * np.asarray(taus, dtype=float)
    c = coherence.real * np.cos(phi) + coherence.imag * np.sin(phi)
    return 2 * c * decay.envelope(taus)


def _linear_echo_fit(x: NDArray[np.float64], y: NDArray[np.float64], omega: float, t2: float, p: float) -> tuple[NDArray[np.float64], float]:
    env = np.exp(-((x / t2) ** p))
    cols = [env * np.cos(omega * x)]
    if omega != 0.0:
        cols.append(env * np.sin(omega * x))
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coef, float(np.sum((design @ coef - y) ** 2))


def fit_echo(taus: NDArray[np.float64], signals: NDArray[np.float64], nu: float, p: float) -> EchoScanResult:
    """Least-squares fit of amplitude, T2 and phase with nu and p fixed.

    The amplitude/phase pair enters linearly, so T2 is first located by a
    bounded scalar search over the projected residual and then refined jointly.
    """
    x = np.asarray(taus, dtype=float)
    y = np.asarray(signals, dtype=float)
    if x.size != y.size:
        raise DimensionMismatch("taus and signals differ in length", details={"taus": x.size, "signals": y.size})
    if x.size < 3:
        raise FitDidNotConverge("need at least three points", details={"points": int(x.size)})
    if np.any(x < 0) or np.any(np.diff(x) <= 0):
        raise OutOfRange("taus must be non-negative and ascending")

    scale = float(x.max())
    xn = x / scale
    omega = 2 * np.pi * nu * scale

    search = minimize_scalar(
        lambda u: _linear_echo_fit(xn, y, omega, float(np.exp(u)), p)[1],
        bounds=(np.log(1e-3), np.log(1e3)),
        method="bounded",
        options={"xatol": 1e-10},
    )
    t2_start = float(np.exp(search.x))
    coef, _ = _linear_echo_fit(xn, y, omega, t2_start, p)
    degenerate = omega == 0.0

    if degenerate:
        def model(xv: NDArray[np.float64], a: float, t2: float) -> NDArray[np.float64]:
            return a * np.exp(-((xv / t2) ** p))
        p0 = [coef[0], t2_start]
    else:
        def model(xv: NDArray[np.float64], a: float, b: float, t2: float) -> NDArray[np.float64]:  # type: ignore[misc]
            env = np.exp(-((xv / t2) ** p))
            return env * (a * np.cos(omega * xv) + b * np.sin(omega * xv))
        p0 = [coef[0], coef[1], t2_start]

    try:
        popt, _ = curve_fit(model, xn, y, p0=p0, ftol=1e-15, xtol=1e-15, gtol=1e-15, maxfev=20000)
    except (RuntimeError, ValueError) as e:
        raise FitDidNotConverge("echo fit failed", details={"reason": str(e), "t2_start": t2_start * scale})
    if not np.all(np.isfinite(popt)) or popt[-1] <= 0:
        raise FitDidNotConverge("echo fit returned non-physical parameters", details={"params": popt.tolist()})

    a = float(popt[0])
    b = 0.0 if degenerate else float(popt[1])
    residual = float(np.linalg.norm(model(xn, *popt) - y))
    amplitude = float(np.hypot(a, b))
    phase = float(np.arctan2(b, a))
    if degenerate:
        logger.warning("echo scan without modulation: phase is not identifiable", nu=nu)
    return EchoScanResult(x, y, amplitude, float(popt[-1]) * scale, phase, p, nu, residual, degenerate)


def echo_scan(rho0: DensityMatrix, nu: float, decay: DecayModel, taus: NDArray[np.float64]) -> EchoScanResult:
    taus = np.asarray(taus, dtype=float)
    signals = echo_signal(rho0, nu, decay, taus)
    return fit_echo(taus, signals, nu, decay.exponent_p)


class Lifetime(str, Enum):
    WITNESSED = "witnessed"
    ALWAYS_WITNESSED = "always_witnessed"
    UNWITNESSED = "unwitnessed"


@dataclass(frozen=True)
class LifetimeResult:
    status: Lifetime
    tau_star: float


def lifetime_tau_star(T2: float, p: float, C0: float, alpha: float, P: float) -> LifetimeResult:
    """Largest tau with P + C0 exp(-(tau/T2)^p) >= alpha, i.e. T2 (ln(C0/(alpha-P)))^(1/p)."""
    if not T2 > 0:
        raise OutOfRange("T2 must be positive", details={"T2": T2})
    if p < 1:
        raise OutOfRange("p must be >= 1", details={"p": p})
    if C0 < 0:
        raise OutOfRange("C0 must be non-negative", details={"C0": C0})
    if P >= alpha:
        return LifetimeResult(Lifetime.ALWAYS_WITNESSED, float("inf"))
    gap = alpha - P
    if C0 <= gap:
        return LifetimeResult(Lifetime.UNWITNESSED, 0.0)
    return LifetimeResult(Lifetime.WITNESSED, T2 * np.log(C0 / gap) ** (1.0 / p))


def coherence_for_lifetime(tau_star: float, T2: float, p: float, alpha: float, P: float) -> float:
    """C0 for which lifetime_tau_star returns tau_star."""
    if P >= alpha:
        raise OutOfRange("no finite lifetime when P >= alpha", details={"P": P, "alpha": alpha})
    return (alpha - P) * float(np.exp((tau_star / T2) ** p))


Shots = Union[int, float]
SeedLike = Union[int, np.random.Generator]


def _check_shots(shots: Shots) -> None:
    if shots != float("inf") and (int(shots) != shots or shots < 1):
        raise OutOfRange("shots must be a positive integer or inf", details={"shots": shots})


def _generator(seed: SeedLike) -> np.random.Generator:
    # a Generator passes through unchanged, so callers can share one stream
    if isinstance(seed, np.random.Generator):
        return seed
    if seed < 0:
        raise OutOfRange("seed must be non-negative", details={"seed": seed})
    return np.random.default_rng(seed)


def sample_shots(expectation: float, shots: Shots, seed: SeedLike) -> float:
    """Mean of ``shots`` +/-1 outcomes with P(+1) = (1 + s)/2; shots=inf returns s."""
    _check_shots(shots)
    if not -1.0 - 1e-12 <= expectation <= 1.0 + 1e-12:
        raise OutOfRange("expectation must lie in [-1, 1]", details={"expectation": expectation})
    s = float(np.clip(expectation, -1.0, 1.0))
    if shots == float("inf"):
        return s
    n = int(shots)
    k = _generator(seed).binomial(n, (1.0 + s) / 2.0)
    return (2 * k - n) / n


def sample_fidelity(value: float, shots: Shots, seed: SeedLike) -> float:
    """Projector outcome frequency for a fidelity in [0, 1]."""
    _check_shots(shots)
    if not -1e-12 <= value <= 1.0 + 1e-12:
        raise OutOfRange("fidelity must lie in [0, 1]", details={"fidelity": value})
    f = float(np.clip(value, 0.0, 1.0))
    if shots == float("inf"):
        return f
    return _generator(seed).binomial(int(shots), f) / int(shots)


@dataclass(frozen=True)
class Dephasing:
    gammas: tuple[float, ...]


@dataclass(frozen=True)
class Depolarizing:
    p: float


@dataclass(frozen=True)
class LocalZ:
    angles: tuple[float, ...]


Channel = Union[Dephasing, Depolarizing, LocalZ]


def apply_channel(rho: DensityMatrix, channel: Channel) -> DensityMatrix:
    n = rho.n
    if isinstance(channel, Dephasing):
        gammas = np.asarray(channel.gammas, dtype=float)
        if gammas.size != n:
            raise DimensionMismatch("one dephasing strength per qubit", details={"n": n, "got": int(gammas.size)})
        if np.any((gammas < 0) | (gammas > 1)):
            raise OutOfRange("dephasing strengths must lie in [0, 1]", details={"gammas": gammas.tolist()})
        idx = np.arange(rho.dim)
        bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
        differ = bits[:, None, :] != bits[None, :, :]
        factors = np.prod(np.where(differ, 1.0 - gammas, 1.0), axis=2)
        return DensityMatrix(rho.matrix * factors)
    if isinstance(channel, Depolarizing):
        if not 0.0 <= channel.p <= 1.0:
            raise OutOfRange("depolarizing probability must lie in [0, 1]", details={"p": channel.p})
        mixed = np.eye(rho.dim) / rho.dim
        return DensityMatrix((1 - channel.p) * rho.matrix + channel.p * mixed)
    if isinstance(channel, LocalZ):
        if len(channel.angles) != n:
            raise DimensionMismatch("one angle per qubit", details={"n": n, "got": len(channel.angles)})
        return DensityMatrix(conjugate(rho.matrix, local_z_unitary(channel.angles)))
    raise OutOfRange(f"unknown channel {type(channel).__name__}")


def init_polarization(N: int, p1: float, lam: float) -> float:
    return 1.0 - (1.0 - p1) * lam ** (N - 1)


def init_purity(N: int, p1: float, lam: float) -> DensityMatrix:
    """Two-qubit product state after N initialisation rounds, polarisation q(N) per qubit."""
    if N < 1:
        raise OutOfRange("N must be >= 1", details={"N": N})
    if not 0.0 < p1 <= 1.0:
        raise OutOfRange("p1 must lie in (0, 1]", details={"p1": p1})
    if not 0.0 <= lam < 1.0:
        raise OutOfRange("lam must lie in [0, 1)", details={"lam": lam})
    q = init_polarization(N, p1, lam)
    single = np.diag([(1 + q) / 2, (1 - q) / 2]).astype(np.complex128)
    return DensityMatrix(kron_all([single, single]))


def entangle(rho: DensityMatrix) -> DensityMatrix:
    """Hadamard on qubit 1 then CNOT(1 -> 2); maps |00> to Phi+."""
    hadamard = (SX + SZ) / np.sqrt(2)
    cnot = np.eye(4, dtype=np.complex128)[[0, 1, 3, 2]]
    return DensityMatrix(conjugate(rho.matrix, cnot @ embed(hadamard, 1, 2)))
