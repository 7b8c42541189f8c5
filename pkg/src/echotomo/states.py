"""Two-qubit states, projection operators and state comparison measures.

Basis ordering is fixed as (|e,e>, |e,l>, |l,e>, |l,l>) with the early
time bin playing the role of |0>.  All operations are pure functions over
immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULI",
    "PureState",
    "DensityMatrix",
    "MeasurementSetting",
    "phi_plus",
    "projector",
    "born_joint",
    "fidelity",
    "purity",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# PSD repairs clip eigenvalues down to this magnitude; anything more
# negative is treated as bad data rather than float noise.
PSD_TOLERANCE = 1e-9


class ContractViolation(ValueError):
    """An input breaks a documented precondition (bad state, bad range)."""


def _check_sign(sign) -> int:
    s = int(sign)
    if s not in (-1, 1):
        raise ContractViolation(f"outcome sign must be +1 or -1, got {sign!r}")
    return s


@dataclass(frozen=True)
class PureState:
    """Pure two-qubit state as amplitudes over (ee, el, le, ll)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(4)
        object.__setattr__(self, "amplitudes", amp)
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ContractViolation(f"pure state not normalized: |psi|^2 = {norm}")
        amp.setflags(write=False)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 Hermitian, unit-trace, PSD density matrix of the photon pair."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ContractViolation(f"density matrix must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ContractViolation("density matrix not Hermitian within 1e-10")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-10:
            raise ContractViolation(f"density matrix trace {tr} != 1 within 1e-10")
        eigmin = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if eigmin < -PSD_TOLERANCE:
            raise ContractViolation(f"density matrix not PSD: min eigenvalue {eigmin}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(4, dtype=complex) / 4)

    @classmethod
    def from_array(cls, m, repair: bool = True) -> "DensityMatrix":
        """Build from a nearly-valid array, symmetrizing and clipping
        eigenvalues in [-1e-9, 0) to zero.  Larger violations still raise."""
        m = np.asarray(m, dtype=complex)
        if repair:
            h = (m + m.conj().T) / 2
            w, v = np.linalg.eigh(h)
            if w.min() < -PSD_TOLERANCE:
                raise ContractViolation(
                    f"cannot repair matrix with min eigenvalue {w.min()}"
                )
            w = np.clip(w, 0.0, None)
            h = (v * w) @ v.conj().T
            h /= np.trace(h).real
            m = h
        return cls(m)

    def to_json(self) -> list:
        """Row-major 4x4 array of [re, im] pairs."""
        return [[[z.real, z.imag] for z in row] for row in self.matrix]

    @classmethod
    def from_json(cls, data) -> "DensityMatrix":
        m = np.array([[complex(re, im) for re, im in row] for row in data])
        return cls(m)


@dataclass(frozen=True)
class MeasurementSetting:
    """Single-qubit observable given as a unit Bloch vector.

    The vector (nx, ny, nz) defines the observable n . sigma; its +1
    eigenstate is cos(polar/2)|e> + sin(polar/2) e^{i azimuth}|l>.
    """

    bloch: np.ndarray
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = np.asarray(self.bloch, dtype=float).reshape(3)
        norm = float(np.linalg.norm(n))
        if abs(norm - 1.0) > 1e-12:
            raise ContractViolation(f"Bloch vector norm {norm} != 1 within 1e-12")
        n.setflags(write=False)
        object.__setattr__(self, "bloch", n)

    _AXES = {
        "x": (1.0, 0.0, 0.0),
        "y": (0.0, 1.0, 0.0),
        "z": (0.0, 0.0, 1.0),
        "x+y": (1 / np.sqrt(2), 1 / np.sqrt(2), 0.0),
        "x-y": (1 / np.sqrt(2), -1 / np.sqrt(2), 0.0),
    }

    @classmethod
    def from_label(cls, label: str) -> "MeasurementSetting":
        """Parse labels like "x", "-z" or "x+y" into settings."""
        base = label.strip()
        sign = 1.0
        if base.startswith("-"):
            sign, base = -1.0, base[1:]
        if base not in cls._AXES:
            raise ContractViolation(
                f"unknown setting label {label!r}; expected one of "
                f"{sorted(cls._AXES)} with optional leading '-'"
            )
        return cls(sign * np.array(cls._AXES[base]), label=label)

    def operator(self) -> np.ndarray:
        nx, ny, nz = self.bloch
        return nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z

    def rotated_about_z(self, angle: float) -> "MeasurementSetting":
        """Rotate the Bloch vector about the z axis (equatorial phase offset)."""
        c, s = np.cos(angle), np.sin(angle)
        nx, ny, nz = self.bloch
        return MeasurementSetting(np.array([c * nx - s * ny, s * nx + c * ny, nz]))


def phi_plus() -> PureState:
    """Maximally entangled (|e,e> + |l,l>)/sqrt(2)."""
    return PureState(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))


def projector(setting: MeasurementSetting, outcome) -> np.ndarray:
    """Rank-1 projector (I + outcome * n.sigma)/2 onto the outcome eigenstate."""
    s = _check_sign(outcome)
    return (np.eye(2, dtype=complex) + s * setting.operator()) / 2


def born_joint(rho: DensityMatrix, a: MeasurementSetting, sa, b: MeasurementSetting, sb) -> float:
    """Joint outcome probability tr[rho (Pi_a x Pi_b)], clipped to [0, 1]."""
    op = np.kron(projector(a, sa), projector(b, sb))
    p = float(np.trace(rho.matrix @ op).real)
    if p < -1e-9 or p > 1 + 1e-9:
        raise ContractViolation(f"Born probability {p} outside [0,1] beyond tolerance")
    return min(max(p, 0.0), 1.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    h = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(h)
    if w.min() < -PSD_TOLERANCE:
        raise ContractViolation(f"matrix square root of non-PSD input (eigmin {w.min()})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    sr = _psd_sqrt(rho.matrix)
    inner = _psd_sqrt(sr @ sigma.matrix @ sr)
    f = float(np.trace(inner).real) ** 2
    return min(max(f, 0.0), 1.0)


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2); 1 for pure states, 1/4 for the maximally mixed state."""
    return float(np.trace(rho.matrix @ rho.matrix).real)
