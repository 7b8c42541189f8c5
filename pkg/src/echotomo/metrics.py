"""Entanglement measures for two-qubit states."""

from __future__ import annotations

import numpy as np

from .states import ContractViolation, DensityMatrix, SIGMA_Y

__all__ = [
    "concurrence",
    "binary_entropy",
    "entanglement_of_formation",
    "s_theoretical",
]

_YY = np.kron(SIGMA_Y, SIGMA_Y)


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence max{0, l1 - l2 - l3 - l4}.

    The l_i are the decreasing square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy).  The product matrix is similar to a PSD
    matrix, so its eigenvalues are real up to float noise; imaginary parts
    beyond 1e-9 indicate an invalid input.
    """
    m = rho.matrix @ _YY @ rho.matrix.conj() @ _YY
    ev = np.linalg.eigvals(m)
    if np.max(np.abs(ev.imag)) > 1e-9:
        raise ContractViolation(
            f"spin-flip spectrum has imaginary part {np.max(np.abs(ev.imag))}"
        )
    lam = np.sqrt(np.clip(np.sort(ev.real)[::-1], 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(x: float) -> float:
    """H(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 := 0."""
    if x < 0.0 or x > 1.0:
        raise ContractViolation(f"binary entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def entanglement_of_formation(rho: DensityMatrix) -> float:
    """E_F = H(1/2 + 1/2 sqrt(1 - C^2)) with C the concurrence."""
    c = concurrence(rho)
    return binary_entropy(0.5 + 0.5 * np.sqrt(max(0.0, 1.0 - c * c)))


def s_theoretical(rho: DensityMatrix) -> float:
    """Concurrence-predicted optimum CHSH value 2 sqrt(1 + C^2)."""
    c = concurrence(rho)
    return float(2.0 * np.sqrt(1.0 + c * c))
