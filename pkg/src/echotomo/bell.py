"""CHSH Bell-test arithmetic: correlation coefficients and S values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import ContractViolation, DensityMatrix, MeasurementSetting
from .tomography import CoincidenceRecord

__all__ = [
    "ChshSettings",
    "correlation_from_counts",
    "expected_correlation",
    "chsh_s",
    "horodecki_max",
    "maximal_violation_settings",
]


@dataclass(frozen=True)
class ChshSettings:
    a: MeasurementSetting
    a_prime: MeasurementSetting
    b: MeasurementSetting
    b_prime: MeasurementSetting


def maximal_violation_settings() -> ChshSettings:
    """Settings that reach 2 sqrt(2) on (|e,e> + |l,l>)/sqrt(2):
    a = sy, a' = sx, b = (sx - sy)/sqrt(2), b' = (sx + sy)/sqrt(2)."""
    return ChshSettings(
        a=MeasurementSetting.from_label("y"),
        a_prime=MeasurementSetting.from_label("x"),
        b=MeasurementSetting.from_label("x-y"),
        b_prime=MeasurementSetting.from_label("x+y"),
    )


def correlation_from_counts(record: CoincidenceRecord) -> float:
    """E = (C(a,b) - C(a,-b) - C(-a,b) + C(-a,-b)) / total."""
    c = record.counts
    total = float(c.sum())
    if total <= 0:
        raise ContractViolation("cannot form a correlation from zero counts")
    return float((c[0] - c[1] - c[2] + c[3]) / total)


def expected_correlation(rho: DensityMatrix, a: MeasurementSetting, b: MeasurementSetting) -> float:
    """Born-rule correlation tr[rho (a.sigma x b.sigma)]."""
    op = np.kron(a.operator(), b.operator())
    return float(np.trace(rho.matrix @ op).real)


def chsh_s(e_ab: float, e_abp: float, e_apb: float, e_apbp: float) -> float:
    """|E(a,b) - E(a,b') + E(a',b) + E(a',b')|."""
    for v in (e_ab, e_abp, e_apb, e_apbp):
        if abs(v) > 1.0 + 1e-12:
            raise ContractViolation(f"correlation coefficient {v} outside [-1, 1]")
    return float(abs(e_ab - e_abp + e_apb + e_apbp))


def horodecki_max(rho: DensityMatrix) -> float:
    """Largest CHSH value reachable on rho over all settings:
    2 sqrt(t1^2 + t2^2) from the two largest singular values of the
    Pauli correlation matrix."""
    from .states import PAULI

    t = np.empty((3, 3))
    for i, si in enumerate("xyz"):
        for j, sj in enumerate("xyz"):
            op = np.kron(PAULI[si], PAULI[sj])
            t[i, j] = np.trace(rho.matrix @ op).real
    sv = np.linalg.svd(t, compute_uv=False)
    return float(2.0 * np.sqrt(sv[0] ** 2 + sv[1] ** 2))
