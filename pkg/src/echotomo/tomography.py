"""Two-qubit state reconstruction from coincidence counts.

Each measured record holds the four coincidence counts C(+-a, +-b) of a
joint projection setting.  The data enter the fit only through pairwise
normalized probabilities C(a,b)/(C(a,b)+C(a,-b)) conditioned on the
first photon's outcome, plus the first-photon outcome split when that
photon was analyzed in the z (time-of-arrival) basis.  The density matrix
is parameterized as T^dag T / tr(T^dag T) with T lower triangular, so the
result is positive semidefinite and unit trace by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .states import (
    ContractViolation,
    DensityMatrix,
    MeasurementSetting,
    PAULI,
    projector,
)

__all__ = [
    "SettingPair",
    "CoincidenceRecord",
    "TomographyResult",
    "TomographyConfig",
    "normalized_probability",
    "expected_conditional",
    "linear_inversion",
    "mle_reconstruct",
    "estimate_pauli_expectations",
]

_I2 = np.eye(2, dtype=complex)

# index order of the four counts in a record
C_AB, C_AnB, C_nAB, C_nAnB = 0, 1, 2, 3


@dataclass(frozen=True)
class SettingPair:
    """Base observables (a on the 795 nm photon, b on the 1532 nm photon)."""

    a: MeasurementSetting
    b: MeasurementSetting

    @classmethod
    def from_labels(cls, a: str, b: str) -> "SettingPair":
        return cls(MeasurementSetting.from_label(a), MeasurementSetting.from_label(b))


@dataclass(frozen=True)
class CoincidenceRecord:
    """Setting pair plus counts [C(a,b), C(a,-b), C(-a,b), C(-a,-b)].

    Counts may be non-integer when synthesized from published
    probabilities; they are treated as Poisson means in that case.
    """

    settings: SettingPair
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float).reshape(4)
        if np.any(c < 0):
            raise ContractViolation("coincidence counts must be non-negative")
        if c.sum() <= 0:
            raise ContractViolation("record must contain at least one count")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)


@dataclass(frozen=True)
class TomographyResult:
    rho: DensityMatrix
    neg_log_likelihood: float
    iterations: int
    converged: bool
    restarts_used: int = 1


@dataclass(frozen=True)
class TomographyConfig:
    max_iterations: int = 5000
    restarts: int = 5
    rel_tol: float = 1e-10
    step_tol: float = 1e-9
    restart_scale: float = 0.005
    restart_seed: int = 0
    # "simplex" for cold starts; warm-started refits use "gradient"
    # (quasi-Newton), which stays put along the likelihood's flat
    # directions instead of random-walking along them
    method: str = "simplex"


def normalized_probability(c_ab, c_a_negb) -> float:
    """Pairwise normalized joint-detection probability C(a,b)/(C(a,b)+C(a,-b))."""
    if c_ab < 0 or c_a_negb < 0:
        raise ContractViolation("counts must be non-negative")
    total = c_ab + c_a_negb
    if total <= 0:
        raise ContractViolation("cannot normalize an empty count pair")
    return c_ab / total


def expected_conditional(rho: DensityMatrix, a: MeasurementSetting, sa, b: MeasurementSetting, sb) -> float:
    """Model counterpart of the normalized probability:
    tr[rho (Pi_a x Pi_b)] / tr[rho (Pi_a x I)]."""
    pa = np.kron(projector(a, sa), _I2)
    joint = np.kron(projector(a, sa), projector(b, sb))
    den = float(np.trace(rho.matrix @ pa).real)
    if den <= 1e-12:
        raise ContractViolation("conditioning probability vanishes for this setting")
    p = float(np.trace(rho.matrix @ joint).real) / den
    return min(max(p, 0.0), 1.0)


def linear_inversion(pauli_expectations) -> np.ndarray:
    """Direct Pauli-expansion estimate of rho from a 4x4 expectation table.

    ``pauli_expectations[i, j]`` is <sigma_i x sigma_j> with index order
    (I, x, y, z); the [0, 0] identity entry is fixed at 1.  The result is
    Hermitian and unit trace but may be non-PSD.
    """
    exp = np.asarray(pauli_expectations, dtype=float)
    if exp.shape != (4, 4):
        raise ContractViolation("expected a 4x4 Pauli expectation table")
    if abs(exp[0, 0] - 1.0) > 1e-12:
        raise ContractViolation("identity term must equal 1")
    if np.any(np.abs(exp) > 1.0 + 1e-12):
        bad = np.argwhere(np.abs(exp) > 1.0 + 1e-12)[0]
        raise ContractViolation(
            f"Pauli expectation at {tuple(bad)} outside [-1, 1]: {exp[tuple(bad)]}"
        )
    ops = [_I2, PAULI["x"], PAULI["y"], PAULI["z"]]
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            rho += exp[i, j] * np.kron(ops[i], ops[j]) / 4
    return rho


def _axis_index(setting: MeasurementSetting):
    """Map a Bloch vector to (axis 0..2, sign) when it is +-x/y/z."""
    for k, axis in enumerate(np.eye(3)):
        d = float(np.dot(setting.bloch, axis))
        if abs(abs(d) - 1.0) < 1e-9:
            return k, 1 if d > 0 else -1
    return None


def _is_z(setting: MeasurementSetting) -> bool:
    ax = _axis_index(setting)
    return ax is not None and ax[0] == 2


def estimate_pauli_expectations(records) -> np.ndarray:
    """Moment-based expectation table used to seed the likelihood fit.

    Pairwise-normalized data cannot fix the first-photon x/y marginals;
    those stay at zero (the likelihood is flat along them), which matches
    the symmetric time-bin analyzers.
    """
    exp = np.zeros((4, 4))
    exp[0, 0] = 1.0
    num = np.zeros((4, 4))
    cnt = np.zeros((4, 4))

    # first pass: conditionals v(a_sign) = 2 P(b+|a_sign) - 1 per axis pair
    cond = {}
    for rec in records:
        ia = _axis_index(rec.settings.a)
        ib = _axis_index(rec.settings.b)
        if ia is None or ib is None:
            continue
        (ka, sa), (kb, sb) = ia, ib
        for slot, s in ((0, sa), (2, -sa)):
            tot = rec.counts[slot] + rec.counts[slot + 1]
            if tot > 0:
                v = sb * (2 * rec.counts[slot] / tot - 1)
                key = (ka, s, kb)
                w0, v0 = cond.get(key, (0.0, 0.0))
                cond[key] = (w0 + tot, v0 + tot * v)
    cond = {k: v / w for k, (w, v) in cond.items()}

    # z rows fix the second-photon marginals n_b and the T_{z,b} row
    for kb in range(3):
        up = cond.get((2, 1, kb))
        dn = cond.get((2, -1, kb))
        if up is not None and dn is not None:
            exp[0, kb + 1] = (up + dn) / 2
            exp[3, kb + 1] = (up - dn) / 2
        elif up is not None:
            exp[3, kb + 1] = up
        elif dn is not None:
            exp[3, kb + 1] = -dn
    # remaining rows: T_{a,b} = v(a+) - n_b (zero first-photon marginal)
    for (ka, s, kb), v in cond.items():
        if ka == 2:
            continue
        num[ka + 1, kb + 1] += s * (v - exp[0, kb + 1])
        cnt[ka + 1, kb + 1] += 1
    mask = cnt > 0
    exp[mask] = num[mask] / cnt[mask]
    # first-photon z marginal from time-of-arrival splits, when present
    wz = vz = 0.0
    for rec in records:
        if _is_z(rec.settings.a):
            tot = rec.counts.sum()
            plus = rec.counts[C_AB] + rec.counts[C_AnB]
            if rec.counts[C_nAB] + rec.counts[C_nAnB] > 0 and plus > 0:
                wz += tot
                vz += tot * (2 * plus / tot - 1)
    if wz > 0:
        exp[3, 0] = vz / wz
    return np.clip(exp, -1.0, 1.0)


def _informationally_complete(records) -> bool:
    axes_a, axes_b = set(), set()
    for rec in records:
        ia, ib = _axis_index(rec.settings.a), _axis_index(rec.settings.b)
        if ia is not None and ib is not None:
            axes_a.add(ia[0])
            axes_b.add(ib[0])
    return len(axes_a) == 3 and len(axes_b) == 3


_TRIL_ROWS = [1, 2, 2, 3, 3, 3]
_TRIL_COLS = [0, 0, 1, 0, 1, 2]


def _rho_from_params(t: np.ndarray) -> np.ndarray:
    T = np.zeros((4, 4), dtype=complex)
    T[np.diag_indices(4)] = t[:4]
    off = t[4:].reshape(6, 2)
    T[_TRIL_ROWS, _TRIL_COLS] = off[:, 0] + 1j * off[:, 1]
    rho = T.conj().T @ T
    tr = np.trace(rho).real
    if tr <= 0:
        return np.eye(4, dtype=complex) / 4
    return rho / tr


def _params_from_rho(rho: np.ndarray) -> np.ndarray:
    """Lower-triangular T with T^dag T = rho (ridge keeps Cholesky defined)."""
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    ridge = max(1e-10, -float(w.min()) + 1e-10)
    from scipy.linalg import cholesky

    u = cholesky(rho + ridge * np.eye(4), lower=False)  # rho = u^dag u
    T = u.conj().T
    params = np.empty(16)
    params[:4] = np.real(np.diag(T))
    params[4::2] = np.real(T[_TRIL_ROWS, _TRIL_COLS])
    params[5::2] = np.imag(T[_TRIL_ROWS, _TRIL_COLS])
    return params


def _likelihood_terms(records):
    """Stack the binomial splits as flattened numerator/denominator operators."""
    nums, dens, ks, ns = [], [], [], []
    for rec in records:
        a, b = rec.settings.a, rec.settings.b
        pb = projector(b, 1)
        for slot, sa in ((C_AB, 1), (C_nAB, -1)):
            total = rec.counts[slot] + rec.counts[slot + 1]
            if total <= 0:
                continue
            pa = projector(a, sa)
            nums.append(np.kron(pa, pb))
            dens.append(np.kron(pa, _I2))
            ks.append(rec.counts[slot])
            ns.append(total)
        # time-of-arrival split of the first photon
        if _is_z(a):
            plus = rec.counts[C_AB] + rec.counts[C_AnB]
            minus = rec.counts[C_nAB] + rec.counts[C_nAnB]
            if plus > 0 and minus > 0:
                nums.append(np.kron(projector(a, 1), _I2))
                dens.append(np.eye(4, dtype=complex))
                ks.append(plus)
                ns.append(plus + minus)
    # tr(rho op) = op.T.ravel() . rho.ravel()
    num_mat = np.array([m.T.ravel() for m in nums])
    den_mat = np.array([m.T.ravel() for m in dens])
    return num_mat, den_mat, np.array(ks), np.array(ns)


def mle_reconstruct(records, config: TomographyConfig | None = None, initial: DensityMatrix | None = None) -> TomographyResult:
    """Maximum-likelihood density matrix from coincidence records.

    Minimizes the binomial negative log-likelihood of the pairwise count
    splits with a derivative-free simplex over the 16 Cholesky parameters.
    ``initial`` overrides the linear-inversion start (and disables the
    random restarts), which the Monte-Carlo resampler uses for warm starts.
    """
    config = config or TomographyConfig()
    records = list(records)
    if not records:
        raise ContractViolation("no records supplied")
    if not _informationally_complete(records):
        raise ContractViolation(
            "records are informationally incomplete: need all three analyzer "
            "axes on both photons"
        )
    num_mat, den_mat, ks, ns = _likelihood_terms(records)
    eps = 1e-12

    def nll(t):
        rho = _rho_from_params(t).ravel()
        pn = (num_mat @ rho).real
        pd = (den_mat @ rho).real
        p = np.clip(pn / np.maximum(pd, 1e-300), eps, 1 - eps)
        return -float(np.sum(ks * np.log(p) + (ns - ks) * np.log1p(-p)))

    if initial is not None:
        starts = [_params_from_rho(initial.matrix)]
    else:
        rho_lin = linear_inversion(estimate_pauli_expectations(records))
        w, v = np.linalg.eigh((rho_lin + rho_lin.conj().T) / 2)
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        t0 = _params_from_rho((v * w) @ v.conj().T)
        rng = np.random.Generator(np.random.Philox(key=config.restart_seed))
        starts = [t0]
        scale = config.restart_scale * (np.linalg.norm(t0) + 1e-3)
        for _ in range(max(0, config.restarts - 1)):
            starts.append(t0 + rng.normal(scale=scale, size=16))

    best = None
    for idx, start in enumerate(starts):
        if config.method == "gradient":
            res = minimize(
                nll,
                start,
                method="L-BFGS-B",
                options=dict(maxiter=config.max_iterations, ftol=1e-12, gtol=1e-8),
            )
        else:
            f0 = nll(start)
            res = minimize(
                nll,
                start,
                method="Nelder-Mead",
                options=dict(
                    maxiter=config.max_iterations,
                    maxfev=4 * config.max_iterations,
                    xatol=config.step_tol,
                    fatol=config.rel_tol * max(1.0, abs(f0)),
                    adaptive=True,
                ),
            )
            # quasi-Newton polish: pins the simplex endpoint to the optimum
            # along the identifiable directions without drifting further
            polish = minimize(
                nll, res.x, method="L-BFGS-B", options=dict(maxiter=200, ftol=1e-14, gtol=1e-10)
            )
            if polish.fun <= res.fun:
                polish.nit += res.nit
                polish.success = polish.success or res.success
                res = polish
        if best is None or res.fun < best[0] - 1e-12:
            best = (res.fun, idx, res)
    fun, idx, res = best
    rho = DensityMatrix.from_array(_rho_from_params(res.x))
    return TomographyResult(
        rho=rho,
        neg_log_likelihood=float(fun),
        iterations=int(res.nit),
        converged=bool(res.success),
        restarts_used=len(starts),
    )
