import numpy as np
import pytest

from echotomo.source import synthesize_counts, werner_state
from echotomo.states import (
    ContractViolation,
    DensityMatrix,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    MeasurementSetting,
    phi_plus,
)
from echotomo.tomography import (
    CoincidenceRecord,
    SettingPair,
    TomographyConfig,
    estimate_pauli_expectations,
    expected_conditional,
    linear_inversion,
    mle_reconstruct,
    normalized_probability,
)

XYZ_PAIRS = [SettingPair.from_labels(a, b) for a in "xyz" for b in "xyz"]


def _pauli_table(rho: DensityMatrix) -> np.ndarray:
    ops = [np.eye(2, dtype=complex), SIGMA_X, SIGMA_Y, SIGMA_Z]
    exp = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            exp[i, j] = np.trace(rho.matrix @ np.kron(ops[i], ops[j])).real
    return exp


def test_record_validation():
    pair = SettingPair.from_labels("x", "x")
    with pytest.raises(ContractViolation):
        CoincidenceRecord(pair, np.array([1.0, -1.0, 0.0, 0.0]))
    with pytest.raises(ContractViolation):
        CoincidenceRecord(pair, np.zeros(4))
    rec = CoincidenceRecord(pair, [1, 2, 3, 4])
    assert rec.counts.dtype == float


def test_normalized_probability():
    assert normalized_probability(30, 10) == pytest.approx(0.75)
    with pytest.raises(ContractViolation):
        normalized_probability(0, 0)
    with pytest.raises(ContractViolation):
        normalized_probability(-1, 2)


def test_expected_conditional_on_bell_state():
    rho = phi_plus().density()
    x = MeasurementSetting.from_label("x")
    y = MeasurementSetting.from_label("y")
    # P(b=+x | a=+x) = 1 on the Bell state
    assert expected_conditional(rho, x, 1, x, 1) == pytest.approx(1.0)
    assert expected_conditional(rho, x, 1, y, 1) == pytest.approx(0.5)
    # conditioning on a zero-probability branch is rejected
    ee = DensityMatrix(np.diag([1.0, 0, 0, 0]).astype(complex))
    z = MeasurementSetting.from_label("z")
    with pytest.raises(ContractViolation):
        expected_conditional(ee, z, -1, z, 1)


def test_linear_inversion_exact_on_bell_state():
    rho = phi_plus().density()
    assert np.max(np.abs(linear_inversion(_pauli_table(rho)) - rho.matrix)) < 1e-12


def test_linear_inversion_validation():
    bad = np.zeros((4, 4))
    with pytest.raises(ContractViolation):
        linear_inversion(bad)  # identity entry must be 1
    bad[0, 0] = 1.0
    bad[1, 1] = 1.5
    with pytest.raises(ContractViolation):
        linear_inversion(bad)  # out of range


def test_estimate_pauli_expectations_from_exact_counts():
    rho = werner_state(0.8)
    records = synthesize_counts(rho, XYZ_PAIRS, 1e6, exact=True)
    est = estimate_pauli_expectations(records)
    truth = _pauli_table(rho)
    # diagonal correlations and second-photon marginals are recovered;
    # first-photon x/y marginals are pinned at zero by construction
    assert np.allclose(np.diag(est)[1:], np.diag(truth)[1:], atol=1e-4)
    assert np.allclose(est[0, 1:], truth[0, 1:], atol=1e-4)
    assert est[1, 0] == 0.0 and est[2, 0] == 0.0
    assert est[3, 0] == pytest.approx(truth[3, 0], abs=1e-4)


def test_mle_requires_informationally_complete_records():
    partial = [
        CoincidenceRecord(SettingPair.from_labels(a, b), [10, 10, 10, 10])
        for a, b in (("x", "x"), ("y", "y"))
    ]
    with pytest.raises(ContractViolation):
        mle_reconstruct(partial)
    with pytest.raises(ContractViolation):
        mle_reconstruct([])


def test_mle_round_trip_on_werner_state():
    rho = werner_state(0.7667)
    records = synthesize_counts(rho, XYZ_PAIRS, 1e6, exact=True)
    fit = mle_reconstruct(records, config=TomographyConfig(method="gradient", restarts=1))
    dist = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(fit.rho.matrix - rho.matrix)))
    assert dist < 1e-3
    assert fit.converged
    assert fit.neg_log_likelihood > 0


def test_mle_is_deterministic():
    rho = werner_state(0.7)
    rng = np.random.default_rng(3)
    records = synthesize_counts(rho, XYZ_PAIRS, 2000, rng=rng)
    a = mle_reconstruct(records)
    b = mle_reconstruct(records)
    assert np.array_equal(a.rho.matrix, b.rho.matrix)
    assert a.neg_log_likelihood == b.neg_log_likelihood


def test_mle_warm_start_disables_restarts():
    rho = werner_state(0.7)
    records = synthesize_counts(rho, XYZ_PAIRS, 1e5, exact=True)
    warm = mle_reconstruct(records, config=TomographyConfig(method="gradient", restarts=1))
    refit = mle_reconstruct(
        records,
        config=TomographyConfig(method="gradient", max_iterations=500),
        initial=warm.rho,
    )
    assert refit.restarts_used == 1
    assert np.max(np.abs(refit.rho.matrix - warm.rho.matrix)) < 1e-6


def test_mle_result_is_physical():
    # noisy low-count data must still yield a PSD unit-trace state
    rng = np.random.default_rng(11)
    records = synthesize_counts(werner_state(0.9), XYZ_PAIRS, 50, rng=rng)
    fit = mle_reconstruct(records, config=TomographyConfig(method="gradient", restarts=1))
    w = np.linalg.eigvalsh(fit.rho.matrix)
    assert w.min() >= -1e-9
    assert np.trace(fit.rho.matrix).real == pytest.approx(1.0)
