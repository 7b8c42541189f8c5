import numpy as np
import pytest

from echotomo.bell import (
    chsh_s,
    correlation_from_counts,
    expected_correlation,
    horodecki_max,
    maximal_violation_settings,
)
from echotomo.source import werner_state
from echotomo.states import ContractViolation, MeasurementSetting, phi_plus
from echotomo.tomography import CoincidenceRecord, SettingPair


def _record(counts):
    return CoincidenceRecord(SettingPair.from_labels("x", "x"), np.asarray(counts, float))


def test_correlation_from_counts():
    assert correlation_from_counts(_record([50, 0, 0, 50])) == pytest.approx(1.0)
    assert correlation_from_counts(_record([0, 50, 50, 0])) == pytest.approx(-1.0)
    assert correlation_from_counts(_record([25, 25, 25, 25])) == pytest.approx(0.0)
    assert correlation_from_counts(_record([30, 10, 10, 30])) == pytest.approx(0.5)


def test_expected_correlation_on_bell_state():
    rho = phi_plus().density()
    x = MeasurementSetting.from_label("x")
    y = MeasurementSetting.from_label("y")
    z = MeasurementSetting.from_label("z")
    assert expected_correlation(rho, x, x) == pytest.approx(1.0)
    assert expected_correlation(rho, y, y) == pytest.approx(-1.0)
    assert expected_correlation(rho, z, z) == pytest.approx(1.0)
    assert expected_correlation(rho, x, y) == pytest.approx(0.0, abs=1e-12)


def test_chsh_s_range_check():
    assert chsh_s(1, -1, 1, 1) == pytest.approx(4.0)  # algebraic maximum
    with pytest.raises(ContractViolation):
        chsh_s(1.1, 0, 0, 0)


def test_maximal_violation_settings_reach_tsirelson():
    rho = phi_plus().density()
    s = maximal_violation_settings()
    value = chsh_s(
        expected_correlation(rho, s.a, s.b),
        expected_correlation(rho, s.a, s.b_prime),
        expected_correlation(rho, s.a_prime, s.b),
        expected_correlation(rho, s.a_prime, s.b_prime),
    )
    assert value == pytest.approx(2 * np.sqrt(2), abs=1e-12)


def test_horodecki_max():
    assert horodecki_max(phi_plus().density()) == pytest.approx(2 * np.sqrt(2))
    # Werner states scale the correlation matrix by V
    v = 0.8
    assert horodecki_max(werner_state(v)) == pytest.approx(2 * np.sqrt(2) * v)
    # classical bound is not exceeded below V = 1/sqrt(2)
    assert horodecki_max(werner_state(0.5)) < 2.0
