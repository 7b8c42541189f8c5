"""Simulation and analysis toolkit for AFC photon-echo storage of
time-bin entangled photon pairs: comb/echo waveform modeling, two-qubit
state tomography, entanglement metrics, CHSH tests and Poissonian
Monte-Carlo uncertainty propagation."""

from .states import (
    DensityMatrix,
    MeasurementSetting,
    PureState,
    born_joint,
    fidelity,
    phi_plus,
    projector,
    purity,
)
from .afc import (
    AfcComb,
    DickeEnsemble,
    PulseWaveform,
    analytic_efficiency,
    comb_profile,
    dicke_amplitude,
    storage_time,
    store_qubit,
)
from .metrics import binary_entropy, concurrence, entanglement_of_formation, s_theoretical
from .bell import ChshSettings, chsh_s, correlation_from_counts, expected_correlation, horodecki_max
from .tomography import (
    CoincidenceRecord,
    SettingPair,
    TomographyConfig,
    TomographyResult,
    expected_conditional,
    linear_inversion,
    mle_reconstruct,
    normalized_probability,
)
from .source import SourceConfig, source_state, synthesize_counts, werner_state
from .montecarlo import McConfig, McReport, poisson_resample

__version__ = "0.1.0"
