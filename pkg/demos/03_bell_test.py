"""CHSH Bell tests: measured correlation fixtures vs model predictions.

The correlation fixtures hold the four coefficients measured before and
after storage; their CHSH combination exceeds the classical bound of 2
in both cases.  The same module predicts the optimum reachable on the
reconstructed states.
"""

import numpy as np

from echotomo import bell, dataio, metrics, tomography
from echotomo.pipeline import _bell_correlations
from echotomo.states import phi_plus

for tag, name in (("before storage", "table_s2_in"), ("after storage", "table_s2_out")):
    records = dataio.ingest(dataio.fixture_path(name))
    e, labels = _bell_correlations(records)
    s = bell.chsh_s(e["ab"], e["abp"], e["apb"], e["apbp"])
    print(f"\n{tag}:")
    for key in ("ab", "abp", "apb", "apbp"):
        pair = labels[key]
        print(f"  E({pair['a']:>3s}, {pair['b']:>3s}) = {e[key]:+.3f}")
    print(f"  S = {s:.3f}  (classical bound 2, quantum bound {2 * np.sqrt(2):.3f})")

# reachable optimum on the reconstructed input state
records = dataio.ingest(dataio.fixture_path("table_s1_in"))
rho = tomography.mle_reconstruct(records).rho
print(f"\nreconstructed input state:")
print(f"  concurrence-predicted S  {metrics.s_theoretical(rho):.3f}")
print(f"  settings-optimized bound {bell.horodecki_max(rho):.3f}")

# ideal case: canonical settings on the Bell state reach 2 sqrt(2)
s = bell.maximal_violation_settings()
ideal = phi_plus().density()
value = bell.chsh_s(
    bell.expected_correlation(ideal, s.a, s.b),
    bell.expected_correlation(ideal, s.a, s.b_prime),
    bell.expected_correlation(ideal, s.a_prime, s.b),
    bell.expected_correlation(ideal, s.a_prime, s.b_prime),
)
print(f"\nideal Bell state with canonical settings: S = {value:.6f}")
