"""Density-matrix reconstruction from the shipped coincidence fixtures.

The two fixtures hold the joint-detection probabilities of the photon
pair measured before and after storage.  Maximum-likelihood tomography
turns each into a physical density matrix, from which the usual state
metrics follow.
"""

import numpy as np

from echotomo import dataio, tomography
from echotomo.pipeline import state_metrics
from echotomo.states import fidelity

rhos = {}
for tag, name in (("before storage", "table_s1_in"), ("after storage", "table_s1_out")):
    records = dataio.ingest(dataio.fixture_path(name))
    result = tomography.mle_reconstruct(records)
    rhos[tag] = result.rho
    print(f"\n{tag}  (NLL {result.neg_log_likelihood:.1f}, "
          f"{result.iterations} iterations, {result.restarts_used} starts)")
    for key, value in state_metrics(result.rho).items():
        print(f"  {key:28s} {value:.4f}")
    print("  |rho| magnitudes:")
    for row in np.abs(result.rho.matrix):
        print("   ", "  ".join(f"{v:.3f}" for v in row))

overlap = fidelity(rhos["before storage"], rhos["after storage"])
print(f"\ninput/output fidelity {overlap:.4f}")
