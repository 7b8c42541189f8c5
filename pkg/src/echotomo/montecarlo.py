"""Monte-Carlo propagation of Poissonian counting noise.

Every coincidence count is resampled as an independent Poisson draw with
the observed value as its mean, the full analysis chain is re-run on each
resampled dataset, and per-metric sample means and standard deviations
are reported.  Trials draw from counter-based Philox substreams keyed by
(seed, trial index), so results are independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .states import ContractViolation
from .tomography import CoincidenceRecord

__all__ = ["McConfig", "McReport", "poisson_resample", "propagate"]


@dataclass(frozen=True)
class McConfig:
    trials: int = 1000
    seed: int = 0
    assumed_total_per_setting: float = 5000.0

    def __post_init__(self):
        if self.trials < 2:
            raise ContractViolation("need at least 2 Monte-Carlo trials")
        if self.assumed_total_per_setting <= 0:
            raise ContractViolation("assumed_total_per_setting must be positive")


@dataclass(frozen=True)
class McReport:
    means: dict
    stds: dict
    trials: int
    failed_trials: int = 0

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "failed_trials": self.failed_trials,
            "metrics": {
                k: {"mean": self.means[k], "std": self.stds[k]} for k in sorted(self.means)
            },
        }


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, trial], dtype=np.uint64)))


def poisson_resample(records, rng: np.random.Generator):
    """Replace every count with a Poisson draw at that mean.

    Fractional means (from probability x N synthesis) are used as-is, so
    entries below one count still fluctuate instead of locking at zero.
    """
    out = []
    for rec in records:
        out.append(replace(rec, counts=rng.poisson(rec.counts).astype(float)))
    return out


def _resample_structure(data, rng):
    if isinstance(data, dict):
        return {k: _resample_structure(v, rng) for k, v in data.items()}
    data = list(data)
    if data and isinstance(data[0], CoincidenceRecord):
        return poisson_resample(data, rng)
    return [_resample_structure(v, rng) for v in data]


def propagate(records, config: McConfig, analysis) -> McReport:
    """Run ``analysis`` on ``config.trials`` Poisson-resampled copies.

    ``records`` may be a record list or a dict of record lists (for joint
    in/out resampling); ``analysis`` maps the same structure to a dict of
    scalar metrics.  Raises if the unperturbed analysis fails, and aborts
    when more than 10% of trials fail.
    """
    analysis(records)  # must succeed on the unperturbed data
    samples: dict[str, list] = {}
    failed = []
    for trial in range(config.trials):
        rng = _trial_rng(config.seed, trial)
        try:
            metrics = analysis(_resample_structure(records, rng))
        except Exception as exc:  # noqa: BLE001 - reported with trial index
            failed.append((trial, repr(exc)))
            if len(failed) > 0.1 * config.trials:
                raise ContractViolation(
                    f"more than 10% of Monte-Carlo trials failed; first: "
                    f"trial {failed[0][0]}: {failed[0][1]}"
                ) from exc
            continue
        for k, v in metrics.items():
            samples.setdefault(k, []).append(float(v))
    means = {k: float(np.mean(v)) for k, v in samples.items()}
    stds = {k: float(np.std(v, ddof=1)) for k, v in samples.items()}
    return McReport(means=means, stds=stds, trials=config.trials, failed_trials=len(failed))
