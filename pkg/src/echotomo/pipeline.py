"""End-to-end analysis pipeline: ingestion, commands and report assembly.

Every command is deterministic given its configuration and seed; reports
embed the fixture hashes, seed and configuration so two runs on the same
inputs are byte-identical apart from the timestamp field.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import afc, bell, dataio, metrics, montecarlo, source, tomography
from .states import ContractViolation, DensityMatrix, fidelity, phi_plus, purity
from .tomography import SettingPair, TomographyConfig

__all__ = [
    "PipelineConfig",
    "cmd_tomo",
    "cmd_bell",
    "cmd_afc",
    "cmd_simulate",
    "cmd_report",
    "state_metrics",
]

REPORT_SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    trials: int = 1000
    assumed_n: float = 5000.0
    exact: bool = False
    # AFC memory
    delta_hz: float = 200e6
    finesse: float = 2.0
    d1: float = 1.0
    d0: float = 1.0
    bandwidth_hz: float = 8e9
    pulse_fwhm_s: float = 50e-12
    mode_separation_s: float = 1.4e-9
    memory: bool = False
    # source surrogate
    visibility: float = 0.7667
    pairs_per_setting: float = 5000.0

    def comb(self) -> afc.AfcComb:
        return afc.AfcComb(
            delta=self.delta_hz,
            finesse=self.finesse,
            d1=self.d1,
            d0=self.d0,
            bandwidth=self.bandwidth_hz,
        )

    def mc(self) -> montecarlo.McConfig:
        return montecarlo.McConfig(
            trials=self.trials, seed=self.seed, assumed_total_per_setting=self.assumed_n
        )


# per-trial refits warm-start from the unperturbed solution and use the
# quasi-Newton path; the main reconstruction uses the TomographyConfig
# defaults (simplex with restarts)
_TRIAL_CONFIG = TomographyConfig(max_iterations=500, method="gradient")


def state_metrics(rho: DensityMatrix) -> dict:
    """Summary state metrics for one reconstruction."""
    return {
        "fidelity_phi_plus": fidelity(rho, phi_plus().density()),
        "purity": purity(rho),
        "concurrence": metrics.concurrence(rho),
        "entanglement_of_formation": metrics.entanglement_of_formation(rho),
        "s_theoretical": metrics.s_theoretical(rho),
    }


def _reconstruct(records, config: TomographyConfig | None = None):
    return tomography.mle_reconstruct(records, config=config)


def _tomo_uncertainties(records, pipeline_config: PipelineConfig, warm_start: DensityMatrix):
    def analysis(resampled):
        result = tomography.mle_reconstruct(resampled, config=_TRIAL_CONFIG, initial=warm_start)
        return state_metrics(result.rho)

    return montecarlo.propagate(records, pipeline_config.mc(), analysis)


def cmd_tomo(dataset_path, config: PipelineConfig) -> dict:
    """Reconstruct a density matrix from a dataset and attach metrics
    with Monte-Carlo uncertainties."""
    records = dataio.ingest(dataset_path, assumed_total=config.assumed_n)
    result = _reconstruct(records)
    report = {
        "dataset": str(dataset_path),
        "dataset_sha256": dataio.file_sha256(dataset_path),
        "assumed_total_per_setting": config.assumed_n,
        "rho": result.rho.to_json(),
        "diagnostics": {
            "neg_log_likelihood": result.neg_log_likelihood,
            "iterations": result.iterations,
            "converged": result.converged,
            "restarts": result.restarts_used,
        },
        "metrics": state_metrics(result.rho),
        "uncertainties": _tomo_uncertainties(records, config, result.rho).to_json(),
    }
    return report


def _bell_correlations(records):
    """Classify the four records against the canonical CHSH settings and
    return (E(a,b), E(a,b'), E(a',b), E(a',b')) plus labels."""
    settings = bell.maximal_violation_settings()
    slots = {"ab": settings.b, "abp": settings.b_prime}
    out = {}
    labels = {}
    for rec in records:
        e = bell.correlation_from_counts(rec)
        a_is_prime = abs(np.dot(rec.settings.a.bloch, settings.a_prime.bloch)) > 0.999
        b_is_prime = abs(np.dot(rec.settings.b.bloch, settings.b_prime.bloch)) > 0.999
        key = ("ap" if a_is_prime else "a") + ("bp" if b_is_prime else "b")
        out[key] = e
        labels[key] = {"a": rec.settings.a.label, "b": rec.settings.b.label}
    missing = {"ab", "abp", "apb", "apbp"} - set(out)
    if missing:
        raise ContractViolation(f"Bell dataset missing setting combinations: {sorted(missing)}")
    return out, labels


def _bell_s(records) -> float:
    e, _ = _bell_correlations(records)
    return bell.chsh_s(e["ab"], e["abp"], e["apb"], e["apbp"])


def cmd_bell(dataset_path, config: PipelineConfig, rho: DensityMatrix | None = None) -> dict:
    """CHSH S from a correlation dataset, with resampling uncertainty."""
    records = dataio.ingest(dataset_path, assumed_total=config.assumed_n)
    e, labels = _bell_correlations(records)
    s = bell.chsh_s(e["ab"], e["abp"], e["apb"], e["apbp"])
    mc = montecarlo.propagate(records, config.mc(), lambda recs: {"s_measured": _bell_s(recs)})
    report = {
        "dataset": str(dataset_path),
        "dataset_sha256": dataio.file_sha256(dataset_path),
        "correlations": {k: {"value": e[k], "settings": labels[k]} for k in sorted(e)},
        "s_measured": s,
        "uncertainties": mc.to_json(),
    }
    if rho is not None:
        report["s_theoretical"] = metrics.s_theoretical(rho)
        report["horodecki_max"] = bell.horodecki_max(rho)
    return report


def cmd_afc(config: PipelineConfig, echo_csv=None, comb_csv=None) -> dict:
    """Simulate single-pulse storage: analytic vs simulated efficiency,
    echo arrival time, optional CSV traces."""
    comb = config.comb()
    dt, n = afc.default_grid(comb)
    t0 = -0.2 * n * dt
    pulse = afc.gaussian_pulse(config.pulse_fwhm_s, center=0.0, dt=dt, n_samples=n, t0=t0)
    out = afc.propagate(comb, pulse)
    tau = afc.storage_time(comb)
    sigma = config.pulse_fwhm_s / (2 * np.sqrt(np.log(2)))
    w = 2 * sigma
    t = out.times
    sel = (t >= tau - w) & (t <= tau + w)
    eta_sim = float(np.sum(np.abs(out.samples[sel]) ** 2) * dt / pulse.energy())
    report = {
        "comb": {
            "delta_hz": comb.delta,
            "finesse": comb.finesse,
            "d1": comb.d1,
            "d0": comb.d0,
            "bandwidth_hz": comb.bandwidth,
        },
        "pulse_fwhm_s": config.pulse_fwhm_s,
        "storage_time_s": tau,
        "efficiency_analytic": float(afc.analytic_efficiency(comb)),
        "efficiency_simulated": eta_sim,
        "echo_peak_s": afc.echo_peak_time(out, comb, 0.0),
        "grid": {"dt_s": dt, "n_samples": n},
    }
    if echo_csv is not None:
        # keep the exported trace a manageable size: the +-2.5/delta window
        sel = (t >= -0.5 * tau) & (t <= 2.5 * tau)
        afc.PulseWaveform(out.samples[sel], dt=dt, t0=float(t[sel][0])).to_csv(echo_csv)
        report["echo_csv"] = str(echo_csv)
    if comb_csv is not None:
        import csv as _csv

        detunings = np.linspace(-comb.bandwidth / 2, comb.bandwidth / 2, 4001)
        depth = afc.comb_profile(comb, detunings)
        with open(comb_csv, "w", newline="") as fh:
            wtr = _csv.writer(fh)
            wtr.writerow(["detuning_hz", "optical_depth"])
            for f, d in zip(detunings, depth):
                wtr.writerow([repr(float(f)), repr(float(d))])
        report["comb_csv"] = str(comb_csv)
    return report


def _default_simulation_settings():
    return [SettingPair.from_labels(a, b) for a in "xyz" for b in "xyz"]


def memory_channel(config: PipelineConfig):
    """Single-photon transfer matrix and heralding efficiency of the
    stored (1532 nm) qubit, extracted from the waveform simulation."""
    comb = config.comb()
    amps, eta = afc.store_qubit(
        comb,
        (1 / np.sqrt(2), 1 / np.sqrt(2)),
        config.mode_separation_s,
        pulse_fwhm=config.pulse_fwhm_s,
    )
    # relative early/late transfer; global phase dropped
    m = np.diag(amps / amps[0] * abs(amps[0]))
    return m / np.linalg.norm(m, 2), eta


def cmd_simulate(config: PipelineConfig, out_path=None) -> dataio.DatasetFile:
    """Generate a synthetic counts dataset from the Werner-source model,
    optionally routed through the AFC memory (heralded channel)."""
    src = source.SourceConfig(
        visibility=config.visibility, pairs_per_setting=config.pairs_per_setting
    )
    rho = source.source_state(src)
    pairs = config.pairs_per_setting
    if config.memory:
        m, eta = memory_channel(config)
        big = np.kron(np.eye(2), m)
        mat = big @ rho.matrix @ big.conj().T
        rho = DensityMatrix.from_array(mat / np.trace(mat).real)
        pairs = pairs * eta
    rng = None if config.exact else np.random.Generator(np.random.Philox(key=config.seed))
    records = source.synthesize_counts(
        rho,
        _default_simulation_settings(),
        pairs,
        rng=rng,
        exact=config.exact,
        analyzer_phase_offsets=src.analyzer_phase_offsets,
    )
    ds = dataio.DatasetFile(
        format="counts",
        unit="counts",
        records=tuple(
            {
                "a": rec.settings.a.label or [float(x) for x in rec.settings.a.bloch],
                "b": rec.settings.b.label or [float(x) for x in rec.settings.b.bloch],
                "values": [float(c) for c in rec.counts],
            }
            for rec in records
        ),
    )
    if out_path is not None:
        dataio.write_dataset(ds, out_path)
    return ds


def cmd_report(config: PipelineConfig, datasets: dict | None = None) -> dict:
    """Full analysis report from the shipped fixtures (or overrides).

    ``datasets`` may override the default fixture paths with keys
    tomo_in, tomo_out, bell_in, bell_out.
    """
    paths = {
        "tomo_in": dataio.fixture_path("table_s1_in"),
        "tomo_out": dataio.fixture_path("table_s1_out"),
        "bell_in": dataio.fixture_path("table_s2_in"),
        "bell_out": dataio.fixture_path("table_s2_out"),
    }
    if datasets:
        paths.update(datasets)
    ingested = {k: dataio.ingest(p, assumed_total=config.assumed_n) for k, p in paths.items()}

    rho_in = _reconstruct(ingested["tomo_in"]).rho
    rho_out = _reconstruct(ingested["tomo_out"]).rho

    def analysis(data):
        r_in = tomography.mle_reconstruct(data["tomo_in"], config=_TRIAL_CONFIG, initial=rho_in).rho
        r_out = tomography.mle_reconstruct(data["tomo_out"], config=_TRIAL_CONFIG, initial=rho_out).rho
        out = {}
        for tag, r in (("in", r_in), ("out", r_out)):
            for k, v in state_metrics(r).items():
                out[f"{k}_{tag}"] = v
        out["fidelity_in_out"] = fidelity(r_in, r_out)
        out["s_measured_in"] = _bell_s(data["bell_in"])
        out["s_measured_out"] = _bell_s(data["bell_out"])
        return out

    mc = montecarlo.propagate(ingested, config.mc(), analysis)
    e_in, labels_in = _bell_correlations(ingested["bell_in"])
    e_out, labels_out = _bell_correlations(ingested["bell_out"])

    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "provenance": {
            "fixtures": {k: dataio.file_sha256(p) for k, p in sorted(paths.items())},
            "seed": config.seed,
            "config": asdict(config),
        },
        "tomography": {
            "in": {"rho": rho_in.to_json(), "metrics": state_metrics(rho_in)},
            "out": {"rho": rho_out.to_json(), "metrics": state_metrics(rho_out)},
            "input_output_fidelity": fidelity(rho_in, rho_out),
        },
        "bell": {
            "in": {
                "correlations": {k: {"value": e_in[k], "settings": labels_in[k]} for k in sorted(e_in)},
                "s_measured": bell.chsh_s(e_in["ab"], e_in["abp"], e_in["apb"], e_in["apbp"]),
                "s_theoretical": metrics.s_theoretical(rho_in),
                "horodecki_max": bell.horodecki_max(rho_in),
            },
            "out": {
                "correlations": {k: {"value": e_out[k], "settings": labels_out[k]} for k in sorted(e_out)},
                "s_measured": bell.chsh_s(e_out["ab"], e_out["abp"], e_out["apb"], e_out["apbp"]),
                "s_theoretical": metrics.s_theoretical(rho_out),
                "horodecki_max": bell.horodecki_max(rho_out),
            },
        },
        "afc": cmd_afc(config),
        "uncertainties": mc.to_json(),
    }
    return report


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True)
