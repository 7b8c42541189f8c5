"""Dataset file schema, ingestion and fixtures.

A dataset is a JSON document::

    {"format": "probabilities" | "correlations" | "counts",
     "unit": "percent" | "fraction" | "counts",
     "records": [{"a": <label>, "b": <label>, "values": <number | [4 numbers]>}]}

Setting labels come from {x, y, z, x+y, x-y} with an optional leading
minus, or are explicit Bloch triples.  The shipped fixtures transcribe
the published joint-detection probabilities and Bell correlation
coefficients verbatim in percent, so they stay visually diffable against
the tables; unit conversion happens here.

Probability entries carry no absolute rates, so effective counts are
synthesized as ``assumed_total * P`` (the assumed total only scales the
uncertainty estimates, not any central value).  Correlation fixtures
store magnitudes; ingestion applies the documented constructive sign
convention, under which the four coefficients add up to S.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .states import ContractViolation, MeasurementSetting
from .tomography import CoincidenceRecord, SettingPair

__all__ = [
    "DatasetFile",
    "DatasetError",
    "ingest",
    "load_dataset",
    "write_dataset",
    "fixture_path",
    "file_sha256",
]

FORMATS = ("probabilities", "correlations", "counts")
UNITS = ("percent", "fraction", "counts")


class DatasetError(ContractViolation):
    """Dataset file fails schema or range validation."""


@dataclass(frozen=True)
class DatasetFile:
    format: str
    unit: str
    records: tuple

    def to_json(self) -> dict:
        return {
            "format": self.format,
            "unit": self.unit,
            "records": [dict(r) for r in self.records],
        }


def fixture_path(name: str):
    """Path to a shipped fixture, e.g. ``table_s1_in``."""
    p = resources.files("echotomo") / "fixtures" / f"{name}.json"
    if not p.is_file():
        raise DatasetError(f"no such fixture {name!r}")
    return p


def file_sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _parse_setting(value, where: str):
    try:
        if isinstance(value, str):
            return MeasurementSetting.from_label(value)
        if isinstance(value, (list, tuple)) and len(value) == 3:
            return MeasurementSetting(np.asarray(value, dtype=float))
    except ContractViolation as exc:
        raise DatasetError(f"{where}: {exc}") from None
    raise DatasetError(f"{where}: setting must be a label or a Bloch triple, got {value!r}")


def load_dataset(path) -> DatasetFile:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise DatasetError(f"{path}: top level must be an object")
    fmt = doc.get("format")
    if fmt not in FORMATS:
        raise DatasetError(f"{path}: 'format' must be one of {FORMATS}, got {fmt!r}")
    unit = doc.get("unit")
    if unit not in UNITS:
        raise DatasetError(f"{path}: 'unit' must be one of {UNITS}, got {unit!r}")
    if fmt == "counts" and unit != "counts" or fmt != "counts" and unit == "counts":
        raise DatasetError(f"{path}: unit {unit!r} does not match format {fmt!r}")
    records = doc.get("records")
    if not isinstance(records, list) or not records:
        raise DatasetError(f"{path}: 'records' must be a non-empty list")
    parsed = []
    for i, rec in enumerate(records):
        where = f"{path}: records[{i}]"
        if not isinstance(rec, dict):
            raise DatasetError(f"{where}: must be an object")
        for key in ("a", "b", "values"):
            if key not in rec:
                raise DatasetError(f"{where}: missing field {key!r}")
        _parse_setting(rec["a"], f"{where}.a")  # label validation
        _parse_setting(rec["b"], f"{where}.b")
        v = rec["values"]
        if fmt == "counts":
            if not (isinstance(v, list) and len(v) == 4):
                raise DatasetError(f"{where}.values: counts need a list of 4 numbers")
            if any(x < 0 for x in v):
                raise DatasetError(f"{where}.values: counts must be non-negative")
        else:
            if not isinstance(v, (int, float)):
                raise DatasetError(f"{where}.values: expected a single number")
            lo, hi = (0.0, 100.0) if fmt == "probabilities" else (-100.0, 100.0)
            if unit == "fraction":
                lo, hi = lo / 100, hi / 100
            if not lo <= v <= hi:
                raise DatasetError(f"{where}.values: {v} outside [{lo}, {hi}]")
        parsed.append(dict(rec))
    return DatasetFile(format=fmt, unit=unit, records=tuple(parsed))


def write_dataset(dataset: DatasetFile, path):
    with open(path, "w") as fh:
        json.dump(dataset.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def _split_sign(setting: MeasurementSetting):
    """Fold a +-axis setting onto its positive-axis base."""
    label = setting.label
    if label and label.startswith("-"):
        return MeasurementSetting.from_label(label[1:]), -1
    return setting, 1


# Constructive sign convention for correlation fixtures: the published
# tables list magnitudes whose plain sum reproduces S; under the standard
# CHSH sign pattern that makes the a x b' coefficient negative.
_NEGATIVE_PAIR = ("y", "x+y")


def _correlation_sign(a: MeasurementSetting, b: MeasurementSetting) -> float:
    ref_a = MeasurementSetting.from_label(_NEGATIVE_PAIR[0])
    ref_b = MeasurementSetting.from_label(_NEGATIVE_PAIR[1])
    if np.dot(a.bloch, ref_a.bloch) > 0.999 and np.dot(b.bloch, ref_b.bloch) > 0.999:
        return -1.0
    return 1.0


def ingest(path, assumed_total: float = 5000.0):
    """Read a dataset file into coincidence records.

    Probability records fill the measured (a, +-b) count pair and leave
    the unmeasured -a side empty; count records pass through unchanged.
    """
    if assumed_total <= 0:
        raise DatasetError("assumed_total must be positive")
    ds = load_dataset(path)
    scale = 0.01 if ds.unit == "percent" else 1.0
    records = []
    for rec in ds.records:
        a_raw = _parse_setting(rec["a"], "a")
        b_raw = _parse_setting(rec["b"], "b")
        if ds.format == "counts":
            records.append(
                CoincidenceRecord(SettingPair(a_raw, b_raw), np.asarray(rec["values"], float))
            )
            continue
        a, sa = _split_sign(a_raw)
        b, sb = _split_sign(b_raw)
        counts = np.zeros(4)
        if ds.format == "probabilities":
            p = rec["values"] * scale
            row = 0 if sa > 0 else 2
            col = 0 if sb > 0 else 1
            counts[row + col] = assumed_total * p
            counts[row + 1 - col] = assumed_total * (1 - p)
        else:  # correlations
            e = rec["values"] * scale * _correlation_sign(a, b)
            counts[0] = counts[3] = assumed_total * (1 + e) / 4
            counts[1] = counts[2] = assumed_total * (1 - e) / 4
        records.append(CoincidenceRecord(SettingPair(a, b), counts))
    return records
