"""Streaming statistics and the ensemble report container."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "EQUATION_TAGS",
    "EnsembleReport",
    "Record",
    "SCHEMA_VERSION",
    "StatAccumulator",
    "merge_accumulators",
]

SCHEMA_VERSION = "ethf-report/1"
EQUATION_TAGS = frozenset({"E", "purec", "thermalc", "n", "nn", "ent1", "entmany", "ranE", "ranC"})
Z_FLAG = 5.0
Z_REL_FLOOR = 1e-12
CSV_COLUMNS = (
    "quantity", "label", "measured", "variance", "stderr", "count",
    "predicted", "prediction_eq", "z", "flagged", "reference", "note",
)


@dataclass
class StatAccumulator:
    """Count, mean and summed squared deviations of a scalar stream."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def extend(self, xs) -> "StatAccumulator":
        for x in xs:
            self.push(float(x))
        return self

    @classmethod
    def from_values(cls, xs) -> "StatAccumulator":
        return cls().extend(xs)

    @property
    def variance(self) -> float:
        """Unbiased sample variance (0 for fewer than two samples)."""
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else 0.0


def merge_accumulators(a: StatAccumulator, b: StatAccumulator) -> StatAccumulator:
    """Chan et al. pairwise combination of two accumulators."""
    if a.count == 0:
        return StatAccumulator(b.count, b.mean, b.m2)
    if b.count == 0:
        return StatAccumulator(a.count, a.mean, a.m2)
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * b.count / n
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / n
    return StatAccumulator(n, mean, m2)


def _zscore(measured, predicted, stderr):
    if predicted is None:
        return None
    # rounding floor: quantities fixed by an exact identity have stderr ~ 1e-18
    stderr = max(stderr, Z_REL_FLOOR * max(abs(measured), abs(predicted)))
    if stderr > 0:
        return (measured - predicted) / stderr
    return 0.0


@dataclass
class Record:
    """One measured quantity, optionally compared with a prediction.

    ``reference`` holds the exact finite-N expectation where one is known; it
    is informational and does not enter ``z``. Records with ``exact=True``
    compare two deterministic numbers and carry no z-score.
    """

    quantity: str
    measured: float
    stderr: float
    count: int
    label: str = ""
    variance: float | None = None
    predicted: float | None = None
    prediction_eq: str = "none"
    reference: float | None = None
    note: str = ""
    exact: bool = False
    z: float | None = field(default=None, init=False)
    flagged: bool = field(default=False, init=False)

    def __post_init__(self):
        if self.predicted is None:
            self.prediction_eq = "none"
        elif self.prediction_eq not in EQUATION_TAGS:
            raise ValueError(f"unknown prediction tag {self.prediction_eq!r}")
        self.z = None if self.exact else _zscore(self.measured, self.predicted, self.stderr)
        self.flagged = self.z is not None and abs(self.z) > Z_FLAG

    @property
    def key(self) -> str:
        return f"{self.quantity}[{self.label}]" if self.label else self.quantity


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (np.floating, np.integer)):
        return _json_safe(x.item())
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


@dataclass
class EnsembleReport:
    meta: dict
    records: list[Record] = field(default_factory=list)

    def add(self, record: Record) -> Record:
        self.records.append(record)
        return record

    def get(self, quantity: str, label: str = "") -> Record:
        for r in self.records:
            if r.quantity == quantity and r.label == str(label):
                return r
        raise KeyError(f"no record {quantity!r} with label {label!r}")

    def quantities(self) -> list[str]:
        seen = []
        for r in self.records:
            if r.quantity not in seen:
                seen.append(r.quantity)
        return seen

    @property
    def flagged(self) -> list[Record]:
        return [r for r in self.records if r.flagged]

    def to_dict(self) -> dict:
        return _json_safe({
            "schema": SCHEMA_VERSION,
            "meta": self.meta,
            "records": [asdict(r) for r in self.records],
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, allow_nan=False) + "\n"

    def csv_text(self, quantity: str) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            if r.quantity != quantity:
                continue
            w.writerow([
                r.quantity, r.label, _num(r.measured), _num(r.variance), _num(r.stderr),
                _num(r.count), _num(r.predicted), r.prediction_eq, _num(r.z),
                _num(r.flagged), _num(r.reference), r.note,
            ])
        return buf.getvalue()

    def write(self, outdir) -> list[Path]:
        """Write ``report.json`` and one ``<quantity>.csv`` per quantity into ``outdir``."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = [outdir / "report.json"]
        paths[0].write_text(self.to_json(), encoding="utf-8", newline="\n")
        for q in self.quantities():
            p = outdir / f"{q}.csv"
            p.write_text(self.csv_text(q), encoding="utf-8", newline="\n")
            paths.append(p)
        return paths

    def summary(self) -> str:
        rows = [("quantity", "measured", "predicted", "z", "")]
        for r in self.records:
            rows.append((
                r.key,
                f"{r.measured:.6g}",
                "-" if r.predicted is None else f"{r.predicted:.6g}",
                "-" if r.z is None else f"{r.z:+.2f}",
                "FLAG" if r.flagged else "",
            ))
        widths = [max(len(row[k]) for row in rows) for k in range(5)]
        lines = ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip() for row in rows]
        return "\n".join(lines)
