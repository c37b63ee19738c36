"""Violation reports and their JSON / CSV serialisations.

Floats are written with ``repr``, the shortest decimal that round-trips.
Wall time is kept on the object but never serialised so that reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

CSV_COLUMNS = ("eps", "frequency", "std_error", "analytic_bound", "verdict", "classical_frequency", "worst_case_frequency")


@dataclass
class ViolationRow:
    eps: float
    frequency: float
    std_error: float
    analytic_bound: Optional[float]
    verdict: str
    classical_frequency: Optional[float] = None
    worst_case_frequency: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


@dataclass(frozen=True)
class Calibration:
    delta: float
    eps: Optional[float]
    status: str

    @property
    def calibrated(self) -> bool:
        return self.eps is not None

    def to_dict(self) -> dict:
        return {"delta": self.delta, "eps": self.eps, "status": self.status}


@dataclass
class ViolationReport:
    kind: str
    statistic: str
    candidate_bound: str
    rows: list[ViolationRow]
    metadata: dict = field(default_factory=dict)
    calibration: Optional[Calibration] = None
    wall_time: Optional[float] = None

    @property
    def violated(self) -> bool:
        return any(r.verdict == "violated_beyond_slack" for r in self.rows)

    def row(self, eps: float) -> ViolationRow:
        for r in self.rows:
            if math.isclose(r.eps, eps, rel_tol=0, abs_tol=1e-15):
                return r
        raise KeyError(eps)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "statistic": self.statistic,
            "candidate_bound": self.candidate_bound,
            "metadata": dict(self.metadata),
            "rows": [r.to_dict() for r in self.rows],
            "violated": self.violated,
        }
        if self.calibration is not None:
            out["calibration"] = self.calibration.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ViolationReport":
        cal = data.get("calibration")
        return cls(
            kind=data["kind"],
            statistic=data["statistic"],
            candidate_bound=data["candidate_bound"],
            rows=[ViolationRow(**r) for r in data["rows"]],
            metadata=dict(data.get("metadata", {})),
            calibration=Calibration(**cal) if cal else None,
        )


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(report: ViolationReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in report.rows:
            writer.writerow([_cell(getattr(r, k)) for k in CSV_COLUMNS])
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def parse_csv_report(text: str) -> list[dict]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if k == "verdict":
                row[k] = v
            else:
                row[k] = float(v) if v != "" else None
        rows.append(row)
    return rows
