"""Inequality-check records and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from importlib import metadata
from dataclasses import asdict, dataclass, field, fields

CSV_COLUMNS = (
    "experiment",
    "cell_index",
    "p",
    "alpha_or_kappa",
    "t_or_tau",
    "family_x",
    "family_y",
    "N",
    "lhs",
    "rhs",
    "ratio",
    "refinement_estimate",
    "pass",
)


@dataclass
class EpiCheckCell:
    """One evaluation of an inequality ``lhs >= rhs``.

    ``passed`` is ``ratio >= 1 - (tol_rel + refinement_estimate)``; exploratory
    cells carry no verdict (``passed is None``) and errored cells fail.
    """

    experiment: str
    lhs: float
    rhs: float
    p: float | None = None
    alpha: float | None = None
    t: float | None = None
    family_x: str = ""
    family_y: str = ""
    n: int | None = None
    refinement_estimate: float = 0.0
    tol_rel: float = 1e-6
    exploratory: bool = False
    index: int = 0
    error: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.error is not None:
            return math.nan
        if self.rhs == 0:
            return math.inf if self.lhs > 0 else math.nan
        return self.lhs / self.rhs

    @property
    def passed(self) -> bool | None:
        if self.exploratory:
            return None
        if self.error is not None:
            return False
        return bool(self.ratio >= 1.0 - (self.tol_rel + self.refinement_estimate))

    @classmethod
    def failed(cls, experiment, error, **kwargs):
        return cls(experiment, math.nan, math.nan, error=error, **kwargs)

    def to_dict(self):
        d = asdict(self)
        d["ratio"] = self.ratio
        d["passed"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def csv_row(self):
        return {
            "experiment": self.experiment,
            "cell_index": self.index,
            "p": _num(self.p),
            "alpha_or_kappa": _num(self.alpha),
            "t_or_tau": _num(self.t),
            "family_x": self.family_x,
            "family_y": self.family_y,
            "N": "" if self.n is None else self.n,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "ratio": _num(self.ratio),
            "refinement_estimate": _num(self.refinement_estimate),
            "pass": "" if self.passed is None else str(self.passed).lower(),
        }


def tool_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.1.0"


def make_provenance(seed):
    return {
        "tool": "repi",
        "tool_version": tool_version(),
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _num(x):
    return "" if x is None else repr(float(x))


@dataclass
class ExperimentReport:
    config: dict
    cells: list
    provenance: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def summary(self) -> dict:
        ratios = [c.ratio for c in self.cells if not math.isnan(c.ratio)]
        refinements = [c.refinement_estimate for c in self.cells]
        return {
            "cell_count": len(self.cells),
            "min_ratio": min(ratios) if ratios else None,
            "max_refinement_estimate": max(refinements) if refinements else None,
            "violation_count": sum(1 for c in self.cells if c.passed is False),
            "error_count": sum(1 for c in self.cells if c.error is not None),
            "wall_time": self.wall_time,
        }

    @property
    def violation_count(self) -> int:
        return self.summary["violation_count"]

    def to_dict(self, *, deterministic=False):
        summary = self.summary
        provenance = dict(self.provenance)
        if deterministic:
            summary.pop("wall_time")
            provenance.pop("timestamp", None)
        return {
            "config": self.config,
            "summary": summary,
            "provenance": provenance,
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            config=d["config"],
            cells=[EpiCheckCell.from_dict(c) for c in d["cells"]],
            provenance=d.get("provenance", {}),
            wall_time=d.get("summary", {}).get("wall_time", 0.0),
        )

    def to_json(self, *, deterministic=False) -> str:
        return json.dumps(self.to_dict(deterministic=deterministic), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for c in self.cells:
            writer.writerow(c.csv_row())
        return buf.getvalue()
