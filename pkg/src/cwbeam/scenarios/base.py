"""Shared scenario machinery: results, claims, summaries, CSV/JSON output."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from .. import __version__


def engine_versions() -> dict:
    return {"cwbeam": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


@dataclass(frozen=True)
class Claim:
    """One checkable statement with its tolerance, evaluated from a run."""

    name: str
    description: str
    observed: float
    threshold: float
    comparator: str  # "<=" or ">="
    passed: bool

    @staticmethod
    def check(name, description, observed, threshold, comparator="<=") -> "Claim":
        observed = float(observed)
        threshold = float(threshold)
        ok = observed <= threshold if comparator == "<=" else observed >= threshold
        return Claim(name=name, description=description, observed=observed,
                     threshold=threshold, comparator=comparator, passed=bool(ok))


@dataclass
class ScenarioResult:
    """Structured record of one scenario run.

    Re-running with the same config and seed reproduces `records` bit for
    bit; everything needed to audit a claim (tolerances included) is echoed
    into the summary.
    """

    scenario: str
    config: dict
    records: list
    summary: dict
    claims: list
    seed: int
    engine_versions: dict = field(default_factory=engine_versions)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def write_csv(self, path):
        if not self.records:
            raise ValueError("no records to write")
        columns = list(self.records[0].keys())
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in self.records:
                if list(row.keys()) != columns:
                    raise ValueError("records have inconsistent columns")
                writer.writerow([_format_cell(row[c]) for c in columns])

    def summary_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "config": self.config,
            "engine_versions": self.engine_versions,
            "summary": self.summary,
            "claims": [
                {"name": c.name, "description": c.description, "observed": c.observed,
                 "threshold": c.threshold, "comparator": c.comparator, "passed": c.passed}
                for c in self.claims
            ],
            "all_passed": self.all_passed,
        }

    def write_summary(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary_dict(), fh, indent=2)
            fh.write("\n")


def _format_cell(value):
    # repr of a float is the shortest string that round-trips exactly
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def read_csv(path) -> list:
    """Read back a scenario CSV, recovering ints/floats exactly."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = []
        for raw in reader:
            row = {}
            for key, cell in zip(columns, raw):
                row[key] = _parse_cell(cell)
            rows.append(row)
    return rows


def _parse_cell(cell: str):
    for cast in (int, float):
        try:
            return cast(cell)
        except ValueError:
            continue
    if cell in ("True", "False"):
        return cell == "True"
    return cell


def summarize(values) -> dict:
    """Mean, standard error and quantiles of one observable column."""
    arr = np.asarray(values, dtype=float)
    qs = np.quantile(arr, [0.05, 0.25, 0.5, 0.75, 0.95]) if arr.size else [float("nan")] * 5
    return {
        "n": int(arr.size),
        "mean": float(arr.mean()),
        "se": float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0,
        "std": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
        "min": float(arr.min()),
        "q05": float(qs[0]), "q25": float(qs[1]), "median": float(qs[2]),
        "q75": float(qs[3]), "q95": float(qs[4]),
        "max": float(arr.max()),
    }


def run_indexed(fn, n: int, threads: int = 1) -> list:
    """Evaluate fn(i) for i in range(n), optionally on a thread pool.

    Each task derives its randomness from its own index-keyed substream, so
    the result list (always in index order) is identical for any thread
    count.
    """
    if threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))
