"""Randomized search over DH tables for an arm realizing a target class combination."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .classify import NOT_APPLICABLE, RESOLVED, Options, classify
from .kinematics import InvalidInput, ManipulatorModel
from .torus_field import GridSpec

DH_KEYS = ("alpha", "a", "d", "theta_offset")


@dataclass(frozen=True)
class DHRanges:
    """Per-row sampling box: ``rows[i][key] = (lo, hi)``; lo == hi pins the value."""

    rows: tuple

    def __post_init__(self):
        if len(self.rows) != 6:
            raise InvalidInput(f"ranges need 6 rows, got {len(self.rows)}")
        clean = []
        for i, row in enumerate(self.rows):
            out = {}
            for key in DH_KEYS:
                lo, hi = row[key]
                lo, hi = float(lo), float(hi)
                if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                    raise InvalidInput(f"ranges row {i} {key}: bad interval [{lo}, {hi}]")
                out[key] = (lo, hi)
            clean.append(out)
        object.__setattr__(self, "rows", tuple(clean))

    @classmethod
    def uniform(cls, alpha=(-math.pi, math.pi), a=(-1.0, 1.0), d=(-1.0, 1.0),
                theta_offset=(0.0, 0.0)):
        row = {"alpha": alpha, "a": a, "d": d, "theta_offset": theta_offset}
        return cls(tuple(dict(row) for _ in range(6)))

    @classmethod
    def around(cls, model: ManipulatorModel, delta: float = 0.01):
        rows = []
        for r in model.rows:
            rows.append({k: (getattr(r, k) - delta, getattr(r, k) + delta) for k in DH_KEYS})
        return cls(tuple(rows))

    def sample(self, rng) -> np.ndarray:
        table = np.empty((6, 4))
        for i, row in enumerate(self.rows):
            for j, key in enumerate(DH_KEYS):
                lo, hi = row[key]
                table[i, j] = rng.uniform(lo, hi)
        return table

    def as_dict(self):
        return {"dh": [{k: list(v) for k, v in row.items()} for row in self.rows]}


@dataclass
class SearchResult:
    found: bool
    target: str
    attempts: int
    model: ManipulatorModel | None = None
    report: object = None
    attempt: int | None = None
    histogram: Counter = field(default_factory=Counter)

    def as_dict(self):
        return {
            "found": self.found,
            "target": self.target,
            "attempts": self.attempts,
            "attempt": self.attempt,
            "model": self.model.as_table().tolist() if self.model is not None else None,
            "histogram": dict(sorted(self.histogram.items())),
        }


def check_target(target) -> catalog.HomotopyLabel:
    """Parse and bound-check a target label; raises InvalidInput when it can never occur."""
    label = catalog.HomotopyLabel.parse(target) if isinstance(target, str) else target
    if label.width != 4:
        raise InvalidInput(f"search targets need 4-entry tuples, got {label}")
    verdict = catalog.validate_combination(label)
    if verdict.status == catalog.FORBIDDEN:
        raise InvalidInput(f"target {label} is forbidden: {verdict.reason}")
    return label


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    """Independent Philox stream per attempt, keyed by (seed, attempt)."""
    if seed < 0:
        raise InvalidInput("seed must be non-negative")
    return np.random.Generator(np.random.Philox(key=[seed, attempt]))


def search_class(target, attempts: int, seed: int = 0, ranges: DHRanges | None = None,
                 grid: GridSpec | None = None, options: Options | None = None) -> SearchResult:
    """First attempt (lowest index) whose arm is generic and carries ``target``."""
    label = check_target(target)
    if attempts < 1:
        raise InvalidInput("attempts must be >= 1")
    ranges = ranges or DHRanges.uniform()
    grid = grid or GridSpec.uniform(32)
    options = options or Options(seed=seed)
    histogram = Counter()
    for i in range(attempts):
        table = ranges.sample(attempt_rng(seed, i))
        model = ManipulatorModel.from_table(table, name=f"search-{seed}-{i}")
        report = classify(model, grid, options)
        if report.status == NOT_APPLICABLE:
            histogram["non-generic"] += 1
            continue
        key = report.label_multiset or "empty"
        histogram[key if report.status == RESOLVED else f"unresolved {key}"] += 1
        if report.status == RESOLVED and report.label_multiset:
            if catalog.HomotopyLabel.parse(report.label_multiset) == label:
                return SearchResult(True, str(label), i + 1, model, report, i, histogram)
    return SearchResult(False, str(label), attempts, histogram=histogram)
