"""End-to-end classification of an arm from its sampled singular surface."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import catalog
from .genericity import GENERIC, NON_GENERIC, UNDETERMINED, GenericityResult, check_genericity
from .kinematics import InvalidInput, ManipulatorModel, PositionerModel, det_positional
from .topology import analyze_signs, label_multiset
from .torus_field import (
    AXES,
    CROSSING_MAX,
    FieldNumericallyZero,
    GridSpec,
    crossing_counts,
    sample_field,
    sign_field,
)

RESOLVED = "resolved"
UNRESOLVED = "unresolved"
NOT_APPLICABLE = "not applicable (non-generic)"


@dataclass(frozen=True)
class Options:
    eps: float = 1e-9
    corank_tol: float = 1e-8
    samples: int = 128
    descents: int = 8
    seed: int = 0
    threads: int = 1
    refine: bool = True
    max_nodes: int = 1 << 26

    def __post_init__(self):
        for name in ("eps", "corank_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        if self.samples < 100:
            raise InvalidInput("samples must be >= 100")


@dataclass
class ClassificationReport:
    model_name: str
    model_id: str
    grid: GridSpec
    status: str
    genericity: GenericityResult
    branches: list = field(default_factory=list)
    label_multiset: str | None = None
    sheets: object = None
    diagnostics: list = field(default_factory=list)
    field_max: float = 0.0
    nudged: int = 0
    zero_cells: int = 0
    refined_from: GridSpec | None = None

    @property
    def generic(self) -> bool:
        return self.genericity.verdict == GENERIC

    def as_dict(self):
        return {
            "model": {"name": self.model_name, "id": self.model_id},
            "grid": self.grid.as_dict(),
            "refined_from": self.refined_from.as_dict() if self.refined_from else None,
            "status": self.status,
            "genericity": self.genericity.as_dict(),
            "label_multiset": self.label_multiset,
            "branches": [b.as_dict() for b in self.branches],
            "sheets": self.sheets.as_dict() if self.sheets is not None else None,
            "zero_cells": self.zero_cells,
            "field_max": self.field_max,
            "nudged_nodes": self.nudged,
            "diagnostics": list(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def _flagged_axes(report, dims):
    """Axes worth refining, or None when the report is clean."""
    axes = set()
    for b in report.branches:
        if b.flags:
            odd = [k for k, t in enumerate(b.crossing_total or ()) if t % 2]
            axes.update(odd or range(dims))
    for d in report.diagnostics:
        if d.startswith("crossing-bound"):
            axes.add(AXES.index(d.split()[1]))
        elif d.startswith(("homology-sum", "label-bound", "outside-H2", "sheet-count")):
            axes.update(range(dims))
    return sorted(axes) if axes else None


def _run(model, grid, opts) -> ClassificationReport:
    base = dict(model_name=model.name, model_id=model.identity(), grid=grid)
    f = sample_field(model, grid, threads=opts.threads)
    try:
        signs = sign_field(f, opts.eps)
    except FieldNumericallyZero:
        gen = GenericityResult(NON_GENERIC, 0, {}, diagnostics=["field numerically zero"])
        return ClassificationReport(status=NOT_APPLICABLE, genericity=gen, **base,
                                    diagnostics=["field numerically zero"])

    analysis = analyze_signs(signs)
    diagnostics = list(analysis.flags)
    if grid.dims == 4:
        for j, name in enumerate(AXES):
            top = int(crossing_counts(signs, j).max())
            if top > CROSSING_MAX[name]:
                diagnostics.append(f"crossing-bound {name} {top} > {CROSSING_MAX[name]}")
        for b in analysis.branches:
            if any(v > cap for v, cap in zip(b.class_label, catalog.WRAP_BOUNDS)):
                diagnostics.append(f"label-bound branch {b.id} {b.class_label}")

    report = ClassificationReport(
        status=RESOLVED,
        genericity=None,
        **base,
        branches=analysis.branches,
        sheets=analysis.sheets,
        field_max=float(np.max(np.abs(f.values))),
        nudged=signs.nudged,
        zero_cells=len(analysis.cells),
    )
    if not analysis.branches:
        diagnostics.append("no singular set at this resolution")
        report.genericity = GenericityResult(UNDETERMINED, 0, {})
        report.label_multiset = ""
        report.diagnostics = diagnostics
        return report

    report.genericity = check_genericity(
        model, signs, f, samples=opts.samples, tol=opts.corank_tol, seed=opts.seed,
        descents=opts.descents,
    )
    if report.genericity.verdict == NON_GENERIC:
        report.status = NOT_APPLICABLE
        report.diagnostics = diagnostics
        return report

    labels = [b.class_label for b in analysis.branches]
    report.label_multiset = label_multiset(labels)
    if grid.dims == 2:
        verdict = catalog.validate_combination(report.label_multiset)
        if verdict.rule != "H2-list":
            diagnostics.append(f"outside-H2 {report.label_multiset}")
    if analysis.sheets.count < 2:
        diagnostics.append(f"sheet-count {analysis.sheets.count} with a nonempty singular set")
    report.diagnostics = diagnostics
    if report.genericity.verdict == UNDETERMINED:
        report.status = UNRESOLVED
    if _flagged_axes(report, grid.dims) is not None:
        report.status = UNRESOLVED
    return report


def _classify(model, grid, opts):
    report = _run(model, grid, opts)
    axes = _flagged_axes(report, grid.dims) if report.status == UNRESOLVED else None
    if axes is None or not opts.refine:
        return report
    finer = grid.refined(axes)
    if finer.size > opts.max_nodes:
        report.diagnostics.append(
            f"refinement skipped: {finer.size} nodes exceed the limit {opts.max_nodes}")
        return report
    refined = _run(model, finer, replace(opts, refine=False))
    refined.refined_from = grid
    refined.diagnostics = [f"refined axes {[AXES[a] if grid.dims == 4 else a for a in axes]}"] + \
        refined.diagnostics
    return refined


def classify(model: ManipulatorModel, grid: GridSpec | None = None,
             options: Options | None = None) -> ClassificationReport:
    """Sample, extract branches, label them, and check genericity for a 6R arm."""
    if not isinstance(model, ManipulatorModel):
        raise InvalidInput("classify expects a 6R ManipulatorModel")
    grid = grid or GridSpec.uniform(64)
    if grid.dims != 4:
        raise InvalidInput("classify needs a 4-axis grid")
    return _classify(model, grid, options or Options())


def classify_3r(arm: PositionerModel, grid: GridSpec | None = None,
                options: Options | None = None, checks: int = 16) -> ClassificationReport:
    """The same pipeline on the (x2, x3) torus of a 3R positioner."""
    if not isinstance(arm, PositionerModel):
        raise InvalidInput("classify_3r expects a PositionerModel")
    grid = grid or GridSpec.uniform(128, dims=2)
    if grid.dims != 2:
        raise InvalidInput("classify_3r needs a 2-axis grid")
    opts = options or Options()
    rng = np.random.Generator(np.random.Philox(opts.seed))
    for _ in range(checks):
        x2, x3, x1 = rng.uniform(-math.pi, math.pi, size=3)
        a = det_positional(arm, [x1, x2, x3])
        b = det_positional(arm, [0.0, x2, x3])
        if abs(a - b) > 1e-9 * max(1.0, abs(b)):
            raise AssertionError(f"positional det depends on x1: {a} vs {b}")
    return _classify(arm, grid, opts)
