"""Sampling det(J) on periodic grids over the torus of the middle joints.

A 6R arm is sampled over (x2, x3, x4, x5) with x1 = x6 = 0 (the
determinant does not depend on them); a 3R positioner over (x2, x3).
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import kernels
from .kinematics import InvalidInput, ManipulatorModel, PositionerModel, kernel_params

AXES = ("x2", "x3", "x4", "x5")
# trig degree per axis: tan-half-angle degrees 14, 12, 10, 8 halved
HARMONIC_BOUND = {"x2": 7, "x3": 6, "x4": 5, "x5": 4}
# crossings along a generator circle are bounded by the q-degree of that axis
CROSSING_MAX = {"x2": 14, "x3": 12, "x4": 10, "x5": 8}

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SGF4_MAGIC = b"SGF4"
SGF4_HEADER = 64


class FieldEvaluationError(RuntimeError):
    pass


class FieldNumericallyZero(ValueError):
    """Every sample lies inside the zero band: the model looks non-generic."""


class DegreeViolation(ValueError):
    def __init__(self, axis, count, limit):
        super().__init__(f"{count} crossings along {axis} exceed the maximum {limit}")
        self.axis = axis
        self.count = count
        self.limit = limit


def axis_index(axis) -> int:
    if isinstance(axis, str):
        if axis not in AXES:
            raise InvalidInput(f"unknown axis {axis!r}; expected one of {AXES}")
        return AXES.index(axis)
    if not 0 <= int(axis) < len(AXES):
        raise InvalidInput(f"axis index out of range: {axis}")
    return int(axis)


@dataclass(frozen=True)
class GridSpec:
    """Periodic node grid; node k on axis j sits at -pi + (k + phase[j]) * 2pi / n[j]."""

    n: tuple
    phase: tuple = None

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        if len(n) not in (2, 4):
            raise InvalidInput(f"grid must have 2 or 4 axes, got {len(n)}")
        for v in n:
            if v < 16 or v % 2:
                raise InvalidInput(f"grid resolution must be even and >= 16, got {v}")
        phase = (0.5,) * len(n) if self.phase is None else tuple(float(p) for p in self.phase)
        if len(phase) != len(n) or not all(0.0 <= p < 1.0 for p in phase):
            raise InvalidInput(f"phase must hold {len(n)} values in [0, 1), got {self.phase}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "phase", phase)

    @classmethod
    def uniform(cls, n, dims=4, phase=None):
        return cls((n,) * dims, phase)

    @property
    def dims(self) -> int:
        return len(self.n)

    @property
    def size(self) -> int:
        return math.prod(self.n)

    def angles(self, j) -> list[float]:
        step = 2.0 * math.pi / self.n[j]
        return [-math.pi + (k + self.phase[j]) * step for k in range(self.n[j])]

    def node_angles(self, index) -> tuple:
        return tuple(
            -math.pi + (k + self.phase[j]) * (2.0 * math.pi / self.n[j]) for j, k in enumerate(index)
        )

    def refined(self, axes=None) -> "GridSpec":
        """Double the resolution on ``axes`` (all by default), keeping coarse nodes."""
        axes = range(self.dims) if axes is None else axes
        n = list(self.n)
        phase = list(self.phase)
        for j in axes:
            n[j] *= 2
            phase[j] = (2.0 * phase[j]) % 1.0
        return GridSpec(tuple(n), tuple(phase))

    def as_dict(self):
        return {"n": list(self.n), "phase": list(self.phase)}


@dataclass
class ScalarField:
    """Sampled values, optionally with the evaluator used for tie-break re-sampling."""

    grid: GridSpec
    values: np.ndarray
    source: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.n:
            raise InvalidInput(f"values shape {self.values.shape} != grid {self.grid.n}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInput("field values must be finite")
        self.values.setflags(write=False)


@dataclass
class SignField:
    grid: GridSpec
    signs: np.ndarray
    nudged: int = 0

    def __post_init__(self):
        self.signs = np.asarray(self.signs, dtype=np.int8)
        if self.signs.shape != self.grid.n:
            raise InvalidInput(f"signs shape {self.signs.shape} != grid {self.grid.n}")
        if not np.all(np.abs(self.signs) == 1):
            raise InvalidInput("signs must be +1 or -1")
        self.signs.setflags(write=False)


ScalarField4 = ScalarField
SignField4 = SignField


@dataclass(frozen=True)
class DegreeReport:
    axis: str
    max_harmonic: int
    max_suppressed: float
    bound: int
    circles: int
    samples: int

    @property
    def passed(self) -> bool:
        return self.max_harmonic <= self.bound

    def as_dict(self):
        return {
            "axis": self.axis,
            "max_harmonic": self.max_harmonic,
            "max_suppressed": self.max_suppressed,
            "bound": self.bound,
            "pass": self.passed,
            "circles": self.circles,
            "samples_per_circle": self.samples,
        }


def _layout(model, grid):
    """Joint-angle tables for the grid: (cos table, sin table, counts, positional)."""
    if isinstance(model, ManipulatorModel):
        if grid.dims != 4:
            raise InvalidInput("a 6R model needs a 4-axis grid")
        moving = {1: 0, 2: 1, 3: 2, 4: 3}
        positional = False
    elif isinstance(model, PositionerModel):
        if grid.dims != 2:
            raise InvalidInput("a 3R positioner needs a 2-axis grid")
        moving = {1: 0, 2: 1}
        positional = True
    else:
        raise InvalidInput(f"unsupported model type {type(model).__name__}")
    njoint = len(model.rows)
    width = max(grid.n)
    ct = np.zeros((njoint, width))
    st = np.zeros((njoint, width))
    counts = []
    for j, row in enumerate(model.rows):
        xs = grid.angles(moving[j]) if j in moving else [0.0]
        for k, x in enumerate(xs):
            ct[j, k] = math.cos(x + row.theta_offset)
            st[j, k] = math.sin(x + row.theta_offset)
        counts.append(len(xs))
    return ct, st, counts, positional


def _point_evaluator(model):
    """Vectorized det at arbitrary torus points (angles as broadcastable arrays)."""
    params = kernel_params(model)
    scale3 = model.length_scale ** 3
    positional = isinstance(model, PositionerModel)
    if positional:
        moving = (1, 2)
    else:
        moving = (1, 2, 3, 4)

    def evaluate(*coords):
        coords = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coords])
        shape = coords[0].shape
        flat = [c.ravel() for c in coords]
        npts = flat[0].size
        ct = np.empty((npts, len(model.rows)))
        st = np.empty_like(ct)
        for j, row in enumerate(model.rows):
            xs = flat[moving.index(j)] if j in moving else np.zeros(npts)
            for i in range(npts):
                ct[i, j] = math.cos(float(xs[i]) + row.theta_offset)
                st[i, j] = math.sin(float(xs[i]) + row.theta_offset)
        return kernels.det_points(params, ct, st, scale3, positional).reshape(shape)

    return evaluate


def sample_field(model, grid: GridSpec, threads: int = 1) -> ScalarField:
    """Evaluate the scale-normalized det(J) at every grid node."""
    ct, st, counts, positional = _layout(model, grid)
    values = kernels.det_grid(
        kernel_params(model), ct, st, counts, model.length_scale ** 3, positional, int(threads)
    ).reshape(grid.n)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        node = tuple(int(i) for i in bad[0])
        raise FieldEvaluationError(f"non-finite det at node {node} (angles {grid.node_angles(node)})")
    return ScalarField(grid, values, _point_evaluator(model))


def synthetic_field(func, grid: GridSpec) -> ScalarField:
    """Field from ``func(*angle_arrays)``; ``func`` doubles as the re-sampling source."""
    coords = np.meshgrid(*[np.array(grid.angles(j)) for j in range(grid.dims)], indexing="ij")
    return ScalarField(grid, func(*coords), func)


def nudge_offsets(grid: GridSpec) -> tuple:
    """Deterministic angular shift used to break ties at near-zero nodes."""
    return tuple(
        2.0 * math.pi * 0.5 * (((j + 1) * GOLDEN) % 1.0) / grid.n[j] for j in range(grid.dims)
    )


def sign_field(f: ScalarField, eps: float = 1e-9) -> SignField:
    """Signs of the field; nodes within ``eps * max|f|`` of zero are re-sampled off-node."""
    if not eps > 0:
        raise InvalidInput(f"eps must be positive, got {eps}")
    values = f.values
    peak = float(np.max(np.abs(values))) if values.size else 0.0
    band = peak * eps
    if peak == 0.0:
        raise FieldNumericallyZero("field numerically zero: every node lies inside the zero band")
    signs = np.where(values > 0, 1, -1).astype(np.int8)
    tied = np.argwhere(np.abs(values) <= band)
    if len(tied):
        shift = nudge_offsets(f.grid)
        if f.source is not None:
            coords = [
                np.array([f.grid.node_angles(idx)[j] + shift[j] for idx in tied])
                for j in range(f.grid.dims)
            ]
            resampled = np.asarray(f.source(*coords), dtype=float)
        else:
            resampled = np.ones(len(tied))
        for idx, v in zip(tied, resampled):
            signs[tuple(idx)] = -1 if v < 0 else 1
    return SignField(f.grid, signs, int(len(tied)))


def _circle_points(axis_j, base, samples):
    xs = np.array([-math.pi + k * 2.0 * math.pi / samples for k in range(samples)])
    coords = []
    for j in range(4):
        coords.append(xs if j == axis_j else np.full(samples, base[j]))
    return coords


def fourier_degree(
    model: ManipulatorModel,
    axis,
    circles: int = 16,
    samples_per_circle: int = 64,
    rel_tol: float = 1e-8,
    seed: int = 0,
    func: Callable | None = None,
) -> DegreeReport:
    """Largest significant harmonic of det(J) along generator circles of ``axis``.

    ``func(x2, x3, x4, x5)`` replaces det(J) when given (test hook).
    """
    j = axis_index(axis)
    name = AXES[j]
    bound = HARMONIC_BOUND[name]
    if samples_per_circle < 4 * (bound + 1):
        raise InvalidInput(f"samples_per_circle must be >= {4 * (bound + 1)} for {name}")
    if circles < 8:
        raise InvalidInput("need at least 8 circles")
    rng = np.random.Generator(np.random.Philox(seed))
    evaluate = func if func is not None else _point_evaluator(model)
    top = 0
    suppressed = 0.0
    for _ in range(circles):
        base = rng.uniform(-math.pi, math.pi, size=4)
        coef = np.abs(np.fft.rfft(evaluate(*_circle_points(j, base, samples_per_circle))))
        peak = coef.max()
        if peak == 0.0:
            continue
        rel = coef / peak
        significant = np.flatnonzero(rel > rel_tol)
        h = int(significant.max())
        top = max(top, h)
        if h + 1 < rel.size:
            suppressed = max(suppressed, float(rel[h + 1:].max()))
    return DegreeReport(name, top, suppressed, bound, circles, samples_per_circle)


def crossing_counts(signs: SignField, axis) -> np.ndarray:
    """Sign changes along every closed grid circle of ``axis``.

    The result is indexed by the remaining axes (axis removed).
    """
    j = axis_index(axis) if signs.grid.dims == 4 else int(axis)
    s = signs.signs
    return np.count_nonzero(np.roll(s, -1, axis=j) != s, axis=j)


def circle_crossings(signs: SignField, axis, base) -> int:
    """Sign changes along one circle; ``base`` indexes the other three axes."""
    j = axis_index(axis)
    base = tuple(int(b) for b in base)
    if len(base) != signs.grid.dims - 1:
        raise InvalidInput(f"base must index {signs.grid.dims - 1} axes")
    index = list(base)
    index.insert(j, slice(None))
    line = signs.signs[tuple(index)]
    count = int(np.count_nonzero(np.roll(line, -1) != line))
    limit = CROSSING_MAX[AXES[j]]
    if count > limit:
        raise DegreeViolation(AXES[j], count, limit)
    return count


def max_crossings(signs: SignField) -> dict:
    """Largest crossing count over all circles, per axis."""
    return {AXES[j]: int(crossing_counts(signs, j).max()) for j in range(4)}


def write_field(path, f: ScalarField) -> None:
    """Dump as SGF4: 64-byte header (magic, 4 x u32 n, 4 x f64 phase) + f64 row-major."""
    if f.grid.dims != 4:
        raise InvalidInput("SGF4 dumps hold 4-axis fields only")
    header = SGF4_MAGIC + struct.pack("<4I4d", *f.grid.n, *f.grid.phase)
    header = header.ljust(SGF4_HEADER, b"\0")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path) -> ScalarField:
    with open(path, "rb") as fh:
        header = fh.read(SGF4_HEADER)
        if len(header) != SGF4_HEADER or header[:4] != SGF4_MAGIC:
            raise InvalidInput(f"{path}: not an SGF4 field dump")
        vals = struct.unpack("<4I4d", header[4:52])
        grid = GridSpec(vals[:4], vals[4:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != grid.size:
        raise InvalidInput(f"{path}: expected {grid.size} values, found {data.size}")
    return ScalarField(grid, data.reshape(grid.n).astype(float))
