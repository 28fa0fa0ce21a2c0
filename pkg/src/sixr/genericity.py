"""Genericity guard: is the singular set an ordinary (corank-1) hypersurface?

Points on the singular surface are located by bisecting det(J) along
sampled sign-change edges and checked for corank. Edge bisection alone
never lands on lower-dimensional corank-2 loci, so each run also descends
on the adjugate norm from a few located points to hunt for corank-2
witnesses. A witness is tolerated only when the corank-2 set is transverse
there (isolated conical points of the expected codimension 4); a
degenerate witness, or any corank-3 point, makes the arm non-generic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .kinematics import (
    ManipulatorModel,
    PositionerModel,
    corank,
    det_jacobian,
    det_positional,
    positional_jacobian,
    spatial_jacobian,
)
from .topology import crossings

GENERIC = "generic"
NON_GENERIC = "non-generic"
UNDETERMINED = "undetermined"

TRANSVERSE_TOL = 1e-6


@dataclass
class Witness:
    config: tuple
    corank: int
    transversality: float
    transverse: bool

    def as_dict(self):
        return {
            "config": [float(v) for v in self.config],
            "corank": self.corank,
            "transversality": self.transversality,
            "transverse": self.transverse,
        }


@dataclass
class GenericityResult:
    verdict: str
    located: int
    coranks: dict
    witnesses: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "located": self.located,
            "coranks": {str(k): v for k, v in sorted(self.coranks.items())},
            "witnesses": [w.as_dict() for w in self.witnesses],
            "diagnostics": list(self.diagnostics),
        }


class _Arm:
    """Jacobian access for a model in reduced torus coordinates."""

    def __init__(self, model):
        self.model = model
        if isinstance(model, ManipulatorModel):
            self.dims = 4
            self._jac = spatial_jacobian
            self._det = det_jacobian
        elif isinstance(model, PositionerModel):
            self.dims = 2
            self._jac = positional_jacobian
            self._det = det_positional
        else:
            raise TypeError(f"unsupported model {type(model).__name__}")

    def full(self, y):
        y = [float(v) for v in y]
        return [0.0, *y, 0.0] if self.dims == 4 else [0.0, *y]

    def jacobian(self, y):
        return self._jac(self.model, self.full(y))

    def det(self, y):
        return self._det(self.model, self.full(y))


def adjugate(M: np.ndarray) -> np.ndarray:
    """Classical adjoint by cofactor minors (well defined at singular M)."""
    m = M.shape[0]
    minors = np.empty((m, m, m - 1, m - 1))
    for i in range(m):
        rows = [r for r in range(m) if r != i]
        for j in range(m):
            cols = [c for c in range(m) if c != j]
            minors[j, i] = M[np.ix_(rows, cols)]
    signs = (-1.0) ** np.add.outer(np.arange(m), np.arange(m))
    return signs * np.linalg.det(minors)


def _transversality(arm: _Arm, y, h=1e-6) -> float:
    """Conditioning of the corank-2 normal map at ``y``.

    With U2, V2 spanning the left/right null spaces, the 2x2 blocks
    U2^T dJ/dy_k V2 must span all 4 normal directions of the corank-2
    stratum; returns sigma_min / sigma_max of that 4 x dims matrix (0 when
    dims < 4).
    """
    U, _, Vt = np.linalg.svd(arm.jacobian(y))
    U2 = U[:, -2:]
    V2 = Vt[-2:, :].T
    cols = []
    for k in range(arm.dims):
        e = np.zeros(arm.dims)
        e[k] = h
        dJ = (arm.jacobian(np.asarray(y) + e) - arm.jacobian(np.asarray(y) - e)) / (2 * h)
        cols.append((U2.T @ dJ @ V2).ravel())
    T = np.array(cols).T
    if arm.dims < 4:
        return 0.0
    sv = np.linalg.svd(T, compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


def _bisect(arm: _Arm, a, b, fa, fb, iters=80):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        fm = arm.det(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
        if np.max(np.abs(b - a)) < 1e-15:
            break
    return 0.5 * (a + b)


def _descend(arm: _Arm, y0):
    J0 = arm.jacobian(y0)
    sv = np.linalg.svd(J0, compute_uv=False)
    norm = sv[0] ** (J0.shape[0] - 1)

    def residual(y):
        return adjugate(arm.jacobian(y)).ravel() / norm

    sol = least_squares(residual, np.asarray(y0, dtype=float), method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    return (sol.x + math.pi) % (2 * math.pi) - math.pi


def _edge_points(signs, samples, rng):
    grid = signs.grid
    shape = signs.signs.shape
    picks = []
    for k in range(len(shape)):
        nz = np.flatnonzero(crossings(signs, k).ravel())
        picks.append(np.stack([nz, np.full(nz.size, k)], axis=1))
    edges = np.concatenate(picks) if picks else np.zeros((0, 2), dtype=np.int64)
    if len(edges) > samples:
        edges = edges[np.sort(rng.choice(len(edges), size=samples, replace=False))]
    out = []
    for flat, k in edges:
        idx = np.unravel_index(int(flat), shape)
        a = np.array(grid.node_angles(idx))
        b = a.copy()
        b[k] += 2.0 * math.pi / grid.n[k]
        out.append((a, b))
    return out


def check_genericity(model, signs, field=None, samples: int = 128, tol: float = 1e-8,
                     seed: int = 0, descents: int = 8) -> GenericityResult:
    """Verdict from corank checks at located singular points and descended witnesses."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if field is not None and not np.any(field.values):
        return GenericityResult(NON_GENERIC, 0, {}, diagnostics=["field numerically zero"])
    arm = _Arm(model)
    rng = np.random.Generator(np.random.Philox(seed))
    coranks: dict = {}
    located = []
    failed = 0
    for a, b in _edge_points(signs, samples, rng):
        fa, fb = arm.det(a), arm.det(b)
        if fa == 0.0 or fb == 0.0 or (fa > 0) == (fb > 0):
            failed += 1
            continue
        y = _bisect(arm, a, b, fa, fb)
        c = corank(arm.jacobian(y), tol)
        coranks[c] = coranks.get(c, 0) + 1
        if c == 0:
            failed += 1
            continue
        located.append((y, c))

    diagnostics = []
    if failed:
        diagnostics.append(f"{failed} sampled edges did not bracket a singular point")
    if not located:
        return GenericityResult(UNDETERMINED, 0, coranks, diagnostics=diagnostics)

    witnesses = []
    starts = [y for y, c in located if c >= 2] + [y for y, _ in located[:descents]]
    for y in starts:
        c0 = corank(arm.jacobian(y), tol)
        yw = y if c0 >= 2 else _descend(arm, y)
        c = corank(arm.jacobian(yw), tol)
        if c < 2:
            continue
        if any(np.max(np.abs((yw - w.config + math.pi) % (2 * math.pi) - math.pi)) < 1e-6
               for w in witnesses):
            continue
        t = _transversality(arm, yw) if c == 2 else 0.0
        witnesses.append(Witness(tuple(float(v) for v in yw), c, t, c == 2 and t > TRANSVERSE_TOL))

    bad = [w for w in witnesses if not w.transverse]
    if bad:
        diagnostics.append(f"{len(bad)} degenerate corank>=2 witness(es)")
        verdict = NON_GENERIC
    else:
        verdict = GENERIC
        if witnesses:
            diagnostics.append(f"{len(witnesses)} isolated transverse corank-2 point(s)")
    return GenericityResult(verdict, len(located), coranks, witnesses, diagnostics)
