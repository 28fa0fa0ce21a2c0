"""Denavit-Hartenberg forward kinematics, spatial Jacobians and their determinants.

Convention is classic (distal) DH: each link transform is
``Rz(theta + theta_offset) @ Tz(d) @ Tx(a) @ Rx(alpha)``. Jacobian columns
are screws ``(z_{i-1}, z_{i-1} x (p_end - p_{i-1}))`` in the base frame,
referenced at the end-effector origin.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels


class InvalidInput(ValueError):
    """Raised for malformed models, configurations or parameters."""


def canonical_angle(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    return math.pi if y == -math.pi else y


def _finite(name, value):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidInput(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(v):
        raise InvalidInput(f"{name} must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class DHRow:
    alpha: float
    a: float
    d: float
    theta_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", canonical_angle(_finite("alpha", self.alpha)))
        object.__setattr__(self, "a", _finite("a", self.a))
        object.__setattr__(self, "d", _finite("d", self.d))
        object.__setattr__(
            self, "theta_offset", canonical_angle(_finite("theta_offset", self.theta_offset))
        )

    def as_dict(self):
        return {"alpha": self.alpha, "a": self.a, "d": self.d, "theta_offset": self.theta_offset}


def _rows(rows, count, kind):
    rows = tuple(r if isinstance(r, DHRow) else DHRow(*r) for r in rows)
    if len(rows) != count:
        raise InvalidInput(f"{kind} needs exactly {count} DH rows, got {len(rows)}")
    return rows


class _Chain:
    rows: tuple
    name: str

    @property
    def length_scale(self) -> float:
        scale = max(max(abs(r.a), abs(r.d)) for r in self.rows)
        return scale if scale > 0 else 1.0

    @classmethod
    def from_table(cls, table, name=""):
        """Build from an (n, 4) table of (alpha, a, d, theta_offset)."""
        return cls(tuple(DHRow(*map(float, row)) for row in np.asarray(table, dtype=float)), name)

    def as_table(self) -> np.ndarray:
        return np.array([[r.alpha, r.a, r.d, r.theta_offset] for r in self.rows])

    def identity(self) -> str:
        """Stable digest of the DH table (name excluded)."""
        blob = json.dumps([r.as_dict() for r in self.rows], sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ManipulatorModel(_Chain):
    """A 6R serial arm."""

    rows: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rows", _rows(self.rows, 6, "ManipulatorModel"))


@dataclass(frozen=True)
class PositionerModel(_Chain):
    """A 3R positioning arm (the first three links of a 6R)."""

    rows: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rows", _rows(self.rows, 3, "PositionerModel"))


@dataclass(frozen=True)
class RigidTransform:
    rotation: np.ndarray
    translation: np.ndarray

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T

    def __matmul__(self, other: "RigidTransform") -> "RigidTransform":
        return RigidTransform(
            self.rotation @ other.rotation, self.rotation @ other.translation + self.translation
        )


def _config(model, config) -> list[float]:
    x = list(config)
    if len(x) != len(model.rows):
        raise InvalidInput(f"expected {len(model.rows)} joint angles, got {len(x)}")
    return [_finite(f"x{i + 1}", v) for i, v in enumerate(x)]


def dh_transform(row: DHRow, theta: float) -> RigidTransform:
    """Link transform Rz(theta + offset) Tz(d) Tx(a) Rx(alpha)."""
    th = _finite("theta", theta) + row.theta_offset
    ct, st = math.cos(th), math.sin(th)
    ca, sa = math.cos(row.alpha), math.sin(row.alpha)
    R = np.array([[ct, -st * ca, st * sa], [st, ct * ca, -ct * sa], [0.0, sa, ca]])
    return RigidTransform(R, np.array([row.a * ct, row.a * st, row.d]))


def forward_kinematics(model, config) -> list[RigidTransform]:
    """Frames 0..n (base through end-effector)."""
    x = _config(model, config)
    frames = [RigidTransform.identity()]
    for row, xi in zip(model.rows, x):
        frames.append(frames[-1] @ dh_transform(row, xi))
    return frames


def spatial_jacobian(model: ManipulatorModel, config) -> np.ndarray:
    """6x6 Jacobian; rows are (omega, v), column i is joint i's screw."""
    frames = forward_kinematics(model, config)
    p_end = frames[-1].translation
    J = np.empty((6, len(model.rows)))
    for i in range(len(model.rows)):
        z = frames[i].rotation[:, 2]
        J[:3, i] = z
        J[3:, i] = np.cross(z, p_end - frames[i].translation)
    return J


def positional_jacobian(arm: PositionerModel, config) -> np.ndarray:
    """3x3 Jacobian of the wrist-point position of a 3R arm."""
    return spatial_jacobian(arm, config)[3:, :]


def kernel_params(model) -> np.ndarray:
    """Per-joint (cos alpha, sin alpha, a, d) rows consumed by the kernels."""
    return np.array([[math.cos(r.alpha), math.sin(r.alpha), r.a, r.d] for r in model.rows])


def joint_trig(model, config):
    """cos/sin of the full joint angles (offset included), via ``math``.

    All determinant paths take their trig values from here so that field
    sweeps and single-point calls see identical inputs.
    """
    x = _config(model, config)
    th = [xi + r.theta_offset for xi, r in zip(x, model.rows)]
    return [math.cos(t) for t in th], [math.sin(t) for t in th]


def _det(model, config, positional):
    ct, st = joint_trig(model, config)
    scale3 = model.length_scale ** 3
    return float(kernels.det_points(kernel_params(model), [ct], [st], scale3, positional)[0])


def det_jacobian(model: ManipulatorModel, config) -> float:
    """det(J) by partial-pivot elimination, divided by ``length_scale**3``."""
    return _det(model, config, False)


def det_positional(arm: PositionerModel, config) -> float:
    """Scale-normalized determinant of the 3R positional Jacobian."""
    return _det(arm, config, True)


def corank(J: np.ndarray, tol: float = 1e-8) -> int:
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[0] == 0.0:
        return len(sv)
    return int(np.count_nonzero(sv / sv[0] < tol))


def jacobian_corank(model, config, tol: float = 1e-8) -> int:
    """Number of singular values below ``tol`` relative to the largest."""
    if not 0.0 < tol < 1.0:
        raise InvalidInput(f"tol must lie in (0, 1), got {tol}")
    if isinstance(model, PositionerModel):
        return corank(positional_jacobian(model, config), tol)
    return corank(spatial_jacobian(model, config), tol)
