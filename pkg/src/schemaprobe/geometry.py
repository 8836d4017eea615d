"""Euclidean and Poincare-ball primitives used by the probe.

The ball is the open unit ball (curvature fixed at 1). Everything is
float64; construction clamps keep floating-point drift off the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Construction clamp for ball membership.
BALL_EDGE = 1.0 - 1e-9
# Clamp on the Mobius-difference norm before arctanh.
_ATANH_EDGE = 1.0 - 1e-12


def _vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValidationError(f"expected a 1-D vector, got shape {v.shape}")
    return v


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector in the tangent space at the ball's origin."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        v = _vector(self.coords).copy()
        if not np.all(np.isfinite(v)):
            raise ValidationError("tangent vector has non-finite coordinates")
        v.flags.writeable = False
        object.__setattr__(self, "coords", v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point inside the open unit ball.

    Norms at or beyond the boundary are scaled down to BALL_EDGE, so a
    BallPoint is always a valid ball member.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        v = _vector(self.coords).copy()
        if not np.all(np.isfinite(v)):
            raise ValidationError("ball point has non-finite coordinates")
        norm = math.sqrt(float(np.dot(v, v)))
        if norm > BALL_EDGE:
            v *= BALL_EDGE / norm
        v.flags.writeable = False
        object.__setattr__(self, "coords", v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def euclidean_distance(u, v) -> float:
    """L2 distance between two equal-dimension vectors."""
    a, b = _vector(u), _vector(v)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def exp_map_origin(h) -> BallPoint:
    """Project a tangent vector at the origin into the ball.

    Returns tanh(|h|) * h / |h|; the zero vector maps to the origin.
    """
    v = _vector(h)
    if not np.all(np.isfinite(v)):
        raise ValidationError("tangent vector has non-finite coordinates")
    norm = math.sqrt(float(np.dot(v, v)))
    if norm == 0.0:
        return BallPoint(np.zeros_like(v))
    return BallPoint(v * (math.tanh(norm) / norm))


def _require_in_ball(v: np.ndarray, label: str) -> None:
    if float(np.dot(v, v)) >= 1.0:
        raise ValidationError(f"{label} lies at or outside the unit sphere")


def mobius_add(a, b) -> BallPoint:
    """Mobius addition a (+) b, closed over the open unit ball."""
    x, y = _vector(a), _vector(b)
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.shape} vs {y.shape}")
    _require_in_ball(x, "left operand")
    _require_in_ball(y, "right operand")
    xy = float(np.dot(x, y))
    xx = float(np.dot(x, x))
    yy = float(np.dot(y, y))
    numerator = (1.0 + 2.0 * xy + yy) * x + (1.0 - xx) * y
    denominator = 1.0 + 2.0 * xy + xx * yy
    return BallPoint(numerator / denominator)


def poincare_distance(a, b) -> float:
    """Geodesic distance 2 * arctanh(|(-a) (+) b|) between two ball points."""
    x, y = _vector(a), _vector(b)
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if np.array_equal(x, y):
        return 0.0
    diff = mobius_add(-x, y)
    norm = min(float(np.linalg.norm(diff.coords)), _ATANH_EDGE)
    return 2.0 * math.atanh(norm)
