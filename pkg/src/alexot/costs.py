"""Transport cost functions of the distance.

Two parametric families, both strictly convex and nondecreasing in the
distance: the quadratic cost ``d^2 / 2`` (the 1/2 normalization is what makes
the gradient-shooting map formula hold) and the power family ``d^p / p`` with
``p > 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels, spaces
from .errors import DomainError, ValidationError
from .spaces import SpaceDescriptor


@dataclass(frozen=True)
class CostSpec:
    kind: str
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind == "quadratic":
            if self.p is not None:
                raise ValidationError("quadratic cost takes no exponent")
        elif self.kind == "power":
            if self.p is None or not self.p > 1.0:
                raise ValidationError("power cost requires p > 1")
        else:
            raise ValidationError(f"unknown cost kind {self.kind!r}")


def quadratic() -> CostSpec:
    return CostSpec("quadratic")


def power(p: float) -> CostSpec:
    return CostSpec("power", p=p)


def cost_profile(spec: CostSpec, t):
    """The convex profile applied to the distance (vectorized)."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise DomainError("cost profile is defined for nonnegative distances")
    if spec.kind == "quadratic":
        out = 0.5 * t * t
    else:
        out = t**spec.p / spec.p
    return out if out.ndim else float(out)


def cost_derivative(spec: CostSpec, t):
    """Derivative of the profile with respect to the distance."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise DomainError("cost derivative is defined for nonnegative distances")
    out = t if spec.kind == "quadratic" else t ** (spec.p - 1.0)
    return out if out.ndim else float(out)


def inverse_cost_derivative(spec: CostSpec, s):
    """Inverse of `cost_derivative`: gradient magnitude -> step length.

    This is the rescaling used by the transport-map formula for non-quadratic
    costs; for the quadratic cost it is the identity.
    """
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 0.0):
        raise DomainError("gradient magnitude must be nonnegative")
    if spec.kind == "quadratic":
        out = s
    else:
        out = s ** (1.0 / (spec.p - 1.0))
    return out if out.ndim else float(out)


def cost(spec: CostSpec, space: SpaceDescriptor, x, y) -> float:
    """Transport cost between two points: profile of their distance."""
    return float(cost_profile(spec, spaces.distance(space, x, y)))


def cost_matrix(spec: CostSpec, space: SpaceDescriptor, source_points, target_points) -> np.ndarray:
    """Dense cost matrix between two point clouds (kernel-accelerated)."""
    d = _kernels.pairwise_distances(
        spaces.kind_code(space),
        spaces.space_param(space),
        spaces.pad3(np.asarray(source_points, dtype=np.float64)),
        spaces.pad3(np.asarray(target_points, dtype=np.float64)),
    )
    return np.asarray(cost_profile(spec, d))


def distance_matrix(space: SpaceDescriptor, source_points, target_points) -> np.ndarray:
    """Dense distance matrix between two point clouds."""
    return _kernels.pairwise_distances(
        spaces.kind_code(space),
        spaces.space_param(space),
        spaces.pad3(np.asarray(source_points, dtype=np.float64)),
        spaces.pad3(np.asarray(target_points, dtype=np.float64)),
    )
