"""Discrete measures, c-transforms and the dual transport objective."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import costs, spaces
from .costs import CostSpec
from .errors import DomainError, ValidationError
from .spaces import SpaceDescriptor

WEIGHT_SUM_TOL = 1e-12
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point cloud with positive weights summing to one."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValidationError("measure needs a nonempty (n, dim) atom array")
        if w.shape != (pts.shape[0],):
            raise ValidationError("one weight per atom required")
        if not np.all(w > 0.0):
            raise ValidationError("weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError("weights must sum to 1")
        if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise ValidationError("atoms must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=np.float64)
        n = pts.shape[0]
        return cls(pts, np.full(n, 1.0 / n))

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    def validate_for_space(self, space: SpaceDescriptor) -> None:
        for p in self.points:
            spaces.validate_point(space, p)


@dataclass(frozen=True)
class PotentialPair:
    """Dual variables on the source and target supports.

    Feasible when ``phi[i] + phi_c[j] <= cost(x_i, y_j)`` up to tolerance
    for every pair of atoms.
    """

    phi: np.ndarray
    phi_c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=np.float64))
        object.__setattr__(self, "phi_c", np.asarray(self.phi_c, dtype=np.float64))

    def max_violation(self, cost_mat: np.ndarray) -> float:
        """Largest amount by which ``phi + phi_c`` exceeds the cost."""
        return float(
            np.max(self.phi[:, None] + self.phi_c[None, :] - cost_mat)
        )

    def is_feasible(self, cost_mat: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
        return self.max_violation(cost_mat) <= tol


# ---------------------------------------------------------------------------
# transforms


def transform_from_matrix(cost_mat: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Componentwise ``min_i cost[i, j] - values[i]`` over a finite source set."""
    cost_mat = np.asarray(cost_mat, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if cost_mat.shape[0] == 0:
        raise DomainError("c-transform over an empty set is undefined")
    if values.shape != (cost_mat.shape[0],):
        raise ValidationError("one value per source point required")
    if not np.all(np.isfinite(values)):
        raise ValidationError("potential values must be finite")
    return np.min(cost_mat - values[:, None], axis=0)


def c_transform(
    spec: CostSpec,
    space: SpaceDescriptor,
    values,
    source_points,
    target_points,
) -> np.ndarray:
    """The c-transform of ``values`` from the source set onto the target set."""
    source_points = np.asarray(source_points, dtype=np.float64)
    target_points = np.asarray(target_points, dtype=np.float64)
    if source_points.shape[0] == 0:
        raise DomainError("c-transform over an empty set is undefined")
    mat = costs.cost_matrix(spec, space, source_points, target_points)
    return transform_from_matrix(mat, np.asarray(values, dtype=np.float64))


def is_c_concave(
    spec: CostSpec,
    space: SpaceDescriptor,
    values,
    on_points,
    against_points,
    tol: float = 1e-9,
):
    """Check invariance under the double transform through ``against_points``.

    Returns ``(flag, max_deviation)`` where the deviation is the sup norm of
    ``values - double_transform(values)``.
    """
    values = np.asarray(values, dtype=np.float64)
    mat = costs.cost_matrix(spec, space, on_points, against_points)
    once = transform_from_matrix(mat, values)
    back = transform_from_matrix(mat.T, once)
    dev = float(np.max(np.abs(back - values)))
    return dev <= tol, dev


def dual_objective(pair: PotentialPair, mu0: DiscreteMeasure, mu1: DiscreteMeasure) -> float:
    """Value of the dual transport objective for the given potentials."""
    if pair.phi.shape != (mu0.n_atoms,) or pair.phi_c.shape != (mu1.n_atoms,):
        raise ValidationError("potentials must be indexed by the measure atoms")
    return float(pair.phi @ mu0.weights + pair.phi_c @ mu1.weights)
