"""Semi-discrete verification of the gradient-shooting transport map.

Solving the discrete problem yields dual values on the finitely many targets;
these induce the potential ``psi(x) = min_j (c(x, y_j) - dual_j)``, which is
c-concave by construction.  On the spaces here the induced map can be checked
pointwise: at every unsplit source atom the assigned target must be the
potential's argmin, must be hit by shooting ``exp_x`` along minus the
gradient (rescaled for non-quadratic costs), and the gradient norm must
reproduce the travel distance.  Atoms sitting at singular points or within a
finite-difference margin of a cell boundary or cut locus are skipped and
counted, mirroring the almost-everywhere nature of the statement.

Per-atom checks are independent of each other (the solve itself runs first
and sequentially); the report is a pure reduction over atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from . import _geom, costs, spaces
from .costs import CostSpec
from .duality import DiscreteMeasure
from .errors import ChartError, NotDifferentiableError, SingularPointError, ValidationError
from .solver import PIVOT_RULES, solve_exact
from .spaces import SpaceDescriptor, TangentVector

TIE_TOL_DEFAULT = 1e-9


@dataclass(frozen=True)
class SemiDiscretePotential:
    """Potential induced by dual values on a finite target set."""

    space: SpaceDescriptor
    cost: CostSpec
    targets: np.ndarray
    dual_values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.targets, dtype=np.float64)
        vals = np.asarray(self.dual_values, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValidationError("potential needs a nonempty target array")
        if vals.shape != (pts.shape[0],):
            raise ValidationError("one dual value per target required")
        object.__setattr__(self, "targets", pts)
        object.__setattr__(self, "dual_values", vals)


class PsiValue(NamedTuple):
    value: float
    index: int
    tie: bool
    gap: float


def _target_values(pot: SemiDiscretePotential, x) -> np.ndarray:
    """Vector of ``c(x, y_j) - dual_j`` over the targets."""
    row = costs.cost_matrix(pot.cost, pot.space, x[None, :], pot.targets)[0]
    return row - pot.dual_values


def potential_value(
    pot: SemiDiscretePotential, x, tie_tol: float = TIE_TOL_DEFAULT
) -> PsiValue:
    """Exact finite minimum of ``c(x, y_j) - dual_j`` with tie diagnostics.

    ``gap`` is the margin to the second-best target (inf for one target);
    the tie flag is set when the gap is within ``tie_tol``.
    """
    x = spaces.validate_point(pot.space, x)
    vals = _target_values(pot, x)
    order = np.argsort(vals, kind="stable")
    best = int(order[0])
    gap = float(vals[order[1]] - vals[order[0]]) if len(vals) > 1 else math.inf
    return PsiValue(float(vals[best]), best, gap <= tie_tol, gap)


def potential_gradient(
    pot: SemiDiscretePotential, x, fd_step: float
) -> TangentVector:
    """Gradient by central differences in the local isometric chart.

    Raises `NotDifferentiableError` at tie points and `SingularPointError`
    or `ChartError` where no chart exists; callers doing bulk verification
    count those as skipped.
    """
    space = pot.space
    x = spaces.validate_point(space, x)
    if fd_step <= 0.0:
        raise ValidationError("finite-difference step must be positive")
    if not spaces.is_regular(space, x):
        raise SingularPointError("potential gradient needs a regular point")
    if potential_value(pot, x).tie:
        raise NotDifferentiableError("potential has a tie at this point")
    chart = spaces.local_chart(space, x, 4.0 * fd_step)
    comps = np.empty(2)
    for axis in range(2):
        offset = np.zeros(2)
        offset[axis] = fd_step
        plus = potential_value(pot, chart.inverse(offset)).value
        minus = potential_value(pot, chart.inverse(-offset)).value
        comps[axis] = (plus - minus) / (2.0 * fd_step)
    return TangentVector(x, comps)


def monge_point(
    pot: SemiDiscretePotential,
    x,
    fd_step: float,
    zero_tol: Optional[float] = None,
) -> np.ndarray:
    """Shoot ``exp_x`` along minus the (rescaled) potential gradient.

    For the quadratic cost the travel length is the gradient norm itself;
    for power costs the norm passes through the inverse cost derivative.
    Gradient norms below ``zero_tol`` (default: the fd step) return ``x``.
    """
    grad = potential_gradient(pot, x, fd_step)
    return _shoot(pot, grad, fd_step if zero_tol is None else zero_tol)


def _shoot(pot: SemiDiscretePotential, grad: TangentVector, zero_tol: float) -> np.ndarray:
    norm = grad.norm
    if norm <= zero_tol:
        return np.asarray(grad.base, dtype=np.float64).copy()
    step = float(costs.inverse_cost_derivative(pot.cost, norm))
    comps = -(step / norm) * grad.components
    return spaces.exp_map(pot.space, TangentVector(grad.base, comps))


def _stencil_gradient(pot: SemiDiscretePotential, x, fd_step: float, branch: int):
    """Central differences of the potential plus a branch-purity certificate.

    Returns ``(components, departure)`` where ``departure`` bounds how far
    any stencil value sits below the ``branch`` target's smooth value.  A
    departure of zero means the finite differences read a single smooth
    branch of the minimum and are uncontaminated by cell boundaries.
    """
    chart = spaces.local_chart(pot.space, x, 4.0 * fd_step)
    comps = np.empty(2)
    departure = 0.0
    for axis in range(2):
        vals_pm = []
        for sign in (1.0, -1.0):
            offset = np.zeros(2)
            offset[axis] = sign * fd_step
            vals = _target_values(pot, chart.inverse(offset))
            vals_pm.append(float(np.min(vals)))
            departure = max(departure, float(vals[branch] - np.min(vals)))
        comps[axis] = (vals_pm[0] - vals_pm[1]) / (2.0 * fd_step)
    return comps, departure


def _smooth_at(space: SpaceDescriptor, x, y, margin: float) -> bool:
    """Whether d(., y) is safely smooth on the ``margin``-ball around x.

    Guards the finite-difference stencil against the cut locus: the
    antipode on the sphere, the ridge of equal angular gaps on the cone.
    """
    if space.kind == "plane":
        return True
    if space.kind == "sphere":
        d = spaces.distance(space, x, y)
        return d < math.pi / math.sqrt(space.curvature) - margin
    if y[0] == 0.0 or x[0] == 0.0:
        return True
    theta = space.total_angle
    ridge = min(0.5 * theta, math.pi)
    g = abs(_geom.wrap_signed(y[1] - x[1], theta))
    return abs(g - ridge) > margin / x[0]


@dataclass(frozen=True)
class AtomRow:
    index: int
    status: str
    assigned: int
    argmin: int
    grad_norm: float
    dist_to_assigned: float
    formula_residual: float
    norm_residual: float
    point: tuple = ()
    target_point: tuple = ()


@dataclass(frozen=True)
class MapVerificationReport:
    """Aggregate outcome of the per-atom transport-map checks.

    ``n_split + n_verified + n_skipped == n_atoms`` always holds; residual
    maxima are over verified atoms only.  ``n_assign_mismatch`` counts
    verified atoms whose plan assignment is not the potential argmin, which
    the theory forbids.
    """

    n_atoms: int
    n_split: int
    n_verified: int
    n_skipped: int
    n_assign_mismatch: int
    max_formula_residual: float
    max_norm_residual: float
    fd_step: float
    tol: float
    rows: List[AtomRow] = field(default_factory=list, repr=False)
    config: dict = field(default_factory=dict, repr=False)

    @property
    def split_fraction(self) -> float:
        return self.n_split / self.n_atoms if self.n_atoms else 0.0

    @property
    def passed(self) -> bool:
        if self.n_assign_mismatch:
            return False
        if self.n_verified == 0:
            return True
        return (
            self.max_formula_residual <= self.tol
            and self.max_norm_residual <= self.tol
        )


def default_tolerance(space: SpaceDescriptor) -> float:
    """1e-6 on the flat plane; 1e-4 where curvature enters the chart."""
    return 1e-6 if space.kind == "plane" else 1e-4


def verify_graph_and_formula(
    space: SpaceDescriptor,
    cost_spec: CostSpec,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    fd_step: Optional[float] = None,
    tol: Optional[float] = None,
    pivot_rule: str = "dantzig",
    keep_rows: bool = True,
) -> MapVerificationReport:
    """Solve the instance and check the map formula atom by atom."""
    mu0.validate_for_space(space)
    mu1.validate_for_space(space)
    dmat = costs.distance_matrix(space, mu0.points, mu1.points)
    cmat = np.asarray(costs.cost_profile(cost_spec, dmat))
    plan, pair = solve_exact(cmat, mu0.weights, mu1.weights, pivot_rule=pivot_rule)
    if fd_step is None:
        scale = float(dmat.max())
        fd_step = 1e-5 * (scale if scale > 0.0 else 1.0)
    if tol is None:
        tol = default_tolerance(space)
    pot = SemiDiscretePotential(space, cost_spec, mu1.points, pair.phi_c)

    assigned_to: dict = {}
    for i, j in zip(plan.idx_source, plan.idx_target):
        assigned_to.setdefault(int(i), []).append(int(j))

    n_split = n_verified = n_skipped = n_mismatch = 0
    max_formula = 0.0
    max_norm = 0.0
    rows: List[AtomRow] = []
    guard = 8.0 * fd_step
    # how far a stencil value may sit off the assigned branch before the
    # finite differences count as contaminated and the atom is skipped
    branch_tol = 1e-12 * (
        1.0 + float(np.max(np.abs(cmat))) + float(np.max(np.abs(pair.phi_c)))
    )
    for i in range(mu0.n_atoms):
        x = mu0.points[i]
        targets_i = assigned_to.get(i, [])
        coords = tuple(float(c) for c in x)
        if len(targets_i) != 1:
            n_split += 1
            if keep_rows:
                rows.append(
                    AtomRow(i, "split", -1, -1, math.nan, math.nan, math.nan,
                            math.nan, coords, ())
                )
            continue
        j = targets_i[0]
        target_coords = tuple(float(c) for c in mu1.points[j])
        psi = potential_value(pot, x)

        def _skip(idx=i, assigned=j, argmin_idx=None):
            if keep_rows:
                rows.append(
                    AtomRow(idx, "skipped", assigned, -1 if argmin_idx is None else argmin_idx,
                            math.nan, math.nan, math.nan, math.nan, coords, target_coords)
                )

        if not spaces.is_regular(space, x) or psi.tie:
            n_skipped += 1
            _skip(argmin_idx=psi.index)
            continue
        if not _smooth_at(space, x, mu1.points[j], guard):
            n_skipped += 1
            _skip(argmin_idx=psi.index)
            continue
        try:
            comps, departure = _stencil_gradient(pot, x, fd_step, j)
        except (SingularPointError, ChartError):
            n_skipped += 1
            _skip(argmin_idx=psi.index)
            continue
        if departure > branch_tol:
            n_skipped += 1
            _skip(argmin_idx=psi.index)
            continue
        n_verified += 1
        if psi.index != j:
            n_mismatch += 1
        grad = TangentVector(x, comps)
        image = _shoot(pot, grad, fd_step)
        dist = float(dmat[i, j])
        formula_res = spaces.distance(space, image, mu1.points[j])
        step_len = float(costs.inverse_cost_derivative(cost_spec, grad.norm))
        norm_res = abs(step_len - dist)
        max_formula = max(max_formula, formula_res)
        max_norm = max(max_norm, norm_res)
        if keep_rows:
            rows.append(
                AtomRow(i, "verified", j, psi.index, grad.norm, dist,
                        formula_res, norm_res, coords, target_coords)
            )
    config = {
        "space": space,
        "cost": cost_spec,
        "fd_step": fd_step,
        "tol": tol,
        "pivot_rule": pivot_rule,
        "n_source": mu0.n_atoms,
        "n_target": mu1.n_atoms,
    }
    return MapVerificationReport(
        n_atoms=mu0.n_atoms,
        n_split=n_split,
        n_verified=n_verified,
        n_skipped=n_skipped,
        n_assign_mismatch=n_mismatch,
        max_formula_residual=max_formula,
        max_norm_residual=max_norm,
        fd_step=fd_step,
        tol=tol,
        rows=rows,
        config=config,
    )


# ---------------------------------------------------------------------------
# uniqueness


@dataclass(frozen=True)
class UniquenessReport:
    """Agreement of the induced assignment across solver reruns.

    Atoms at exact dual ties may legitimately flip; they are listed in
    ``tie_atoms`` and excluded from ``disagreements``.
    """

    n_runs: int
    n_atoms: int
    tie_atoms: List[int]
    disagreements: List[int]
    split_counts: List[int]
    config: dict = field(default_factory=dict, repr=False)

    @property
    def agreed(self) -> bool:
        return not self.disagreements


def verify_uniqueness(
    space: SpaceDescriptor,
    cost_spec: CostSpec,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    perturbation_scale: float = 1e-9,
    trials: int = 3,
    seed: int = 0,
) -> UniquenessReport:
    """Re-solve under all pivot orders and tiny cost perturbations.

    Every unsplit atom away from dual ties must keep the same target across
    all runs; anything else lands in ``disagreements``.
    """
    if perturbation_scale < 0.0:
        raise ValidationError("perturbation scale must be nonnegative")
    mu0.validate_for_space(space)
    mu1.validate_for_space(space)
    cmat = costs.cost_matrix(cost_spec, space, mu0.points, mu1.points)
    scale = perturbation_scale * (1.0 + float(np.max(np.abs(cmat))))
    runs = [(rule, None) for rule in PIVOT_RULES]
    runs += [("dantzig", k) for k in range(trials)]

    assignments = []
    split_counts = []
    base_pair = None
    for rule, pert in runs:
        mat = cmat
        if pert is not None:
            rng = np.random.default_rng(np.random.SeedSequence((seed, pert)))
            mat = cmat + scale * (2.0 * rng.random(cmat.shape) - 1.0)
        plan, pair = solve_exact(mat, mu0.weights, mu1.weights, pivot_rule=rule)
        if base_pair is None:
            base_pair = pair
        run_map = {}
        for i, j in zip(plan.idx_source, plan.idx_target):
            run_map.setdefault(int(i), []).append(int(j))
        assignments.append(run_map)
        split_counts.append(sum(1 for v in run_map.values() if len(v) > 1))

    # dual gap per atom from the first run flags genuinely ambiguous atoms
    tie_tol = max(TIE_TOL_DEFAULT, 10.0 * scale)
    reduced = cmat - base_pair.phi_c[None, :]
    part = np.sort(reduced, axis=1)
    gaps = part[:, 1] - part[:, 0] if cmat.shape[1] > 1 else np.full(cmat.shape[0], np.inf)
    tie_atoms = [int(i) for i in np.nonzero(gaps <= tie_tol)[0]]
    tie_set = set(tie_atoms)

    disagreements = []
    for i in range(mu0.n_atoms):
        if i in tie_set:
            continue
        picks = set()
        split_somewhere = False
        for run_map in assignments:
            targets_i = run_map.get(i, [])
            if len(targets_i) != 1:
                split_somewhere = True
            else:
                picks.add(targets_i[0])
        if split_somewhere or len(picks) > 1:
            disagreements.append(i)
    config = {
        "space": space,
        "cost": cost_spec,
        "perturbation_scale": perturbation_scale,
        "trials": trials,
        "seed": seed,
    }
    return UniquenessReport(
        n_runs=len(runs),
        n_atoms=mu0.n_atoms,
        tie_atoms=tie_atoms,
        disagreements=sorted(disagreements),
        split_counts=split_counts,
        config=config,
    )
