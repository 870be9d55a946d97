"""Exact discrete transport solver with dual certificates.

A transportation-specialized network simplex: the basis is a spanning tree
of the bipartite source/target graph, dual potentials fall out of the tree,
and the returned plan is an exact vertex of the transportation polytope.
Weights are perturbed internally to keep pivoting nondegenerate and the
final flows are recomputed on the exact input weights, so marginals are
honored to machine precision.

`oracle_bruteforce` is an independent exhaustive check for tiny instances:
permutation enumeration for uniform square problems, spanning-tree vertex
enumeration otherwise.

Each solve is single-threaded and self-contained; separate instances may be
solved concurrently.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import costs
from .costs import CostSpec
from .duality import DiscreteMeasure, PotentialPair, dual_objective
from .errors import SizeLimitError, ValidationError
from .spaces import SpaceDescriptor

PIVOT_RULES = ("dantzig", "bland", "bland_rev")

_BALANCE_TOL = 1e-9
_DROP_TOL = 1e-12


@dataclass(frozen=True)
class TransportPlan:
    """Sparse coupling returned by the solver (a polytope vertex)."""

    n_sources: int
    n_targets: int
    idx_source: np.ndarray
    idx_target: np.ndarray
    mass: np.ndarray
    cost_total: float

    @property
    def entries(self) -> List[Tuple[int, int, float]]:
        return [
            (int(i), int(j), float(f))
            for i, j, f in zip(self.idx_source, self.idx_target, self.mass)
        ]

    def row_sums(self) -> np.ndarray:
        out = np.zeros(self.n_sources)
        np.add.at(out, self.idx_source, self.mass)
        return out

    def col_sums(self) -> np.ndarray:
        out = np.zeros(self.n_targets)
        np.add.at(out, self.idx_target, self.mass)
        return out

    def assignment_of(self, i: int) -> List[int]:
        """Targets receiving mass from source atom ``i``."""
        return [int(j) for j in self.idx_target[self.idx_source == i]]


def _validate_weights(cost_mat, w0, w1):
    c = np.ascontiguousarray(cost_mat, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] == 0:
        raise ValidationError("cost matrix must be a nonempty 2-d array")
    if not np.all(np.isfinite(c)):
        raise ValidationError("costs must be finite")
    a = np.asarray(w0, dtype=np.float64)
    b = np.asarray(w1, dtype=np.float64)
    if a.shape != (c.shape[0],) or b.shape != (c.shape[1],):
        raise ValidationError("weight vectors must match the cost matrix shape")
    if not (np.all(a > 0.0) and np.all(b > 0.0)):
        raise ValidationError("weights must be strictly positive")
    if abs(float(a.sum()) - float(b.sum())) > _BALANCE_TOL:
        raise ValidationError("unbalanced weights: totals differ")
    return c, a, b


def _northwest_basis(a, b):
    """Initial spanning-tree basis from the northwest-corner walk."""
    n, m = len(a), len(b)
    arcs = []
    flows = []
    ar = a.copy()
    br = b.copy()
    i = j = 0
    while True:
        t = min(ar[i], br[j])
        arcs.append((i, j))
        flows.append(t)
        ar[i] -= t
        br[j] -= t
        if i == n - 1 and j == m - 1:
            break
        if ar[i] <= 0.0 and i < n - 1:
            i += 1
        elif j < m - 1:
            j += 1
        else:
            i += 1
    return arcs, flows


def _tree_structure(arcs, n, m):
    """Parent pointers, parent arcs, depths and a BFS order for the basis."""
    total = n + m
    adj = [[] for _ in range(total)]
    for idx, (i, j) in enumerate(arcs):
        adj[i].append((n + j, idx))
        adj[n + j].append((i, idx))
    parent = [-1] * total
    parent_arc = [-1] * total
    depth = [0] * total
    order = [0]
    parent[0] = 0
    for node in order:
        for nb, aidx in adj[node]:
            if parent[nb] == -1:
                parent[nb] = node
                parent_arc[nb] = aidx
                depth[nb] = depth[node] + 1
                order.append(nb)
    parent[0] = -1
    if len(order) != total:
        raise RuntimeError("internal error: basis does not span the node set")
    return parent, parent_arc, depth, order


def _duals_from_tree(arcs, cost_mat, n, parent_arc, order):
    u = np.empty(n)
    v = np.empty(cost_mat.shape[1])
    u[0] = 0.0
    for node in order[1:]:
        i, j = arcs[parent_arc[node]]
        if node < n:
            u[node] = cost_mat[i, j] - v[j]
        else:
            v[node - n] = cost_mat[i, j] - u[i]
    return u, v


def _entering_arc(reduced, rule, tol):
    if rule == "dantzig":
        flat = int(np.argmin(reduced))
        return flat if reduced.flat[flat] < -tol else -1
    mask = (reduced < -tol).ravel()
    if not mask.any():
        return -1
    if rule == "bland":
        return int(np.argmax(mask))
    return mask.size - 1 - int(np.argmax(mask[::-1]))


def _cycle_arcs(s_node, t_node, parent, parent_arc, depth):
    """Arcs of the tree path from s_node to t_node, ordered from the s side."""
    up_s, up_t = [], []
    a, b = s_node, t_node
    while depth[a] > depth[b]:
        up_s.append(parent_arc[a])
        a = parent[a]
    while depth[b] > depth[a]:
        up_t.append(parent_arc[b])
        b = parent[b]
    while a != b:
        up_s.append(parent_arc[a])
        a = parent[a]
        up_t.append(parent_arc[b])
        b = parent[b]
    return up_s + up_t[::-1]


def _tree_flows(arcs, w0, w1):
    """Exact flows of the basis tree for the given weights, by leaf peeling."""
    n, m = len(w0), len(w1)
    total = n + m
    bal = np.concatenate([w0, w1]).astype(np.float64)
    adj = [[] for _ in range(total)]
    for idx, (i, j) in enumerate(arcs):
        adj[i].append(idx)
        adj[n + j].append(idx)
    deg = [len(lst) for lst in adj]
    removed = [False] * len(arcs)
    flow = [0.0] * len(arcs)
    stack = [node for node in range(total) if deg[node] == 1]
    while stack:
        node = stack.pop()
        if deg[node] != 1:
            continue
        live = -1
        for idx in adj[node]:
            if not removed[idx]:
                live = idx
                break
        if live < 0:
            continue
        i, j = arcs[live]
        other = n + j if node == i else i
        f = bal[node]
        flow[live] = f
        bal[other] -= f
        bal[node] = 0.0
        removed[live] = True
        deg[node] -= 1
        deg[other] -= 1
        if deg[other] == 1:
            stack.append(other)
    if float(np.max(np.abs(bal))) > _BALANCE_TOL:
        raise RuntimeError("internal error: leaf peeling left unbalanced mass")
    return flow


def _spread_duals(c, reduced, idx_source, idx_target, u, v):
    """Move tree duals into the relative interior of the optimal dual face.

    Tree duals are tight on every basic arc, including zero-flow ones, which
    plants spurious dual ties at many source atoms of degenerate instances.
    The support graph leaves one additive constant free per connected
    component; shifting by the midpoint of the extreme feasible shifts keeps
    optimality and leaves a constraint tight only where the entire optimal
    face is (a genuine transport-cell boundary).
    """
    n, m = c.shape
    parent = list(range(n + m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in zip(idx_source, idx_target):
        ra, rb = find(int(i)), find(n + int(j))
        if ra != rb:
            parent[ra] = rb
    roots = {}
    lab0 = np.empty(n, dtype=np.int64)
    lab1 = np.empty(m, dtype=np.int64)
    for node in range(n + m):
        r = find(node)
        lab = roots.setdefault(r, len(roots))
        if node < n:
            lab0[node] = lab
        else:
            lab1[node - n] = lab
    k = len(roots)
    if k <= 1:
        return u, v

    # W[a, b] = smallest reduced cost among arcs from component a's sources
    # to component b's targets; the shifts t must satisfy t_a - t_b <= W[a, b]
    w = np.full((k, k), np.inf)
    np.minimum.at(w, (np.repeat(lab0, m), np.tile(lab1, n)), reduced.ravel())
    w = np.maximum(w, 0.0)

    def max_solution(weights):
        t = np.full(k, np.inf)
        t[0] = 0.0
        for _ in range(k):
            cand = np.min(t[None, :] + weights, axis=1)
            cand[0] = 0.0
            nxt = np.minimum(t, cand)
            if np.array_equal(nxt, t):
                break
            t = nxt
        return t

    t_hi = max_solution(w)
    t_lo = -max_solution(w.T)
    t_mid = 0.5 * (t_hi + t_lo)
    return u + t_mid[lab0], v - t_mid[lab1]


def solve_exact(
    cost_mat,
    w0,
    w1,
    pivot_rule: str = "dantzig",
) -> Tuple[TransportPlan, PotentialPair]:
    """Solve the discrete transport problem exactly.

    Returns an optimal vertex plan together with feasible dual potentials
    satisfying complementary slackness on the support; the dual objective
    matches the plan cost to solver precision.  ``pivot_rule`` selects the
    deterministic pivot order ("dantzig", "bland" or "bland_rev"); on
    degenerate stalls the solver switches to Bland's rule, which cannot
    cycle.
    """
    if pivot_rule not in PIVOT_RULES:
        raise ValidationError(f"pivot rule must be one of {PIVOT_RULES}")
    c, a, b = _validate_weights(cost_mat, w0, w1)
    n, m = c.shape

    # perturbation makes the pivot path nondegenerate; it never reaches the
    # returned flows, which are recomputed from the exact weights
    eps = 1e-10 * float(min(a.min(), b.min()))
    a_pert = a + eps
    b_pert = b.copy()
    b_pert[-1] += n * eps

    arcs, flows = _northwest_basis(a_pert, b_pert)
    flow_of = {arc: f for arc, f in zip(arcs, flows)}
    tol_entering = 1e-11 * (1.0 + float(np.max(np.abs(c))))
    stall_limit = n + m
    max_pivots = 1000 + 60 * n * m
    rule = pivot_rule
    stalls = 0
    for _ in range(max_pivots):
        parent, parent_arc, depth, order = _tree_structure(arcs, n, m)
        u, v = _duals_from_tree(arcs, c, n, parent_arc, order)
        reduced = c - u[:, None] - v[None, :]
        flat = _entering_arc(reduced, rule, tol_entering)
        if flat < 0:
            break
        ei, ej = divmod(flat, m)
        path = _cycle_arcs(ei, n + ej, parent, parent_arc, depth)
        backward = path[0::2]
        delta = math.inf
        leaving = -1
        for idx in backward:
            f = flow_of[arcs[idx]]
            if leaving < 0 or f < delta or (f == delta and arcs[idx] < arcs[leaving]):
                delta = f
                leaving = idx
        if leaving < 0:
            raise RuntimeError("internal error: no leaving arc on the cycle")
        for pos, idx in enumerate(path):
            arc = arcs[idx]
            if pos % 2 == 0:
                flow_of[arc] = max(flow_of[arc] - delta, 0.0)
            else:
                flow_of[arc] = flow_of[arc] + delta
        old = arcs[leaving]
        del flow_of[old]
        arcs[leaving] = (ei, ej)
        flow_of[(ei, ej)] = delta
        if delta <= 1e-15 * (1.0 + float(a.max())):
            stalls += 1
            if stalls >= stall_limit:
                rule = "bland"
        else:
            stalls = 0
    else:
        raise RuntimeError("internal error: pivot limit exceeded")

    parent, parent_arc, depth, order = _tree_structure(arcs, n, m)
    u, v = _duals_from_tree(arcs, c, n, parent_arc, order)
    reduced = c - u[:, None] - v[None, :]
    if float(reduced.min()) < -1e-9 * (1.0 + float(np.max(np.abs(c)))):
        raise RuntimeError("internal error: post-hoc optimality check failed")

    exact = _tree_flows(arcs, a, b)
    keep_i, keep_j, keep_f = [], [], []
    for (i, j), f in sorted(zip(arcs, exact)):
        if f < -_DROP_TOL:
            raise RuntimeError("internal error: negative basic flow")
        if f > _DROP_TOL:
            keep_i.append(i)
            keep_j.append(j)
            keep_f.append(f)
    idx_source = np.asarray(keep_i, dtype=np.int64)
    idx_target = np.asarray(keep_j, dtype=np.int64)
    mass = np.asarray(keep_f, dtype=np.float64)
    cost_total = float(mass @ c[idx_source, idx_target]) if mass.size else 0.0

    u, v = _spread_duals(c, reduced, idx_source, idx_target, u, v)
    if float((c - u[:, None] - v[None, :]).min()) < -1e-9 * (
        1.0 + float(np.max(np.abs(c)))
    ):
        raise RuntimeError("internal error: dual spreading broke feasibility")
    shift = float(u.min())
    pair = PotentialPair(u - shift, v + shift)
    plan = TransportPlan(n, m, idx_source, idx_target, mass, cost_total)
    return plan, pair


def solve_for_measures(
    cost_spec: CostSpec,
    space: SpaceDescriptor,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    pivot_rule: str = "dantzig",
):
    """Build the geometric cost matrix and solve; returns (plan, pair, costs)."""
    mu0.validate_for_space(space)
    mu1.validate_for_space(space)
    mat = costs.cost_matrix(cost_spec, space, mu0.points, mu1.points)
    plan, pair = solve_exact(mat, mu0.weights, mu1.weights, pivot_rule=pivot_rule)
    return plan, pair, mat


def duality_gap(
    plan: TransportPlan,
    pair: PotentialPair,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
) -> float:
    """Primal cost minus dual objective;0 up to rounding at joint optimality."""
    return plan.cost_total - dual_objective(pair, mu0, mu1)


# ---------------------------------------------------------------------------
# exhaustive oracle


def _is_uniform(w) -> bool:
    return bool(np.all(np.abs(w - 1.0 / len(w)) <= 1e-12))


def _spanning(arc_set, n, m):
    total = n + m
    adj = [[] for _ in range(total)]
    for i, j in arc_set:
        adj[i].append(n + j)
        adj[n + j].append(i)
    seen = [False] * total
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        node = stack.pop()
        for nb in adj[node]:
            if not seen[nb]:
                seen[nb] = True
                count += 1
                stack.append(nb)
    return count == total


def oracle_bruteforce(cost_mat, w0, w1) -> float:
    """Exact optimum by exhaustive enumeration (tiny instances only).

    Square uniform instances up to n = 8 are enumerated over permutations;
    general instances with n*m <= 12 over the spanning-tree vertices of the
    transportation polytope.  Anything larger raises `SizeLimitError`.
    """
    c, a, b = _validate_weights(cost_mat, w0, w1)
    n, m = c.shape
    if n == m and n <= 8 and _is_uniform(a) and _is_uniform(b):
        best = math.inf
        for perm in itertools.permutations(range(n)):
            val = sum(c[i, perm[i]] for i in range(n)) / n
            best = min(best, val)
        return float(best)
    if n * m <= 12:
        all_arcs = [(i, j) for i in range(n) for j in range(m)]
        best = math.inf
        for arc_set in itertools.combinations(all_arcs, n + m - 1):
            if not _spanning(arc_set, n, m):
                continue
            flows = _tree_flows(list(arc_set), a, b)
            if min(flows) < -1e-12:
                continue
            val = sum(max(f, 0.0) * c[i, j] for (i, j), f in zip(arc_set, flows))
            best = min(best, val)
        if math.isinf(best):
            raise RuntimeError("internal error: no feasible vertex found")
        return float(best)
    raise SizeLimitError(
        "oracle handles n = m <= 8 with uniform weights or n*m <= 12"
    )
