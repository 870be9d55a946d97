import math

import numpy as np
import pytest

from alexot import costs, monge, solver, spaces
from alexot.duality import DiscreteMeasure
from alexot.errors import NotDifferentiableError, SingularPointError

QUAD = costs.quadratic()
PLANE = spaces.plane()
SPHERE = spaces.sphere(1.0)
CONE = spaces.cone(1.5 * math.pi)


def single_target_potential(space, target, cost=QUAD):
    return monge.SemiDiscretePotential(space, cost, np.asarray([target]), np.zeros(1))


class TestPotentialValue:
    def test_single_target_is_half_squared_distance(self):
        pot = single_target_potential(PLANE, [1.0, 2.0])
        x = np.array([4.0, 6.0])
        val = monge.potential_value(pot, x)
        assert val.value == pytest.approx(12.5, abs=1e-12)
        assert val.index == 0 and not val.tie

    def test_colocated_atom(self):
        targets = np.array([[0.0, 0.0], [1.0, 0.0]])
        pot = monge.SemiDiscretePotential(PLANE, QUAD, targets, np.zeros(2))
        val = monge.potential_value(pot, np.array([1.0, 0.0]))
        assert val.value == 0.0 and val.index == 1

    def test_tie_on_bisector(self):
        targets = np.array([[-1.0, 0.0], [1.0, 0.0]])
        pot = monge.SemiDiscretePotential(PLANE, QUAD, targets, np.zeros(2))
        val = monge.potential_value(pot, np.array([0.0, 0.7]))
        assert val.tie
        assert val.gap <= 1e-15


class TestPotentialGradient:
    def test_plane_single_target_closed_form(self):
        y = np.array([0.3, -0.4])
        pot = single_target_potential(PLANE, y)
        x = np.array([1.0, 1.0])
        grad = monge.potential_gradient(pot, x, fd_step=1e-5)
        assert grad.components == pytest.approx(x - y, abs=1e-9)

    def test_sphere_single_target_matches_log_map(self):
        y = spaces.sphere_point([0.1, 0.7, 0.7])
        x = spaces.sphere_point([1.0, 0.1, -0.2])
        pot = single_target_potential(SPHERE, y)
        grad = monge.potential_gradient(pot, x, fd_step=1e-6)
        vec = spaces.log_map(SPHERE, x, y)
        # the gradient of d^2/2 is minus the log vector
        assert grad.components == pytest.approx(-vec.components, abs=1e-7)

    def test_gradient_vanishes_at_the_target(self):
        y = np.array([0.25, 0.5])
        pot = single_target_potential(PLANE, y)
        grad = monge.potential_gradient(pot, y, fd_step=1e-5)
        assert grad.norm <= 1e-10

    def test_tie_point_raises(self):
        targets = np.array([[-1.0, 0.0], [1.0, 0.0]])
        pot = monge.SemiDiscretePotential(PLANE, QUAD, targets, np.zeros(2))
        with pytest.raises(NotDifferentiableError):
            monge.potential_gradient(pot, np.array([0.0, 0.4]), fd_step=1e-5)

    def test_apex_raises(self):
        pot = single_target_potential(CONE, [1.0, 0.5])
        with pytest.raises(SingularPointError):
            monge.potential_gradient(pot, np.array([0.0, 0.0]), fd_step=1e-5)

    def test_central_differences_are_second_order(self):
        # halving the step shrinks the closed-form deviation about fourfold
        y = spaces.sphere_point([0.0, 0.6, 0.8])
        x = spaces.sphere_point([0.9, -0.1, 0.4])
        pot = single_target_potential(SPHERE, y)
        want = -spaces.log_map(SPHERE, x, y).components
        errs = []
        for h in (2e-3, 1e-3, 5e-4):
            got = monge.potential_gradient(pot, x, fd_step=h).components
            errs.append(float(np.abs(got - want).max()))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.35)
        assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.35)


class TestMongePoint:
    def test_everything_maps_to_single_target(self):
        y = np.array([0.4, 0.9])
        pot = single_target_potential(PLANE, y)
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.random(2) * 2.0
            out = monge.monge_point(pot, x, fd_step=1e-5)
            assert spaces.distance(PLANE, out, y) <= 1e-6

    def test_zero_gradient_returns_the_point(self):
        y = np.array([0.4, 0.9])
        pot = single_target_potential(PLANE, y)
        out = monge.monge_point(pot, y, fd_step=1e-5)
        assert np.array_equal(out, y)

    def test_power_cost_rescales_gradient_norm(self):
        # on a line with cost d^3/3 the gradient norm is d^2; the inverse
        # derivative must recover d before shooting
        y = np.array([2.0, 0.0])
        x = np.array([0.5, 0.0])
        pot = single_target_potential(PLANE, y, cost=costs.power(3.0))
        grad = monge.potential_gradient(pot, x, fd_step=1e-6)
        assert grad.norm == pytest.approx(1.5**2, abs=1e-6)
        out = monge.monge_point(pot, x, fd_step=1e-6)
        assert spaces.distance(PLANE, out, y) <= 1e-6

    def test_sphere_and_cone_single_target(self):
        for space, seed in ((SPHERE, 1), (CONE, 2)):
            pts = spaces.sample_region(space, spaces.default_region(space), 10, seed)
            y = pts[0]
            pot = single_target_potential(space, y)
            for x in pts[1:]:
                if space.kind == "cone" and x[0] < 0.1:
                    continue
                d = spaces.distance(space, x, y)
                if d < 1e-3 or (space.kind == "sphere" and d > math.pi - 0.2):
                    continue
                if not monge._smooth_at(space, x, y, 1e-3):
                    continue
                out = monge.monge_point(pot, x, fd_step=1e-6)
                assert spaces.distance(space, out, y) <= 1e-4


class TestVerifyGraphAndFormula:
    def test_translation_instance(self):
        grid = spaces.grid_points(spaces.RectRegion(0, 1, 0, 1), 20, 20)
        mu0 = DiscreteMeasure.uniform(grid)
        mu1 = DiscreteMeasure.uniform(grid + np.array([2.0, 0.0]))
        rep = monge.verify_graph_and_formula(PLANE, QUAD, mu0, mu1)
        assert rep.n_split == 0
        assert rep.n_assign_mismatch == 0
        assert rep.max_formula_residual <= 1e-6
        assert rep.max_norm_residual <= 1e-6
        verified = [r for r in rep.rows if r.status == "verified"]
        assert len(verified) == 400
        assert all(r.assigned == r.index for r in verified)

    def test_translation_optimality_certified_by_candidate_potentials(self):
        # independent route: the affine potentials tied to the translation
        # satisfy feasibility with equality exactly on the translation pairs,
        # so the translation plan is optimal and must match the solver cost
        grid = spaces.grid_points(spaces.RectRegion(0, 1, 0, 1), 20, 20)
        shift = np.array([2.0, 0.0])
        cmat = costs.cost_matrix(QUAD, PLANE, grid, grid + shift)
        phi_c = (grid + shift) @ shift          # candidate dual on targets
        phi = cmat.diagonal() - phi_c           # tight on the translation pairs
        slack = cmat - phi[:, None] - phi_c[None, :]
        assert slack.min() >= -1e-12
        assert np.abs(slack.diagonal()).max() <= 1e-12
        candidate_cost = float(cmat.diagonal().mean())
        w = np.full(400, 1.0 / 400.0)
        plan, _ = solver.solve_exact(cmat, w, w)
        assert plan.cost_total == pytest.approx(candidate_cost, rel=1e-12)

    def test_single_target_instance(self):
        rng = np.random.default_rng(8)
        src = rng.random((60, 2))
        mu0 = DiscreteMeasure.uniform(src)
        mu1 = DiscreteMeasure.uniform(np.array([[0.5, 0.5]]))
        rep = monge.verify_graph_and_formula(PLANE, QUAD, mu0, mu1)
        assert rep.n_split == 0
        assert rep.passed
        assert rep.max_formula_residual <= 1e-6

    def test_cone_refinement_ladder(self):
        targets = spaces.sample_region(CONE, spaces.AnnulusRegion(1.0, 2.0), 5, seed=42)
        mu1 = DiscreteMeasure.uniform(targets)
        fractions = []
        for idx, n in enumerate((100, 200, 400)):
            src = spaces.sample_region(
                CONE, spaces.AnnulusRegion(1.0, 2.0), n,
                np.random.SeedSequence((7, idx)),
            )
            rep = monge.verify_graph_and_formula(CONE, QUAD, DiscreteMeasure.uniform(src), mu1)
            assert rep.n_atoms == rep.n_split + rep.n_verified + rep.n_skipped
            assert rep.n_assign_mismatch == 0
            assert rep.max_formula_residual <= 1e-4
            assert rep.max_norm_residual <= 1e-4
            fractions.append(rep.split_fraction)
        assert all(b <= a + 1e-15 for a, b in zip(fractions, fractions[1:]))

    def test_equality_characterization_on_support(self):
        # psi(x) + dual[assigned] equals the cost exactly at the assigned
        # target and stays below cost + tol at every other target
        rng = np.random.default_rng(12)
        src = rng.random((40, 2)) * 2.0
        tgt = rng.random((6, 2)) * 2.0
        mu0, mu1 = DiscreteMeasure.uniform(src), DiscreteMeasure.uniform(tgt)
        plan, pair, cmat = solver.solve_for_measures(QUAD, PLANE, mu0, mu1)
        pot = monge.SemiDiscretePotential(PLANE, QUAD, tgt, pair.phi_c)
        for i, j, _ in plan.entries:
            psi = monge.potential_value(pot, src[i])
            assert psi.value + pair.phi_c[j] == pytest.approx(cmat[i, j], abs=1e-9)
            overshoot = psi.value + pair.phi_c - cmat[i]
            assert overshoot.max() <= 1e-9

    def test_brenier_coordinate_cross_check(self):
        # on the flat plane the shot point is literally x - grad in global
        # coordinates; bypass exp_map and compare
        rng = np.random.default_rng(21)
        src = rng.random((50, 2)) * 2.0
        tgt = rng.random((7, 2)) * 2.0
        mu0, mu1 = DiscreteMeasure.uniform(src), DiscreteMeasure.uniform(tgt)
        rep = monge.verify_graph_and_formula(PLANE, QUAD, mu0, mu1)
        plan, pair, _ = solver.solve_for_measures(QUAD, PLANE, mu0, mu1)
        pot = monge.SemiDiscretePotential(PLANE, QUAD, tgt, pair.phi_c)
        for row in rep.rows:
            if row.status != "verified":
                continue
            grad = monge.potential_gradient(pot, src[row.index], fd_step=rep.fd_step)
            direct = src[row.index] - grad.components
            assert spaces.distance(PLANE, direct, tgt[row.assigned]) <= 1e-6

    def test_power_cost_generic_instance(self):
        rng = np.random.default_rng(31)
        src = rng.random((80, 2))
        tgt = rng.random((8, 2))
        rep = monge.verify_graph_and_formula(
            PLANE, costs.power(3.0), DiscreteMeasure.uniform(src), DiscreteMeasure.uniform(tgt)
        )
        assert rep.n_assign_mismatch == 0
        assert rep.max_formula_residual <= 1e-6
        assert rep.max_norm_residual <= 1e-6
        assert rep.n_verified >= 70


class TestVerifyUniqueness:
    def test_uniform_weights_agree_up_to_flagged_ties(self):
        # uniform 25-to-5 weights are divisibility-degenerate: zero-cost
        # support cycles can split single atoms, and exactly those atoms
        # must come back flagged rather than as disagreements
        rng = np.random.default_rng(41)
        src = rng.random((25, 2)) * 2.0
        tgt = rng.random((5, 2)) * 2.0
        rep = monge.verify_uniqueness(
            PLANE, QUAD, DiscreteMeasure.uniform(src), DiscreteMeasure.uniform(tgt), seed=1
        )
        assert rep.agreed
        assert rep.disagreements == []
        assert rep.n_runs == 6

    def test_generic_weights_tie_exactly_the_split_atoms(self):
        # a nondegenerate vertex has full support n + m - 1, so exactly
        # m - 1 atoms split; those sit on cell boundaries and must be the
        # flagged ties, with no disagreement anywhere else
        rng = np.random.default_rng(45)
        src = rng.random((25, 2)) * 2.0
        tgt = rng.random((5, 2)) * 2.0
        w0 = rng.random(25) + 0.2
        w0 /= w0.sum()
        w1 = rng.random(5) + 0.2
        w1 /= w1.sum()
        mu0, mu1 = DiscreteMeasure(src, w0), DiscreteMeasure(tgt, w1)
        rep = monge.verify_uniqueness(PLANE, QUAD, mu0, mu1, seed=1)
        assert rep.agreed
        assert len(rep.tie_atoms) <= 4
        plan, _, _ = solver.solve_for_measures(QUAD, PLANE, mu0, mu1)
        split = [i for i in range(25) if len(plan.assignment_of(i)) > 1]
        assert rep.tie_atoms == split

    def test_symmetric_instance_flags_ties_without_failing(self):
        src = np.array([[-1.0, 0.0], [1.0, 0.0]])
        tgt = np.array([[0.0, -1.0], [0.0, 1.0]])
        rep = monge.verify_uniqueness(
            PLANE, QUAD, DiscreteMeasure.uniform(src), DiscreteMeasure.uniform(tgt), seed=2
        )
        assert rep.agreed  # disagreements exclude flagged ties
        assert rep.tie_atoms == [0, 1]

    def test_single_target_trivially_unique(self):
        rng = np.random.default_rng(43)
        src = rng.random((10, 2))
        rep = monge.verify_uniqueness(
            PLANE, QUAD, DiscreteMeasure.uniform(src),
            DiscreteMeasure.uniform(np.array([[0.3, 0.3]])), seed=3
        )
        assert rep.agreed and rep.tie_atoms == []

    def test_small_instance_value_matches_oracle_across_runs(self):
        rng = np.random.default_rng(44)
        src = rng.random((4, 2))
        tgt = rng.random((4, 2))
        mu0, mu1 = DiscreteMeasure.uniform(src), DiscreteMeasure.uniform(tgt)
        cmat = costs.cost_matrix(QUAD, PLANE, src, tgt)
        want = solver.oracle_bruteforce(cmat, mu0.weights, mu1.weights)
        for rule in solver.PIVOT_RULES:
            plan, _ = solver.solve_exact(cmat, mu0.weights, mu1.weights, pivot_rule=rule)
            assert plan.cost_total == pytest.approx(want, abs=1e-12)
        rep = monge.verify_uniqueness(PLANE, QUAD, mu0, mu1, seed=4)
        assert rep.agreed
