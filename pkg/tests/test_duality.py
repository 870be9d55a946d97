import numpy as np
import pytest

from alexot import costs, duality, solver, spaces
from alexot.duality import DiscreteMeasure, PotentialPair
from alexot.errors import DomainError, ValidationError

QUAD = costs.quadratic()
PLANE = spaces.plane()


class TestDiscreteMeasure:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            DiscreteMeasure(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([0.5, 0.6]))

    def test_weights_must_be_positive(self):
        with pytest.raises(ValidationError):
            DiscreteMeasure(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([1.0, 0.0]))

    def test_atoms_must_be_distinct(self):
        with pytest.raises(ValidationError):
            DiscreteMeasure.uniform(np.array([[0.0, 0.0], [0.0, 0.0]]))

    def test_uniform(self):
        m = DiscreteMeasure.uniform(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
        assert m.weights == pytest.approx([1 / 3] * 3)

    def test_space_validation(self):
        m = DiscreteMeasure.uniform(np.array([[1.0, 0.5], [-1.0, 0.2]]))
        with pytest.raises(ValidationError):
            m.validate_for_space(spaces.cone(np.pi))


class TestCTransform:
    def test_single_source_gives_cost_row(self):
        x0 = np.array([[0.25, 0.5]])
        targets = np.array([[0.0, 0.0], [1.0, 1.0], [0.25, 0.5]])
        out = duality.c_transform(QUAD, PLANE, [0.0], x0, targets)
        want = [costs.cost(QUAD, PLANE, x0[0], t) for t in targets]
        assert out == pytest.approx(want, abs=1e-12)

    def test_two_point_line_example(self):
        src = np.array([[0.0, 0.0], [1.0, 0.0]])
        out = duality.c_transform(QUAD, PLANE, [0.0, 0.0], src, src)
        assert out == pytest.approx([0.0, 0.0], abs=0.0)

    def test_constant_shift_equivariance(self, rng):
        src = rng.random((8, 2))
        tgt = rng.random((5, 2))
        vals = rng.random(8)
        base = duality.c_transform(QUAD, PLANE, vals, src, tgt)
        shifted = duality.c_transform(QUAD, PLANE, vals + 0.75, src, tgt)
        assert np.array_equal(shifted, base - 0.75) or shifted == pytest.approx(
            base - 0.75, abs=1e-15
        )

    def test_empty_source_rejected(self):
        with pytest.raises(DomainError):
            duality.c_transform(QUAD, PLANE, [], np.zeros((0, 2)), np.zeros((3, 2)))

    def test_order_reversal_is_exact(self, rng):
        src = rng.random((10, 2))
        tgt = rng.random((6, 2))
        v1 = rng.random(10)
        v2 = v1 + rng.random(10)  # v2 >= v1 pointwise
        t1 = duality.c_transform(QUAD, PLANE, v1, src, tgt)
        t2 = duality.c_transform(QUAD, PLANE, v2, src, tgt)
        assert np.all(t1 >= t2)

    def test_triple_transform_idempotence(self, rng):
        for trial in range(50):
            src = rng.random((7, 2)) * 2.0
            tgt = rng.random((9, 2)) * 2.0
            vals = rng.random(7)
            mat = costs.cost_matrix(QUAD, PLANE, src, tgt)
            t1 = duality.transform_from_matrix(mat, vals)
            t2 = duality.transform_from_matrix(mat.T, t1)
            t3 = duality.transform_from_matrix(mat, t2)
            assert np.abs(t3 - t1).max() <= 1e-12


class TestCConcavity:
    def test_any_transform_is_c_concave(self, rng):
        src = rng.random((6, 2))
        tgt = rng.random((8, 2))
        psi = rng.random(8)
        phi = duality.c_transform(QUAD, PLANE, psi, tgt, src)
        ok, dev = duality.is_c_concave(QUAD, PLANE, phi, src, tgt, tol=1e-12)
        assert ok and dev <= 1e-12

    def test_zero_against_superset(self, rng):
        sub = rng.random((5, 2))
        superset = np.vstack([sub, rng.random((4, 2))])
        ok, dev = duality.is_c_concave(
            QUAD, PLANE, np.zeros(5), sub, superset, tol=1e-12
        )
        assert ok and dev == 0.0

    def test_raised_value_breaks_c_concavity(self, rng):
        src = rng.random((6, 2))
        tgt = rng.random((8, 2))
        phi = duality.c_transform(QUAD, PLANE, rng.random(8), tgt, src)
        phi = phi.copy()
        phi[2] += 1.0
        ok, dev = duality.is_c_concave(QUAD, PLANE, phi, src, tgt, tol=1e-9)
        assert not ok and dev > 0.5


class TestDualObjective:
    def test_zero_potentials(self):
        mu = DiscreteMeasure.uniform(np.array([[0.0, 0.0], [1.0, 0.0]]))
        pair = PotentialPair(np.zeros(2), np.zeros(2))
        assert duality.dual_objective(pair, mu, mu) == 0.0

    def test_gauge_shift_invariance(self, rng):
        mu0 = DiscreteMeasure.uniform(rng.random((5, 2)))
        mu1 = DiscreteMeasure.uniform(rng.random((7, 2)))
        phi, phi_c = rng.random(5), rng.random(7)
        base = duality.dual_objective(PotentialPair(phi, phi_c), mu0, mu1)
        shifted = duality.dual_objective(
            PotentialPair(phi + 3.25, phi_c - 3.25), mu0, mu1
        )
        assert shifted == pytest.approx(base, abs=1e-12)

    def test_optimal_pair_matches_primal_on_two_by_two(self):
        pts0 = np.array([[0.0, 0.0], [1.0, 0.0]])
        pts1 = np.array([[1.0, 0.0], [2.0, 0.0]])
        mu0, mu1 = DiscreteMeasure.uniform(pts0), DiscreteMeasure.uniform(pts1)
        plan, pair, _ = solver.solve_for_measures(QUAD, PLANE, mu0, mu1)
        assert duality.dual_objective(pair, mu0, mu1) == pytest.approx(
            plan.cost_total, abs=1e-12
        )

    def test_weak_duality(self, rng):
        # random feasible pairs never beat random feasible plans
        for _ in range(30):
            n, m = rng.integers(2, 7, size=2)
            src = rng.random((n, 2)) * 2
            tgt = rng.random((m, 2)) * 2
            w0 = rng.random(n) + 0.1
            w0 /= w0.sum()
            w1 = rng.random(m) + 0.1
            w1 /= w1.sum()
            mu0 = DiscreteMeasure(src, w0)
            mu1 = DiscreteMeasure(tgt, w1)
            cmat = costs.cost_matrix(QUAD, PLANE, src, tgt)
            phi = rng.random(n)
            phi_c = duality.transform_from_matrix(cmat, phi)
            pair = PotentialPair(phi, phi_c)
            assert pair.is_feasible(cmat, tol=1e-12)
            plan_cost = float((w0[:, None] * w1[None, :] * cmat).sum())  # product plan
            assert duality.dual_objective(pair, mu0, mu1) <= plan_cost + 1e-12

    def test_lipschitz_bound_of_transform(self, rng):
        # transforms of quadratic costs inherit the diameter as a Lipschitz
        # constant on bounded samples
        src = rng.random((12, 2)) * 1.5
        tgt = rng.random((9, 2)) * 1.5
        phi = rng.random(12)
        phi_c = duality.c_transform(QUAD, PLANE, phi, src, tgt)
        allpts = np.vstack([src, tgt])
        diam = float(costs.distance_matrix(PLANE, allpts, allpts).max())
        for j in range(9):
            for jp in range(9):
                lhs = abs(phi_c[j] - phi_c[jp])
                rhs = diam * spaces.distance(PLANE, tgt[j], tgt[jp]) + 1e-9
                assert lhs <= rhs
