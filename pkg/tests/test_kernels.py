"""Cross-checks between the pure-Python and compiled kernel backends."""

import math

import numpy as np
import pytest

from alexot import _kernels, spaces
from alexot._kernels import pure

fast = pytest.importorskip(
    "alexot._kernels._fast", reason="compiled kernels not built"
)

from conftest import all_spaces, sample_points, space_ids


def kernel_args(space):
    return spaces.kind_code(space), spaces.space_param(space)


@pytest.mark.parametrize("space", all_spaces(), ids=space_ids())
def test_pairwise_distances_backends_agree(space):
    kind, param = kernel_args(space)
    a = spaces.pad3(sample_points(space, 40, seed=1))
    b = spaces.pad3(sample_points(space, 30, seed=2))
    d_pure = pure.pairwise_distances(kind, param, a, b)
    d_fast = fast.pairwise_distances(kind, param, a, b)
    assert np.abs(d_pure - d_fast).max() <= 1e-12


@pytest.mark.parametrize("space", all_spaces(), ids=space_ids())
def test_pairwise_matches_public_distance(space):
    kind, param = kernel_args(space)
    pa = sample_points(space, 12, seed=3)
    pb = sample_points(space, 9, seed=4)
    mat = _kernels.pairwise_distances(kind, param, spaces.pad3(pa), spaces.pad3(pb))
    for i in range(12):
        for j in range(9):
            assert mat[i, j] == pytest.approx(
                spaces.distance(space, pa[i], pb[j]), abs=1e-12
            )


@pytest.mark.parametrize(
    "space,k",
    [
        (spaces.plane(), 0.0),
        (spaces.sphere(1.0), 1.0),
        (spaces.sphere(1.0), 0.0),
        (spaces.cone(1.5 * math.pi), 0.0),
        (spaces.cone(3 * math.pi), 0.0),
        (spaces.cone(1.5 * math.pi), -0.5),
    ],
    ids=["plane-k0", "sphere-k1", "sphere-k0", "cone-k0", "widecone-k0", "cone-kneg"],
)
def test_comparison_scan_backends_agree(space, k):
    kind, param = kernel_args(space)
    n = 400
    p = spaces.pad3(sample_points(space, n, seed=5))
    x = spaces.pad3(sample_points(space, n, seed=6))
    y = spaces.pad3(sample_points(space, n, seed=7))
    t_fixed = np.arange(1, 10) * 0.1
    t_rand = np.random.default_rng(8).random((n, 2))
    out_pure = pure.comparison_scan(kind, param, k, p, x, y, t_fixed, t_rand)
    out_fast = fast.comparison_scan(kind, param, k, p, x, y, t_fixed, t_rand)
    assert out_pure[3:5] == out_fast[3:5]  # evaluated / skipped counts
    assert out_pure[6] == out_fast[6]  # evaluation count
    assert out_pure[0] == pytest.approx(out_fast[0], abs=1e-12)  # min slack
    assert out_pure[5] == pytest.approx(out_fast[5], abs=1e-9)  # slack sum
    if out_pure[0] < -1e-6:
        # a genuine violation: both backends must report the same witness
        assert out_pure[1] == out_fast[1]
        assert out_pure[2] == out_fast[2]


def test_backend_name_reports_something():
    assert _kernels.backend_name() in ("pure", "fast")
    assert pure.BACKEND_NAME == "pure"
    assert fast.BACKEND_NAME == "fast"
