import sys
from pathlib import Path

import numpy as np
import pytest

from alexot import spaces

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def all_spaces():
    return [
        spaces.plane(),
        spaces.sphere(1.0),
        spaces.sphere(4.0),
        spaces.cone(1.5 * np.pi),
        spaces.cone(2.0 * np.pi),
        spaces.cone(0.8 * np.pi),
    ]


def space_ids():
    out = []
    for s in all_spaces():
        if s.kind == "plane":
            out.append("plane")
        elif s.kind == "sphere":
            out.append(f"sphere{s.curvature:g}")
        else:
            out.append(f"cone{s.total_angle:.3g}")
    return out


def sample_points(space, n, seed):
    return spaces.sample_region(space, spaces.default_region(space), n, seed)
