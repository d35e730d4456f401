import numpy as np
import pytest
from hypothesis import strategies as st

from motionfactor.algebra import DualQuaternion


def random_rotation(rng, h0=True):
    """Random rotation generator (dual part orthogonal to the axis direction)."""
    c = rng.uniform(-1.0, 1.0, 8)
    if not h0:
        c[0] = 0.0
    c[4] = 0.0
    v = c[1:4]
    c[5:8] -= (v @ c[5:8]) / (v @ v) * v
    return DualQuaternion(c)


def random_displacement(rng):
    """Random dual quaternion satisfying the Study condition with nonzero primal part."""
    p = rng.normal(size=4)
    q = rng.normal(size=4)
    q -= (p @ q) / (p @ p) * p
    return DualQuaternion(np.r_[p, q])


finite = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)
dq_arrays = st.lists(finite, min_size=8, max_size=8).map(lambda v: np.array(v))
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
