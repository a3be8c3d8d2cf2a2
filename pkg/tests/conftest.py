import math

import numpy as np
import pytest

from mlti.qstate import DensityMatrix2


def random_density(rng) -> DensityMatrix2:
    """A random valid mixed single-qubit state in the {+,-} basis."""
    pp = rng.uniform(0.0, 1.0)
    mm = 1.0 - pp
    r_max = math.sqrt(pp * mm)
    r = rng.uniform(0.0, r_max)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return DensityMatrix2(pp, mm, r * complex(math.cos(phase), math.sin(phase)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
