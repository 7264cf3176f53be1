import numpy as np
import pytest

from dltcodes.degree_dist import DegreeDistribution

# r=10 reference relay distribution used throughout the regression tests.
REFERENCE_GAMMA = {1: 0.0058, 2: 0.4281, 3: 0.3411, 10: 0.2250}

# Decoder-side distribution after own-bit removal for the reference design,
# derived once by exact rational arithmetic (fractions.Fraction) from the
# j -> {j-1, j} transition probabilities C(r-1,d)/C(r,j); frozen here so the
# floating-point implementation is checked against an independent oracle.
REFERENCE_PHI0 = 29 / 50000
REFERENCE_PHI_HAT = {
    1: 1514 / 16657,
    2: 14827 / 33314,
    3: 7959 / 33314,
    9: 3750 / 16657,
}


@pytest.fixture(scope="session")
def reference_gamma():
    return DegreeDistribution.from_pairs("node", REFERENCE_GAMMA)


def random_node_dist(rng, max_degree=12, allow_zero=False):
    """Random node-perspective distribution for property tests."""
    n = rng.integers(2, max_degree + 1)
    p = rng.random(n + 1)
    if not allow_zero:
        p[0] = 0.0
    p /= p.sum()
    return DegreeDistribution("node", p)
