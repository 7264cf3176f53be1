import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dltcodes.degree_dist import (
    DegreeDistribution,
    InvalidDistributionError,
    decoder_side_dist,
    edge_to_node,
    load_distribution,
    node_to_edge,
    poisson_variable_dist,
    raptor_paper_dist,
    robust_soliton,
    save_distribution,
)

from conftest import REFERENCE_PHI0, REFERENCE_PHI_HAT, random_node_dist


def test_validation_rejects_bad_vectors():
    with pytest.raises(InvalidDistributionError):
        DegreeDistribution("node", np.array([0.5, 0.6]))
    with pytest.raises(InvalidDistributionError):
        DegreeDistribution("node", np.array([-0.1, 1.1]))
    with pytest.raises(InvalidDistributionError):
        DegreeDistribution("sideways", np.array([1.0]))
    with pytest.raises(InvalidDistributionError):
        DegreeDistribution("node", np.zeros((2, 2)))


def test_from_pairs_and_as_dict_round_trip():
    pairs = {1: 0.25, 3: 0.5, 7: 0.25}
    d = DegreeDistribution.from_pairs("node", pairs)
    assert d.as_dict() == pairs
    assert d.max_degree == 7
    assert d.mass_at(2) == 0.0
    assert d.mass_at(100) == 0.0


def test_node_to_edge_known_example():
    # node {1: 1/2, 2: 1/2} -> edge masses proportional to degree * prob
    d = DegreeDistribution.from_pairs("node", {1: 0.5, 2: 0.5})
    e = node_to_edge(d)
    assert e.perspective == "edge"
    assert np.allclose(e.probs[1:], [1 / 3, 2 / 3])


def test_edge_poly_is_shifted_by_one_degree():
    e = DegreeDistribution.from_pairs("edge", {1: 0.25, 3: 0.75})
    x = 0.3
    assert math.isclose(e.poly(x), 0.25 + 0.75 * x**2, rel_tol=1e-15)
    n = DegreeDistribution.from_pairs("node", {1: 0.25, 3: 0.75})
    assert math.isclose(n.poly(x), 0.25 * x + 0.75 * x**3, rel_tol=1e-15)


def test_poly_at_one_is_total_mass():
    rng = np.random.default_rng(7)
    for _ in range(20):
        d = random_node_dist(rng)
        assert math.isclose(d.poly(1.0), 1.0, abs_tol=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_perspective_transform_round_trip(seed):
    # criterion: node -> edge -> node identity within 1e-12
    rng = np.random.default_rng(seed)
    d = random_node_dist(rng)
    back = edge_to_node(node_to_edge(d))
    assert np.max(np.abs(back.probs - d.probs)) < 1e-12


def test_transforms_reject_wrong_perspective():
    n = DegreeDistribution.from_pairs("node", {1: 1.0})
    e = node_to_edge(n)
    with pytest.raises(InvalidDistributionError):
        node_to_edge(e)
    with pytest.raises(InvalidDistributionError):
        edge_to_node(n)
    with pytest.raises(InvalidDistributionError):
        node_to_edge(DegreeDistribution.from_pairs("node", {0: 1.0}))


def test_poisson_variable_dist_matches_high_precision_pmf():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    mu, dmax = 3.7, 25
    d = poisson_variable_dist(mu, dmax)
    tail = mpmath.mpf(1)
    for i in range(dmax):
        ref = mpmath.e ** (-mpmath.mpf(mu)) * mpmath.mpf(mu) ** i / mpmath.factorial(i)
        tail -= ref
        assert abs(d.probs[i] - float(ref)) < 1e-14
    assert abs(d.probs[dmax] - float(tail)) < 1e-13
    assert math.isclose(d.probs.sum(), 1.0, abs_tol=1e-12)


def test_decoder_side_dist_matches_rational_oracle(reference_gamma):
    phi_hat, phi0 = decoder_side_dist(reference_gamma, 10)
    assert abs(phi0 - REFERENCE_PHI0) < 1e-15
    assert phi_hat.perspective == "node"
    for deg, ref in REFERENCE_PHI_HAT.items():
        assert abs(phi_hat.mass_at(deg) - ref) < 1e-14
    assert phi_hat.mass_at(0) == 0.0
    assert math.isclose(phi_hat.probs.sum(), 1.0, abs_tol=1e-12)


def test_decoder_side_dist_mean_identity():
    # own-bit removal keeps a (r-1)/r fraction of edges before discarding,
    # so the unnormalized mean degree is exactly mean(gamma) * (r-1)/r
    rng = np.random.default_rng(11)
    for r in (3, 7, 10):
        d = random_node_dist(rng, max_degree=r)
        phi_hat, phi0 = decoder_side_dist(d, r)
        lhs = phi_hat.mean_degree() * (1 - phi0)
        rhs = d.mean_degree() * (r - 1) / r
        assert math.isclose(lhs, rhs, rel_tol=1e-12)


def test_decoder_side_dist_monte_carlo_oracle(reference_gamma):
    # criterion: agreement with a 1e7-sample mechanism simulation within 3 sigma.
    # A relay bit selects j distinct users out of r; the receiver occupies a
    # uniform position in that permutation, so it is selected iff its rank < j.
    n, r = 10**7, 10
    rng = np.random.default_rng(2024)
    j = reference_gamma.sample(rng, size=n)
    rank = rng.integers(0, r, size=n)
    d = j - (rank < j)
    phi_hat, phi0 = decoder_side_dist(reference_gamma, r)
    hit0 = np.count_nonzero(d == 0)
    sd0 = math.sqrt(n * phi0 * (1 - phi0))
    assert abs(hit0 - n * phi0) < 3 * sd0
    useful = d[d > 0]
    m = len(useful)
    for deg in range(1, 10):
        p = phi_hat.mass_at(deg)
        hits = np.count_nonzero(useful == deg)
        sd = math.sqrt(m * p * (1 - p))
        assert abs(hits - m * p) < 3 * sd + 1.0


def test_robust_soliton_structure():
    mpmath = pytest.importorskip("mpmath")
    K, c, sigma = 1000, 0.03, 0.05
    d = robust_soliton(K, c, sigma)
    assert d.perspective == "node"
    assert d.mass_at(0) == 0.0
    assert d.max_degree == K
    assert math.isclose(d.probs.sum(), 1.0, abs_tol=1e-12)
    S = mpmath.mpf(c) * mpmath.log(mpmath.mpf(K) / mpmath.mpf(sigma)) * mpmath.sqrt(K)
    spike = int(mpmath.nint(K / S))
    # the spike dominates its neighbors
    assert d.mass_at(spike) > d.mass_at(spike - 1)
    assert d.mass_at(spike) > d.mass_at(spike + 1)
    # beyond the spike only the ideal-soliton part remains: ratio test
    a, b = spike + 5, spike + 6
    assert math.isclose(d.mass_at(a) / d.mass_at(b), (b * (b - 1)) / (a * (a - 1)), rel_tol=1e-12)


def test_raptor_paper_dist_mass():
    d = raptor_paper_dist()
    assert d.max_degree == 66
    assert math.isclose(d.probs.sum(), 1.0, abs_tol=1e-12)
    assert set(d.as_dict()) == {1, 2, 3, 4, 5, 8, 9, 19, 65, 66}
    assert math.isclose(d.mass_at(2) / d.mass_at(1), 0.493570 / 0.007969, rel_tol=1e-9)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_save_load_round_trip(tmp_path_factory, seed):
    rng = np.random.default_rng(seed)
    d = random_node_dist(rng)
    path = tmp_path_factory.mktemp("dist") / "d.dist"
    save_distribution(d, path)
    back = load_distribution(path)
    assert back.perspective == d.perspective
    assert np.array_equal(
        np.trim_zeros(back.probs, "b"), np.trim_zeros(d.probs, "b")
    )


def test_load_rejects_headerless_file(tmp_path):
    p = tmp_path / "bad.dist"
    p.write_text("1\t1.0\n")
    with pytest.raises(InvalidDistributionError):
        load_distribution(p)


def test_sampling_follows_distribution(reference_gamma):
    rng = np.random.default_rng(5)
    n = 200000
    draws = reference_gamma.sample(rng, size=n)
    for deg, p in reference_gamma.as_dict().items():
        hits = np.count_nonzero(draws == deg)
        sd = math.sqrt(n * p * (1 - p))
        assert abs(hits - n * p) < 4 * sd
