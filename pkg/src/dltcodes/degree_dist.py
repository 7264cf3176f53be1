"""Degree distributions and the transforms between their different views.

A distribution is stored as a dense probability vector indexed by degree.
Node perspective: entry k is the probability that a node has degree k.
Edge perspective: entry k is the probability that a randomly chosen edge is
attached to a degree-k node.
"""

import math
from dataclasses import dataclass, field

import numpy as np

NODE = "node"
EDGE = "edge"

SUM_TOL = 1e-9


class InvalidDistributionError(ValueError):
    """Raised when a probability vector is not a usable degree distribution."""


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability vector over degrees, in node or edge perspective."""

    perspective: str
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.perspective not in (NODE, EDGE):
            raise InvalidDistributionError(f"unknown perspective {self.perspective!r}")
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or len(p) < 1:
            raise InvalidDistributionError("probs must be a non-empty 1-d vector")
        if np.any(p < -SUM_TOL) or np.any(p > 1 + SUM_TOL):
            raise InvalidDistributionError("probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise InvalidDistributionError(f"probabilities sum to {p.sum()}, not 1")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_pairs(cls, perspective, pairs):
        """Build from {degree: probability} (missing degrees get mass 0)."""
        pairs = dict(pairs)
        size = max(pairs) + 1
        p = np.zeros(size)
        for deg, prob in pairs.items():
            if deg < 0:
                raise InvalidDistributionError("degrees must be non-negative")
            p[deg] = prob
        return cls(perspective, p)

    @property
    def max_degree(self):
        nz = np.nonzero(self.probs)[0]
        return int(nz[-1]) if len(nz) else 0

    @property
    def degrees(self):
        return np.arange(len(self.probs))

    def mass_at(self, degree):
        return float(self.probs[degree]) if degree < len(self.probs) else 0.0

    def mean_degree(self):
        """Average node degree (node perspective only)."""
        if self.perspective != NODE:
            raise InvalidDistributionError("mean_degree is a node-perspective quantity")
        return float(np.dot(self.degrees, self.probs))

    def poly(self, x):
        """Evaluate the generating polynomial.

        Node perspective: sum_k p_k x^k.  Edge perspective: sum_k p_k x^(k-1),
        the standard form entering density evolution.
        """
        x = np.asarray(x, dtype=float)
        if self.perspective == NODE:
            coeffs = self.probs
        else:
            if self.probs[0] != 0.0:
                raise InvalidDistributionError("edge perspective requires no degree-0 mass")
            coeffs = self.probs[1:]
        # Horner evaluation, highest degree first
        res = np.zeros_like(x)
        for c in coeffs[::-1]:
            res = res * x + c
        return res if res.ndim else float(res)

    def has_degree_zero_mass(self):
        return self.probs[0] > 0.0

    def require_decoder_ready(self):
        if self.has_degree_zero_mass():
            raise InvalidDistributionError("distribution carries degree-0 mass")

    def sample(self, rng, size=None):
        """Draw degrees by inverse CDF using the supplied numpy Generator."""
        return rng.choice(len(self.probs), size=size, p=self.probs)

    def as_dict(self):
        return {int(d): float(p) for d, p in enumerate(self.probs) if p > 0.0}


def node_to_edge(dist):
    """Node- to edge-perspective transform: w_j proportional to j * p_j."""
    if dist.perspective != NODE:
        raise InvalidDistributionError("expected a node-perspective distribution")
    weighted = dist.degrees * dist.probs
    total = weighted.sum()
    if total <= 0.0:
        raise InvalidDistributionError("degenerate distribution: all mass at degree 0")
    return DegreeDistribution(EDGE, weighted / total)


def edge_to_node(dist):
    """Edge- to node-perspective transform: p_j proportional to w_j / j."""
    if dist.perspective != EDGE:
        raise InvalidDistributionError("expected an edge-perspective distribution")
    if dist.probs[0] > 0.0:
        raise InvalidDistributionError("edge-perspective distribution has degree-0 mass")
    degs = dist.degrees.astype(float)
    degs[0] = 1.0  # avoid 0/0; mass there is zero
    weighted = dist.probs / degs
    total = weighted.sum()
    if total <= 0.0:
        raise InvalidDistributionError("degenerate edge distribution")
    return DegreeDistribution(NODE, weighted / total)


def poisson_variable_dist(mu, max_degree):
    """Poisson approximation of the variable-node degree distribution.

    Mass for degrees 0..max_degree-1 is the Poisson pmf with mean mu; the
    remaining tail is folded into max_degree so the vector sums to 1 exactly.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    p = np.zeros(max_degree + 1)
    for i in range(max_degree):
        p[i] = math.exp(-mu + i * math.log(mu) - math.lgamma(i + 1))
    p[max_degree] = max(0.0, 1.0 - p[:max_degree].sum())
    return DegreeDistribution(NODE, p)


def decoder_side_dist(gamma, r):
    """Check-node degree distribution seen by one user after own-bit removal.

    Each relay-coded bit of degree j keeps degree j with probability 1 - j/r
    (this user not selected) and drops to j-1 with probability j/r.  Degree-0
    outcomes are useless and discarded; the rest is renormalized.

    Returns (phi_hat, phi0): the renormalized node-perspective distribution
    and the discarded degree-0 fraction.
    """
    if gamma.perspective != NODE:
        raise InvalidDistributionError("gamma must be node perspective")
    if r < 2:
        raise ValueError("need at least two users")
    d_max = gamma.max_degree
    if d_max > r:
        raise ValueError(f"relay degree {d_max} exceeds user count {r}")
    g = gamma.probs
    phi = np.zeros(d_max + 1)
    for d in range(d_max + 1):
        for j in (d, d + 1):
            if 1 <= j <= d_max and g[j] > 0.0:
                phi[d] += g[j] * math.comb(r - 1, d) / math.comb(r, j)
    phi0 = float(phi[0])
    if phi0 >= 1.0:
        raise InvalidDistributionError("all relay-coded bits are useless after removal")
    hat = phi / (1.0 - phi0)
    hat[0] = 0.0
    return DegreeDistribution(NODE, hat / hat.sum()), phi0


def robust_soliton(K, c, sigma):
    """Robust soliton distribution over degrees 1..K.

    Ideal soliton rho plus the robust correction tau with spike at K/S,
    S = c * ln(K/sigma) * sqrt(K), normalized to sum to 1.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    if c <= 0:
        raise ValueError("c must be positive")
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    S = c * math.log(K / sigma) * math.sqrt(K)
    spike = int(round(K / S))
    spike = min(max(spike, 1), K)
    p = np.zeros(K + 1)
    p[1] = 1.0 / K
    for d in range(2, K + 1):
        p[d] = 1.0 / (d * (d - 1))
    for d in range(1, spike):
        p[d] += S / (K * d)
    p[spike] += S * math.log(S / sigma) / K
    return DegreeDistribution(NODE, p / p.sum())


# Output degree distribution from Shokrollahi's raptor-code construction,
# used as an uncoded-relay baseline alongside the robust soliton.
_RAPTOR_PAIRS = {
    1: 0.007969,
    2: 0.493570,
    3: 0.166220,
    4: 0.072646,
    5: 0.082558,
    8: 0.056058,
    9: 0.037229,
    19: 0.055590,
    65: 0.025023,
    66: 0.003135,
}


def raptor_paper_dist():
    """Raptor output distribution (max degree 66), normalized."""
    p = np.zeros(67)
    for d, m in _RAPTOR_PAIRS.items():
        p[d] = m
    return DegreeDistribution(NODE, p / p.sum())


def save_distribution(dist, path):
    """Write `degree<TAB>probability` lines with a perspective header."""
    with open(path, "w") as fh:
        fh.write(f"# perspective={dist.perspective}\n")
        for deg, prob in enumerate(dist.probs):
            if prob > 0.0:
                fh.write(f"{deg}\t{prob:.17g}\n")


def load_distribution(path):
    perspective = None
    pairs = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                if key.strip() == "perspective":
                    perspective = value.strip()
                continue
            deg, prob = line.split("\t")
            pairs[int(deg)] = float(prob)
    if perspective is None:
        raise InvalidDistributionError(f"{path}: missing perspective header")
    if not pairs:
        raise InvalidDistributionError(f"{path}: no degree entries")
    return DegreeDistribution.from_pairs(perspective, pairs)
