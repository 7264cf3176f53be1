"""Asymptotic erasure-probability tracking for the user-side peeling decoder.

The recursion P_l = exp(-mu_bar * phi(1 - P_{l-1})) tracks the fraction of
unrecovered foreign information bits as the block length grows without bound.
phi is the edge-perspective check degree distribution seen by the decoder and
mu_bar the average variable-node degree induced by the received bits.
"""

import math
from dataclasses import dataclass

import numpy as np

from .degree_dist import EDGE, decoder_side_dist, node_to_edge

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 10000


@dataclass
class DeResult:
    trajectory: np.ndarray
    fixed_point: float
    converged: bool
    iterations_used: int


def evolve(phi, mu_bar, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL):
    """Iterate the erasure recursion from P_0 = 1 until the update stalls.

    The map is monotone, so the trajectory decreases towards the largest
    fixed point in [0, 1]; oscillation cannot occur.
    """
    if phi.perspective != EDGE:
        raise ValueError("phi must be edge perspective")
    phi.require_decoder_ready()
    if mu_bar <= 0:
        raise ValueError(f"mu_bar must be positive, got {mu_bar}")
    traj = [1.0]
    p = 1.0
    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        p_next = math.exp(-mu_bar * phi.poly(1.0 - p))
        traj.append(p_next)
        if abs(p_next - p) < tol:
            p = p_next
            converged = True
            break
        p = p_next
    return DeResult(np.array(traj), p, converged, iters)


def mean_decoder_degree(gamma, r):
    """Average decoder-side check degree after discarding useless bits."""
    phi_hat, _ = decoder_side_dist(gamma, r)
    return phi_hat.mean_degree()


def erasure_at_overhead(gamma, r, overhead, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL):
    """Fixed-point erasure probability at reception overhead eps.

    Each counted (useful, post-discard) relay-coded bit carries on average
    a_bar = Phi_hat'(1) edges spread uniformly over the (r-1)K foreign
    variable nodes, so mu_bar = eps * a_bar.
    """
    if overhead < 0:
        raise ValueError("overhead must be non-negative")
    if overhead == 0:
        return 1.0
    phi_hat, _ = decoder_side_dist(gamma, r)
    a_bar = phi_hat.mean_degree()
    phi = node_to_edge(phi_hat)
    return evolve(phi, overhead * a_bar, max_iters=max_iters, tol=tol).fixed_point


def threshold_overhead(gamma, r, target, lo=1e-3, hi=50.0, tol=1e-9, de_tol=1e-12):
    """Smallest overhead at which the fixed-point erasure drops below target.

    Bisection over the overhead; the fixed point is monotone non-increasing
    in the overhead.  Returns math.inf if even `hi` cannot reach the target.
    """
    if erasure_at_overhead(gamma, r, hi, tol=de_tol) > target:
        return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if erasure_at_overhead(gamma, r, mid, tol=de_tol) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def de_curve(gamma, r, overheads, tol=DEFAULT_TOL):
    """Fixed-point erasure probability over a grid of overheads."""
    return np.array([erasure_at_overhead(gamma, r, e, tol=tol) for e in overheads])


def save_curve_csv(path, overheads, erasures):
    with open(path, "w") as fh:
        fh.write("overhead,erasure_rate\n")
        for e, p in zip(overheads, erasures):
            fh.write(f"{e:.17g},{p:.17g}\n")
