"""Bit-level machinery: user encoding, relay combining, own-bit removal and
the incremental peeling decoder.

Packets carry provenance (which information bits of which users were XORed
in) so that receivers can build their decoding graphs; the channel cost of
that control information is not modeled.
"""

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .degree_dist import NODE, InvalidDistributionError


class ProtocolError(RuntimeError):
    """Raised when the relay protocol is driven out of order."""


class DecodingInconsistency(AssertionError):
    """A check node reduced to degree 0 with a non-zero residual value."""


@dataclass(slots=True)
class UserCodedBit:
    source_user: int
    info_indices: tuple
    value: int


@dataclass(slots=True)
class RelayCodedBit:
    contributions: tuple  # ((user, info_indices), ...)
    value: int
    phase_index: int

    @property
    def degree(self):
        return len(self.contributions)


@dataclass(slots=True)
class CheckNode:
    variables: tuple  # ((user, info_index), ...)
    value: int


@dataclass(slots=True)
class RelayState:
    """One-bit buffer per user-relay uplink."""

    buffers: tuple  # length r, entries UserCodedBit or None

    @classmethod
    def empty(cls, r):
        return cls((None,) * r)

    @property
    def loaded(self):
        return all(b is not None for b in self.buffers)

    def buffer(self, user):
        return self.buffers[user - 1]


def _cdf(dist):
    cdf = getattr(dist, "_cached_cdf", None)
    if cdf is None:
        cdf = np.cumsum(dist.probs).tolist()  # plain list: bisect beats searchsorted here
        object.__setattr__(dist, "_cached_cdf", cdf)
    return cdf


def sample_degree(dist, rng):
    """Inverse-CDF degree draw consuming one uniform from rng."""
    return bisect_right(_cdf(dist), rng.random())


def sample_distinct(rng, n, d):
    """d distinct integers from [0, n) by partial Fisher-Yates (d small)."""
    if d > n:
        raise ValueError(f"cannot draw {d} distinct values from {n}")
    if d == 1:
        return [int(rng.random() * n)]
    pool = list(range(n))
    out = []
    for i in range(d):
        j = i + int(rng.random() * (n - i))
        pool[i], pool[j] = pool[j], pool[i]
        out.append(pool[i])
    return out


def _sample_indices(rng, k, d):
    """d distinct indices in [0, k); rejection for small d, Fisher-Yates else."""
    if d == 1:
        return (int(rng.random() * k),)
    if d * d < k:
        seen = set()
        while len(seen) < d:
            seen.add(int(rng.random() * k))
        return tuple(seen)
    return tuple(sample_distinct(rng, k, d))


def user_encode(user, info_bits, omega, rng):
    """Encode one coded bit: sample a degree from omega, pick that many
    distinct information bits uniformly, XOR them."""
    if omega.perspective != NODE:
        raise InvalidDistributionError("omega must be node perspective")
    k = len(info_bits)
    d = sample_degree(omega, rng)
    if d > k:
        raise ValueError(f"sampled degree {d} exceeds block length {k}")
    if d < 1:
        raise InvalidDistributionError("omega produced a degree-0 coded bit")
    idx = _sample_indices(rng, k, d)
    v = 0
    for i in idx:
        v ^= int(info_bits[i])
    return UserCodedBit(user, idx, v)


def relay_update_buffer(state, user, received):
    """Overwrite buffer B_user with a freshly received bit; erasures leave
    the buffer untouched."""
    if not 1 <= user <= len(state.buffers):
        raise ValueError(f"user {user} out of range")
    if received is None:
        return state
    b = state.buffers
    return RelayState(b[: user - 1] + (received,) + b[user:])


def _draw_selection(gamma, r, rng):
    d = sample_degree(gamma, rng)
    users = sample_distinct(rng, r, d)
    return [u + 1 for u in users]


def relay_combine(state, gamma, rng, phase):
    """Buffered combining: XOR the buffered bits of d uniformly selected users."""
    if not state.loaded:
        raise ProtocolError("broadcast before all relay buffers are loaded")
    r = len(state.buffers)
    if gamma.max_degree > r:
        raise ValueError("relay degree distribution exceeds user count")
    selected = _draw_selection(gamma, r, rng)
    v = 0
    contributions = []
    for u in selected:
        b = state.buffers[u - 1]
        v ^= b.value
        contributions.append((u, b.info_indices))
    return RelayCodedBit(tuple(contributions), v, phase)


def relay_combine_nobuffer(current_uplink, gamma, rng, phase):
    """Bufferless combining: erased uplink bits simply drop out of the XOR.

    Consumes randomness exactly like relay_combine so the two modes are
    comparable under common random numbers.  The result may have degree 0.
    """
    r = len(current_uplink)
    selected = _draw_selection(gamma, r, rng)
    v = 0
    contributions = []
    for u in selected:
        b = current_uplink[u - 1]
        if b is None:
            continue
        v ^= b.value
        contributions.append((u, b.info_indices))
    return RelayCodedBit(tuple(contributions), v, phase)


def remove_own_bits(bit, user, own_info):
    """XOR out the contributions sourced from `user`.

    Returns a check node over foreign information bits only, or None when
    nothing foreign remains (a useless bit, discarded by the receiver).
    """
    v = bit.value
    variables = []
    for u, idx in bit.contributions:
        if u == user:
            for i in idx:
                v ^= int(own_info[i])
        else:
            for i in idx:
                variables.append((u, i))
    if not variables:
        return None
    return CheckNode(tuple(variables), v)


class PeelingDecoder:
    """Incremental peeling over check nodes with hashable variable ids.

    Checks may be added at any time; peel() resolves every reachable
    degree-1 check.  The recovered set does not depend on processing order.
    """

    def __init__(self):
        self.recovered = {}
        self._var_checks = {}
        self._worklist = deque()

    @property
    def recovered_count(self):
        return len(self.recovered)

    def add_check(self, variables, value):
        live = set()
        v = int(value)
        for var in variables:
            bit = self.recovered.get(var)
            if bit is not None:
                v ^= bit
            elif var in live:  # x XOR x cancels
                live.discard(var)
            else:
                live.add(var)
        if not live:
            if v != 0:
                raise DecodingInconsistency("empty check with residual 1")
            return
        check = [live, v]
        for var in live:
            self._var_checks.setdefault(var, []).append(check)
        if len(live) == 1:
            self._worklist.append(check)

    def peel(self, order_rng=None):
        """Resolve degree-1 checks until none remain; returns newly recovered
        variable ids.  order_rng randomizes processing order (used to verify
        confluence); the outcome is order-independent either way."""
        wl = self._worklist
        if not wl:
            return ()
        newly = []
        recovered = self.recovered
        while wl:
            if order_rng is None:
                check = wl.popleft()
            else:
                i = int(order_rng.random() * len(wl))
                wl.rotate(-i)
                check = wl.popleft()
                wl.rotate(i)
            live, v = check
            if len(live) != 1:
                continue  # stale: resolved through another check
            var = next(iter(live))
            if var in recovered:
                if recovered[var] != v:
                    raise DecodingInconsistency(f"conflicting value for {var}")
                live.clear()
                continue
            recovered[var] = v
            newly.append(var)
            for other in self._var_checks.pop(var, ()):
                olive = other[0]
                if var in olive:
                    olive.discard(var)
                    other[1] ^= v
                    if len(olive) == 1:
                        wl.append(other)
                    elif not olive and other[1]:
                        raise DecodingInconsistency("empty check with residual 1")
        return newly
