"""Show what the one-bit relay buffers buy on a lossy uplink.

Three relay behaviors on common random numbers:
  buffered    XOR the freshest successfully received bit of each selected user
  unbuffered  XOR only the current slot's bits; uplink erasures thin the XOR
  uncoded     forward each user's (robust-soliton-coded) bit unmodified

With a 5% uplink and 10% downlink erasure rate the buffered relay tracks the
lossless-uplink performance almost exactly, while the thinned unbuffered
combiner pays a visible penalty in the floor region.

Run:  python3 demos/buffering_comparison.py     (a few minutes)
"""

import numpy as np

from dltcodes import DegreeDistribution, NetworkConfig, robust_soliton, run_campaign

R = 10
K = 1000
GAMMA = DegreeDistribution.from_pairs(
    "node", {1: 0.0058, 2: 0.4281, 3: 0.3411, 10: 0.2250}
)
TRIALS = 10
grid = np.round(np.arange(1.0, 1.81, 0.1), 10)


def campaign(mode, eps_up, omega=None):
    cfg = NetworkConfig(
        r=R,
        k=K,
        eps_up=eps_up,
        eps_down=0.1,
        omega=omega,
        gamma=None if mode == "uncoded" else GAMMA,
        relay_mode=mode,
        seed=11,
    )
    return run_campaign(cfg, TRIALS, grid)


buff = campaign("buffered", 0.05)
nobuff = campaign("unbuffered", 0.05)
lossless = campaign("buffered", 0.0)
uncoded = campaign("uncoded", 0.05, omega=robust_soliton(K, 0.03, 0.05))

print(f"{'overhead':>9} {'buffered':>9} {'unbuffered':>11} {'lossless':>9} {'uncoded':>9}")
for i, eps in enumerate(grid):
    print(
        f"{eps:9.2f} {buff.mean_erasure[i]:9.4f} {nobuff.mean_erasure[i]:11.4f} "
        f"{lossless.mean_erasure[i]:9.4f} {uncoded.mean_erasure[i]:9.4f}"
    )
