"""Distributed LT codes for the erasure multi-way relay channel.

Provides degree-distribution tools, density evolution, LP-based design of
the relay check-node degree distribution, a bit-level codec with a
buffer-based relay, and a Monte Carlo simulator of the full protocol.
"""

from .degree_dist import (
    DegreeDistribution,
    InvalidDistributionError,
    node_to_edge,
    edge_to_node,
    poisson_variable_dist,
    decoder_side_dist,
    robust_soliton,
    raptor_paper_dist,
    save_distribution,
    load_distribution,
)
from .density_evolution import (
    DeResult,
    de_curve,
    erasure_at_overhead,
    evolve,
    mean_decoder_degree,
    threshold_overhead,
)
from .lp_design import (
    LpProblem,
    LpSolution,
    DesignResult,
    NoDesignError,
    solve_lp,
    build_lp1,
    build_lp2,
    sweep_design,
)
from .dlt_codec import (
    ProtocolError,
    UserCodedBit,
    RelayCodedBit,
    CheckNode,
    RelayState,
    PeelingDecoder,
    user_encode,
    relay_update_buffer,
    relay_combine,
    relay_combine_nobuffer,
    remove_own_bits,
)
from .emr_sim import NetworkConfig, RunMetrics, CampaignResult, run_trial, run_campaign

__all__ = [
    "DegreeDistribution",
    "InvalidDistributionError",
    "node_to_edge",
    "edge_to_node",
    "poisson_variable_dist",
    "decoder_side_dist",
    "robust_soliton",
    "raptor_paper_dist",
    "save_distribution",
    "load_distribution",
    "DeResult",
    "de_curve",
    "evolve",
    "erasure_at_overhead",
    "mean_decoder_degree",
    "threshold_overhead",
    "LpProblem",
    "LpSolution",
    "DesignResult",
    "NoDesignError",
    "solve_lp",
    "build_lp1",
    "build_lp2",
    "sweep_design",
    "ProtocolError",
    "UserCodedBit",
    "RelayCodedBit",
    "CheckNode",
    "RelayState",
    "PeelingDecoder",
    "user_encode",
    "relay_update_buffer",
    "relay_combine",
    "relay_combine_nobuffer",
    "remove_own_bits",
    "NetworkConfig",
    "RunMetrics",
    "CampaignResult",
    "run_trial",
    "run_campaign",
]
