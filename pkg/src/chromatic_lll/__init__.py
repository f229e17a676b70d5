"""Approximate counting and almost-uniform sampling of proper colourings
of k-uniform hypergraphs in the local-lemma regime.

The toolkit combines an exact enumeration oracle (ground truth at desk
scale), a sequential maximal coupling and its deterministic truncated
tree, linear-feasibility certification of marginal ratios with a binary
search, a self-reduction counter, and an adaptive sampler with exact
residual enumeration.
"""

__version__ = "0.1.0"

from .counter import CountEstimate, PinStep, count, pinned_sequence
from .coupling import (
    CouplingNode,
    CouplingState,
    CouplingTree,
    blocked_edges,
    build_tree,
    coupling_atoms,
    extend,
    initial_state,
    leaf_counts,
    leaf_ratio,
    next_vertex,
    run_coupling,
)
from .graphtools import (
    SimpleGraph,
    enumerate_23trees,
    greedy_23tree,
    is_ell_bad,
    is_two_three_tree,
    line_graph,
    square_graph,
)
from .instance import (
    Instance,
    edge_satisfied,
    is_proper,
    parse_instance,
    pin_vertex,
    serialize_instance,
)
from .lll import (
    LLLCheckConfig,
    MarginalBounds,
    check_lll,
    good_base_colouring,
    marginal_bounds,
    moser_tardos,
    verify_lll_weights,
)
from .lp import (
    CachingMarginalEstimator,
    LPSystem,
    MarginalEstimate,
    RatioBracket,
    binary_search_ratio,
    estimate_marginal,
    feasible,
    generate_lp,
    true_solution,
)
from .oracle import (
    ConditionalCounter,
    ExactResult,
    enumerate_proper,
    exact_count,
    exact_marginal,
    exact_ratio,
    exact_sample,
)
from .params import (
    AlgoParams,
    RegimeReport,
    default_params,
    derive_runtime_params,
    regime_check,
    settle_counting,
    settle_sampling,
    verify_settlement,
)
from .sampler import SamplerOutcome, eligible_vertex, residual_components, sample
