"""Rainbow cycles in properly edge-coloured graphs: exact search, expander
tools, the colour-splitting process, almost-rainbow cycles and group bridges."""
from __future__ import annotations

__version__ = "0.1.0"

from .graph import (
    ColoredGraph,
    ColorSet,
    GraphError,
    average_degree,
    induced_subgraph,
    load_graph,
    loads_graph,
    neighborhood_minus,
    save_graph,
    dumps_graph,
)
from .rainbow import (
    RainbowWalk,
    ReachableSet,
    BoundaryClassification,
    ExpansionViolation,
    classify_boundary_edges,
    rainbow_cycle_exact,
    rainbow_cycle_via_split,
    rainbow_reachable_set,
    red_blue_select,
)
from .expander import (
    ExpanderCertificate,
    ExpansionCheck,
    extract_expander,
    verify_robust_expander,
    worst_case_neighborhood,
)
from .process import (
    NestedColorChain,
    ProcessConfig,
    TrialRecord,
    chain_probability_exact,
    color_split_components,
    lemma_bound,
    lemma_grid,
    run_splitting_trial,
    sample_chain,
    summarize_trials,
)
from .almost import (
    AdmissibleSequence,
    AlmostRainbowCycle,
    construct_almost_rainbow_lower_bound,
    find_almost_rainbow_cycle,
    peel_to_min_degree,
    proof_degree,
    search_almost_rainbow_cycle,
)
from .groups import (
    Cyclic,
    Product,
    Symmetric,
    RelationWitness,
    additive_dimension,
    cayley_even_order_graph,
    dim_transpositions,
    group_eval,
    is_dissociated,
    lift_dissociated_product,
    parse_group,
    schreier_transposition_graph,
    translation_bipartite_graph,
)
from .constructions import (
    RetryExhausted,
    complete_one_factorization,
    girth,
    hypercube,
    random_sub_factorization,
    random_regular_girth,
    vizing_color,
)
