"""Exact toolkit for approximately submodular set functions on small ground sets."""

from .errors import *  # noqa: F401,F403
from .setfn import (
    FunctionFlags,
    SetFunction,
    add,
    certify_flags,
    complement_transform,
    convolve,
    evaluate,
    from_callable,
    from_table,
    group_transform,
    is_modular,
    is_submodular,
    load_json,
    modular,
    restrict_transform,
    save_json,
    scale,
    symmetrize_transform,
)
from .metrics import (
    MetricReport,
    Witness,
    global_distance,
    global_distance_plus,
    local_pairwise_violation,
    local_submod_index,
    local_submod_violation,
    marginal_violation,
    min_eps_for_pair,
    pairwise_violation,
    submod_violation,
    submodularity_index,
    submodularity_indicator,
    submodularity_ratio,
    verify_eps_sandwich,
)
from .extensions import (
    GammaVector,
    LpSolution,
    convex_closure_eval,
    gamma_of_perm,
    gamma_vertices,
    hessian_bound_check,
    lovasz_as_gamma_max,
    lovasz_eval,
    lovasz_midpoint_violation,
    lovasz_sup_distance,
    multilinear_eval,
    multilinear_grad,
    multilinear_hessian,
    sandwich_check,
    upconcavity_budget,
    upconcavity_check,
    upconcavity_violation_sample,
)
from .greedy import (
    BoundReport,
    GreedyTrace,
    bound_delta,
    bound_horel,
    bound_index,
    bound_indicator,
    bound_local_delta,
    bound_nemhauser,
    bound_ratio,
    bound_suite,
    brute_force_opt,
    greedy_run,
)
from .polytopes import (
    EpigraphInstance,
    KnapsackInstance,
    LinearCut,
    epigraph_cut,
    extended_cover_cut,
    gamma_slack_check,
    is_cover,
    is_minimal_cover,
    knapsack_brute_force,
    pf_membership,
    point_checks,
    set_extension,
    trivial_facet_predicates,
)
from .apps import (
    ask_D_bound,
    build_ask,
    build_cuflp,
    cuflp_lovasz_budget,
    cuflp_near_bound,
    experiment_bounds,
    experiment_multilinear,
)
from ._bits import set_threads

__version__ = "0.1.0"
