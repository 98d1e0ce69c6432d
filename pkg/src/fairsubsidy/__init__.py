"""Fair division of indivisible items with monetary subsidies under
weighted entitlements, in exact rational arithmetic."""

from .allocators import (
    AllocatorResult,
    alg1_identical_additive,
    alg2_binary_additive,
    alg3_identical_items,
    allocate_all_to_max,
    auto_allocate,
    brute_force_unweighted_sw_max,
    brute_force_weighted_sw_max,
    greedy_additive_welfare_max,
)
from .criteria import (
    FairnessReport,
    evaluate_report,
    is_non_wasteful,
    is_nonzero_social_welfare,
    is_pareto_efficient,
    is_weighted_welfare_maximizing,
    is_wef1,
    is_wef1_t,
    is_wwef1,
)
from .envy import (
    SubsidyVector,
    WeightedEnvyGraph,
    build_envy_graph,
    build_envy_graph_with_payments,
    has_positive_cycle,
    is_reassignment_stable,
    is_weighted_envy_free,
    is_weighted_envy_freeable,
    min_subsidies,
)
from .errors import (
    CheckTooLarge,
    DegenerateInstance,
    FairSubsidyError,
    FixtureMismatch,
    InstanceError,
    InternalInconsistency,
    InternalPathError,
    NegativeBudget,
    NonMonotoneValuation,
    NonPositiveWeight,
    NotEnvyFreeable,
    NotSupermodular,
    TooLarge,
    UnboundedValuation,
    UpfrontTooSmall,
    WeightSumError,
    WrongAgentCount,
    WrongValuationKind,
)
from .mechanisms import (
    AdjustedWinnerResult,
    VcgOutcome,
    biased_weighted_adjusted_winner,
    vcg_with_upfront_subsidy,
)
from .mef import MefResult, allocate_budget_mef, is_mef
from .model import (
    Allocation,
    Instance,
    Outcome,
    check_allocation,
    parse_allocation,
    parse_instance,
    parse_outcome,
    validate_instance,
    weighted_social_welfare,
)
from .oracle import (
    FIXTURES,
    enumerate_allocations,
    oracle_envy_freeable,
    oracle_min_max_subsidy,
    verify_fixture,
)
from .rationals import format_rational, parse_rational

__version__ = "0.1.0"
