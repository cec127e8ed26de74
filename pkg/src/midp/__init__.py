"""Differential privacy, KL privacy and mutual-information privacy for finite mechanisms.

All information quantities are in nats.
"""

from .audit import (
    PrivacyReport,
    TradeoffCurve,
    delta_at,
    delta_exact,
    epsilon_exact,
    epsilon_witness,
    group_closeness,
    kl_dp,
    privacy_report,
    tradeoff_curve,
)
from .bounds import (
    BoundReport,
    bsc_capacity,
    delta_to_mi,
    delta_to_mi_tight_x,
    delta_to_mi_tight_y,
    ed_weaken,
    group_bounds,
    group_mi_bound,
    kl_bound_simple,
    kl_bound_tight,
    mi_to_delta_loose,
    mi_to_delta_tight,
    pinsker_delta,
)
from .capacity import (
    CapacityResult,
    MIDPResult,
    bayesian_mi,
    blahut_arimoto,
    conditional_mi,
    free_lunch_mi,
    group_mi,
    mi_dp,
    personalized_mi,
)
from .mechanism import (
    CapExceededError,
    DatabaseSchema,
    MechFormatError,
    Mechanism,
    OverlapError,
    SchemaMismatchError,
    compose_disjoint,
    compose_parallel,
    compose_sequential,
    load_mechanism,
    make_erasure,
    make_group_example,
    make_noisy_count,
    make_randomized_response,
    neighbors,
    parse_mechanism,
    save_mechanism,
    subchannel,
)
from .prob_core import (
    ClosenessParams,
    DimensionError,
    Dist,
    DomainError,
    JointDist,
    binary_entropy,
    binary_entropy_inv,
    closeness_delta,
    entropy,
    hockey_stick,
    is_close,
    kl_divergence,
    mutual_information,
    renyi_divergence,
    sibson_mi,
    total_variation,
)

__version__ = "0.1.0"
