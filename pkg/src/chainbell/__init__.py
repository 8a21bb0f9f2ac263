"""Cyclic two-party Bell functional toolkit.

Correlation models and the cyclic functional I(N, theta), the exhaustive
local-strategy bound, Monte Carlo estimation with uncertainties, the
marginal-bias bound I/2, and relativistic analyzer-timing helpers.
"""

from ._backend import backend_name
from .correlations import (
    ChainConfig,
    ChainedNLBoxModel,
    CorrelationFamily,
    DeterministicLocalModel,
    InterferometerArms,
    JointDistribution,
    LocalStrategy,
    MixtureModel,
    PairRuleModel,
    QuantumModel,
    chained_nlbox_joint,
    deterministic_family,
    lhv_joint,
    marginal,
    nlbox_family,
    no_signaling_check,
    phase_from_arms,
    quantum_family,
    quantum_joint,
    statistical_distance_to_uniform,
)
from .errors import CapacityError, DataError, EstimationError, InputError
from .functional import (
    BellReport,
    TheoremCheckResult,
    bias_bound,
    check_basic_conditions,
    check_smoothness,
    check_theorem1,
    check_theorem2,
    curve_table,
    equipartition_phase,
    i_functional,
    i_quantum_closed_form,
    optimal_chain_length,
)
from .oracle import enumerate_strategies, lhv_minimum, violation_margin
from .simulate import (
    DetectionRecord,
    EstimateResult,
    EventStream,
    PairedCounts,
    estimate_i,
    estimate_marginal_bias,
    generate_events,
    pair_coincidences,
    read_records_csv,
    simulate_paired_counts,
    write_records_csv,
)
from .timing import (
    FrameVelocity,
    SpacetimeEvent,
    before_before_holds,
    boost_event,
    boosted_time,
    is_spacelike,
    min_speed_for_priority,
)

__version__ = "0.1.0"
