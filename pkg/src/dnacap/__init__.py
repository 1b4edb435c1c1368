"""Capacity bounds, coupon statistics and an index-based codec for the
unordered-sampling DNA storage channel."""

from .bounds import (
    capacity,
    enumerate_types,
    index_genie_bound,
    rate_upper_bound_finite_M,
    type_count_bound,
    type_count_exact,
    type_count_upper_log,
)
from .codec import CodecConfig, achieved_rate, decode, encode, suggest_k
from .coupon import (
    TailBoundInputs,
    chebyshev_tail_bound,
    expected_distinct,
    expected_waiting_time,
    harmonic,
    simulate_distinct,
    variance_upper_bound,
)
from .errors import (
    BoundUndefinedError,
    CapacityError,
    ConfigError,
    ContractError,
    CorruptionDetected,
    DistinctnessError,
    DnacapError,
    FormatError,
    InsufficientCoverage,
    ParameterDomainError,
)
from .genie import augment, dedup_set, frequency_vector, sample_tagged, tag_pool
from .model import (
    ChannelParams,
    Molecule,
    MoleculePool,
    SampleSet,
    derive_params,
    empirical_erasure_probability,
    indexed_pool,
    sample_with_replacement,
)

__version__ = "0.1.0"
