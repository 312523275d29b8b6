"""Constructive normal numbers for Cantor series expansions.

Digit-by-digit construction of a number whose block statistics and orbit
distribution both match the uniform model for a given sequence of bases,
plus digit transforms with deliberately lopsided behaviour and the exact
statistics needed to verify either claim at desk scale.
"""

from .digitseq import DigitSequence, constructed_digits, finite_digits
from .errors import (
    ArgumentError,
    CantorSeriesError,
    CounterSpillError,
    InsufficientDigitsError,
    RefinementError,
    ScanBoundError,
)
from .generator import OccurrenceCounters, digit_at, digit_stream, generate_digits
from .ladder import BaseWindow, PartitionIndex, block_from_index, index_from_block
from .orbit import (
    DiscrepancyReport,
    OrbitPoint,
    orbit_discrepancy_report,
    extreme_discrepancy,
    orbit_exact_finite,
    orbit_truncated,
    orbit_values,
    star_discrepancy,
    truncation_depth,
)
from .sequences import (
    BasicSequence,
    ConstantSequence,
    IndexLogSequence,
    PeriodicSequence,
    PointwiseSequence,
    PresetSequence,
    TableSequence,
    parse_sequence_spec,
    sequence_from_json,
)
from .stats import (
    ConvergenceReport,
    admissible,
    count_block,
    count_block_checkpoints,
    expected_count,
    growth_diagnostic,
    normality_report,
    starred_variants,
)
from .transforms import (
    ModulusOfDivergence,
    ModulusTable,
    Schedule,
    UDSource,
    build_orbit_sink,
    build_patched_uniform,
    build_half_range,
    donor_divergent,
    clip_digits,
    clip_chain,
    ud_source,
)
from .values import CertifiedInterval, mod1_scale, prefix_value, to_base_b

__version__ = "0.1.0"
