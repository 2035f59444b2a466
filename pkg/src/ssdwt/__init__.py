"""Lossless image compression with a step-skipping reversible 5/3 DWT.

Each lifting step (and, when both steps of a pass are skipped, the
following reorder) may be skipped per subband and level. Greedy searches
pick the skips per image, measuring either the real compressed size or a
memoryless-entropy estimate.
"""

from ._format import Mode
from .coding import EvaluationSession, Evaluator, decode_region, encode_region, evaluate, h0_estimate, region_entropy
from .container import CompressConfig, CompressResult, compress, compress_detailed, decompress
from .errors import CodecError
from .imageio import SampleGrid, load_pgm, read_pgm, save_pgm, write_pgm
from .rdls import FilterAssignment, FilterId, forward_rdls_ssdwt, inverse_rdls_ssdwt
from .search import (
    Heuristic,
    SearchConfig,
    SearchOutcome,
    bh,
    brute_force_best,
    classify,
    h_ss_rdls,
    predicted_cost,
    rh,
    select_variant,
    step_a,
)
from .transform import (
    CostCounters,
    DecisionSet,
    FixedVariant,
    LevelDecisions,
    PairDecision,
    affected_regions,
    fixed_variant_decisions,
    forward_ssdwt,
    inverse_ssdwt,
    nominal_regions,
)

__version__ = "0.1.0"
