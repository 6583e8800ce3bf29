"""Grover search on multipartite qudit systems with entanglement analysis.

Simulates the algorithm exactly (gate-level and closed form), classifies
the generated states into SLOCC orbits via algebraic invariants, computes
the geometric measure of entanglement by rank-1 optimisation, and exposes
the closed-form geometry (secant dimensions, peak predictors) alongside a
reproducible experiment runner.
"""

__version__ = "0.1.0"

from .errors import (
    AmbiguousGenericPoint,
    BoundNotApplicable,
    DegenerateSearch,
    FormatMismatch,
    GroventError,
    InvalidConfig,
    InvalidIndex,
    NotApplicable,
    SystemMismatch,
    UnstableClassification,
)
from .tensor_core import (
    BasisIndex,
    PureState,
    QuditSystem,
    RationalState,
    compress_support,
    flatten,
    index_decode,
    index_encode,
    multilinear_rank,
    numerical_rank,
    unflatten,
)
from .grover import (
    GroverRun,
    MarkedSet,
    apply_diffusion,
    apply_oracle,
    grover_state,
    iterate_grover,
    k_opt,
    observation_decompose,
    rank_bound,
    regime,
)
from .invariants import (
    InvariantReport,
    NORMAL_FORMS,
    ORBITS,
    OrbitLabel,
    classify,
    classify_222,
    classify_223,
    classify_233,
    classify_grover_family,
    delta_222,
    delta_223,
    delta_233,
)
from .gme import (
    BiseparableResult,
    GmeResult,
    PeakReport,
    find_peak,
    gme_biseparable,
    gme_curve,
    gme_full,
    symmetric_objective,
)
from .geometry import (
    SecantDim,
    barycenter_k,
    nrd_sigma,
    predicted_secant_order,
    secant_dim_bound,
)
