"""
Parameter presets for the hardness toolkit.

All tunable defaults live here so commands, tests and experiment configs
draw from one place:
- MILLION_SCALE: settings for million-vector datasets
- DESK: scaled-down settings for laptop-sized runs and tests
- DESK_EXPERIMENT: the canonical desk-scale correlation experiment
- WORKLOAD_DEFAULTS: unbiased workload generation knobs

Usage:
    from apps.core.presets import DESK, MILLION_SCALE, MRNG_COS_SLACK
"""

from types import MappingProxyType


# =============================================================================
# HARDNESS PRESETS
# =============================================================================
# k: number of nearest neighbors, acc: recall target, p: probabilistic lower
# bound on qualified entry points, efc: MRNG candidate pool, eps: epsilon of
# epsilon-hardness.

MILLION_SCALE = MappingProxyType({
    "k": 50,
    "acc": 0.98,
    "p": 0.95,
    "efc": 2048,
    "eps": 0.5,
})

DESK = MappingProxyType({
    "k": 10,
    "acc": 0.9,
    "p": 0.95,
    "efc": 256,
    "eps": 0.5,
})

PRESETS = MappingProxyType({
    "million": MILLION_SCALE,
    "desk": DESK,
})

# Tuning range for p
P_SWEEP = (0.85, 0.9, 0.95, 1.0)


# =============================================================================
# DESK-SCALE EXPERIMENT
# =============================================================================

DESK_EXPERIMENT = MappingProxyType({
    "count": 20000,
    "dim": 16,
    "queries": 200,
    "k": 10,
    "acc": 0.9,
    "p": 0.95,
    "efc": 256,
    "instances": 3,
    "M": 16,
    "ef_construction": 200,
    "recall_targets": (0.9,),
})

# Simple queries sit in the lowest 20% of the hardness spectrum
SIMPLE_BAND = 0.2


# =============================================================================
# GRAPH CONSTRUCTION
# =============================================================================

# Absolute slack on the 60 degree cosine test (cos 60 = 0.5)
MRNG_COS_THRESHOLD = 0.5
MRNG_COS_SLACK = 1e-6

GRAPH_MAGIC = 0x474E4E41
GRAPH_VERSION = 1


# =============================================================================
# CRITICAL POINT SEARCH
# =============================================================================

# Initial NN fetch is 4k, doubled on exhaustion up to
# min(N, 50k + 10000) candidates.
DELTA0_INITIAL_FACTOR = 4
DELTA0_CAP_FACTOR = 50
DELTA0_CAP_OFFSET = 10000


def delta0_cap(count, k):
    """Default hard cap on candidates fetched while searching delta0."""
    return min(count, DELTA0_CAP_FACTOR * k + DELTA0_CAP_OFFSET)


# =============================================================================
# STEINER SOLVERS
# =============================================================================

# Exhaustive DST/vDSN oracles refuse instances with more allowed vertices
EXACT_ORACLE_LIMIT = 20

# Witness networks are solved on radii witness_radius * ratio**i
RADIUS_LADDER_RATIO = 1.5


# =============================================================================
# WORKLOAD GENERATION
# =============================================================================

WORKLOAD_DEFAULTS = MappingProxyType({
    "components": 16,
    "max_iter": 100,
    "tol": 1e-3,
    "trim_lo": 0.01,
    "trim_hi": 0.99,
    "oversample": 10,
    "variance_floor": 1e-6,
})

# Million-scale workload: 1000 queries from 20 segments of 50
MILLION_WORKLOAD = MappingProxyType({"Q": 1000, "h": 20})
