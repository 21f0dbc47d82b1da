"""
Per-query hardness pipeline.

Steiner-hardness runs on an approximate MRNG: exact neighbors, critical
radius search, then the decision-cost-weighted witness network at that
radius. Baseline measures come from the raw distances.
"""
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from typing import Literal

from joblib import Parallel, delayed

from apps.core.exceptions import ParameterError
from apps.core.presets import P_SWEEP
from apps.core.utils import resolve_threads
from apps.core.validators import HARDNESS_MEASURES
from apps.dataset.knn import knn_of_vector
from apps.dataset.types import VectorSet
from apps.graphs.types import DirectedGraph
from apps.hardness.calculators import epsilon_hardness, lid_estimate, qe, rc
from apps.reach.delta0 import Delta0Result, delta0_for_query
from apps.steiner.effort import me_constrained, me_exhaustive

logger = logging.getLogger(__name__)

Variant = Literal['full', 'no-entry', 'no-range', 'no-cost']
VARIANTS: tuple[str, ...] = ('full', 'no-entry', 'no-range', 'no-cost')

HARDNESS_COLUMNS = (
    'query_id', 'steiner', 'delta0_radius', 'delta0', 'lid', 'rc', 'qe',
    'epsilon_hardness', 'measured_ndc', 'status',
)


@dataclass(frozen=True)
class HardnessRecord:
    """Hardness values of one query; NaN marks a measure not computed or undefined."""
    query_id: int
    steiner: float = math.nan
    delta0_radius: float = math.nan
    delta0: float = math.nan
    lid: float = math.nan
    rc: float = math.nan
    qe: float = math.nan
    epsilon_hardness: float = math.nan
    measured_ndc: float | None = None
    status: str = ''

    def as_dict(self) -> dict:
        return asdict(self)


def steiner_hardness(mrng: DirectedGraph, rev_mrng: DirectedGraph, base: VectorSet, q, k: int,
                     acc: float, p: float, max_candidates: int | None = None,
                     variant: Variant = 'full') -> tuple[float, Delta0Result]:
    """
    Steiner-hardness of one query.

    Variants drop one ingredient each: 'no-entry' uses p = 1/k, 'no-range'
    lifts the radius limit, 'no-cost' counts vertices instead of decision
    cost.

    Returns:
        (hardness, critical point detail); hardness is inf when no witness
        exists within max_candidates neighbors
    """
    if variant not in VARIANTS:
        raise ParameterError(f"Unknown Steiner-hardness variant {variant!r}")
    p_used = 1.0 / k if variant == 'no-entry' else p
    detail = delta0_for_query(mrng, rev_mrng, base, q, k, acc, p_used, max_candidates)
    if not detail.success:
        return math.inf, detail

    radius = math.inf if variant == 'no-range' else detail.radius
    solve = me_constrained if variant == 'no-cost' else me_exhaustive
    value = solve(mrng, base, q, detail.neighbors, k, acc, p_used, radius, detail.pairs)
    return float(value), detail


def p_sweep(mrng: DirectedGraph, rev_mrng: DirectedGraph, base: VectorSet, q, k: int, acc: float,
            ps: Sequence[float] = P_SWEEP, max_candidates: int | None = None) -> dict[float, float]:
    """Steiner-hardness of one query over several p values."""
    return {
        p: steiner_hardness(mrng, rev_mrng, base, q, k, acc, p, max_candidates)[0]
        for p in ps
    }


def _query_record(query_id: int, mrng, rev_mrng, base: VectorSet, q, k: int, acc: float, p: float,
                  eps: float, measures: frozenset[str], max_candidates, variant) -> HardnessRecord:
    values: dict = {'query_id': query_id}

    if 'steiner' in measures:
        steiner, detail = steiner_hardness(mrng, rev_mrng, base, q, k, acc, p, max_candidates, variant)
        values.update(steiner=steiner, delta0_radius=detail.radius, delta0=detail.delta0,
                      status=detail.status)

    baselines = measures & {'lid', 'rc', 'qe', 'eps'}
    if baselines:
        nn = knn_of_vector(base, q, min(base.count, 2 * k))
        if 'lid' in baselines:
            values['lid'] = lid_estimate(nn, k)
        if 'rc' in baselines:
            values['rc'] = rc(q, base, nn, k)
        if 'qe' in baselines:
            values['qe'] = qe(nn, k)
        if 'eps' in baselines:
            values['epsilon_hardness'] = epsilon_hardness(q, base, nn, k, eps)

    return HardnessRecord(**values)


def compute_hardness_records(mrng: DirectedGraph | None, rev_mrng: DirectedGraph | None,
                             base: VectorSet, queries: VectorSet, k: int, acc: float, p: float,
                             eps: float = 0.5, measures: Iterable[str] = HARDNESS_MEASURES,
                             max_candidates: int | None = None, variant: Variant = 'full',
                             threads: int | None = 1) -> list[HardnessRecord]:
    """
    Hardness records for every query, in query order.

    Args:
        mrng / rev_mrng: Approximate MRNG and its reverse (needed for 'steiner')
        base: Database vectors
        queries: Query vectors
        k, acc, p: Steiner-hardness parameters
        eps: Epsilon of epsilon-hardness
        measures: Subset of steiner, lid, rc, qe, eps
        max_candidates: Neighbor cap of the critical radius search
        variant: Steiner-hardness variant
        threads: Worker count (0 = all cores)
    """
    measures = frozenset(measures)
    unknown = measures - set(HARDNESS_MEASURES)
    if unknown:
        raise ParameterError(f"Unknown hardness measures: {', '.join(sorted(unknown))}")
    if 'steiner' in measures and (mrng is None or rev_mrng is None):
        raise ParameterError("Steiner-hardness needs the MRNG and its reverse")

    logger.info(f"Computing {', '.join(sorted(measures))} for {queries.count} queries")
    return Parallel(n_jobs=resolve_threads(threads))(
        delayed(_query_record)(
            i, mrng, rev_mrng, base, queries[i], k, acc, p, eps, measures, max_candidates, variant
        )
        for i in range(queries.count)
    )
