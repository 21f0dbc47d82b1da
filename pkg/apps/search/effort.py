"""
Query effort: the least NDC at which greedy search reaches a recall target.
"""
import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from apps.core.exceptions import ParameterError
from apps.core.utils import query_rng, resolve_threads
from apps.dataset.types import NeighborList, VectorSet
from apps.graphs.types import DirectedGraph
from apps.search.greedy import SearchResult, greedy_search, recall

logger = logging.getLogger(__name__)

EntryPolicy = Literal['fixed', 'random']

EFFORT_COLUMNS = ('query_id', 'ndc', 'ef', 'recall', 'phase1_ndc')


@dataclass(frozen=True)
class EffortRecord:
    """One row of the effort table; values are means over repeats."""
    query_id: int
    ndc: float
    ef: float
    recall: float
    phase1_ndc: float

    def as_dict(self) -> dict:
        return asdict(self)


def _minimal_ef_run(g: DirectedGraph, base: VectorSet, q, gt: NeighborList, target: float,
                    k: int, ep: int) -> tuple[int | None, SearchResult]:
    """
    Doubling-then-bisect sweep for the smallest ef reaching target.

    Returns (ef, result of that run), or (None, result at ef = N).
    """
    n = g.count
    runs: dict[int, SearchResult] = {}

    def ok(ef: int) -> bool:
        if ef not in runs:
            runs[ef] = greedy_search(g, base, q, ep, ef, k, gt=gt)
        return recall(runs[ef].answers, gt, k) >= target - 1e-12

    lo, ef = None, k
    while not ok(ef):
        if ef >= n:
            return None, runs[ef]
        lo, ef = ef, min(2 * ef, n)

    hi = ef
    if lo is not None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
    return hi, runs[hi]


def _entry_points(policy: EntryPolicy, count: int, repeats: int, seed: int, query_id: int,
                  entry_vertex: int) -> list[int]:
    if policy == 'fixed':
        return [entry_vertex] * repeats
    if policy == 'random':
        rng = query_rng(seed, query_id)
        return rng.integers(0, count, size=repeats).tolist()
    raise ParameterError(f"Unknown entry policy {policy!r}")


def measure_effort(g: DirectedGraph, base: VectorSet, q, gt: NeighborList, target: float,
                   k: int, entry_policy: EntryPolicy = 'fixed', repeats: int = 1, seed: int = 0,
                   query_id: int = 0, entry_vertex: int = 0) -> EffortRecord:
    """
    Effort of one query at one recall target, averaged over repeats.

    An unreachable target gives ndc = ef = inf.
    """
    if not 0.0 < target <= 1.0:
        raise ParameterError(f"Recall target {target} outside (0, 1]")
    if repeats < 1:
        raise ParameterError(f"repeats must be positive, got {repeats}")

    ndcs, efs, recalls, phase1 = [], [], [], []
    for ep in _entry_points(entry_policy, g.count, repeats, seed, query_id, entry_vertex):
        ef, run = _minimal_ef_run(g, base, q, gt, target, k, ep)
        recalls.append(recall(run.answers, gt, k))
        if ef is None:
            ndcs.append(math.inf)
            efs.append(math.inf)
            phase1.append(math.nan)
        else:
            ndcs.append(run.ndc)
            efs.append(ef)
            phase1.append(run.phase1_ndc)

    return EffortRecord(
        query_id=query_id,
        ndc=float(np.mean(ndcs)),
        ef=float(np.mean(efs)),
        recall=float(np.mean(recalls)),
        phase1_ndc=float(np.mean(phase1)),
    )


def min_ndc_to_recall(g: DirectedGraph, base: VectorSet, q, gt: NeighborList, target: float,
                      k: int, entry_policy: EntryPolicy = 'fixed', repeats: int = 1,
                      seed: int = 0, query_id: int = 0, entry_vertex: int = 0) -> float:
    """Mean NDC of the minimal-ef run over repeats; inf when unreachable."""
    return measure_effort(
        g, base, q, gt, target, k, entry_policy, repeats, seed, query_id, entry_vertex
    ).ndc


def measure_effort_batch(g: DirectedGraph, base: VectorSet, queries: VectorSet,
                         gt: Sequence[NeighborList], target: float, k: int,
                         entry_policy: EntryPolicy = 'fixed', repeats: int = 1, seed: int = 0,
                         entry_vertex: int = 0, threads: int | None = 1) -> list[EffortRecord]:
    """measure_effort for every query, in query order."""
    logger.info(
        f"Measuring effort of {queries.count} queries at recall {target} "
        f"({entry_policy} entry, {repeats} repeats)"
    )
    return Parallel(n_jobs=resolve_threads(threads))(
        delayed(measure_effort)(
            g, base, queries[i], gt[i], target, k, entry_policy, repeats, seed, i, entry_vertex
        )
        for i in range(queries.count)
    )


def phase_breakdown(g: DirectedGraph, base: VectorSet, queries: VectorSet,
                    gt: Sequence[NeighborList], ef: int, k: int, ep: int = 0) -> pd.DataFrame:
    """
    Split the NDC of a fixed-ef search into the part spent before the first
    true neighbor was evaluated (phase 1) and the rest (phase 2).
    """
    rows = []
    for i in range(queries.count):
        run = greedy_search(g, base, queries[i], ep, ef, k, gt=gt[i])
        rows.append({
            'query_id': i,
            'ndc': run.ndc,
            'phase1_ndc': run.phase1_ndc,
            'phase2_ndc': run.phase2_ndc,
            'recall': recall(run.answers, gt[i], k),
        })
    return pd.DataFrame.from_records(
        rows, columns=['query_id', 'ndc', 'phase1_ndc', 'phase2_ndc', 'recall']
    )


def phase_summary(frame: pd.DataFrame) -> dict:
    """Aggregate phase shares of a phase_breakdown table."""
    total = float(frame['ndc'].sum())
    phase1 = float(frame['phase1_ndc'].sum())
    return {
        'queries': int(len(frame)),
        'mean_ndc': float(frame['ndc'].mean()) if len(frame) else math.nan,
        'mean_phase1_ndc': float(frame['phase1_ndc'].mean()) if len(frame) else math.nan,
        'phase1_share': phase1 / total if total else math.nan,
    }
