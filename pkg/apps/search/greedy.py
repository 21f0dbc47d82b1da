"""
Greedy best-first search over a proximity graph, instrumented with the
number of distance computations (NDC).

The loop pops the nearest unexpanded candidate, stops once it is farther
than the worst entry of a full result heap, and otherwise evaluates every
unvisited out-neighbor. A non-full heap has an infinite top, so every
evaluated neighbor is admitted until ef results exist.
"""
import heapq
import logging
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import InsufficientDataError, ParameterError
from apps.dataset.types import NeighborList, VectorSet
from apps.graphs.types import DirectedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchResult:
    """
    Outcome of one greedy search.

    phase1_ndc is the NDC at which the first true top-k neighbor was
    evaluated (None when no ground truth was supplied).
    """
    answers: NeighborList
    ndc: int
    phase1_ndc: int | None = None
    access_order: tuple[int, ...] | None = None

    @property
    def phase2_ndc(self) -> int | None:
        return None if self.phase1_ndc is None else self.ndc - self.phase1_ndc


@dataclass
class _Trace:
    heap: list[tuple[float, int]]
    ndc: int
    phase1_ndc: int | None
    order: list[int] | None


def beam_search(adjacency: Sequence[Sequence[int]], data: np.ndarray, q: np.ndarray, ep: int,
                ef: int, targets: Collection[int] | None = None, budget: int | None = None,
                trace: bool = False) -> _Trace:
    """
    Core search loop over adjacency lists.

    Works on any list-of-lists adjacency, including the partial graph
    during incremental construction.

    Returns:
        _Trace whose heap holds (distance, id) pairs sorted ascending
    """
    visited = bytearray(len(adjacency))
    visited[ep] = 1
    diff = data[ep] - q
    d_ep = float(np.sqrt(np.dot(diff, diff)))
    ndc = 1
    phase1 = 1 if targets is not None and ep in targets else None
    order = [ep] if trace else None

    candidates = [(d_ep, ep)]
    # Max-heap on (distance, id) via negation
    results = [(-d_ep, -ep)]

    while candidates:
        d_c, c = heapq.heappop(candidates)
        if len(results) >= ef and d_c > -results[0][0]:
            break
        fresh = [u for u in adjacency[c] if not visited[u]]
        if not fresh:
            continue
        if budget is not None:
            fresh = fresh[:max(budget - ndc, 0)]
            if not fresh:
                break
        for u in fresh:
            visited[u] = 1
        block = data[fresh] - q
        dists = np.sqrt(np.einsum('ij,ij->i', block, block)).tolist()

        if phase1 is None and targets is not None:
            for pos, u in enumerate(fresh):
                if u in targets:
                    phase1 = ndc + pos + 1
                    break
        ndc += len(fresh)
        if order is not None:
            order.extend(fresh)

        for u, d_u in zip(fresh, dists):
            if len(results) < ef or d_u < -results[0][0]:
                heapq.heappush(candidates, (d_u, u))
                heapq.heappush(results, (-d_u, -u))
                if len(results) > ef:
                    heapq.heappop(results)
        if budget is not None and ndc >= budget:
            break

    if targets is not None and phase1 is None:
        phase1 = ndc
    heap = sorted((-nd, -nu) for nd, nu in results)
    return _Trace(heap, ndc, phase1, order)


def _check(g: DirectedGraph, base: VectorSet, ep: int, ef: int, k: int) -> None:
    if g.count != base.count:
        raise ParameterError(f"Graph has {g.count} vertices, base has {base.count} vectors")
    if k < 1 or ef < k:
        raise ParameterError(f"Need 1 <= k <= ef, got k={k}, ef={ef}")
    if not 0 <= ep < g.count:
        raise ParameterError(f"Entry point {ep} outside [0, {g.count})")


def greedy_search(g: DirectedGraph, base: VectorSet, q, ep: int, ef: int, k: int,
                  gt: NeighborList | None = None, trace: bool = False,
                  budget: int | None = None) -> SearchResult:
    """
    Greedy search for the k nearest neighbors of q.

    Args:
        g: Graph index over base
        base: Indexed vectors
        q: Query vector
        ep: Entry vertex
        ef: Result heap capacity
        k: Answers returned
        gt: Ground truth; enables phase-1 accounting
        trace: Record the evaluation order
        budget: Stop after this many distance computations

    Returns:
        SearchResult with the k best answers found
    """
    _check(g, base, ep, ef, k)
    targets = gt.id_set(k) if gt is not None else None
    q = np.asarray(q, dtype=np.float64)
    run = beam_search(g.adjacency, base.data, q, ep, ef, targets=targets,
                      budget=budget, trace=trace)
    best = run.heap[:k]
    answers = NeighborList([i for _, i in best], [d for d, _ in best])
    return SearchResult(
        answers=answers,
        ndc=run.ndc,
        phase1_ndc=run.phase1_ndc,
        access_order=tuple(run.order) if run.order is not None else None,
    )


def recall(answers: Iterable[int], gt: NeighborList, k: int) -> float:
    """Fraction of the true top-k present in answers."""
    if len(gt) < k:
        raise InsufficientDataError(f"Ground truth holds {len(gt)} neighbors, recall@{k} requested")
    truth = gt.id_set(k)
    if isinstance(answers, NeighborList):
        answers = answers.ids.tolist()
    return len(truth.intersection(answers)) / k


def recall_at_ndc_budget(g: DirectedGraph, base: VectorSet, q, gt: NeighborList, k: int,
                         ef: int, budget: int, ep: int = 0) -> float:
    """Recall@k of a search cut off after budget distance computations."""
    if budget < 1:
        raise ParameterError(f"NDC budget must be positive, got {budget}")
    result = greedy_search(g, base, q, ep, ef, k, budget=budget)
    return recall(result.answers, gt, k)
