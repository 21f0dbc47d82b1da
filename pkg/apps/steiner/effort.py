"""
Minimum-effort (ME) values of a query on a graph.

- me_basic: smallest shortest-path tree from any root reaching ceil(Acc*k)
  of the kNN, over an unlimited candidate set
- me_constrained: smallest Steiner network connecting the witness starts to
  ceil(Acc*k) kNN each, inside the candidate radius
- me_exhaustive: the same network solved with decision-cost node weights,
  reported as its exact decision cost

Witness starts are taken group by group, nearest representative first,
until ceil(p*k) starts are covered; each start keeps its ceil(Acc*k)
cheapest terminals. Both selections only grow with p and Acc.

Networks are solved on a ladder of nested radii starting at the witness
radius. A radius is served by every rung at or below it, so both constrained
values are non-increasing in the radius.
"""
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import ParameterError
from apps.core.presets import RADIUS_LADDER_RATIO
from apps.core.utils import required_count
from apps.dataset.knn import distances_to
from apps.dataset.types import NeighborList, VectorSet
from apps.graphs.types import DirectedGraph
from apps.reach.delta0 import PairSet
from apps.steiner.solvers import out_degree_weights, shortest_path_tree, vdsn_heuristic
from apps.steiner.types import RADIUS_RTOL, CandidateFilter, SteinerSolution

logger = logging.getLogger(__name__)

# Graphs up to this size sweep every vertex as a root in me_basic
FULL_ROOT_SWEEP_LIMIT = 2000


@dataclass(frozen=True)
class MEChain:
    basic: float
    constrained: float
    exhaustive: float

    @property
    def ordered(self) -> bool:
        return self.basic <= self.constrained <= self.exhaustive


def select_pairs(pairs: PairSet, nn: NeighborList, k: int, p: float) -> PairSet:
    """Witness groups, nearest representative first, until ceil(p*k) starts are covered."""
    need = required_count(p, k)
    rank = {v: i for i, v in enumerate(nn.ids.tolist())}
    groups: dict[int, list[int]] = {}
    for s in pairs.by_start():
        groups.setdefault(pairs.representatives.get(s, s), []).append(s)

    chosen: set[int] = set()
    covered = 0
    for rep in sorted(groups, key=lambda r: (rank.get(r, math.inf), r)):
        if covered >= need:
            break
        chosen.update(groups[rep])
        covered += len(groups[rep])
    return PairSet(
        frozenset((s, t) for s, t in pairs.pairs if s in chosen),
        pairs.representatives,
        pairs.radius,
    )


def radius_ladder(anchor: float, limit: float,
                  ratio: float = RADIUS_LADDER_RATIO) -> tuple[float, ...]:
    """
    Nested candidate radii anchor * ratio**i, i >= 0.

    The last rung is the first one reaching limit (the farthest base vector
    from the query), so its filter admits every vertex.
    """
    if ratio <= 1.0:
        raise ParameterError(f"Ladder ratio must exceed 1, got {ratio}")
    if math.isinf(anchor):
        return (math.inf,)
    rungs = [anchor]
    while rungs[-1] < limit:
        rungs.append(rungs[-1] * ratio if rungs[-1] > 0.0 else limit)
    return tuple(rungs)


@dataclass(frozen=True)
class WitnessNetworks:
    """
    Hop-count and decision-cost-weighted witness networks on nested radii.

    A network found inside one rung stays feasible inside every larger
    radius, so each value is the best over all rungs within the radius.
    """
    rungs: tuple[float, ...] = ()
    unweighted: tuple[SteinerSolution, ...] = ()
    weighted: tuple[SteinerSolution, ...] = ()

    def within(self, radius: float) -> range:
        bound = radius * (1.0 + RADIUS_RTOL)
        return range(sum(1 for rung in self.rungs if rung <= bound))

    def solutions(self, radius: float) -> list[SteinerSolution]:
        return [s for i in self.within(radius) for s in (self.unweighted[i], self.weighted[i])]

    def me(self, radius: float) -> float:
        return min((s.me for s in self.solutions(radius)), default=math.inf)

    def cost(self, radius: float) -> float:
        return min((self.weighted[i].cost_union for i in self.within(radius)), default=math.inf)


def witness_networks(g: DirectedGraph, base: VectorSet, q, nn: NeighborList, k: int, acc: float,
                     p: float, radius: float, pairs: PairSet,
                     distances=None) -> WitnessNetworks:
    """
    Witness networks on every ladder rung up to radius.

    The ladder starts at the radius the pairs were found at (d_k for
    hand-built pairs); below it no rung exists and every value is inf.
    """
    if not pairs:
        return WitnessNetworks()
    dists = distances_to(base.data, q) if distances is None else np.asarray(distances)
    anchor = pairs.radius if pairs.radius is not None else nn.kth_distance(k)
    bound = radius * (1.0 + RADIUS_RTOL)
    rungs = tuple(r for r in radius_ladder(anchor, float(dists.max())) if r <= bound)

    chosen = select_pairs(pairs, nn, k, p)
    keep = required_count(acc, k)
    weights = out_degree_weights(g)
    unweighted, weighted = [], []
    for rung in rungs:
        flt = CandidateFilter.from_distances(dists, rung)
        unweighted.append(vdsn_heuristic(g, chosen, flt, keep=keep))
        weighted.append(vdsn_heuristic(g, chosen, flt, weights=weights, keep=keep))
    logger.debug(f"Solved witness networks on {len(rungs)} radii from {anchor:.6g}")
    return WitnessNetworks(rungs, tuple(unweighted), tuple(weighted))


def me_basic(g: DirectedGraph, nn: NeighborList, k: int, acc: float,
             root_set: Iterable[int] | None = None,
             witnesses: Sequence[SteinerSolution] = ()) -> float:
    """
    Smallest tree from a single root reaching ceil(Acc*k) kNN members.

    Args:
        g: Graph
        nn: Neighbors of the query (first k are the targets)
        k: kNN size
        acc: Recall target
        root_set: Roots to try; every vertex on small graphs, else the kNN
        witnesses: Solutions whose per-start trees also count as candidates

    Returns:
        Node count of the best tree, inf when no root qualifies
    """
    terminals = nn.top(k).ids.tolist()
    keep = required_count(acc, k)
    if root_set is None:
        root_set = range(g.count) if g.count <= FULL_ROOT_SWEEP_LIMIT else terminals
    unlimited = CandidateFilter.unlimited()

    best = math.inf
    for root in root_set:
        tree = shortest_path_tree(g, root, unlimited)
        chosen = tree.cheapest(terminals, keep)
        if len(chosen) >= keep:
            best = min(best, len(tree.union(chosen)))

    targets = set(terminals)
    for solution in witnesses:
        if not solution.feasible:
            continue
        for start, nodes in solution.trees.items():
            if len(solution.per_start.get(start, frozenset()) & targets) >= keep:
                best = min(best, len(nodes))
    return best


def me_constrained(g: DirectedGraph, base: VectorSet, q, nn: NeighborList, k: int, acc: float,
                   p: float, radius: float, pairs: PairSet) -> float:
    """Node count of the smallest witness network found inside the radius."""
    return witness_networks(g, base, q, nn, k, acc, p, radius, pairs).me(radius)


def me_exhaustive(g: DirectedGraph, base: VectorSet, q, nn: NeighborList, k: int, acc: float,
                  p: float, radius: float, pairs: PairSet) -> float:
    """Decision cost of the witness networks solved with weights 1 + out-degree."""
    return witness_networks(g, base, q, nn, k, acc, p, radius, pairs).cost(radius)


def me_chain(g: DirectedGraph, base: VectorSet, q, nn: NeighborList, k: int, acc: float, p: float,
             radius: float, pairs: PairSet, root_set: Iterable[int] | None = None) -> MEChain:
    """All three ME values from one set of solves."""
    networks = witness_networks(g, base, q, nn, k, acc, p, radius, pairs)
    return MEChain(
        basic=me_basic(g, nn, k, acc, root_set, witnesses=networks.solutions(radius)),
        constrained=networks.me(radius),
        exhaustive=networks.cost(radius),
    )


def me_radius_sweep(g: DirectedGraph, base: VectorSet, q, nn: NeighborList, k: int, acc: float,
                    p: float, radii: Sequence[float], pairs: PairSet) -> list[float]:
    """
    me_constrained at several radii from one ladder of solves.

    Returns:
        Values in the order of radii
    """
    if not radii:
        return []
    networks = witness_networks(g, base, q, nn, k, acc, p, max(radii), pairs)
    return [networks.me(r) for r in radii]
