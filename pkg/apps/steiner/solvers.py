"""
Directed Steiner tree and network heuristics.

dst_shortest_path unites shortest root-to-terminal paths inside the
candidate filter: hop counts (BFS) by default, or node-weighted Dijkstra
where a path costs the sum of its vertices' weights. vdsn_heuristic solves
one such tree per start and unites them. Ties always go to the smaller
vertex id.
"""
import heapq
import logging
import math
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from apps.core.exceptions import ParameterError
from apps.graphs.types import DirectedGraph
from apps.reach.delta0 import PairSet
from apps.steiner.types import CandidateFilter, SteinerSolution

logger = logging.getLogger(__name__)

Weights = Sequence[float] | np.ndarray | Mapping[int, float]


def out_degree_weights(g: DirectedGraph) -> np.ndarray:
    """Decision-cost weights: 1 + full-graph out-degree."""
    return 1.0 + g.out_degrees().astype(np.float64)


@dataclass(frozen=True)
class ShortestPathTree:
    """Parents and path costs of every vertex reached from root."""
    root: int
    parent: dict[int, int]
    cost: dict[int, float]

    def reached(self, v: int) -> bool:
        return v in self.cost

    def path(self, v: int) -> list[int]:
        out = [v]
        while v != self.root:
            v = self.parent[v]
            out.append(v)
        return out

    def cheapest(self, terminals: Iterable[int], keep: int | None = None) -> list[int]:
        """Reached terminals by ascending (cost, id), truncated to keep."""
        reached = sorted((self.cost[t], t) for t in set(terminals) if t in self.cost)
        chosen = [t for _, t in reached]
        return chosen if keep is None else chosen[:keep]

    def union(self, terminals: Iterable[int]) -> frozenset[int]:
        nodes = {self.root}
        for t in terminals:
            v = t
            while v not in nodes:
                nodes.add(v)
                v = self.parent[v]
        return frozenset(nodes)


def shortest_path_tree(g: DirectedGraph, root: int, flt: CandidateFilter,
                       weights: Weights | None = None) -> ShortestPathTree:
    """Hop-count BFS tree, or node-weighted Dijkstra tree when weights are given."""
    if root not in flt:
        raise ParameterError(f"Root {root} lies outside the candidate filter")
    adjacency = g.adjacency
    parent: dict[int, int] = {}

    if weights is None:
        cost = {root: 1.0}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(adjacency[x]):
                if y not in cost and y in flt:
                    cost[y] = cost[x] + 1.0
                    parent[y] = x
                    queue.append(y)
        return ShortestPathTree(root, parent, cost)

    cost = {root: float(weights[root])}
    done: set[int] = set()
    heap = [(cost[root], root)]
    while heap:
        c, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y in sorted(adjacency[x]):
            if y in done or y not in flt:
                continue
            cand = c + float(weights[y])
            if cand < cost.get(y, math.inf):
                cost[y] = cand
                parent[y] = x
                heapq.heappush(heap, (cand, y))
    return ShortestPathTree(root, parent, cost)


def decision_cost(g: DirectedGraph, nodes: Iterable[int]) -> tuple[int, dict[int, frozenset[int]]]:
    """
    Decision cost of a node set.

    DS(v) is {v} when v has no out-neighbor inside nodes, otherwise v plus
    all of its out-neighbors in g.

    Returns:
        (|union of DS(v)|, DS per node)
    """
    nodes = set(nodes)
    per_node: dict[int, frozenset[int]] = {}
    covered: set[int] = set()
    for v in sorted(nodes):
        out = g.adjacency[v]
        if any(u in nodes for u in out):
            ds = frozenset([v, *out])
        else:
            ds = frozenset([v])
        per_node[v] = ds
        covered |= ds
    return len(covered), per_node


def _solution(g: DirectedGraph, per_start: dict[int, frozenset[int]],
              trees: dict[int, frozenset[int]]) -> SteinerSolution:
    nodes = frozenset().union(*trees.values()) if trees else frozenset()
    cost, _ = decision_cost(g, nodes)
    return SteinerSolution(
        nodes=nodes,
        me=len(nodes),
        cost_union=cost,
        per_start=MappingProxyType(per_start),
        trees=MappingProxyType(trees),
    )


def dst_shortest_path(g: DirectedGraph, root: int, terminals: Iterable[int], flt: CandidateFilter,
                      weights: Weights | None = None, keep: int | None = None) -> SteinerSolution:
    """
    Union of shortest root-to-terminal paths.

    Args:
        g: Graph
        root: Tree root
        terminals: Vertices to connect
        flt: Admissible vertices
        weights: Node weights; hop counts when None
        keep: Connect only the keep cheapest terminals (all when None)

    Returns:
        SteinerSolution, infeasible when too few terminals are reachable
    """
    terminals = set(terminals)
    if root not in flt:
        return SteinerSolution.infeasible(unreachable=terminals | {root})
    tree = shortest_path_tree(g, root, flt, weights)
    chosen = tree.cheapest(terminals, keep)
    needed = len(terminals) if keep is None else keep
    if len(chosen) < needed:
        missing = {t for t in terminals if not tree.reached(t)}
        return SteinerSolution.infeasible(unreachable=missing)
    return _solution(g, {root: frozenset(chosen)}, {root: tree.union(chosen)})


def vdsn_heuristic(g: DirectedGraph, pairs: PairSet, flt: CandidateFilter,
                   weights: Weights | None = None, keep: int | None = None) -> SteinerSolution:
    """
    One shortest-path tree per reachable group of starts, united.

    Starts sharing a group are represented by their representative start.
    """
    groups = pairs.representative_starts()
    if not groups:
        return SteinerSolution.empty()

    per_start: dict[int, frozenset[int]] = {}
    trees: dict[int, frozenset[int]] = {}
    for start, terminals in groups.items():
        part = dst_shortest_path(g, start, terminals, flt, weights, keep)
        if not part.feasible:
            logger.debug(f"Start {start} misses terminals {sorted(part.unreachable)}")
            return SteinerSolution.infeasible(unreachable=part.unreachable)
        per_start.update(part.per_start)
        trees.update(part.trees)
    return _solution(g, per_start, trees)


def verify_solution(g: DirectedGraph, solution: SteinerSolution,
                    requirements: Mapping[int, Iterable[int]] | None = None) -> bool:
    """BFS inside solution.nodes confirms every start reaches its terminals."""
    if not solution.feasible:
        return False
    requirements = solution.per_start if requirements is None else requirements
    nodes = solution.nodes
    for start, terminals in requirements.items():
        if start not in nodes:
            return False
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if y in nodes and y not in seen:
                    seen.add(y)
                    queue.append(y)
        if not set(terminals) <= seen:
            return False
    return True
