"""
Exhaustive Steiner oracles for tiny instances.

Both enumerate vertex subsets of the candidate filter that contain every
start and terminal and keep the smallest feasible one (or the lightest,
when node weights are given). Used only to check the heuristics.
"""
import logging
from collections import deque
from collections.abc import Iterable, Mapping
from itertools import combinations
from types import MappingProxyType

from apps.core.exceptions import InstanceTooLargeError
from apps.core.presets import EXACT_ORACLE_LIMIT
from apps.graphs.types import DirectedGraph
from apps.reach.delta0 import PairSet
from apps.steiner.solvers import Weights, decision_cost
from apps.steiner.types import CandidateFilter, SteinerSolution

logger = logging.getLogger(__name__)


def _reach(adjacency, start: int, nodes: set[int]) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adjacency[x]:
            if y in nodes and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def _feasible(adjacency, requirements: Mapping[int, frozenset[int]], nodes: set[int]) -> bool:
    return all(ts <= _reach(adjacency, s, nodes) for s, ts in requirements.items())


def _useful(g: DirectedGraph, requirements, allowed: set[int]) -> set[int]:
    """Vertices on some start-to-terminal walk inside allowed."""
    forward: set[int] = set()
    for s in requirements:
        forward |= _reach(g.adjacency, s, allowed)
    reverse_adj: dict[int, list[int]] = {v: [] for v in allowed}
    for u in allowed:
        for v in g.adjacency[u]:
            if v in allowed:
                reverse_adj[v].append(u)
    backward: set[int] = set()
    for ts in requirements.values():
        for t in ts:
            backward |= _reach(reverse_adj, t, allowed)
    return forward & backward


def _exact(g: DirectedGraph, requirements: Mapping[int, frozenset[int]], flt: CandidateFilter,
           weights: Weights | None) -> SteinerSolution:
    allowed = set(flt.vertices(g.count))
    if len(allowed) > EXACT_ORACLE_LIMIT:
        raise InstanceTooLargeError(
            f"Exact oracle limited to {EXACT_ORACLE_LIMIT} candidate vertices, got {len(allowed)}"
        )
    if not requirements:
        return SteinerSolution.empty()

    required = set(requirements) | set().union(*requirements.values())
    if not required <= allowed or not _feasible(g.adjacency, requirements, allowed):
        return SteinerSolution.infeasible(unreachable=required - allowed)

    optional = sorted(_useful(g, requirements, allowed) - required)
    best: set[int] | None = None

    if weights is None:
        for size in range(len(optional) + 1):
            for extra in combinations(optional, size):
                nodes = required | set(extra)
                if _feasible(g.adjacency, requirements, nodes):
                    best = nodes
                    break
            if best is not None:
                break
    else:
        best_key = None
        for size in range(len(optional) + 1):
            for extra in combinations(optional, size):
                nodes = required | set(extra)
                key = sum(float(weights[v]) for v in nodes)
                if best_key is not None and key >= best_key:
                    continue
                if _feasible(g.adjacency, requirements, nodes):
                    best, best_key = nodes, key

    nodes = frozenset(best)
    cost, _ = decision_cost(g, nodes)
    return SteinerSolution(
        nodes=nodes,
        me=len(nodes),
        cost_union=cost,
        per_start=MappingProxyType(dict(requirements)),
        trees=MappingProxyType({s: frozenset(_reach(g.adjacency, s, set(nodes))) for s in requirements}),
    )


def dst_exact_bruteforce(g: DirectedGraph, root: int, terminals: Iterable[int], flt: CandidateFilter,
                         weights: Weights | None = None) -> SteinerSolution:
    """Optimal directed Steiner tree by enumeration (at most 20 candidates)."""
    return _exact(g, {root: frozenset(terminals)}, flt, weights)


def vdsn_exact_bruteforce(g: DirectedGraph, pairs: PairSet, flt: CandidateFilter,
                          weights: Weights | None = None) -> SteinerSolution:
    """Optimal vertex-focused Steiner network by enumeration (at most 20 candidates)."""
    return _exact(g, pairs.representative_starts(), flt, weights)
