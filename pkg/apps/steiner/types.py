"""
Candidate filters and Steiner solutions.
"""
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from apps.dataset.knn import distances_to
from apps.dataset.types import NeighborList, VectorSet

# Relative slack when comparing recomputed distances against a radius
RADIUS_RTOL = 1e-9


@dataclass(frozen=True)
class CandidateFilter:
    """
    Vertices admissible in a solution: those within radius of the query.

    allowed is None for an unlimited filter (radius inf).
    """
    radius: float
    allowed: frozenset[int] | None = None

    @classmethod
    def unlimited(cls) -> 'CandidateFilter':
        return cls(math.inf, None)

    @classmethod
    def from_distances(cls, dists: np.ndarray, radius: float) -> 'CandidateFilter':
        """From distances of every base vector to the query."""
        if math.isinf(radius):
            return cls.unlimited()
        bound = radius * (1.0 + RADIUS_RTOL)
        return cls(radius, frozenset(np.flatnonzero(np.asarray(dists) <= bound).tolist()))

    @classmethod
    def from_query(cls, base: VectorSet, q, radius: float) -> 'CandidateFilter':
        if math.isinf(radius):
            return cls.unlimited()
        return cls.from_distances(distances_to(base.data, q), radius)

    @classmethod
    def from_neighbors(cls, nn: NeighborList, radius: float) -> 'CandidateFilter':
        """From a neighbor list that extends past radius."""
        if math.isinf(radius):
            return cls.unlimited()
        bound = radius * (1.0 + RADIUS_RTOL)
        return cls(radius, frozenset(nn.ids[nn.dists <= bound].tolist()))

    @classmethod
    def of(cls, vertices) -> 'CandidateFilter':
        """Explicit vertex set, radius unknown."""
        return cls(math.nan, frozenset(int(v) for v in vertices))

    def __contains__(self, v: int) -> bool:
        return self.allowed is None or v in self.allowed

    def vertices(self, count: int) -> list[int]:
        if self.allowed is None:
            return list(range(count))
        return sorted(self.allowed)


@dataclass(frozen=True)
class SteinerSolution:
    """
    Node set of a feasible subgraph and its two sizes.

    me is |nodes|; cost_union is the decision cost of nodes. Both are inf
    when some requirement could not be met. trees holds the node set used
    for each start, per_start the terminals it reaches.
    """
    nodes: frozenset[int]
    me: float
    cost_union: float
    per_start: Mapping[int, frozenset[int]] = field(default_factory=lambda: MappingProxyType({}))
    trees: Mapping[int, frozenset[int]] = field(default_factory=lambda: MappingProxyType({}))
    unreachable: frozenset[int] = frozenset()

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.me)

    @classmethod
    def empty(cls) -> 'SteinerSolution':
        return cls(frozenset(), 0, 0)

    @classmethod
    def infeasible(cls, unreachable=frozenset(), nodes=frozenset()) -> 'SteinerSolution':
        return cls(frozenset(nodes), math.inf, math.inf, unreachable=frozenset(unreachable))
