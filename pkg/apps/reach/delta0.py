"""
Critical point search.

Nearest neighbors of the query are inserted one at a time in ascending
distance order. After every insertion the reachability between inserted
vertices is updated on a union-find set graph and the kNN members are
checked for qualification: a kNN member qualifies when it reaches at least
ceil(Acc*k) kNN members (itself included) inside the inserted subgraph.
The search stops once ceil(p*k) kNN members qualify; the distance of the
last inserted neighbor is the radius. Qualification is only checked once
all k nearest neighbors are inserted, so the radius is never below d_k.
"""
import logging
import math
from collections import deque
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Literal

from apps.core.exceptions import InsufficientDataError, ParameterError
from apps.core.presets import DELTA0_INITIAL_FACTOR, delta0_cap
from apps.core.utils import required_count
from apps.dataset.knn import knn_of_vector
from apps.dataset.types import NeighborList, VectorSet
from apps.graphs.types import DirectedGraph
from apps.reach.usg import UnionFindSetGraph

logger = logging.getLogger(__name__)

Delta0Status = Literal['ok', 'exhausted', 'capped']


@dataclass(frozen=True)
class PairSet:
    """
    (start, terminal) pairs between kNN members.

    representatives maps every start to the start standing in for its
    reachable group (the group member nearest to the query); starts of one
    group reach the same terminals. radius is the candidate radius the
    pairs were found at, None for hand-built sets.
    """
    pairs: frozenset[tuple[int, int]] = frozenset()
    representatives: Mapping[int, int] = field(default_factory=lambda: MappingProxyType({}))
    radius: float | None = None

    @classmethod
    def from_groups(cls, groups: Iterable[tuple[Sequence[int], Iterable[int]]],
                    radius: float | None = None) -> 'PairSet':
        """Build from (starts nearest-first, terminals) per reachable group."""
        pairs = set()
        reps = {}
        for starts, terminals in groups:
            terminals = list(terminals)
            for s in starts:
                reps[s] = starts[0]
                pairs.update((s, t) for t in terminals)
        return cls(frozenset(pairs), MappingProxyType(reps), radius)

    @classmethod
    def single(cls, start: int, terminals: Iterable[int]) -> 'PairSet':
        return cls.from_groups([([start], terminals)])

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.pairs))

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def starts(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.pairs)

    def terminals(self) -> frozenset[int]:
        return frozenset(t for _, t in self.pairs)

    def by_start(self) -> dict[int, frozenset[int]]:
        grouped: dict[int, set[int]] = {}
        for s, t in self.pairs:
            grouped.setdefault(s, set()).add(t)
        return {s: frozenset(ts) for s, ts in sorted(grouped.items())}

    def representative_starts(self) -> dict[int, frozenset[int]]:
        """One entry per reachable group: representative -> terminals."""
        grouped = self.by_start()
        reps = {}
        for s, ts in grouped.items():
            rep = self.representatives.get(s, s)
            reps[rep] = reps.get(rep, frozenset()) | ts
        return dict(sorted(reps.items()))


@dataclass(frozen=True)
class Delta0Result:
    """
    Critical radius and witness pairs of one query.

    radius is inf (and delta0 inf) when no witness was found within the
    fetched neighbors; status tells whether the list ran out or the cap
    was hit.
    """
    radius: float
    delta0: float
    pairs: PairSet
    iterations: int
    candidate_count: int
    status: Delta0Status = 'ok'
    neighbors: NeighborList | None = field(default=None, compare=False, repr=False)

    @property
    def success(self) -> bool:
        return self.status == 'ok'

    @property
    def qualified_starts(self) -> tuple[int, ...]:
        return tuple(sorted(self.pairs.starts()))


def _ratio(radius: float, dk: float) -> float:
    if math.isinf(radius):
        return math.inf
    if dk == 0.0:
        return 0.0 if radius == 0.0 else math.inf
    return radius / dk - 1.0


def _check_params(k: int, acc: float, p: float) -> None:
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if not 0.0 < acc <= 1.0:
        raise ParameterError(f"Acc must lie in (0, 1], got {acc}")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {p}")


class Delta0Finder:
    """
    Incremental state of the critical point search for one query.

    Feed neighbor lists of growing length; each call continues where the
    previous one stopped.

    Usage:
        finder = Delta0Finder(g, revg, k=10, acc=0.9, p=0.95)
        result = finder.feed(nn)  # None while no witness exists
    """

    def __init__(self, g: DirectedGraph, revg: DirectedGraph, k: int, acc: float, p: float,
                 literal_root_count: bool = False):
        _check_params(k, acc, p)
        if g.count != revg.count:
            raise ParameterError("Graph and reversed graph differ in vertex count")
        self.g = g
        self.revg = revg
        self.k = k
        self.need_terminals = required_count(acc, k)
        self.need_starts = required_count(p, k)
        self.literal_root_count = literal_root_count
        self.usg = UnionFindSetGraph()
        self.inserted: list[int] = []
        self.knn: list[int] = []
        self.dk: float | None = None
        self.last_dist = 0.0
        self.result: Delta0Result | None = None
        self._groups = None

    def insert(self, v: int, dist: float) -> bool:
        """Insert one neighbor; True once a witness exists."""
        self.usg.insert(v, self.g.adjacency[v], self.revg.adjacency[v])
        self.inserted.append(v)
        self.last_dist = dist
        if len(self.knn) < self.k:
            self.knn.append(v)
        if len(self.knn) < self.k:
            return False
        self._groups = self._qualified()
        return self._groups is not None

    def _qualified(self) -> list[tuple[list[int], list[int]]] | None:
        """Qualified groups as (kNN starts, reachable kNN terminals), or None."""
        by_root: dict[int, list[int]] = {}
        for v in self.knn:
            by_root.setdefault(self.usg.root(v), []).append(v)

        groups = []
        for root, starts in by_root.items():
            terminals = [
                t for reached in self.usg.reachable_roots(root) for t in by_root.get(reached, ())
            ]
            if len(terminals) >= self.need_terminals:
                groups.append((starts, sorted(terminals)))

        if self.literal_root_count:
            count = len(groups)
        else:
            count = sum(len(starts) for starts, _ in groups)
        return groups if count >= self.need_starts else None

    def feed(self, nn: NeighborList, limit: int | None = None) -> Delta0Result | None:
        """
        Insert nn entries beyond those already inserted, up to limit.

        Returns:
            Delta0Result on success, None when the entries ran out first
        """
        if self.result is not None:
            return self.result
        if len(nn) < self.k:
            raise InsufficientDataError(f"Need at least k={self.k} neighbors, got {len(nn)}")
        self.dk = nn.kth_distance(self.k)
        stop = len(nn) if limit is None else min(limit, len(nn))

        for pos in range(len(self.inserted), stop):
            v, dist = nn[pos]
            if self.insert(v, dist):
                self.result = Delta0Result(
                    radius=dist,
                    delta0=_ratio(dist, self.dk),
                    pairs=PairSet.from_groups(self._groups, radius=dist),
                    iterations=len(self.inserted),
                    candidate_count=len(nn),
                    neighbors=nn,
                )
                logger.debug(
                    f"Witness after {len(self.inserted)} insertions "
                    f"({len(self.usg)} groups, {self.usg.merges} merges)"
                )
                return self.result
        return None

    def failure(self, status: Delta0Status, nn: NeighborList | None = None) -> Delta0Result:
        return Delta0Result(
            radius=math.inf,
            delta0=math.inf,
            pairs=PairSet(),
            iterations=len(self.inserted),
            candidate_count=len(nn) if nn is not None else len(self.inserted),
            status=status,
            neighbors=nn,
        )


def _limit(nn: NeighborList, max_candidates: int | None) -> tuple[int, Delta0Status]:
    if max_candidates is not None and max_candidates <= len(nn):
        return max_candidates, 'capped'
    return len(nn), 'exhausted'


def find_delta0(g: DirectedGraph, revg: DirectedGraph, nn: NeighborList, k: int, acc: float,
                p: float, max_candidates: int | None = None,
                literal_root_count: bool = False) -> Delta0Result:
    """
    Critical radius and witness pairs from a precomputed neighbor list.

    Args:
        g: Graph index
        revg: reverse_graph(g)
        nn: Exact neighbors of the query, nearest first
        k: Size of the kNN set
        acc: Required share of kNN reached from a start
        p: Required share of kNN acting as starts
        max_candidates: Stop after this many insertions
        literal_root_count: Count qualified groups instead of qualified members

    Returns:
        Delta0Result; radius inf when no witness exists within the limit
    """
    finder = Delta0Finder(g, revg, k, acc, p, literal_root_count)
    stop, status = _limit(nn, max_candidates)
    result = finder.feed(nn, stop)
    return result if result is not None else finder.failure(status, nn)


def find_delta0_naive(g: DirectedGraph, revg: DirectedGraph, nn: NeighborList, k: int,
                      acc: float, p: float, max_candidates: int | None = None,
                      literal_root_count: bool = False) -> Delta0Result:
    """Same contract as find_delta0, by BFS on the inserted subgraph after every insertion."""
    _check_params(k, acc, p)
    if len(nn) < k:
        raise InsufficientDataError(f"Need at least k={k} neighbors, got {len(nn)}")
    need_terminals = required_count(acc, k)
    need_starts = required_count(p, k)
    dk = nn.kth_distance(k)
    stop, status = _limit(nn, max_candidates)
    adjacency = g.adjacency

    inserted: set[int] = set()
    knn: list[int] = []
    for pos in range(stop):
        v, dist = nn[pos]
        inserted.add(v)
        if len(knn) < k:
            knn.append(v)
        if len(knn) < k:
            continue

        knn_set = set(knn)
        reach = {s: _bfs(adjacency, s, inserted) & knn_set for s in knn}
        qualified = [s for s in knn if len(reach[s]) >= need_terminals]

        # Mutually reachable starts form one group, represented by its nearest member
        groups: dict[int, list[int]] = {}
        for s in qualified:
            rep = next(r for r in qualified if r in reach[s] and s in reach[r])
            groups.setdefault(rep, []).append(s)
        count = len(groups) if literal_root_count else len(qualified)
        if count >= need_starts:
            return Delta0Result(
                radius=dist,
                delta0=_ratio(dist, dk),
                pairs=PairSet.from_groups(
                    ((starts, sorted(reach[starts[0]])) for starts in groups.values()),
                    radius=dist,
                ),
                iterations=pos + 1,
                candidate_count=len(nn),
                neighbors=nn,
            )

    return Delta0Result(math.inf, math.inf, PairSet(), stop, len(nn), status, nn)


def _bfs(adjacency: Sequence[Sequence[int]], start: int, allowed: set[int]) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adjacency[x]:
            if y in allowed and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def delta0_for_query(g: DirectedGraph, revg: DirectedGraph, base: VectorSet, q, k: int,
                     acc: float, p: float, max_candidates: int | None = None,
                     literal_root_count: bool = False) -> Delta0Result:
    """
    Critical point search with neighbors fetched on demand.

    Starts from 4k exact neighbors and doubles the fetch whenever they run
    out, up to max_candidates (default min(N, 50k + 10000)).
    """
    cap = delta0_cap(base.count, k) if max_candidates is None else min(max_candidates, base.count)
    if cap < k:
        raise ParameterError(f"Candidate cap {cap} is smaller than k={k}")
    fetch = min(cap, max(k, DELTA0_INITIAL_FACTOR * k))
    finder = Delta0Finder(g, revg, k, acc, p, literal_root_count)

    while True:
        nn = knn_of_vector(base, q, fetch)
        result = finder.feed(nn)
        if result is not None:
            return result
        if fetch >= cap:
            return finder.failure('capped' if cap < base.count else 'exhausted', nn)
        fetch = min(2 * fetch, cap)
