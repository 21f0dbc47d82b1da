"""
Directed graph over vector ids, stored in compressed sparse row form.
"""
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.core.exceptions import GraphFormatError


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """
    Immutable digraph: out-neighbors of v are indices[indptr[v]:indptr[v+1]].

    Out-neighbor order is meaningful (distance or acceptance order).
    Invariants: no self-loops, no duplicate out-neighbors, ids in [0, count).
    """
    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64).copy()
        indices = np.asarray(self.indices, dtype=np.int64).copy()
        if indptr.ndim != 1 or indptr.size < 1 or indptr[0] != 0:
            raise GraphFormatError("indptr must be 1-D and start at 0")
        if (np.diff(indptr) < 0).any() or indptr[-1] != indices.size:
            raise GraphFormatError("indptr is inconsistent with indices")
        count = indptr.size - 1
        if indices.size:
            if indices.min() < 0 or indices.max() >= count:
                raise GraphFormatError(f"Neighbor id out of range [0, {count})")
            src = np.repeat(np.arange(count, dtype=np.int64), np.diff(indptr))
            if (src == indices).any():
                raise GraphFormatError(f"Self-loop at vertex {int(src[src == indices][0])}")
            keys = src * count + indices
            if np.unique(keys).size != keys.size:
                raise GraphFormatError("Duplicate out-neighbors")
        indptr.flags.writeable = False
        indices.flags.writeable = False
        object.__setattr__(self, 'indptr', indptr)
        object.__setattr__(self, 'indices', indices)

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> 'DirectedGraph':
        rows = [np.asarray(list(r), dtype=np.int64) for r in adjacency]
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([r.size for r in rows])
        indices = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
        return cls(indptr, indices)

    @classmethod
    def from_edges(cls, count: int, edges: Iterable[tuple[int, int]]) -> 'DirectedGraph':
        adjacency: list[list[int]] = [[] for _ in range(count)]
        for u, v in edges:
            adjacency[u].append(v)
        return cls.from_adjacency(adjacency)

    @classmethod
    def empty(cls, count: int) -> 'DirectedGraph':
        return cls(np.zeros(count + 1, dtype=np.int64), np.empty(0, dtype=np.int64))

    @property
    def count(self) -> int:
        return self.indptr.size - 1

    @property
    def edge_count(self) -> int:
        return int(self.indices.size)

    def __len__(self) -> int:
        return self.count

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def out_degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Out-neighbor lists as plain ints, for traversal loops."""
        flat = self.indices.tolist()
        bounds = self.indptr.tolist()
        return [flat[bounds[v]:bounds[v + 1]] for v in range(self.count)]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.count, dtype=np.int64), self.out_degrees())
        return src, self.indices

    def edges(self) -> Iterator[tuple[int, int]]:
        src, dst = self.edge_arrays()
        return zip(src.tolist(), dst.tolist())

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def relabel(self, perm: np.ndarray) -> 'DirectedGraph':
        """
        Map a graph built on permuted vectors back to original ids.

        Vertex i of self stands for original vertex perm[i].
        """
        perm = np.asarray(perm, dtype=np.int64)
        if perm.size != self.count:
            raise GraphFormatError(f"Permutation of length {perm.size} for {self.count} vertices")
        adjacency: list[list[int]] = [[] for _ in range(self.count)]
        for i, row in enumerate(self.adjacency):
            adjacency[int(perm[i])] = perm[row].tolist() if row else []
        return DirectedGraph.from_adjacency(adjacency)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirectedGraph)
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"DirectedGraph(count={self.count}, edges={self.edge_count})"


@dataclass(frozen=True)
class GraphStats:
    count: int
    edge_count: int
    avg_out_degree: float
    max_out_degree: int
    min_out_degree: int
    zero_out_degree: int

    def as_dict(self) -> dict:
        return {
            'count': self.count,
            'edge_count': self.edge_count,
            'avg_out_degree': self.avg_out_degree,
            'max_out_degree': self.max_out_degree,
            'min_out_degree': self.min_out_degree,
            'zero_out_degree': self.zero_out_degree,
        }
