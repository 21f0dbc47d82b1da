"""
Immutable value types for vectors and neighbor lists.
"""
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import DimensionMismatchError, InsufficientDataError, VectorFormatError


@dataclass(frozen=True, eq=False)
class VectorSet:
    """
    N vectors of dimension d with implicit ids 0..N-1.

    The backing array is float32, C-contiguous and read-only. An empty set
    may carry dim 0 (nothing to infer it from).
    """
    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 2:
            raise VectorFormatError(f"Expected a 2-D array, got shape {data.shape}")
        if data.shape[0] > 0 and data.shape[1] <= 0:
            raise VectorFormatError("Vectors must have positive dimension")
        if not np.isfinite(data).all():
            raise VectorFormatError("Vector data contains NaN or Inf values")
        if data is self.data:
            data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, 'data', data)

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, idx) -> np.ndarray:
        return self.data[idx]

    def check_dim(self, other: 'VectorSet') -> None:
        if self.count and other.count and self.dim != other.dim:
            raise DimensionMismatchError(
                f"Dimension mismatch: {self.dim} vs {other.dim}"
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VectorSet)
            and self.data.shape == other.data.shape
            and np.array_equal(self.data.view(np.int32), other.data.view(np.int32))
        )

    def __repr__(self) -> str:
        return f"VectorSet(count={self.count}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class NeighborList:
    """
    Distance-sorted (id, distance) pairs for one query.

    Sorted ascending by distance, ties broken by ascending id. Distances are
    true Euclidean distances in float64.
    """
    ids: np.ndarray
    dists: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).copy()
        dists = np.asarray(self.dists, dtype=np.float64).copy()
        if ids.shape != dists.shape or ids.ndim != 1:
            raise VectorFormatError("ids and dists must be 1-D arrays of equal length")
        if dists.size:
            if (dists < 0).any():
                raise VectorFormatError("Distances must be non-negative")
            order = np.lexsort((ids, dists))
            if not np.array_equal(order, np.arange(ids.size)):
                raise VectorFormatError("Neighbor list must be sorted by (dist, id)")
            if np.unique(ids).size != ids.size:
                raise VectorFormatError("Neighbor ids must be unique")
        ids.flags.writeable = False
        dists.flags.writeable = False
        object.__setattr__(self, 'ids', ids)
        object.__setattr__(self, 'dists', dists)

    @classmethod
    def from_unsorted(cls, ids, dists) -> 'NeighborList':
        ids = np.asarray(ids, dtype=np.int64)
        dists = np.asarray(dists, dtype=np.float64)
        order = np.lexsort((ids, dists))
        return cls(ids[order], dists[order])

    def __len__(self) -> int:
        return int(self.ids.size)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip(self.ids.tolist(), self.dists.tolist())

    def __getitem__(self, i) -> tuple[int, float]:
        return int(self.ids[i]), float(self.dists[i])

    def top(self, k: int) -> 'NeighborList':
        if k > len(self):
            raise InsufficientDataError(f"Need {k} neighbors, list holds {len(self)}")
        return NeighborList(self.ids[:k], self.dists[:k])

    def id_set(self, k: int | None = None) -> frozenset[int]:
        ids = self.ids if k is None else self.top(k).ids
        return frozenset(ids.tolist())

    def kth_distance(self, k: int) -> float:
        """d_k, 1-indexed."""
        if k < 1 or k > len(self):
            raise InsufficientDataError(f"Need {k} neighbors, list holds {len(self)}")
        return float(self.dists[k - 1])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NeighborList)
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.dists, other.dists)
        )

    def __repr__(self) -> str:
        return f"NeighborList(len={len(self)})"
