"""
Euclidean distances and exact k-nearest-neighbor search.
"""
import logging
import math

import numpy as np
from joblib import Parallel, delayed

from apps.core.exceptions import DimensionMismatchError, InsufficientDataError, ParameterError
from apps.core.utils import resolve_threads
from apps.dataset.types import NeighborList, VectorSet

logger = logging.getLogger(__name__)

# Queries per block of the squared-distance matrix
QUERY_BLOCK = 256


def distance(a, b) -> float:
    """True Euclidean distance between two vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return math.sqrt(float(np.dot(diff, diff)))


def distances_to(data: np.ndarray, q, ids=None) -> np.ndarray:
    """
    Exact distances from q to data rows (all rows, or the given ids).

    Computed from coordinate differences in float64, so a row equal to q
    is at distance exactly 0.
    """
    q = np.asarray(q, dtype=np.float64)
    rows = data if ids is None else data[ids]
    if rows.shape[-1] != q.shape[-1]:
        raise DimensionMismatchError(f"Dimension mismatch: {rows.shape[-1]} vs {q.shape[-1]}")
    diff = rows.astype(np.float64) - q
    return np.sqrt(np.einsum('ij,ij->i', diff, diff))


def _knn_block(data: np.ndarray, sq_norms: np.ndarray, block: np.ndarray, m: int,
               exclude: np.ndarray | None) -> list[NeighborList]:
    block64 = block.astype(np.float64)
    # Approximate squared distances select candidates; exact distances rank them
    approx = sq_norms[None, :] - 2.0 * block64 @ data.T + np.einsum('ij,ij->i', block64, block64)[:, None]
    np.maximum(approx, 0.0, out=approx)
    if exclude is not None:
        approx[np.arange(block.shape[0]), exclude] = np.inf

    results = []
    for row, q in zip(approx, block64):
        kth = np.partition(row, m - 1)[m - 1]
        tol = 1e-9 * (1.0 + kth + float(np.dot(q, q)))
        cand = np.flatnonzero(row <= kth + tol)
        dists = distances_to(data, q, cand)
        order = np.lexsort((cand, dists))[:m]
        results.append(NeighborList(cand[order], dists[order]))
    return results


def brute_force_knn(base: VectorSet, queries: VectorSet, m: int, threads: int | None = 1,
                    exclude_self: bool = False) -> list[NeighborList]:
    """
    Exact m nearest neighbors of every query, ties broken by ascending id.

    Args:
        base: Database vectors
        queries: Query vectors
        m: Neighbors per query
        threads: Worker count (0 = all cores)
        exclude_self: Query i is base vector i and must not be its own neighbor

    Returns:
        One NeighborList per query
    """
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    available = base.count - (1 if exclude_self else 0)
    if m > available:
        raise InsufficientDataError(f"m={m} exceeds the {available} available base vectors")
    if queries.count == 0:
        return []
    base.check_dim(queries)

    data = base.data.astype(np.float64)
    sq_norms = np.einsum('ij,ij->i', data, data)
    starts = range(0, queries.count, QUERY_BLOCK)
    n_jobs = resolve_threads(threads)

    blocks = Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(_knn_block)(
            data,
            sq_norms,
            queries.data[s:s + QUERY_BLOCK],
            m,
            np.arange(s, min(s + QUERY_BLOCK, queries.count)) if exclude_self else None,
        )
        for s in starts
    )
    logger.debug(f"Computed {m}-NN for {queries.count} queries over {base.count} vectors")
    return [nl for block in blocks for nl in block]


def knn_of_vector(base: VectorSet, q, m: int) -> NeighborList:
    """Exact m nearest neighbors of a single vector."""
    return brute_force_knn(base, VectorSet(np.asarray(q, dtype=np.float32)[None, :]), m)[0]


def attach_distances(base: VectorSet, queries: VectorSet, id_rows) -> list[NeighborList]:
    """NeighborLists for stored ground-truth ids, with exact distances recomputed."""
    if len(id_rows) != queries.count:
        raise InsufficientDataError(
            f"Ground truth has {len(id_rows)} rows for {queries.count} queries"
        )
    return [
        NeighborList.from_unsorted(ids, distances_to(base.data, queries[i], np.asarray(ids)))
        for i, ids in enumerate(id_rows)
    ]


def load_or_compute_gt(base: VectorSet, queries: VectorSet, m: int, gt_path=None,
                       threads: int | None = 1) -> list[NeighborList]:
    """Ground truth from an ivecs file when given, otherwise by brute force."""
    if gt_path is None:
        return brute_force_knn(base, queries, m, threads=threads)
    from apps.dataset.io import read_ground_truth

    logger.info(f"Using stored ground truth {gt_path}")
    return attach_distances(base, queries, read_ground_truth(gt_path, m))
