"""
Graph index builders.

- build_kgraph: every vertex links to its K exact nearest neighbors
- build_mrng_approx: angle-pruned MRNG over efC exact candidates
- build_hnsw_base: single-layer HNSW-style incremental construction
"""
import logging

import numpy as np
from joblib import Parallel, delayed

from apps.core.exceptions import ParameterError
from apps.core.presets import MRNG_COS_SLACK, MRNG_COS_THRESHOLD
from apps.core.utils import resolve_threads
from apps.dataset.knn import brute_force_knn
from apps.dataset.types import VectorSet
from apps.graphs.types import DirectedGraph
from apps.search.greedy import beam_search

logger = logging.getLogger(__name__)

# Vertices per MRNG worker task
MRNG_BLOCK = 512


def build_kgraph(base: VectorSet, K: int, threads: int | None = 1) -> DirectedGraph:
    """Exact K-NN graph; out-neighbors sorted by ascending distance."""
    if not 1 <= K < base.count:
        raise ParameterError(f"K must satisfy 1 <= K < {base.count}, got {K}")
    logger.info(f"Building KGraph (K={K}) over {base.count} vectors")
    knn = brute_force_knn(base, base, K, threads=threads, exclude_self=True)
    return DirectedGraph.from_adjacency([nl.ids for nl in knn])


# =============================================================================
# MRNG
# =============================================================================

def select_mrng_neighbors(edge_vectors: np.ndarray, slack: float = MRNG_COS_SLACK) -> list[int]:
    """
    Angle rule over candidates given in ascending distance order.

    Candidate c is accepted iff cos(angle(c, u)) <= 0.5 + slack for every
    accepted u. Zero-length edge vectors (coincident points) count as angle
    0 to everything: one may be accepted as the first edge, later ones are
    pruned, and an accepted one constrains nothing.

    Returns:
        Positions of accepted candidates, in acceptance order
    """
    edges = np.asarray(edge_vectors, dtype=np.float64)
    norms = np.linalg.norm(edges, axis=1)
    zero = norms == 0.0
    units = edges / np.where(zero, 1.0, norms)[:, None]
    cos = units @ units.T
    threshold = MRNG_COS_THRESHOLD + slack

    blocked = np.zeros(len(edges), dtype=bool)
    accepted = []
    start = 0
    while start < len(edges):
        free = np.flatnonzero(~blocked[start:])
        if not free.size:
            break
        c = start + int(free[0])
        accepted.append(c)
        blocked |= zero
        if not zero[c]:
            blocked |= cos[c] > threshold
        start = c + 1
    return accepted


def _mrng_block(data: np.ndarray, vertices: range, candidates: list[np.ndarray]) -> list[list[int]]:
    rows = []
    for v, cand in zip(vertices, candidates):
        picked = select_mrng_neighbors(data[cand] - data[v])
        rows.append(cand[picked].tolist())
    return rows


def build_mrng_approx(base: VectorSet, efc: int, threads: int | None = 1) -> DirectedGraph:
    """
    Approximate MRNG: each vertex scans its efC exact NNs in ascending order
    and keeps an edge unless it is within 60 degrees of an accepted one.
    """
    if not 1 <= efc < base.count:
        raise ParameterError(f"efC must satisfy 1 <= efC < {base.count}, got {efc}")
    logger.info(f"Building approximate MRNG (efC={efc}) over {base.count} vectors")

    knn = brute_force_knn(base, base, efc, threads=threads, exclude_self=True)
    data = base.data.astype(np.float64)
    blocks = [range(s, min(s + MRNG_BLOCK, base.count)) for s in range(0, base.count, MRNG_BLOCK)]
    rows = Parallel(n_jobs=resolve_threads(threads), prefer='threads')(
        delayed(_mrng_block)(data, block, [knn[v].ids for v in block]) for block in blocks
    )
    graph = DirectedGraph.from_adjacency([r for block in rows for r in block])
    logger.info(f"MRNG built: {graph.edge_count} edges, avg out-degree {graph.edge_count / base.count:.2f}")
    return graph


# =============================================================================
# HNSW base layer
# =============================================================================

def insertion_order(count: int, seed: int | None) -> np.ndarray:
    """Dataset order for seed None, otherwise a seeded permutation."""
    if seed is None:
        return np.arange(count, dtype=np.int64)
    return np.random.default_rng(seed).permutation(count).astype(np.int64)


def _rng_prune(dists: np.ndarray, pairwise: np.ndarray, limit: int) -> list[int]:
    """
    Relative-neighborhood heuristic over candidates sorted by distance.

    A candidate is kept iff it is closer to the base point than to every
    already-kept candidate.
    """
    kept: list[int] = []
    for c in range(len(dists)):
        if len(kept) >= limit:
            break
        if all(dists[c] < pairwise[c, u] for u in kept):
            kept.append(c)
    return kept


def _pairwise(data: np.ndarray, ids: list[int]) -> np.ndarray:
    pts = data[ids]
    sq = np.einsum('ij,ij->i', pts, pts)
    d2 = sq[:, None] + sq[None, :] - 2.0 * pts @ pts.T
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def build_hnsw_base(base: VectorSet, M: int, ef_construction: int, seed: int | None = None) -> DirectedGraph:
    """
    Single-layer HNSW-style graph.

    Points are inserted one by one (dataset order, or a seeded order when
    seed is given); each runs a greedy search with ef = ef_construction
    from the first inserted point, keeps at most M neighbors by the
    relative-neighborhood heuristic, and adds reverse edges. Vertices whose
    out-degree exceeds 2M are re-pruned with the same heuristic.

    The entry point for later searches is insertion_order(count, seed)[0].
    """
    if M < 2:
        raise ParameterError(f"M must be at least 2, got {M}")
    if ef_construction < M:
        raise ParameterError(f"efConstruction must be at least M, got {ef_construction} < {M}")

    n = base.count
    data = base.data.astype(np.float64)
    order = insertion_order(n, seed).tolist()
    adjacency: list[list[int]] = [[] for _ in range(n)]
    max_degree = 2 * M
    if not order:
        return DirectedGraph.empty(0)
    entry = order[0]
    logger.info(f"Building HNSW base layer (M={M}, efC={ef_construction}) over {n} vectors")

    for step, v in enumerate(order[1:], start=1):
        run = beam_search(adjacency, data, data[v], entry, ef_construction)
        cand = [i for _, i in run.heap]
        dists = np.array([d for d, _ in run.heap])
        picked = _rng_prune(dists, _pairwise(data, cand), M)
        adjacency[v] = [cand[i] for i in picked]

        for u in adjacency[v]:
            if v in adjacency[u]:
                continue
            adjacency[u].append(v)
            if len(adjacency[u]) > max_degree:
                nbrs = adjacency[u]
                du = np.sqrt(np.einsum('ij,ij->i', data[nbrs] - data[u], data[nbrs] - data[u]))
                rank = np.lexsort((nbrs, du))
                nbrs = [nbrs[i] for i in rank]
                kept = _rng_prune(du[rank], _pairwise(data, nbrs), max_degree)
                adjacency[u] = [nbrs[i] for i in kept]

        if step % 5000 == 0:
            logger.debug(f"Inserted {step}/{n} points")

    return DirectedGraph.from_adjacency(adjacency)
