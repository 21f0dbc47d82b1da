"""
Graph transforms and comparisons: reversal, edge overlap, degree
statistics, strong connectivity.
"""
import logging
from collections.abc import Iterable

import networkx as nx
import numpy as np
from scipy import sparse

from apps.core.exceptions import ParameterError
from apps.dataset.types import VectorSet
from apps.graphs.types import DirectedGraph, GraphStats

logger = logging.getLogger(__name__)


def to_sparse(g: DirectedGraph) -> sparse.csr_matrix:
    data = np.ones(g.edge_count, dtype=np.int8)
    return sparse.csr_matrix((data, g.indices, g.indptr), shape=(g.count, g.count))


def to_networkx(g: DirectedGraph) -> nx.DiGraph:
    nxg = nx.DiGraph()
    nxg.add_nodes_from(range(g.count))
    nxg.add_edges_from(g.edges())
    return nxg


def reverse_graph(g: DirectedGraph) -> DirectedGraph:
    """Transpose: u->v in the result iff v->u in g. Rows sorted by id."""
    rev = to_sparse(g).T.tocsr()
    rev.sort_indices()
    return DirectedGraph(rev.indptr, rev.indices)


def edge_overlap(g: DirectedGraph, reference: DirectedGraph) -> float:
    """Share of g's edges that also appear in reference."""
    if g.count != reference.count:
        raise ParameterError(f"Vertex counts differ: {g.count} vs {reference.count}")
    if g.edge_count == 0:
        return 0.0
    common = to_sparse(g).multiply(to_sparse(reference)).nnz
    return common / g.edge_count


def graph_stats(g: DirectedGraph) -> GraphStats:
    degrees = g.out_degrees()
    if g.count == 0:
        return GraphStats(0, 0, 0.0, 0, 0, 0)
    return GraphStats(
        count=g.count,
        edge_count=g.edge_count,
        avg_out_degree=float(degrees.mean()),
        max_out_degree=int(degrees.max()),
        min_out_degree=int(degrees.min()),
        zero_out_degree=int((degrees == 0).sum()),
    )


def is_strongly_connected(g: DirectedGraph) -> bool:
    if g.count == 0:
        return True
    return nx.is_strongly_connected(to_networkx(g))


def overlap_profile(g: DirectedGraph, base: VectorSet, ks: Iterable[int],
                    threads: int | None = 1) -> dict[int, float]:
    """edge_overlap of g against exact KGraphs of increasing K."""
    from apps.graphs.builders import build_kgraph

    profile = {}
    for K in sorted(set(ks)):
        profile[K] = edge_overlap(g, build_kgraph(base, K, threads=threads))
        logger.info(f"Edge overlap with KGraph(K={K}): {profile[K]:.4f}")
    return profile
