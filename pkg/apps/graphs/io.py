"""
Binary graph files.

Layout (little-endian): int32 magic, int32 version, int64 vertex count,
then per vertex int32 degree followed by degree int32 neighbor ids.
"""
import logging
from pathlib import Path

import numpy as np

from apps.core.exceptions import GraphFormatError
from apps.core.presets import GRAPH_MAGIC, GRAPH_VERSION
from apps.graphs.types import DirectedGraph

logger = logging.getLogger(__name__)

HEADER = np.dtype([('magic', '<i4'), ('version', '<i4'), ('count', '<i8')])


def save_graph(g: DirectedGraph, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array([(GRAPH_MAGIC, GRAPH_VERSION, g.count)], dtype=HEADER)

    degrees = g.out_degrees()
    body = np.empty(g.count + g.edge_count, dtype='<i4')
    deg_pos = g.indptr[:-1] + np.arange(g.count)
    mask = np.ones(body.size, dtype=bool)
    mask[deg_pos] = False
    body[deg_pos] = degrees
    body[mask] = g.indices

    with path.open('wb') as fh:
        fh.write(header.tobytes())
        fh.write(body.tobytes())
    logger.debug(f"Saved graph with {g.count} vertices and {g.edge_count} edges to {path}")
    return path


def validate_graph_header(path) -> int:
    """Check magic and version; returns the vertex count."""
    path = Path(path)
    with path.open('rb') as fh:
        raw = fh.read(HEADER.itemsize)
    if len(raw) < HEADER.itemsize:
        raise GraphFormatError(f"{path}: file too short for a graph header")
    header = np.frombuffer(raw, dtype=HEADER)[0]
    if int(header['magic']) != GRAPH_MAGIC:
        raise GraphFormatError(f"{path}: bad magic {int(header['magic']):#x}")
    if int(header['version']) != GRAPH_VERSION:
        raise GraphFormatError(f"{path}: unsupported version {int(header['version'])}")
    count = int(header['count'])
    if count < 0:
        raise GraphFormatError(f"{path}: negative vertex count")
    return count


def load_graph(path) -> DirectedGraph:
    path = Path(path)
    count = validate_graph_header(path)
    payload = path.read_bytes()[HEADER.itemsize:]
    if len(payload) % 4:
        raise GraphFormatError(f"{path}: truncated adjacency data")
    words = np.frombuffer(payload, dtype='<i4').astype(np.int64)

    indptr = np.zeros(count + 1, dtype=np.int64)
    keep = np.ones(words.size, dtype=bool)
    pos = 0
    for v in range(count):
        if pos >= words.size:
            raise GraphFormatError(f"{path}: truncated at vertex {v}")
        deg = int(words[pos])
        if deg < 0 or pos + 1 + deg > words.size:
            raise GraphFormatError(f"{path}: invalid degree {deg} at vertex {v}")
        keep[pos] = False
        indptr[v + 1] = indptr[v] + deg
        pos += 1 + deg
    if pos != words.size:
        raise GraphFormatError(f"{path}: {words.size - pos} trailing words after adjacency data")

    try:
        return DirectedGraph(indptr, words[keep])
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
