"""
Distance-distribution hardness measures.

All return NaN when the measure is undefined for the query (d_k = 0, or
every distance equal for LID).
"""
import math

import numpy as np

from apps.core.exceptions import InsufficientDataError, ParameterError
from apps.dataset.knn import distances_to
from apps.dataset.types import NeighborList, VectorSet


def lid_estimate(nn: NeighborList, k: int) -> float:
    """
    Maximum-likelihood local intrinsic dimensionality from the k nearest
    distances: -1 / mean(ln(d_i / d_k)).

    Zero distances (query coinciding with a base vector) are left out of
    the sum.
    """
    if k < 2:
        raise ParameterError(f"LID needs k >= 2, got {k}")
    dk = nn.kth_distance(k)
    if dk == 0.0:
        return math.nan
    d = nn.dists[:k]
    d = d[d > 0.0]
    total = float(np.log(d / dk).sum())
    if total == 0.0:
        return math.nan
    return -k / total


def rc(q, base: VectorSet, nn: NeighborList, k: int) -> float:
    """Relative contrast: mean distance to the whole base over d_k."""
    dk = nn.kth_distance(k)
    if dk == 0.0:
        return math.nan
    return float(distances_to(base.data, q).mean()) / dk


def qe(nn: NeighborList, k: int) -> float:
    """Query expansion: d_2k / d_k."""
    if len(nn) < 2 * k:
        raise InsufficientDataError(f"QE needs {2 * k} neighbors, list holds {len(nn)}")
    dk = nn.kth_distance(k)
    if dk == 0.0:
        return math.nan
    return nn.kth_distance(2 * k) / dk


def epsilon_hardness(q, base: VectorSet, nn: NeighborList, k: int, eps: float) -> int:
    """Number of base vectors within (1 + eps) * d_k of the query."""
    if eps < 0:
        raise ParameterError(f"eps must be non-negative, got {eps}")
    bound = (1.0 + eps) * nn.kth_distance(k)
    if len(nn) < base.count and nn.dists[-1] > bound:
        return int(np.searchsorted(nn.dists, bound, side='right'))
    return int((distances_to(base.data, q) <= bound).sum())
