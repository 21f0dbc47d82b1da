"""
Synthetic data and whole-set transforms.
"""
import numpy as np

from apps.core.exceptions import ParameterError
from apps.dataset.types import VectorSet


def make_gaussian(count: int, dim: int, seed: int = 0) -> VectorSet:
    """Standard-normal vectors, deterministic per seed."""
    if count < 0 or dim < 1:
        raise ParameterError(f"Invalid synthetic shape {count}x{dim}")
    rng = np.random.default_rng(seed)
    return VectorSet(rng.standard_normal((count, dim), dtype=np.float32))


def normalize(vs: VectorSet) -> VectorSet:
    """Scale every row to unit L2 norm; zero rows stay zero."""
    norms = np.linalg.norm(vs.data.astype(np.float64), axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return VectorSet((vs.data / norms).astype(np.float32))


def permute(vs: VectorSet, seed: int) -> tuple[VectorSet, np.ndarray]:
    """
    Seeded shuffle of the rows.

    Returns the shuffled set and perm, where new id i holds old id perm[i].
    """
    perm = np.random.default_rng(seed).permutation(vs.count).astype(np.int64)
    return VectorSet(vs.data[perm]), perm


def split(vs: VectorSet, head: int) -> tuple[VectorSet, VectorSet]:
    """First head rows and the remainder."""
    return VectorSet(vs.data[:head]), VectorSet(vs.data[head:])
