"""
fvecs / ivecs readers and writers.

Record layout: [int32 little-endian length][length x 4-byte payload], with a
float32 payload for fvecs and int32 for ivecs. Values are read and written
bit-exactly.
"""
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from apps.core.exceptions import VectorFormatError
from apps.dataset.types import VectorSet

logger = logging.getLogger(__name__)

_INT = np.dtype('<i4')
_FLOAT = np.dtype('<f4')


def _read_words(path) -> np.ndarray:
    path = Path(path)
    size = path.stat().st_size
    if size % 4:
        raise VectorFormatError(f"{path}: truncated file ({size} bytes)")
    return np.fromfile(path, dtype=_INT)


def validate_vecs_header(path) -> tuple[int, int]:
    """
    Check the framing of a uniform-length vecs file without loading it.

    Returns:
        (dim, count); (0, 0) for an empty file
    """
    path = Path(path)
    size = path.stat().st_size
    if size == 0:
        return 0, 0
    if size < 4:
        raise VectorFormatError(f"{path}: truncated file ({size} bytes)")
    dim = int(np.fromfile(path, dtype=_INT, count=1)[0])
    if dim <= 0:
        raise VectorFormatError(f"{path}: invalid dimension {dim}")
    record = 4 * (dim + 1)
    if size % record:
        raise VectorFormatError(
            f"{path}: truncated file ({size} bytes is not a multiple of {record})"
        )
    return dim, size // record


def read_fvecs(path) -> VectorSet:
    """Load an fvecs file into a VectorSet."""
    words = _read_words(path)
    if words.size == 0:
        return VectorSet(np.zeros((0, 0), dtype=np.float32))

    dim = int(words[0])
    if dim <= 0:
        raise VectorFormatError(f"{path}: invalid dimension {dim}")
    if words.size % (dim + 1):
        raise VectorFormatError(f"{path}: truncated file")

    records = words.reshape(-1, dim + 1)
    if (records[:, 0] != dim).any():
        bad = int(np.flatnonzero(records[:, 0] != dim)[0])
        raise VectorFormatError(
            f"{path}: record {bad} has dimension {records[bad, 0]}, expected {dim}"
        )
    data = records[:, 1:].copy().view(_FLOAT).astype(np.float32, copy=False)
    logger.debug(f"Read {records.shape[0]}x{dim} vectors from {path}")
    return VectorSet(data)


def write_fvecs(vs: VectorSet, path) -> Path:
    """Write a VectorSet as fvecs; an empty set gives a zero-byte file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records = np.empty((vs.count, vs.dim + 1), dtype=_INT)
    if vs.count:
        records[:, 0] = vs.dim
        records[:, 1:] = vs.data.astype(_FLOAT, copy=False).view(_INT)
    records.tofile(path)
    return path


def read_ivecs(path) -> list[list[int]]:
    """Load an ivecs file; records may differ in length."""
    words = _read_words(path)
    rows: list[list[int]] = []
    pos, total = 0, words.size
    while pos < total:
        length = int(words[pos])
        if length < 0:
            raise VectorFormatError(f"{path}: negative record length {length}")
        end = pos + 1 + length
        if end > total:
            raise VectorFormatError(f"{path}: truncated file")
        rows.append(words[pos + 1:end].tolist())
        pos = end
    return rows


def write_ivecs(lists: Sequence[Sequence[int]], path) -> Path:
    """Write integer lists as ivecs records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chunks = []
    for row in lists:
        values = np.asarray(row, dtype=np.int64)
        if values.size and (values.min() < np.iinfo(_INT).min or values.max() > np.iinfo(_INT).max):
            raise VectorFormatError("ivecs values must fit in 32 bits")
        chunks.append(np.concatenate(([values.size], values)).astype(_INT))
    payload = np.concatenate(chunks) if chunks else np.empty(0, dtype=_INT)
    payload.tofile(path)
    return path


def read_ground_truth(path, k: int | None = None) -> np.ndarray:
    """ivecs ground truth as a (queries x m) int64 array, truncated to k columns."""
    rows = read_ivecs(path)
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    width = min(len(r) for r in rows)
    if k is not None:
        if k > width:
            raise VectorFormatError(f"{path}: ground truth holds {width} neighbors, {k} requested")
        width = k
    return np.asarray([r[:width] for r in rows], dtype=np.int64)


def write_permutation(perm: np.ndarray, path) -> Path:
    """A permutation is stored as a single ivecs record."""
    return write_ivecs([np.asarray(perm, dtype=np.int64)], path)


def read_permutation(path) -> np.ndarray:
    rows = read_ivecs(path)
    if len(rows) != 1:
        raise VectorFormatError(f"{path}: expected one permutation record, found {len(rows)}")
    perm = np.asarray(rows[0], dtype=np.int64)
    if not np.array_equal(np.sort(perm), np.arange(perm.size)):
        raise VectorFormatError(f"{path}: record is not a permutation")
    return perm


def load_vectors(path, normalize: bool = False) -> VectorSet:
    """Header check, load, and optional unit-norm scaling used by every command."""
    validate_vecs_header(path)
    vs = read_fvecs(path)
    if normalize:
        from apps.dataset.transforms import normalize as normalize_rows
        vs = normalize_rows(vs)
    logger.info(f"Loaded {vs.count} vectors (dim={vs.dim}) from {path}")
    return vs
