"""
Hardness-stratified query selection.

After trimming the extreme quantiles, the hardness range of the candidates
is cut into h segments of equal length and ceil(Q/h) candidates are drawn
from each, so the selected workload covers simple and hard queries evenly.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from apps.core.exceptions import InsufficientDataError
from apps.core.presets import SIMPLE_BAND
from apps.core.validators import WorkloadSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WorkloadSelection:
    """
    Chosen candidate indices (ascending hardness) and per-segment bookkeeping.
    """
    indices: np.ndarray
    segments: np.ndarray
    segment_counts: tuple[int, ...]
    deficits: dict[int, int] = field(default_factory=dict)
    low: float = math.nan
    high: float = math.nan
    edges: tuple[float, ...] = ()

    @property
    def total_deficit(self) -> int:
        return sum(self.deficits.values())

    def as_report(self) -> dict:
        return {
            'selected': int(self.indices.size),
            'segment_counts': list(self.segment_counts),
            'deficits': {str(s): d for s, d in self.deficits.items()},
            'total_deficit': self.total_deficit,
            'trimmed_range': [self.low, self.high],
        }


def segment_index(values: np.ndarray, low: float, high: float, h: int) -> np.ndarray:
    """Equal-length segment of each value in [low, high]; the top edge joins the last segment."""
    width = (high - low) / h
    if width <= 0:
        return np.zeros(len(values), dtype=np.int64)
    idx = np.floor((np.asarray(values) - low) / width).astype(np.int64)
    return np.clip(idx, 0, h - 1)


def generate_unbiased_workload(hardness, spec: WorkloadSpec,
                               max_deficit: int | None = None) -> WorkloadSelection:
    """
    Select candidates so that every hardness segment holds ceil(Q/h) of them.

    Args:
        hardness: Hardness of every candidate (non-finite values are ignored)
        spec: Target size, segment count, trim quantiles and seed
        max_deficit: Fail when more than this many selections are missing

    Raises:
        InsufficientDataError: fewer than Q usable candidates, or a deficit
            above max_deficit
    """
    values = np.asarray(hardness, dtype=np.float64)
    finite = np.isfinite(values)
    if not finite.any():
        raise InsufficientDataError("No finite hardness values to select from")

    low, high = np.quantile(values[finite], [spec.trim_lo, spec.trim_hi])
    usable = np.flatnonzero(finite & (values >= low) & (values <= high))
    per_segment = spec.per_segment
    segments = segment_index(values[usable], low, high, spec.h)
    available = np.bincount(segments, minlength=spec.h)

    if usable.size < spec.Q:
        shortfall = {s: int(per_segment - c) for s, c in enumerate(available) if c < per_segment}
        raise InsufficientDataError(
            f"{usable.size} usable candidates for Q={spec.Q}; shortfall per segment: {shortfall}"
        )

    rng = np.random.default_rng(spec.seed)
    chosen, deficits = [], {}
    for s in range(spec.h):
        members = usable[segments == s]
        if members.size >= per_segment:
            chosen.append(np.sort(rng.choice(members, size=per_segment, replace=False)))
        else:
            chosen.append(members)
            deficits[s] = int(per_segment - members.size)

    if deficits:
        logger.warning(f"Segments short of candidates: {deficits}")
    total = sum(deficits.values())
    if max_deficit is not None and total > max_deficit:
        raise InsufficientDataError(f"Total deficit {total} exceeds tolerance {max_deficit}")

    picked = np.concatenate(chosen) if chosen else np.empty(0, dtype=np.int64)
    order = np.lexsort((picked, values[picked]))
    picked = picked[order]
    picked_segments = segment_index(values[picked], low, high, spec.h)
    width = (high - low) / spec.h
    return WorkloadSelection(
        indices=picked,
        segments=picked_segments,
        segment_counts=tuple(np.bincount(picked_segments, minlength=spec.h).tolist()),
        deficits=deficits,
        low=float(low),
        high=float(high),
        edges=tuple(float(low + i * width) for i in range(spec.h + 1)),
    )


def simple_fraction(values, spectrum, band: float = SIMPLE_BAND) -> float:
    """
    Share of values in the lowest band of the hardness spectrum.

    spectrum is a (low, high) pair or any sequence whose finite min and max
    define it.
    """
    values = np.asarray(values, dtype=np.float64)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return math.nan
    spec = np.asarray(spectrum, dtype=np.float64)
    spec = spec[np.isfinite(spec)]
    low, high = float(spec.min()), float(spec.max())
    threshold = low + band * (high - low)
    return float((values < threshold).mean())
