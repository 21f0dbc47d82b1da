"""
Correlation between hardness measures and query effort.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from apps.core.exceptions import InsufficientDataError, ParameterError, ZeroVarianceError

logger = logging.getLogger(__name__)

# Hardness table columns that can be correlated with effort
MEASURE_COLUMNS = ('steiner', 'lid', 'rc', 'qe', 'epsilon_hardness', 'delta0')


@dataclass(frozen=True)
class PearsonResult:
    coefficient: float
    p_value: float
    used: int
    dropped: int

    def as_dict(self) -> dict:
        return {
            'coefficient': self.coefficient,
            'p_value': self.p_value,
            'used': self.used,
            'dropped': self.dropped,
        }


def pearson(x, y) -> PearsonResult:
    """
    Product-moment correlation over the pairs where both values are finite.

    Raises:
        InsufficientDataError: fewer than two usable pairs
        ZeroVarianceError: one side is constant
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError(f"Sequences differ in shape: {x.shape} vs {y.shape}")

    keep = np.isfinite(x) & np.isfinite(y)
    dropped = int((~keep).sum())
    x, y = x[keep], y[keep]
    if x.size < 2:
        raise InsufficientDataError(f"Need at least 2 finite pairs, got {x.size}")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ZeroVarianceError("Correlation is undefined for a constant sequence")
    if dropped:
        logger.debug(f"Dropped {dropped} non-finite pairs before correlating")

    result = stats.pearsonr(x, y)
    return PearsonResult(
        coefficient=float(np.clip(result.statistic, -1.0, 1.0)),
        p_value=float(result.pvalue),
        used=int(x.size),
        dropped=dropped,
    )
