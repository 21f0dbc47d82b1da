"""
Workload reports: NDC distributions per recall target and simple/hard splits.
"""
import logging

import numpy as np
import pandas as pd

from apps.core.exceptions import InsufficientDataError, ParameterError

logger = logging.getLogger(__name__)

QUANTILES = (
    ('min', 0.0),
    ('p25', 0.25),
    ('p50', 0.50),
    ('p75', 0.75),
    ('p90', 0.90),
    ('p99', 0.99),
    ('max', 1.0),
)
SUMMARY_COLUMNS = ('target', 'queries', 'unreached') + tuple(name for name, _ in QUANTILES)


def summarize_ndc_distribution(effort: pd.DataFrame, targets=None) -> pd.DataFrame:
    """
    Box summary of the NDC column per recall target.

    Queries that never reached a target (ndc = inf) are counted in
    'unreached' and left out of the quantiles.

    Raises:
        InsufficientDataError: empty table, or a requested target without rows
    """
    if effort.empty:
        raise InsufficientDataError("Effort table is empty")
    if 'ndc' not in effort.columns:
        raise ParameterError("Effort table has no 'ndc' column")
    if 'target' not in effort.columns:
        if targets is not None and len(targets) != 1:
            raise ParameterError("Effort table without a 'target' column covers a single target")
        effort = effort.assign(target=targets[0] if targets is not None else np.nan)

    available = sorted(effort['target'].dropna().unique().tolist())
    targets = available if targets is None else sorted(targets)
    rows = []
    for target in targets:
        group = effort.loc[np.isclose(effort['target'], target, rtol=0.0, atol=1e-9), 'ndc']
        if group.empty:
            raise InsufficientDataError(
                f"No effort rows for recall target {target} (have {available})"
            )
        ndc = group.to_numpy(dtype=np.float64)
        finite = ndc[np.isfinite(ndc)]
        row = {'target': float(target), 'queries': int(ndc.size), 'unreached': int(ndc.size - finite.size)}
        for name, q in QUANTILES:
            row[name] = float(np.quantile(finite, q)) if finite.size else np.nan
        rows.append(row)

    logger.debug(f"Summarized NDC for {len(rows)} recall targets")
    return pd.DataFrame.from_records(rows, columns=list(SUMMARY_COLUMNS))


def split_simple_hard(hardness: pd.DataFrame, n: int,
                      measure: str = 'steiner') -> tuple[list[int], list[int]]:
    """
    The n simplest and n hardest queries by one hardness column.

    Ties break on query id. Simple ids come easiest first, hard ids
    hardest first; non-finite values are ignored.
    """
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if measure not in hardness.columns:
        raise ParameterError(f"Hardness table has no {measure!r} column")

    values = hardness[['query_id', measure]].copy()
    values[measure] = pd.to_numeric(values[measure], errors='coerce')
    values = values[np.isfinite(values[measure].to_numpy(dtype=np.float64))]
    if len(values) < 2 * n:
        raise InsufficientDataError(
            f"Need {2 * n} finite {measure} values for a {n}/{n} split, got {len(values)}"
        )

    easiest = values.sort_values([measure, 'query_id'], kind='mergesort')
    hardest = values.sort_values([measure, 'query_id'], ascending=[False, True], kind='mergesort')
    return (easiest['query_id'].astype(int).tolist()[:n],
            hardest['query_id'].astype(int).tolist()[:n])
