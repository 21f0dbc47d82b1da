"""
Core utility functions shared by all apps.

Includes:
- Ceiling counts for fractional requirements (Acc*k, p*k)
- Thread and per-query random stream resolution
- Provenance-stamped CSV/JSON writers and readers
"""
import json
import logging
import math
import shlex
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings

logger = logging.getLogger(__name__)


# =============================================================================
# Counting helpers
# =============================================================================

def required_count(fraction: float, k: int) -> int:
    """
    Smallest integer count satisfying "at least fraction * k".

    The product is rounded to 9 decimals first so that 0.6 * 5 gives 3
    instead of ceil(3.0000000000000004) = 4.
    """
    return math.ceil(round(fraction * k, 9))


def parse_csv_numbers(value: str, cast=float) -> list:
    """Parse '16,64,256' style flag values."""
    return [cast(item) for item in value.split(',') if item.strip()]


# =============================================================================
# Parallelism and randomness
# =============================================================================

def resolve_threads(threads: int | None) -> int:
    """
    Map a --threads value to a joblib n_jobs value.

    None falls back to the GAH_THREADS setting; 0 means all cores.
    """
    if threads is None:
        threads = getattr(settings, 'GAH_THREADS', 0)
    return -1 if threads == 0 else threads


def query_rng(seed: int, query_id: int) -> np.random.Generator:
    """Independent random stream per (seed, query) pair."""
    return np.random.default_rng([seed, query_id])


# =============================================================================
# Output writers
# =============================================================================

def provenance_header(argv: Sequence[str]) -> str:
    """Comment line recording tool version and the full invocation."""
    version = getattr(settings, 'GAH_VERSION', 'unknown')
    return f"# gah {version} {shlex.join(argv)}"


def write_records(records, path, output_format: str = 'csv', header: str | None = None,
                  columns: Iterable[str] | None = None) -> Path:
    """
    Write tabular records as CSV (with provenance comment) or JSON.

    Args:
        records: DataFrame or list of dicts
        path: Destination file
        output_format: 'csv' or 'json'
        header: Provenance line; omitted when None
        columns: Column order to enforce

    Returns:
        Path of the written file
    """
    frame = records if isinstance(records, pd.DataFrame) else pd.DataFrame.from_records(
        list(records), columns=list(columns) if columns is not None else None
    )
    if columns is not None:
        frame = frame.loc[:, list(columns)]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if output_format == 'json':
        payload = {
            'provenance': header,
            'records': json.loads(frame.to_json(orient='records', double_precision=15)),
        }
        path.write_text(json.dumps(payload, indent=2) + '\n')
    else:
        with path.open('w', newline='') as fh:
            if header:
                fh.write(header + '\n')
            frame.to_csv(fh, index=False, float_format='%.10g', lineterminator='\n')

    logger.debug(f"Wrote {len(frame)} records to {path}")
    return path


def write_json(payload: dict, path, header: str | None = None) -> Path:
    """Write a JSON document with an optional provenance field."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if header:
        payload = {'provenance': header, **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + '\n')
    return path


def read_records(path) -> pd.DataFrame:
    """Read a CSV written by write_records (comment lines skipped) or its JSON twin."""
    path = Path(path)
    if path.suffix == '.json':
        payload = json.loads(path.read_text())
        return pd.DataFrame.from_records(payload['records'])
    return pd.read_csv(path, comment='#')


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
