"""
Correlation experiment runner.

One run:
1. loads (or synthesizes) base and query vectors and their exact k-NN
2. builds R index instances, each with its own seeded insertion order
3. measures the minimal NDC to every recall target on each instance
4. computes the hardness measures once (Steiner-hardness on the MRNG)
5. correlates every measure with the per-query mean NDC

Outputs land in one directory; status.json tells whether the run finished
and, if not, which stage failed.
"""
import logging
import math
from collections.abc import Callable
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from apps.core.exceptions import GahError
from apps.core.utils import resolve_threads, write_json, write_records
from apps.core.validators import ExperimentConfig
from apps.dataset.io import load_vectors, write_permutation
from apps.dataset.knn import brute_force_knn
from apps.dataset.transforms import make_gaussian, split
from apps.dataset.types import NeighborList, VectorSet
from apps.graphs.analysis import reverse_graph
from apps.graphs.builders import build_hnsw_base, build_kgraph, build_mrng_approx, insertion_order
from apps.graphs.io import save_graph
from apps.graphs.types import DirectedGraph
from apps.hardness.pipeline import HARDNESS_COLUMNS, compute_hardness_records
from apps.hardness.statistics import MEASURE_COLUMNS, pearson
from apps.search.effort import EFFORT_COLUMNS, measure_effort_batch
from apps.search.greedy import recall_at_ndc_budget

logger = logging.getLogger(__name__)

SELF_MEASURE = 'measured_ndc'


@dataclass
class IndexInstance:
    graph: DirectedGraph
    entry_vertex: int
    order: np.ndarray


@dataclass
class ExperimentResult:
    """Correlation table (measure x index@target) plus the per-query data behind it."""
    table: pd.DataFrame
    details: list[dict]
    per_query: pd.DataFrame
    out_dir: Path
    outputs: dict[str, Path] = field(default_factory=dict)

    def table_records(self) -> list[dict]:
        """JSON-friendly rows; undefined coefficients become None."""
        frame = self.table.astype(object).where(self.table.notna(), None)
        return frame.reset_index().to_dict(orient='records')


class ExperimentFailed(GahError):
    """A stage of the experiment raised; outputs written so far stay on disk."""

    def __init__(self, stage: str, error: Exception):
        super().__init__(f"stage '{stage}' failed: {error}")
        self.stage = stage
        self.error = error

    def __reduce__(self):
        return (self.__class__, (self.stage, self.error))


def column_name(index: str, target: float) -> str:
    return f"{index}@{target:g}"


def instance_seed(seed: int, instance: int) -> int:
    """Insertion-order seed of one index instance; stable when instances are added."""
    return int(np.random.SeedSequence([seed, instance]).generate_state(1)[0])


def load_experiment_data(cfg: ExperimentConfig) -> tuple[VectorSet, VectorSet]:
    """Configured files, or a seeded Gaussian set split into base and queries."""
    if cfg.base is not None:
        base = load_vectors(cfg.base, cfg.normalize)
        queries = load_vectors(cfg.queries, cfg.normalize)
        base.check_dim(queries)
        return base, queries
    data = make_gaussian(cfg.synthetic_count + cfg.synthetic_queries, cfg.synthetic_dim, seed=cfg.seed)
    return split(data, cfg.synthetic_count)


def build_instance(cfg: ExperimentConfig, base: VectorSet, instance: int,
                   shared: DirectedGraph | None = None) -> IndexInstance:
    """
    One index instance. HNSW instances differ in insertion order; KGraph
    and MRNG graphs do not depend on it, so only their entry vertex changes.
    """
    order = insertion_order(base.count, instance_seed(cfg.seed, instance))
    if shared is not None:
        graph = shared
    elif cfg.index == 'hnsw':
        graph = build_hnsw_base(base, cfg.M, cfg.ef_construction, seed=instance_seed(cfg.seed, instance))
    elif cfg.index == 'kgraph':
        graph = build_kgraph(base, cfg.K)
    else:
        graph = build_mrng_approx(base, cfg.index_efc)
    return IndexInstance(graph=graph, entry_vertex=int(order[0]), order=order)


def build_instances(cfg: ExperimentConfig, base: VectorSet, threads: int | None = 1) -> list[IndexInstance]:
    if cfg.index == 'hnsw':
        n_jobs = resolve_threads(threads)
        if n_jobs > 0:
            n_jobs = min(n_jobs, cfg.instances)
        return Parallel(n_jobs=n_jobs)(
            delayed(build_instance)(cfg, base, r) for r in range(cfg.instances)
        )
    first = build_instance(cfg, base, 0)
    return [first] + [build_instance(cfg, base, r, shared=first.graph) for r in range(1, cfg.instances)]


def correlation_rows(per_query: pd.DataFrame, measures: list[str], index: str,
                     targets: list[float]) -> tuple[pd.DataFrame, list[dict]]:
    """
    Pearson coefficient of every measure against the mean NDC of each target.

    The measured NDC itself is correlated too, so its row is 1.0 wherever
    the NDC column is not constant.
    """
    table = pd.DataFrame(
        index=pd.Index(measures + [SELF_MEASURE], name='measure'),
        columns=[column_name(index, t) for t in targets],
        dtype=float,
    )
    details = []
    for target in targets:
        col = column_name(index, target)
        ndc = per_query[f"ndc@{target:g}"]
        for measure in table.index:
            values = ndc if measure == SELF_MEASURE else per_query[measure]
            row = {'measure': measure, 'index': index, 'target': target}
            try:
                result = pearson(values, ndc)
            except GahError as exc:
                row.update(coefficient=None, error=str(exc))
            else:
                table.loc[measure, col] = result.coefficient
                row.update(result.as_dict())
            details.append(row)
    return table, details


@contextmanager
def _stage(name: str, out_dir: Path, on_stage: Callable[[str], None] | None):
    logger.info(f"Experiment stage: {name}")
    if on_stage is not None:
        on_stage(name)
    try:
        yield
    except Exception as exc:
        write_json({'status': 'failed', 'stage': name, 'error': str(exc)}, out_dir / 'status.json')
        logger.error(f"Experiment stage {name} failed: {exc}")
        raise ExperimentFailed(name, exc) from exc


def run_correlation_experiment(cfg: ExperimentConfig, out_dir, threads: int | None = 1,
                               header: str | None = None,
                               on_stage: Callable[[str], None] | None = None) -> ExperimentResult:
    """
    Run the whole experiment and write its tables to out_dir.

    Files:
        instance_<r>.bin / instance_<r>.perm.ivecs  index instances and insertion orders
        effort_instance_<r>.csv                     effort rows per instance and target
        hardness.csv                                hardness measures per query
        per_query.csv                               measures plus mean NDC per target
        correlations.csv / correlations.json        the correlation table

    Raises:
        ExperimentFailed: naming the stage that raised
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {}
    targets = list(cfg.recall_targets)
    measure_columns = [m for m in MEASURE_COLUMNS if _measure_key(m) in cfg.measures]

    with _stage('data', out_dir, on_stage):
        base, queries = load_experiment_data(cfg)
        gt: list[NeighborList] = brute_force_knn(base, queries, cfg.k, threads=threads)
        logger.info(f"Experiment data: {base.count} base vectors, {queries.count} queries, dim {base.dim}")

    with _stage('index', out_dir, on_stage):
        instances = build_instances(cfg, base, threads)
        for r, inst in enumerate(instances):
            outputs[f"instance_{r}"] = save_graph(inst.graph, out_dir / f"instance_{r}.bin")
            write_permutation(inst.order, out_dir / f"instance_{r}.perm.ivecs")

    per_query = pd.DataFrame({'query_id': np.arange(queries.count)})
    with _stage('effort', out_dir, on_stage):
        for r, inst in enumerate(instances):
            logger.info(f"Measuring effort on instance {r + 1}/{len(instances)}")
            rows = []
            for target in targets:
                records = measure_effort_batch(
                    inst.graph, base, queries, gt, target, cfg.k, entry_policy=cfg.entry,
                    repeats=cfg.repeats, seed=instance_seed(cfg.seed, r),
                    entry_vertex=inst.entry_vertex, threads=threads,
                )
                rows.extend({**rec.as_dict(), 'target': target} for rec in records)
            frame = pd.DataFrame.from_records(rows, columns=[*EFFORT_COLUMNS, 'target'])
            outputs[f"effort_instance_{r}"] = write_records(
                frame, out_dir / f"effort_instance_{r}.csv", header=header
            )
            for target in targets:
                ndc = frame.loc[frame['target'] == target, 'ndc'].to_numpy()
                per_query[f"ndc_{r}@{target:g}"] = ndc
        for target in targets:
            cols = [f"ndc_{r}@{target:g}" for r in range(len(instances))]
            per_query[f"ndc@{target:g}"] = per_query[cols].mean(axis=1)
        per_query = per_query.drop(columns=[
            f"ndc_{r}@{t:g}" for r in range(len(instances)) for t in targets
        ])

    with _stage('hardness', out_dir, on_stage):
        mrng = rev_mrng = None
        if 'steiner' in cfg.measures:
            mrng = build_mrng_approx(base, cfg.efc, threads=threads)
            rev_mrng = reverse_graph(mrng)
        records = compute_hardness_records(
            mrng, rev_mrng, base, queries, cfg.k, cfg.acc, cfg.p, eps=cfg.eps,
            measures=cfg.measures, threads=threads,
        )
        hardness = pd.DataFrame.from_records([r.as_dict() for r in records], columns=list(HARDNESS_COLUMNS))
        hardness['measured_ndc'] = per_query[f"ndc@{targets[0]:g}"].to_numpy()
        outputs['hardness'] = write_records(hardness, out_dir / 'hardness.csv', header=header)

    with _stage('correlate', out_dir, on_stage):
        per_query = per_query.merge(hardness[['query_id', *measure_columns]], on='query_id')
        per_query = per_query[['query_id', *measure_columns,
                               *[f"ndc@{t:g}" for t in targets]]]
        outputs['per_query'] = write_records(per_query, out_dir / 'per_query.csv', header=header)
        table, details = correlation_rows(per_query, measure_columns, cfg.index, targets)
        outputs['correlations'] = write_records(
            table.reset_index(), out_dir / 'correlations.csv', header=header
        )
        write_json({'correlations': details}, out_dir / 'correlations.json', header=header)
        outputs['correlations_json'] = out_dir / 'correlations.json'

    write_json({'status': 'completed', 'stage': 'correlate', 'error': None}, out_dir / 'status.json')
    logger.info(f"Experiment finished; outputs in {out_dir}")
    return ExperimentResult(table=table, details=details, per_query=per_query,
                            out_dir=out_dir, outputs=outputs)


def _measure_key(column: str) -> str:
    """Config measure name of a hardness column."""
    if column == 'epsilon_hardness':
        return 'eps'
    if column == 'delta0':
        return 'steiner'
    return column


def recall_spread_at_budget(g: DirectedGraph, base: VectorSet, queries: VectorSet,
                            gt: list[NeighborList], k: int, ef: int, budget: int,
                            ep: int = 0, threads: int | None = 1) -> pd.DataFrame:
    """
    Per-query recall of searches cut off at a fixed NDC budget.

    A workload biased towards simple queries shows a narrow, high band here;
    an unbiased one spreads over the whole recall range.
    """
    recalls = Parallel(n_jobs=resolve_threads(threads))(
        delayed(recall_at_ndc_budget)(g, base, queries[i], gt[i], k, ef, budget, ep)
        for i in range(queries.count)
    )
    return pd.DataFrame({'query_id': np.arange(queries.count), 'recall': recalls})


def spread_summary(frame: pd.DataFrame) -> dict:
    values = frame['recall'].to_numpy(dtype=np.float64)
    if values.size == 0:
        return {'queries': 0, 'mean': math.nan, 'std': math.nan, 'min': math.nan, 'max': math.nan}
    return {
        'queries': int(values.size),
        'mean': float(values.mean()),
        'std': float(values.std()),
        'min': float(values.min()),
        'max': float(values.max()),
    }
