"""Unit tests for experiment helpers and workload reports."""

import math
import pickle

import numpy as np
import pandas as pd
import pytest

from apps.core.exceptions import InsufficientDataError, ParameterError
from apps.core.validators import ExperimentConfig
from apps.dataset.knn import brute_force_knn
from apps.dataset.transforms import split
from apps.evalharness.reports import SUMMARY_COLUMNS, split_simple_hard, summarize_ndc_distribution
from apps.evalharness.runners import (
    SELF_MEASURE,
    ExperimentFailed,
    build_instances,
    column_name,
    correlation_rows,
    instance_seed,
    load_experiment_data,
    recall_spread_at_budget,
    spread_summary,
)
from tests.factories import VectorSetFactory, complete_graph


def effort_frame(ndc, target=0.9):
    return pd.DataFrame({
        'query_id': np.arange(len(ndc)),
        'ndc': np.asarray(ndc, dtype=np.float64),
        'target': target,
    })


class TestSummarizeNdc:
    """Tests for NDC box summaries."""

    def test_quantiles_of_one_target(self):
        summary = summarize_ndc_distribution(effort_frame([10, 20, 30, 40, 50]))
        row = summary.iloc[0]
        assert list(summary.columns) == list(SUMMARY_COLUMNS)
        assert row['queries'] == 5
        assert row['unreached'] == 0
        assert (row['min'], row['p50'], row['max']) == (10.0, 30.0, 50.0)

    def test_unreached_queries_leave_quantiles(self):
        summary = summarize_ndc_distribution(effort_frame([5, math.inf, 15]))
        row = summary.iloc[0]
        assert row['unreached'] == 1
        assert row['max'] == 15.0
        assert row['p50'] == 10.0

    def test_one_row_per_target(self):
        frame = pd.concat([effort_frame([1, 2], 0.95), effort_frame([3, 4], 0.9)])
        summary = summarize_ndc_distribution(frame)
        assert summary['target'].tolist() == [0.9, 0.95]

    def test_missing_target_raises(self):
        with pytest.raises(InsufficientDataError):
            summarize_ndc_distribution(effort_frame([1, 2]), targets=[0.99])

    def test_empty_table_raises(self):
        with pytest.raises(InsufficientDataError):
            summarize_ndc_distribution(pd.DataFrame(columns=['query_id', 'ndc', 'target']))

    def test_table_without_target_column(self):
        frame = effort_frame([1, 2, 3]).drop(columns=['target'])
        summary = summarize_ndc_distribution(frame, targets=[0.9])
        assert summary.iloc[0]['target'] == 0.9
        with pytest.raises(ParameterError):
            summarize_ndc_distribution(frame, targets=[0.9, 0.95])


class TestSplitSimpleHard:
    """Tests for simple/hard query splits."""

    @pytest.fixture
    def hardness(self):
        return pd.DataFrame({'query_id': np.arange(10), 'steiner': np.arange(10, dtype=float)})

    def test_extremes(self, hardness):
        simple, hard = split_simple_hard(hardness, 2)
        assert simple == [0, 1]
        assert hard == [9, 8]

    def test_ties_break_on_query_id(self):
        frame = pd.DataFrame({'query_id': [3, 1, 2, 0], 'steiner': [1.0, 1.0, 5.0, 5.0]})
        simple, hard = split_simple_hard(frame, 2)
        assert simple == [1, 3]
        assert hard == [0, 2]

    def test_hard_ties_keep_the_lower_ids(self):
        frame = pd.DataFrame({
            'query_id': [4, 7, 5, 6, 1, 0],
            'steiner': [9.0, 9.0, 9.0, 2.0, 1.0, 0.5],
        })
        simple, hard = split_simple_hard(frame, 2)
        assert simple == [0, 1]
        assert hard == [4, 5]

    def test_non_finite_values_ignored(self, hardness):
        hardness.loc[0, 'steiner'] = math.inf
        hardness.loc[9, 'steiner'] = math.nan
        simple, hard = split_simple_hard(hardness, 2)
        assert simple == [1, 2]
        assert hard == [8, 7]

    def test_too_few_values(self, hardness):
        with pytest.raises(InsufficientDataError):
            split_simple_hard(hardness, 6)

    def test_bad_arguments(self, hardness):
        with pytest.raises(ParameterError):
            split_simple_hard(hardness, 0)
        with pytest.raises(ParameterError):
            split_simple_hard(hardness, 2, measure='lid')


class TestCorrelationRows:
    """Tests for the measure x index@target table."""

    @pytest.fixture
    def per_query(self, rng):
        ndc = rng.uniform(100, 1000, size=30)
        return pd.DataFrame({
            'query_id': np.arange(30),
            'steiner': ndc * 2 + rng.normal(0, 1, size=30),
            'qe': np.ones(30),
            'ndc@0.9': ndc,
        })

    def test_column_name(self):
        assert column_name('hnsw', 0.9) == 'hnsw@0.9'
        assert column_name('kgraph', 1.0) == 'kgraph@1'

    def test_self_row_is_one(self, per_query):
        table, _ = correlation_rows(per_query, ['steiner', 'qe'], 'hnsw', [0.9])
        assert table.loc[SELF_MEASURE, 'hnsw@0.9'] == pytest.approx(1.0)
        assert table.loc['steiner', 'hnsw@0.9'] > 0.99

    def test_constant_measure_is_undefined(self, per_query):
        table, details = correlation_rows(per_query, ['steiner', 'qe'], 'hnsw', [0.9])
        assert math.isnan(table.loc['qe', 'hnsw@0.9'])
        qe_row = next(d for d in details if d['measure'] == 'qe')
        assert qe_row['coefficient'] is None
        assert 'constant' in qe_row['error']


class TestInstances:
    """Tests for seeded index instances."""

    def test_instance_seed_is_stable(self):
        assert instance_seed(7, 2) == instance_seed(7, 2)
        assert instance_seed(7, 1) != instance_seed(7, 2)
        assert instance_seed(8, 1) != instance_seed(7, 1)

    def test_shared_graph_for_kgraph(self):
        base = VectorSetFactory(count=60, dim=4, seed=3)
        cfg = ExperimentConfig(index='kgraph', K=6, instances=3, seed=11)
        instances = build_instances(cfg, base)
        assert len(instances) == 3
        assert all(inst.graph is instances[0].graph for inst in instances)
        assert [inst.entry_vertex for inst in instances] == [int(inst.order[0]) for inst in instances]

    def test_hnsw_instances_follow_their_orders(self):
        base = VectorSetFactory(count=60, dim=4, seed=3)
        cfg = ExperimentConfig(index='hnsw', M=4, ef_construction=20, instances=2, seed=11)
        instances = build_instances(cfg, base)
        for inst in instances:
            assert sorted(inst.order.tolist()) == list(range(60))
            assert inst.graph.count == 60


class TestExperimentData:
    """Tests for loading or synthesizing experiment data."""

    def test_synthetic(self):
        cfg = ExperimentConfig(synthetic_count=50, synthetic_dim=4, synthetic_queries=5, seed=1)
        base, queries = load_experiment_data(cfg)
        assert (base.count, queries.count, base.dim) == (50, 5, 4)
        again, _ = load_experiment_data(cfg)
        assert np.array_equal(base.data, again.data)

    def test_files(self, sample_files, sample_dataset):
        cfg = ExperimentConfig(base=sample_files[0], queries=sample_files[1])
        base, queries = load_experiment_data(cfg)
        assert np.array_equal(base.data, sample_dataset[0].data)
        assert queries.count == sample_dataset[1].count


class TestExperimentFailed:
    """Tests for the stage failure error."""

    def test_message_and_pickling(self):
        exc = ExperimentFailed('index', ValueError('boom'))
        assert "stage 'index' failed: boom" in str(exc)
        restored = pickle.loads(pickle.dumps(exc))
        assert restored.stage == 'index'
        assert str(restored.error) == 'boom'


class TestRecallSpread:
    """Tests for recall at a fixed NDC budget."""

    @pytest.fixture
    def setup(self):
        data = VectorSetFactory(count=35, dim=3, seed=5)
        base, queries = split(data, 30)
        gt = brute_force_knn(base, queries, 5)
        return complete_graph(30), base, queries, gt

    def test_generous_budget(self, setup):
        g, base, queries, gt = setup
        frame = recall_spread_at_budget(g, base, queries, gt, k=5, ef=10, budget=1000)
        assert frame['recall'].tolist() == [1.0] * 5
        summary = spread_summary(frame)
        assert summary['queries'] == 5
        assert summary['std'] == 0.0

    def test_tight_budget(self, setup):
        g, base, queries, gt = setup
        frame = recall_spread_at_budget(g, base, queries, gt, k=5, ef=10, budget=1)
        assert (frame['recall'] <= 0.2).all()

    def test_empty_summary(self):
        summary = spread_summary(pd.DataFrame({'recall': []}))
        assert summary['queries'] == 0
        assert math.isnan(summary['mean'])
