"""Pytest configuration and fixtures for the hardness toolkit."""

import numpy as np
import pytest

from apps.dataset.io import write_fvecs
from apps.dataset.transforms import make_gaussian, split

# Shared sample: 1000 base vectors and 20 queries in 8 dimensions
SAMPLE_COUNT = 1000
SAMPLE_QUERIES = 20
SAMPLE_DIM = 8
SAMPLE_SEED = 2024
QUERY_POOL = 50


# ==============================================================================
# Randomness
# ==============================================================================

@pytest.fixture
def rng():
    """Return a seeded generator for ad-hoc test data."""
    return np.random.default_rng(12345)


# ==============================================================================
# Sample dataset (session scoped, built once)
# ==============================================================================

@pytest.fixture(scope="session")
def sample_dataset():
    """Return (base, queries) of the deterministic 1k-point sample."""
    data = make_gaussian(SAMPLE_COUNT + SAMPLE_QUERIES, SAMPLE_DIM, seed=SAMPLE_SEED)
    return split(data, SAMPLE_COUNT)


@pytest.fixture(scope="session")
def sample_base(sample_dataset):
    return sample_dataset[0]


@pytest.fixture(scope="session")
def sample_queries(sample_dataset):
    return sample_dataset[1]


@pytest.fixture(scope="session")
def sample_query_pool():
    """Fifty further queries from the sample's distribution."""
    return make_gaussian(QUERY_POOL, SAMPLE_DIM, seed=SAMPLE_SEED + 1)


@pytest.fixture(scope="session")
def sample_files(sample_dataset, tmp_path_factory):
    """Write the sample to fvecs files; returns (base_path, query_path)."""
    root = tmp_path_factory.mktemp("sample")
    base, queries = sample_dataset
    return write_fvecs(base, root / "base.fvecs"), write_fvecs(queries, root / "query.fvecs")


@pytest.fixture(scope="session")
def sample_gt(sample_dataset):
    """Exact 20-NN of every sample query."""
    from apps.dataset.knn import brute_force_knn

    base, queries = sample_dataset
    return brute_force_knn(base, queries, 20)


@pytest.fixture(scope="session")
def sample_kgraph(sample_base):
    from apps.graphs.builders import build_kgraph

    return build_kgraph(sample_base, 16)


@pytest.fixture(scope="session")
def sample_mrng(sample_base):
    """Approximate MRNG (efC=64) of the sample and its reverse."""
    from apps.graphs.analysis import reverse_graph
    from apps.graphs.builders import build_mrng_approx

    mrng = build_mrng_approx(sample_base, 64)
    return mrng, reverse_graph(mrng)


@pytest.fixture(scope="session")
def sample_hnsw(sample_base):
    from apps.graphs.builders import build_hnsw_base

    return build_hnsw_base(sample_base, 8, 40)
