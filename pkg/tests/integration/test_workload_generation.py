"""Integration tests: from a fitted query model to a hardness-unbiased workload."""

import numpy as np
import pytest

from apps.core.presets import DESK_EXPERIMENT, SIMPLE_BAND
from apps.core.validators import WorkloadSpec
from apps.dataset.transforms import make_gaussian
from apps.graphs.analysis import reverse_graph
from apps.graphs.builders import build_mrng_approx
from apps.hardness.pipeline import compute_hardness_records
from apps.workload.generators import generate_unbiased_workload, segment_index, simple_fraction
from apps.workload.gmm import gmm_fit, gmm_sample


@pytest.mark.integration
class TestSkewedSpectrum:
    """A spectrum dominated by simple queries still yields a flat workload."""

    @pytest.fixture
    def hardness(self):
        return np.random.default_rng(17).beta(1.0, 4.0, size=20000)

    def test_every_segment_is_filled(self, hardness):
        spec = WorkloadSpec(Q=200, h=10, seed=3)
        selection = generate_unbiased_workload(hardness, spec, max_deficit=0)
        assert selection.segment_counts == (20,) * 10
        assert len(set(selection.indices.tolist())) == 200

    def test_simple_share_drops_to_the_band(self, hardness):
        spec = WorkloadSpec(Q=200, h=10, seed=3)
        selection = generate_unbiased_workload(hardness, spec)
        spectrum = (selection.low, selection.high)
        assert simple_fraction(hardness, spectrum) > 0.4
        assert simple_fraction(hardness[selection.indices], spectrum) == pytest.approx(SIMPLE_BAND, abs=0.01)


@pytest.mark.integration
@pytest.mark.slow
class TestSampledCandidates:
    """GMM candidates scored by LID and stratified."""

    def test_pipeline(self, sample_base, sample_queries):
        model = gmm_fit(sample_queries, n_components=2, seed=0)
        candidates = gmm_sample(model, 400, seed=1)
        records = compute_hardness_records(
            None, None, sample_base, candidates, k=10, acc=0.9, p=0.95, measures=['lid']
        )
        values = np.array([r.lid for r in records])
        spec = WorkloadSpec(Q=40, h=4, seed=2)
        selection = generate_unbiased_workload(values, spec)

        picked = values[selection.indices]
        assert np.all(np.diff(picked) >= 0)
        assert np.all((picked >= selection.low) & (picked <= selection.high))

        usable = values[np.isfinite(values) & (values >= selection.low) & (values <= selection.high)]
        available = np.bincount(segment_index(usable, selection.low, selection.high, 4), minlength=4)
        expected = {s: int(10 - c) for s, c in enumerate(available) if c < 10}
        assert selection.deficits == expected
        assert selection.indices.size == 40 - selection.total_deficit


@pytest.mark.integration
@pytest.mark.slow
class TestDeskWorkload:
    """Steiner-scored GMM candidates on the desk dataset give a flat workload."""

    QUERIES = DESK_EXPERIMENT['queries']
    SEGMENTS = 20

    @pytest.fixture(scope='class')
    def scored(self):
        base = make_gaussian(DESK_EXPERIMENT['count'], DESK_EXPERIMENT['dim'], seed=31)
        mrng = build_mrng_approx(base, DESK_EXPERIMENT['efc'])
        model = gmm_fit(base, n_components=16, seed=0)
        candidates = gmm_sample(model, 10 * self.QUERIES, seed=1)
        records = compute_hardness_records(
            mrng, reverse_graph(mrng), base, candidates,
            k=DESK_EXPERIMENT['k'], acc=DESK_EXPERIMENT['acc'], p=DESK_EXPERIMENT['p'],
            measures=['steiner'], threads=0,
        )
        values = np.array([r.steiner for r in records], dtype=np.float64)
        spec = WorkloadSpec(Q=self.QUERIES, h=self.SEGMENTS, seed=2)
        return values, generate_unbiased_workload(values, spec)

    def test_full_segments_hold_their_share(self, scored):
        _, selection = scored
        per_segment = self.QUERIES // self.SEGMENTS
        for s, count in enumerate(selection.segment_counts):
            assert count == per_segment - selection.deficits.get(s, 0)
        assert sum(selection.segment_counts) == self.QUERIES - selection.total_deficit

    def test_simple_share_matches_the_band(self, scored):
        values, selection = scored
        spectrum = (selection.low, selection.high)
        share = simple_fraction(values[selection.indices], spectrum)
        if selection.total_deficit == 0:
            assert share == pytest.approx(SIMPLE_BAND, abs=0.02)
        else:
            picked = self.QUERIES - selection.total_deficit
            assert share <= SIMPLE_BAND * self.QUERIES / picked + 0.02
