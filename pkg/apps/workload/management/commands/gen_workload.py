"""
Hardness-unbiased query workload.

Fits a diagonal GMM to the base vectors, samples oversample * Q candidate
queries, scores them with Steiner-hardness on the MRNG and keeps ceil(Q/h)
per equal-length hardness segment.

Usage:
    gah gen-workload --base X.fvecs --mrng mrng.bin --Q 1000 --h 20 --components 16 \
        --oversample 10 --seed 7 --out-queries W.fvecs --out-hardness W.csv --report W.json
"""
import numpy as np
from pydantic import ValidationError

from apps.core.management.base import AnalysisCommand
from apps.core.presets import DESK, WORKLOAD_DEFAULTS
from apps.core.utils import write_json, write_records
from apps.core.validators import GmmSettings, WorkloadSpec
from apps.dataset.io import load_vectors, write_fvecs
from apps.dataset.types import VectorSet
from apps.graphs.analysis import reverse_graph
from apps.graphs.io import load_graph
from apps.hardness.pipeline import compute_hardness_records
from apps.workload.generators import generate_unbiased_workload, simple_fraction
from apps.workload.gmm import gmm_fit, gmm_sample, mahalanobis_report


class Command(AnalysisCommand):
    help = "Generate a query workload spread evenly over the hardness spectrum"

    def add_command_arguments(self, parser):
        parser.add_argument("--base", required=True)
        parser.add_argument("--mrng", required=True, help="Approximate MRNG of the base")
        parser.add_argument("--rev-mrng", default=None)
        parser.add_argument("--Q", type=int, required=True, help="Target query count")
        parser.add_argument("--h", type=int, required=True, help="Hardness segments")
        parser.add_argument("--components", type=int, default=WORKLOAD_DEFAULTS["components"])
        parser.add_argument("--max-iter", type=int, default=WORKLOAD_DEFAULTS["max_iter"])
        parser.add_argument("--tol", type=float, default=WORKLOAD_DEFAULTS["tol"])
        parser.add_argument("--oversample", type=int, default=WORKLOAD_DEFAULTS["oversample"])
        parser.add_argument("--trim-lo", type=float, default=WORKLOAD_DEFAULTS["trim_lo"])
        parser.add_argument("--trim-hi", type=float, default=WORKLOAD_DEFAULTS["trim_hi"])
        parser.add_argument("--k", type=int, default=DESK["k"])
        parser.add_argument("--acc", type=float, default=DESK["acc"])
        parser.add_argument("--p", type=float, default=DESK["p"])
        parser.add_argument("--max-candidates", type=int, default=None)
        parser.add_argument("--out-queries", required=True)
        parser.add_argument("--out-hardness", required=True)
        parser.add_argument("--report", default=None, help="JSON report (segments, deficits, validity)")
        parser.add_argument("--normalize", action="store_true")

    def run(self, **options):
        gmm_seed, sample_seed, select_seed = np.random.SeedSequence(self.global_options.seed).generate_state(3)
        try:
            spec = WorkloadSpec(Q=options["Q"], h=options["h"], trim_lo=options["trim_lo"],
                                trim_hi=options["trim_hi"], seed=int(select_seed))
            gmm_settings = GmmSettings(n_components=options["components"], max_iter=options["max_iter"],
                                       tol=options["tol"], seed=int(gmm_seed))
        except ValidationError as exc:
            self.usage_error(f"Invalid workload options: {exc}")
        if options["oversample"] < 1:
            self.usage_error("--oversample must be at least 1")

        base = load_vectors(options["base"], options["normalize"])
        mrng = load_graph(options["mrng"])
        rev_mrng = load_graph(options["rev_mrng"]) if options["rev_mrng"] else reverse_graph(mrng)

        model = gmm_fit(base, gmm_settings.n_components, gmm_settings.max_iter, gmm_settings.tol,
                        seed=gmm_settings.seed, variance_floor=gmm_settings.variance_floor)
        candidates = gmm_sample(model, options["oversample"] * spec.Q, seed=int(sample_seed))
        self.stdout.write(f"Scoring {candidates.count} candidate queries")

        records = compute_hardness_records(
            mrng, rev_mrng, base, candidates, options["k"], options["acc"], options["p"],
            measures=["steiner"], max_candidates=options["max_candidates"],
            threads=self.global_options.threads,
        )
        hardness = np.array([r.steiner for r in records])
        selection = generate_unbiased_workload(hardness, spec)

        write_fvecs(VectorSet(candidates.data[selection.indices]), options["out_queries"])
        rows = [
            {
                "query_id": new_id,
                "candidate_id": int(cand),
                "steiner": float(hardness[cand]),
                "segment": int(seg),
            }
            for new_id, (cand, seg) in enumerate(zip(selection.indices, selection.segments))
        ]
        write_records(rows, options["out_hardness"], self.global_options.output_format,
                      header=self.header, columns=["query_id", "candidate_id", "steiner", "segment"])

        report = selection.as_report()
        report["candidates"] = candidates.count
        report["infinite_hardness"] = int((~np.isfinite(hardness)).sum())
        report["simple_fraction"] = simple_fraction(hardness[selection.indices], (selection.low, selection.high))
        report["candidate_simple_fraction"] = simple_fraction(hardness, (selection.low, selection.high))
        report["gmm"] = {
            "components": model.n_components,
            "iterations": len(model.log_likelihood),
            "converged": model.converged,
            "log_likelihood": model.log_likelihood[-1],
        }
        report["mahalanobis"] = mahalanobis_report(model, candidates, base)
        if options["report"]:
            write_json(report, options["report"], header=self.header)

        self.success(
            f"Selected {report['selected']} queries over {spec.h} segments "
            f"(deficit {report['total_deficit']}, simple fraction {report['simple_fraction']:.3f})"
        )
