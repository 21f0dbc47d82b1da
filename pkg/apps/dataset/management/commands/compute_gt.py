"""
Exact ground truth for a query set.

Usage:
    gah compute-gt --base X.fvecs --query Q.fvecs --k 100 --out gt.ivecs --dists gt_dists.fvecs
"""
import numpy as np

from apps.core.management.base import AnalysisCommand
from apps.dataset.io import load_vectors, write_fvecs, write_ivecs
from apps.dataset.knn import brute_force_knn
from apps.dataset.types import VectorSet


class Command(AnalysisCommand):
    help = "Compute exact k nearest neighbors of every query by brute force"

    def add_command_arguments(self, parser):
        parser.add_argument("--base", required=True, help="Base vectors (fvecs)")
        parser.add_argument("--query", required=True, help="Query vectors (fvecs)")
        parser.add_argument("--k", type=int, required=True, help="Neighbors per query")
        parser.add_argument("--out", required=True, help="Neighbor ids (ivecs)")
        parser.add_argument("--dists", default=None, help="Neighbor distances (fvecs)")
        parser.add_argument("--normalize", action="store_true", help="Unit-normalize vectors on load")

    def run(self, **options):
        base = load_vectors(options["base"], options["normalize"])
        queries = load_vectors(options["query"], options["normalize"])

        gt = brute_force_knn(base, queries, options["k"], threads=self.global_options.threads)

        write_ivecs([nl.ids for nl in gt], options["out"])
        if options["dists"]:
            dists = np.asarray([nl.dists for nl in gt], dtype=np.float32).reshape(len(gt), options["k"])
            write_fvecs(VectorSet(dists), options["dists"])

        self.success(f"Ground truth for {len(gt)} queries written to {options['out']}")
