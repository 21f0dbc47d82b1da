"""
Critical radius per query on a graph index.

Usage:
    gah delta0 --graph mrng.bin --revgraph mrng_rev.bin --base X.fvecs --query Q.fvecs \
        --k 50 --acc 0.98 --p 0.95 --out delta0.csv
"""
from joblib import Parallel, delayed

from apps.core.management.base import AnalysisCommand
from apps.core.presets import DESK
from apps.core.utils import resolve_threads, write_records
from apps.dataset.io import load_vectors
from apps.graphs.analysis import reverse_graph
from apps.graphs.io import load_graph
from apps.reach.delta0 import delta0_for_query

COLUMNS = ("query_id", "radius", "delta0", "iterations", "qualified_starts", "status")


class Command(AnalysisCommand):
    help = "Find the critical radius and witness pairs of every query"

    def add_command_arguments(self, parser):
        parser.add_argument("--graph", required=True, help="Graph file")
        parser.add_argument("--revgraph", default=None, help="Reversed graph; computed when absent")
        parser.add_argument("--base", required=True)
        parser.add_argument("--query", required=True)
        parser.add_argument("--k", type=int, default=DESK["k"])
        parser.add_argument("--acc", type=float, default=DESK["acc"])
        parser.add_argument("--p", type=float, default=DESK["p"])
        parser.add_argument("--max-candidates", type=int, default=None)
        parser.add_argument("--literal-root-count", action="store_true",
                            help="Count qualified groups instead of qualified kNN members")
        parser.add_argument("--out", required=True)
        parser.add_argument("--normalize", action="store_true")

    def run(self, **options):
        graph = load_graph(options["graph"])
        revgraph = load_graph(options["revgraph"]) if options["revgraph"] else reverse_graph(graph)
        base = load_vectors(options["base"], options["normalize"])
        queries = load_vectors(options["query"], options["normalize"])

        results = Parallel(n_jobs=resolve_threads(self.global_options.threads))(
            delayed(delta0_for_query)(
                graph, revgraph, base, queries[i], options["k"], options["acc"], options["p"],
                options["max_candidates"], options["literal_root_count"],
            )
            for i in range(queries.count)
        )
        rows = [
            {
                "query_id": i,
                "radius": r.radius,
                "delta0": r.delta0,
                "iterations": r.iterations,
                "qualified_starts": len(r.qualified_starts),
                "status": r.status,
            }
            for i, r in enumerate(results)
        ]
        write_records(rows, options["out"], self.global_options.output_format,
                      header=self.header, columns=COLUMNS)

        failed = sum(1 for r in results if not r.success)
        self.success(f"Critical radius of {len(rows)} queries written ({failed} without witness)")
