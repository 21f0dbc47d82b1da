"""
Minimum effort of every query on a graph index.

Usage:
    gah me --graph g.bin --base X.fvecs --query Q.fvecs --k 50 --acc 0.98 --p 0.95 \
        --variant exhaustive --radius delta0 --out me.csv

--radius takes 'delta0' (the critical radius), 'inf', or a ratio delta giving
the absolute radius (1 + delta) * d_k. Radii below the critical radius have
no witness and report inf.
"""
import math

from joblib import Parallel, delayed

from apps.core.management.base import AnalysisCommand
from apps.core.presets import DESK
from apps.core.utils import resolve_threads, write_records
from apps.dataset.io import load_vectors
from apps.graphs.analysis import reverse_graph
from apps.graphs.io import load_graph
from apps.reach.delta0 import delta0_for_query
from apps.steiner.effort import me_basic, witness_networks

COLUMNS = ("query_id", "variant", "radius", "me")


def _query_me(graph, revgraph, base, q, k, acc, p, variant, radius_spec, max_candidates):
    result = delta0_for_query(graph, revgraph, base, q, k, acc, p, max_candidates)
    if not result.success:
        return math.inf, math.inf
    nn = result.neighbors
    if radius_spec == "delta0":
        radius = result.radius
    elif radius_spec == "inf":
        radius = math.inf
    else:
        radius = (1.0 + float(radius_spec)) * nn.kth_distance(k)

    networks = witness_networks(graph, base, q, nn, k, acc, p, radius, result.pairs)
    if variant == "basic":
        return radius, me_basic(graph, nn, k, acc, witnesses=networks.solutions(radius))
    if variant == "constrained":
        return radius, networks.me(radius)
    return radius, networks.cost(radius)


class Command(AnalysisCommand):
    help = "Compute minimum effort (basic, constrained or exhaustive) per query"

    def add_command_arguments(self, parser):
        parser.add_argument("--graph", required=True)
        parser.add_argument("--revgraph", default=None, help="Reversed graph; computed when absent")
        parser.add_argument("--base", required=True)
        parser.add_argument("--query", required=True)
        parser.add_argument("--k", type=int, default=DESK["k"])
        parser.add_argument("--acc", type=float, default=DESK["acc"])
        parser.add_argument("--p", type=float, default=DESK["p"])
        parser.add_argument("--variant", choices=["basic", "constrained", "exhaustive"], default="exhaustive")
        parser.add_argument("--radius", default="delta0", help="'delta0', 'inf' or a ratio delta >= 0")
        parser.add_argument("--max-candidates", type=int, default=None)
        parser.add_argument("--out", required=True)
        parser.add_argument("--normalize", action="store_true")

    def run(self, **options):
        radius_spec = options["radius"]
        if radius_spec not in ("delta0", "inf"):
            try:
                if float(radius_spec) < 0:
                    raise ValueError
            except ValueError:
                self.usage_error(f"--radius must be 'delta0', 'inf' or a non-negative number, got {radius_spec}")

        graph = load_graph(options["graph"])
        revgraph = load_graph(options["revgraph"]) if options["revgraph"] else reverse_graph(graph)
        base = load_vectors(options["base"], options["normalize"])
        queries = load_vectors(options["query"], options["normalize"])

        results = Parallel(n_jobs=resolve_threads(self.global_options.threads))(
            delayed(_query_me)(
                graph, revgraph, base, queries[i], options["k"], options["acc"], options["p"],
                options["variant"], radius_spec, options["max_candidates"],
            )
            for i in range(queries.count)
        )
        rows = [
            {"query_id": i, "variant": options["variant"], "radius": radius, "me": me}
            for i, (radius, me) in enumerate(results)
        ]
        write_records(rows, options["out"], self.global_options.output_format,
                      header=self.header, columns=COLUMNS)
        self.success(f"{options['variant']} ME of {len(rows)} queries written to {options['out']}")
