"""
Build a graph index and save it in the binary graph format.

Usage:
    gah build-graph --type kgraph --base X.fvecs --K 64 --out kgraph.bin
    gah build-graph --type mrng --base X.fvecs --efc 256 --out mrng.bin --reverse-out mrng_rev.bin
    gah build-graph --type hnsw --base X.fvecs --M 16 --ef-construction 200 \
        --shuffle --seed 3 --permutation perm.ivecs --out hnsw.bin
"""
from apps.core.management.base import AnalysisCommand
from apps.dataset.io import load_vectors, write_permutation
from apps.graphs.analysis import graph_stats, reverse_graph
from apps.graphs.builders import build_hnsw_base, build_kgraph, build_mrng_approx, insertion_order
from apps.graphs.io import save_graph


class Command(AnalysisCommand):
    help = "Build a KGraph, approximate MRNG or HNSW base-layer index"

    def add_command_arguments(self, parser):
        parser.add_argument("--type", required=True, choices=["kgraph", "mrng", "hnsw"], dest="graph_type")
        parser.add_argument("--base", required=True, help="Base vectors (fvecs)")
        parser.add_argument("--out", required=True, help="Graph file")
        parser.add_argument("--K", type=int, default=None, help="KGraph out-degree")
        parser.add_argument("--efc", type=int, default=None, help="MRNG candidate pool size")
        parser.add_argument("--M", type=int, default=None, help="HNSW neighbors per insertion")
        parser.add_argument("--ef-construction", type=int, default=None, help="HNSW build beam width")
        parser.add_argument("--shuffle", action="store_true", help="HNSW: seeded insertion order")
        parser.add_argument("--permutation", default=None, help="HNSW: write the insertion order (ivecs)")
        parser.add_argument("--reverse-out", default=None, help="Also write the reversed graph")
        parser.add_argument("--normalize", action="store_true", help="Unit-normalize vectors on load")

    def run(self, **options):
        base = load_vectors(options["base"], options["normalize"])
        kind = options["graph_type"]
        threads = self.global_options.threads

        if kind == "kgraph":
            graph = build_kgraph(base, self._required(options, "K"), threads=threads)
        elif kind == "mrng":
            graph = build_mrng_approx(base, self._required(options, "efc"), threads=threads)
        else:
            seed = self.global_options.seed if options["shuffle"] else None
            graph = build_hnsw_base(
                base,
                self._required(options, "M"),
                self._required(options, "ef_construction"),
                seed=seed,
            )
            if options["permutation"]:
                write_permutation(insertion_order(base.count, seed), options["permutation"])

        save_graph(graph, options["out"])
        if options["reverse_out"]:
            save_graph(reverse_graph(graph), options["reverse_out"])

        stats = graph_stats(graph)
        self.success(
            f"{kind} graph: {stats.count} vertices, {stats.edge_count} edges, "
            f"avg out-degree {stats.avg_out_degree:.2f}, max {stats.max_out_degree}"
        )

    def _required(self, options, name):
        value = options[name]
        if value is None:
            flag = "--" + name.replace("_", "-")
            self.usage_error(f"{flag} is required for --type {options['graph_type']}")
        return value
