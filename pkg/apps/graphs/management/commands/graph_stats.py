"""
Degree statistics, connectivity and KGraph overlap of a saved graph.

Usage:
    gah graph-stats --graph mrng.bin
    gah graph-stats --graph hnsw.bin --base X.fvecs --overlap-k 16,64,256 --out stats.json
"""
from apps.core.management.base import AnalysisCommand
from apps.core.utils import parse_csv_numbers, write_json
from apps.dataset.io import load_vectors
from apps.graphs.analysis import graph_stats, is_strongly_connected, overlap_profile
from apps.graphs.io import load_graph


class Command(AnalysisCommand):
    help = "Report statistics of a graph index"

    def add_command_arguments(self, parser):
        parser.add_argument("--graph", required=True, help="Graph file")
        parser.add_argument("--base", default=None, help="Base vectors, required for --overlap-k")
        parser.add_argument("--overlap-k", default=None, help="Comma-separated KGraph sizes to compare against")
        parser.add_argument("--out", default=None, help="Write the report as JSON")
        parser.add_argument("--normalize", action="store_true")

    def run(self, **options):
        graph = load_graph(options["graph"])
        report = graph_stats(graph).as_dict()
        report["strongly_connected"] = is_strongly_connected(graph)

        if options["overlap_k"]:
            if not options["base"]:
                self.usage_error("--overlap-k requires --base")
            base = load_vectors(options["base"], options["normalize"])
            ks = parse_csv_numbers(options["overlap_k"], int)
            profile = overlap_profile(graph, base, ks, threads=self.global_options.threads)
            report["overlap"] = {str(k): v for k, v in profile.items()}

        if options["out"]:
            write_json(report, options["out"], header=self.header)
        for key, value in report.items():
            self.stdout.write(f"{key}: {value}")
