"""
Per-query effort: least NDC at which greedy search reaches a recall target.

Usage:
    gah measure-effort --graph g.bin --base X.fvecs --query Q.fvecs --gt gt.ivecs \
        --k 50 --recall 0.98 --repeats 3 --entry random --seed 1 --out effort.csv
"""
from apps.core.management.base import AnalysisCommand
from apps.core.utils import parse_csv_numbers, write_json, write_records
from apps.dataset.io import load_vectors
from apps.dataset.knn import load_or_compute_gt
from apps.graphs.io import load_graph
from apps.search.effort import EFFORT_COLUMNS, measure_effort_batch, phase_breakdown, phase_summary


class Command(AnalysisCommand):
    help = "Measure the minimal NDC to reach recall targets on a graph index"

    def add_command_arguments(self, parser):
        parser.add_argument("--graph", required=True, help="Graph file")
        parser.add_argument("--base", required=True, help="Base vectors (fvecs)")
        parser.add_argument("--query", required=True, help="Query vectors (fvecs)")
        parser.add_argument("--gt", default=None, help="Ground truth ids (ivecs); computed when absent")
        parser.add_argument("--k", type=int, required=True)
        parser.add_argument("--recall", default="0.9", help="Recall target(s), comma-separated")
        parser.add_argument("--repeats", type=int, default=1)
        parser.add_argument("--entry", choices=["fixed", "random"], default="fixed")
        parser.add_argument("--entry-vertex", type=int, default=0, help="Entry vertex for --entry fixed")
        parser.add_argument("--out", required=True, help="Effort table")
        parser.add_argument("--phase-ef", type=int, default=None, help="Also record a phase breakdown at this ef")
        parser.add_argument("--phase-out", default=None, help="Phase breakdown table")
        parser.add_argument("--normalize", action="store_true")

    def run(self, **options):
        targets = sorted(set(parse_csv_numbers(options["recall"])))
        if any(not 0.0 < t <= 1.0 for t in targets) or not targets:
            self.usage_error(f"--recall values must lie in (0, 1], got {options['recall']}")
        if (options["phase_ef"] is None) != (options["phase_out"] is None):
            self.usage_error("--phase-ef and --phase-out go together")

        graph = load_graph(options["graph"])
        base = load_vectors(options["base"], options["normalize"])
        queries = load_vectors(options["query"], options["normalize"])
        k = options["k"]
        gt = load_or_compute_gt(base, queries, k, options["gt"], threads=self.global_options.threads)

        rows = []
        for target in targets:
            records = measure_effort_batch(
                graph, base, queries, gt, target, k,
                entry_policy=options["entry"],
                repeats=options["repeats"],
                seed=self.global_options.seed,
                entry_vertex=options["entry_vertex"],
                threads=self.global_options.threads,
            )
            rows.extend({**r.as_dict(), "target": target} for r in records)

        write_records(
            rows, options["out"], self.global_options.output_format,
            header=self.header, columns=[*EFFORT_COLUMNS, "target"],
        )

        if options["phase_ef"] is not None:
            frame = phase_breakdown(graph, base, queries, gt, options["phase_ef"], k, ep=options["entry_vertex"])
            write_records(frame, options["phase_out"], self.global_options.output_format, header=self.header)
            summary = phase_summary(frame)
            write_json(summary, f"{options['phase_out']}.summary.json", header=self.header)
            self.stdout.write(f"Phase 1 share of NDC at ef={options['phase_ef']}: {summary['phase1_share']:.3f}")

        self.success(f"Effort of {queries.count} queries at {len(targets)} target(s) written to {options['out']}")
