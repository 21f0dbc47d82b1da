"""
Hardness measures of every query.

Usage:
    gah hardness --mrng mrng.bin --base X.fvecs --query Q.fvecs --k 50 --acc 0.98 --p 0.95 \
        --measures steiner,lid,rc,qe,eps --eps 0.5 --out hardness.csv
"""
from pydantic import ValidationError

from apps.core.management.base import AnalysisCommand
from apps.core.presets import DESK
from apps.core.utils import write_records
from apps.core.validators import HARDNESS_MEASURES, ExperimentConfig
from apps.dataset.io import load_vectors
from apps.graphs.analysis import reverse_graph
from apps.graphs.io import load_graph
from apps.hardness.pipeline import HARDNESS_COLUMNS, VARIANTS, compute_hardness_records


class Command(AnalysisCommand):
    help = "Compute Steiner-hardness and baseline hardness measures per query"

    def add_command_arguments(self, parser):
        parser.add_argument("--mrng", default=None, help="Approximate MRNG (required for steiner)")
        parser.add_argument("--rev-mrng", default=None, help="Reversed MRNG; computed when absent")
        parser.add_argument("--base", required=True)
        parser.add_argument("--query", required=True)
        parser.add_argument("--k", type=int, default=DESK["k"])
        parser.add_argument("--acc", type=float, default=DESK["acc"])
        parser.add_argument("--p", type=float, default=DESK["p"])
        parser.add_argument("--eps", type=float, default=DESK["eps"])
        parser.add_argument("--measures", default=",".join(HARDNESS_MEASURES))
        parser.add_argument("--variant", choices=VARIANTS, default="full")
        parser.add_argument("--max-candidates", type=int, default=None)
        parser.add_argument("--out", required=True)
        parser.add_argument("--normalize", action="store_true")

    def run(self, **options):
        measures = [m.strip() for m in options["measures"].split(",") if m.strip()]
        try:
            measures = ExperimentConfig(measures=measures, k=options["k"], acc=options["acc"],
                                        p=options["p"], eps=options["eps"]).measures
        except ValidationError as exc:
            self.usage_error(f"Invalid hardness options: {exc}")
        if "steiner" in measures and not options["mrng"]:
            self.usage_error("--mrng is required for the steiner measure")

        base = load_vectors(options["base"], options["normalize"])
        queries = load_vectors(options["query"], options["normalize"])
        mrng = rev_mrng = None
        if options["mrng"]:
            mrng = load_graph(options["mrng"])
            rev_mrng = load_graph(options["rev_mrng"]) if options["rev_mrng"] else reverse_graph(mrng)

        records = compute_hardness_records(
            mrng, rev_mrng, base, queries, options["k"], options["acc"], options["p"],
            eps=options["eps"], measures=measures, max_candidates=options["max_candidates"],
            variant=options["variant"], threads=self.global_options.threads,
        )
        write_records([r.as_dict() for r in records], options["out"],
                      self.global_options.output_format, header=self.header, columns=HARDNESS_COLUMNS)
        self.success(f"Hardness of {len(records)} queries written to {options['out']}")
