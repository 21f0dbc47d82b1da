"""
Synthetic Gaussian base and query sets.

Usage:
    gah make-dataset --count 20000 --dim 16 --queries 200 --seed 0 \
        --out-base base.fvecs --out-query query.fvecs
"""
from apps.core.management.base import AnalysisCommand
from apps.dataset.io import write_fvecs
from apps.dataset.transforms import make_gaussian, normalize, split


class Command(AnalysisCommand):
    help = "Generate a standard-normal base set and query set"

    def add_command_arguments(self, parser):
        parser.add_argument("--count", type=int, required=True, help="Base vector count")
        parser.add_argument("--dim", type=int, required=True, help="Dimension")
        parser.add_argument("--queries", type=int, required=True, help="Query count")
        parser.add_argument("--out-base", required=True)
        parser.add_argument("--out-query", required=True)
        parser.add_argument("--normalize", action="store_true", help="Unit-normalize both sets")

    def run(self, **options):
        total = options["count"] + options["queries"]
        vs = make_gaussian(total, options["dim"], seed=self.global_options.seed)
        if options["normalize"]:
            vs = normalize(vs)
        base, queries = split(vs, options["count"])

        write_fvecs(base, options["out_base"])
        write_fvecs(queries, options["out_query"])
        self.success(
            f"Wrote {base.count} base and {queries.count} query vectors (dim={base.dim})"
        )
