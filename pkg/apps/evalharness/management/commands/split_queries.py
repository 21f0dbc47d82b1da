"""
Simplest and hardest queries of a hardness table.

Usage:
    gah split-queries --hardness hardness.csv --n 1000 --query W.fvecs \
        --out-simple simple.fvecs --out-hard hard.fvecs
"""
from apps.core.management.base import AnalysisCommand
from apps.core.utils import read_records, write_json
from apps.dataset.io import load_vectors, write_fvecs
from apps.dataset.types import VectorSet
from apps.evalharness.reports import split_simple_hard


class Command(AnalysisCommand):
    help = "Split queries into the n simplest and n hardest by a hardness measure"

    def add_command_arguments(self, parser):
        parser.add_argument("--hardness", required=True, help="Table written by 'hardness'")
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--measure", default="steiner")
        parser.add_argument("--out", default=None, help="JSON file with both id lists")
        parser.add_argument("--query", default=None, help="Query vectors to split (fvecs)")
        parser.add_argument("--out-simple", default=None)
        parser.add_argument("--out-hard", default=None)

    def run(self, **options):
        if options["n"] < 1:
            self.usage_error("--n must be positive")
        wants_vectors = options["out_simple"] or options["out_hard"]
        if wants_vectors and not options["query"]:
            self.usage_error("--out-simple/--out-hard need --query")
        if not (wants_vectors or options["out"]):
            self.usage_error("nothing to write: give --out or --out-simple/--out-hard")

        simple, hard = split_simple_hard(read_records(options["hardness"]), options["n"], options["measure"])

        if options["out"]:
            write_json({"measure": options["measure"], "simple": simple, "hard": hard},
                       options["out"], header=self.header)
        if wants_vectors:
            queries = load_vectors(options["query"])
            for ids, path in ((simple, options["out_simple"]), (hard, options["out_hard"])):
                if path:
                    write_fvecs(VectorSet(queries.data[ids]), path)

        self.success(f"Split {len(simple)} simple and {len(hard)} hard queries by {options['measure']}")
