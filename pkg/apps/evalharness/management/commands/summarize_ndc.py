"""
NDC distribution per recall target.

Usage:
    gah summarize-ndc --effort effort.csv --recall 0.86,0.95 --out ndc_summary.csv
"""
from apps.core.management.base import AnalysisCommand
from apps.core.utils import parse_csv_numbers, read_records, write_json, write_records
from apps.evalharness.reports import SUMMARY_COLUMNS, summarize_ndc_distribution


class Command(AnalysisCommand):
    help = "Summarize the NDC distribution of an effort table per recall target"

    def add_command_arguments(self, parser):
        parser.add_argument("--effort", required=True, help="Table written by 'measure-effort'")
        parser.add_argument("--recall", default=None, help="Comma-separated targets (default: all)")
        parser.add_argument("--out", required=True, help="Summary table; a .json twin is written next to it")

    def run(self, **options):
        targets = parse_csv_numbers(options["recall"]) if options["recall"] else None
        summary = summarize_ndc_distribution(read_records(options["effort"]), targets)

        out = write_records(summary, options["out"], self.global_options.output_format,
                            header=self.header, columns=SUMMARY_COLUMNS)
        write_json({"summary": summary.to_dict(orient="records")}, out.with_suffix(".json"),
                   header=self.header)
        for row in summary.itertuples(index=False):
            self.stdout.write(
                f"recall {row.target:g}: p50 {row.p50:.1f}  p90 {row.p90:.1f}  "
                f"max {row.max:.1f}  ({row.unreached} unreached)"
            )
