"""
Pearson correlation between hardness measures and measured effort.

Usage:
    gah correlate --hardness hardness.csv --effort effort.csv --out corr.json
"""
import pandas as pd

from apps.core.exceptions import GahError, InsufficientDataError
from apps.core.management.base import AnalysisCommand
from apps.core.utils import read_records, write_json
from apps.hardness.statistics import MEASURE_COLUMNS, pearson


def correlation_table(hardness: pd.DataFrame, effort: pd.DataFrame) -> list[dict]:
    """One row per (recall target, measure) with the coefficient or the reason it is missing."""
    if "target" not in effort.columns:
        effort = effort.assign(target=float("nan"))
    rows = []
    for target, group in effort.groupby("target", dropna=False, sort=True):
        merged = hardness.merge(group[["query_id", "ndc"]], on="query_id", how="inner")
        if merged.empty:
            raise InsufficientDataError("Hardness and effort tables share no query ids")
        for measure in MEASURE_COLUMNS:
            if measure not in merged.columns or merged[measure].isna().all():
                continue
            row = {"target": target, "measure": measure}
            try:
                row.update(pearson(merged[measure], merged["ndc"]).as_dict())
            except GahError as exc:
                row.update(coefficient=None, error=str(exc))
            rows.append(row)
    return rows


class Command(AnalysisCommand):
    help = "Correlate hardness measures with query effort"

    def add_command_arguments(self, parser):
        parser.add_argument("--hardness", required=True, help="Table written by 'hardness'")
        parser.add_argument("--effort", required=True, help="Table written by 'measure-effort'")
        parser.add_argument("--out", required=True, help="JSON report")

    def run(self, **options):
        rows = correlation_table(read_records(options["hardness"]), read_records(options["effort"]))
        write_json({"correlations": rows}, options["out"], header=self.header)
        for row in rows:
            value = row.get("coefficient")
            shown = "n/a" if value is None else f"{value:+.3f}"
            self.stdout.write(f"recall {row['target']}: {row['measure']:<18} {shown}")
