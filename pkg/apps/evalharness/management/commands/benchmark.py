"""
End-to-end correlation experiment.

Usage:
    gah benchmark --config exp.toml --out-dir results/
    gah benchmark --config exp.toml --out-dir results/ --record --background

The config file is a flat TOML document mirroring ExperimentConfig; paths
in it are relative to the file. --seed, when given, overrides its seed.
"""
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from apps.core.management.base import AnalysisCommand
from apps.core.validators import ExperimentConfig
from apps.evalharness.runners import run_correlation_experiment


def load_experiment_config(path, seed=None) -> ExperimentConfig:
    """Parse and validate a TOML experiment file."""
    path = Path(path)
    with path.open("rb") as fh:
        raw = tomllib.load(fh)
    for key in ("base", "queries"):
        if key in raw and not Path(raw[key]).is_absolute():
            raw[key] = str(path.parent / raw[key])
    if seed is not None:
        raw["seed"] = seed
    return ExperimentConfig.model_validate(raw)


class Command(AnalysisCommand):
    help = "Run a correlation experiment between hardness measures and query effort"

    def add_command_arguments(self, parser):
        parser.add_argument("--config", required=True, help="Experiment file (TOML)")
        parser.add_argument("--out-dir", required=True, help="Directory for all outputs")
        parser.add_argument("--record", action="store_true", help="Track the run as an ExperimentRun")
        parser.add_argument("--background", action="store_true", help="Queue the run as a Celery task")

    def run(self, **options):
        if options["background"] and not options["record"]:
            self.usage_error("--background requires --record")
        try:
            cfg = load_experiment_config(options["config"], seed=options["seed"])
        except tomllib.TOMLDecodeError as exc:
            self.usage_error(f"Invalid config file {options['config']}: {exc}")

        threads = self.global_options.threads
        if options["record"]:
            self._run_recorded(cfg, options["out_dir"], threads, options["background"])
            return

        result = run_correlation_experiment(cfg, options["out_dir"], threads=threads, header=self.header)
        self._show(result.table)
        self.success(f"Outputs written to {result.out_dir}")

    def _run_recorded(self, cfg, out_dir, threads, background):
        from apps.evalharness.models import ExperimentRun
        from apps.evalharness.tasks import run_benchmark_task

        run = ExperimentRun.objects.create(config=cfg.model_dump(mode="json"), out_dir=str(out_dir))
        if background:
            run_benchmark_task.delay(str(run.id), threads=threads, header=self.header)
            self.success(f"Queued experiment run {run.id}")
            return

        run_benchmark_task(str(run.id), threads=threads, header=self.header)
        run.refresh_from_db()
        for row in run.correlations or []:
            self.stdout.write(str(row))
        self.success(f"Experiment run {run.id}: {run.status}")

    def _show(self, table):
        for measure, row in table.iterrows():
            cells = "  ".join(
                f"{col}={'n/a' if value != value else f'{value:+.3f}'}" for col, value in row.items()
            )
            self.stdout.write(f"{measure:<18} {cells}")
