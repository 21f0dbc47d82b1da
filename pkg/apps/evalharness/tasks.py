"""Celery tasks for long-running experiments."""

from celery import shared_task
from celery.utils.log import get_task_logger

from apps.core.validators import ExperimentConfig

logger = get_task_logger(__name__)


@shared_task(bind=True)
def run_benchmark_task(self, run_id, threads=1, header=None):
    """
    Run the experiment recorded as ExperimentRun(run_id) and store its outcome.
    """
    from .models import ExperimentRun
    from .runners import ExperimentFailed, run_correlation_experiment

    run = ExperimentRun.objects.get(id=run_id)
    run.mark_running()
    cfg = ExperimentConfig.model_validate(run.config)

    def record_stage(stage):
        run.stage = stage
        run.save(update_fields=['stage', 'updated_at'])

    try:
        result = run_correlation_experiment(
            cfg, run.out_dir, threads=threads, header=header, on_stage=record_stage
        )
    except ExperimentFailed as exc:
        logger.error(f"Experiment {run_id} failed at {exc.stage}: {exc.error}")
        run.mark_failed(exc.stage, exc.error)
        raise

    correlations = result.table_records()
    run.mark_completed(correlations)
    logger.info(f"Experiment {run_id} completed")
    return {'run_id': str(run_id), 'status': run.status, 'correlations': correlations}
