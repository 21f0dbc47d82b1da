"""
Experiment run records.
"""
from django.db import models

from apps.core.models import BaseModel


class ExperimentRun(BaseModel):
    """
    One correlation experiment: its configuration, where it writes, and how it ended.
    """

    class Status(models.TextChoices):
        PENDING = 'PENDING', 'Pending'
        RUNNING = 'RUNNING', 'Running'
        COMPLETED = 'COMPLETED', 'Completed'
        FAILED = 'FAILED', 'Failed'

    config = models.JSONField(verbose_name='Configuration')
    out_dir = models.CharField(max_length=500, verbose_name='Output directory')
    status = models.CharField(
        max_length=20,
        choices=Status.choices,
        default=Status.PENDING,
        verbose_name='Status'
    )
    stage = models.CharField(max_length=50, blank=True, verbose_name='Last stage')
    error = models.TextField(blank=True, verbose_name='Error')
    correlations = models.JSONField(null=True, blank=True, verbose_name='Correlation table')

    class Meta:
        db_table = 'experiment_runs'
        verbose_name = 'Experiment run'
        verbose_name_plural = 'Experiment runs'
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.out_dir} ({self.status})"

    def mark_running(self):
        self.status = self.Status.RUNNING
        self.save(update_fields=['status', 'updated_at'])

    def mark_completed(self, correlations):
        self.status = self.Status.COMPLETED
        self.correlations = correlations
        self.error = ''
        self.save(update_fields=['status', 'correlations', 'error', 'updated_at'])

    def mark_failed(self, stage, error):
        self.status = self.Status.FAILED
        self.stage = stage or ''
        self.error = str(error)
        self.save(update_fields=['status', 'stage', 'error', 'updated_at'])
