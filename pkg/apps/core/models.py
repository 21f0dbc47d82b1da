"""
Core models - abstract base for persisted records.
"""
import uuid

from django.db import models


class BaseModel(models.Model):
    """
    Abstract base model with common fields for persisted records.

    Provides:
    - UUID primary key
    - Created/updated timestamps
    """
    id = models.UUIDField(
        primary_key=True,
        default=uuid.uuid4,
        editable=False,
        verbose_name='ID'
    )
    created_at = models.DateTimeField(
        auto_now_add=True,
        verbose_name='Created at'
    )
    updated_at = models.DateTimeField(
        auto_now=True,
        verbose_name='Updated at'
    )

    class Meta:
        abstract = True
        ordering = ['-created_at']

    def __str__(self):
        return str(self.id)
