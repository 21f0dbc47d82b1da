import os

from celery import Celery

# Set the default Django settings module for the 'celery' program.
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings.local')

app = Celery('gah')

# Using a string here means the worker doesn't have to serialize
# the configuration object to child processes.
app.config_from_object('django.conf:settings', namespace='CELERY')

# Load task modules from all registered Django apps.
app.autodiscover_tasks()

# Long experiments get their own queue so short jobs are not starved
app.conf.task_queues = {
    'default': {'exchange': 'default', 'routing_key': 'default'},
    'experiments': {'exchange': 'experiments', 'routing_key': 'experiments'},
}

app.conf.task_routes = {
    'apps.evalharness.tasks.*': {'queue': 'experiments'},
}
