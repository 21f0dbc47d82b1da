"""
Django settings for local development and tests.
"""
from decouple import config

from .base import *

DEBUG = True

# Celery: eager mode (tasks run synchronously, no worker needed)
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_BROKER_URL = 'memory://'
CELERY_RESULT_BACKEND = 'cache+memory://'

# Logging
LOGGING['handlers']['console']['formatter'] = 'verbose'
LOGGING['loggers']['apps']['level'] = config('GAH_LOG_LEVEL', default='') or 'INFO'
