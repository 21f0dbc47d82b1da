"""
Django settings for batch servers running long experiments.

Environment Variables:
- SECRET_KEY: Django secret key
- DB_NAME: SQLite file for experiment run records
- REDIS_URL: Celery broker / result backend (optional; eager mode without it)
- SENTRY_DSN: Sentry DSN for error tracking (optional)
- GAH_LOG_JSON: emit JSON log lines (default True)
"""
import os

from .base import *

DEBUG = False

# =============================================================================
# Celery
# =============================================================================
REDIS_URL = config('REDIS_URL', default='')
if REDIS_URL:
    CELERY_BROKER_URL = REDIS_URL
    CELERY_RESULT_BACKEND = REDIS_URL
else:
    # Low-cost mode: no broker, run tasks in-process
    CELERY_TASK_ALWAYS_EAGER = True
    CELERY_TASK_EAGER_PROPAGATES = True

# =============================================================================
# Sentry Error Tracking
# =============================================================================
SENTRY_DSN = config('SENTRY_DSN', default='')
if SENTRY_DSN:
    import sentry_sdk
    from sentry_sdk.integrations.celery import CeleryIntegration
    from sentry_sdk.integrations.django import DjangoIntegration

    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[
            DjangoIntegration(),
            CeleryIntegration(),
        ],
        traces_sample_rate=0.1,
        send_default_pii=False,
        environment='production',
        release=os.environ.get('GAH_RELEASE', GAH_VERSION),
    )

# =============================================================================
# Logging
# =============================================================================
LOG_JSON = config('GAH_LOG_JSON', default=True, cast=bool)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'json': {
            '()': 'pythonjsonlogger.jsonlogger.JsonFormatter',
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
        'standard': {
            'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'json' if LOG_JSON else 'standard',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'celery': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'apps': {
            'handlers': ['console'],
            'level': config('GAH_LOG_LEVEL', default='') or 'INFO',
            'propagate': False,
        },
    },
}
