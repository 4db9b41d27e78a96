"""
Django settings for box_dimension project.

The project has no database and no HTTP surface; it is driven through
management commands (see the ``cli`` app). Numerical tunables are read from
the environment or a ``.env`` file with python-decouple.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='box-dimension-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'ifs_core',
    'projections',
    'pressure',
    'render',
    'cli',
]

MIDDLEWARE = []

DATABASES = {}

USE_I18N = False

USE_TZ = True

TIME_ZONE = 'UTC'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Dimension computation

# Doubling levels at which s_k is solved
BOXDIM_SCHEDULE = config('BOXDIM_SCHEDULE', default='6,12,24,48', cast=Csv(int))

# Hard guard on the number of DP states held by one level table
BOXDIM_STATE_LIMIT = config('BOXDIM_STATE_LIMIT', default=200_000_000, cast=int)

BOXDIM_ROOT_TOL = config('BOXDIM_ROOT_TOL', default=1e-10, cast=float)
BOXDIM_PROJECTION_TOL = config('BOXDIM_PROJECTION_TOL', default=1e-12, cast=float)

# Fixed partition size for threaded work; output never depends on BOXDIM_THREADS
BOXDIM_CHUNK_SIZE = config('BOXDIM_CHUNK_SIZE', default=262_144, cast=int)
BOXDIM_THREADS = config('BOXDIM_THREADS', default=1, cast=int)

# Rendering
BOXDIM_RENDER_MAX_LEVEL = config('BOXDIM_RENDER_MAX_LEVEL', default=10, cast=int)
BOXDIM_SVG_VIEWPORT = config('BOXDIM_SVG_VIEWPORT', default=800, cast=int)
BOXDIM_SVG_FILL = config('BOXDIM_SVG_FILL', default='#1f3b73')
BOXDIM_SVG_OPACITY = config('BOXDIM_SVG_OPACITY', default=1.0, cast=float)

BOXDIM_REPORT_SCHEMA = BASE_DIR / 'cli' / 'schemas' / 'run_report.schema.json'


# Logging

LOG_LEVEL = config('LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('ifs_core', 'projections', 'pressure', 'render', 'cli')
    },
}
