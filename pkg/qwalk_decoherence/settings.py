"""
Django settings for the qwalk_decoherence project.
Configuration for the simulation engines and their command-line front end:
- python-dotenv
- Optional Redis cache for ideal-walk histories
- Environment-based switching (nothing is required)
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# -------------------------------------------------------------------
# Base Directory
# -------------------------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env
load_dotenv(BASE_DIR / ".env")

# -------------------------------------------------------------------
# Core Settings
# -------------------------------------------------------------------
SECRET_KEY = os.getenv("SECRET_KEY", "unsafe-dev-key")

DEBUG = os.getenv("DEBUG", "False") == "True"

# -------------------------------------------------------------------
# Application Definition
# -------------------------------------------------------------------
INSTALLED_APPS = [
    "rest_framework",
    "walks",
]

# No database: every engine works on in-memory arrays.
DATABASES = {}

TIME_ZONE = "UTC"
USE_TZ = True

# -------------------------------------------------------------------
# REST Framework Configuration
# Only serializers and the JSON renderer are used (no views).
# -------------------------------------------------------------------
REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
    "COMPACT_JSON": False,
    "STRICT_JSON": True,
}

# -------------------------------------------------------------------
# Walk Engine Configuration
# CLI flags always take precedence over these defaults.
# -------------------------------------------------------------------
QWALK = {
    "DEFAULT_COIN_INIT": os.getenv("QWALK_DEFAULT_COIN_INIT", "symmetric"),
    "DEFAULT_JOBS": int(os.getenv("QWALK_JOBS", "1")),
    "TRAJECTORY_CHUNK_SIZE": int(os.getenv("QWALK_TRAJECTORY_CHUNK_SIZE", "2000")),
    "HISTORY_CACHE_TIMEOUT": int(os.getenv("QWALK_HISTORY_CACHE_TIMEOUT", "3600")),
    "MAX_FIRST_ORDER_T": int(os.getenv("QWALK_MAX_FIRST_ORDER_T", "200")),
}

# -------------------------------------------------------------------
# Cache Configuration
# Uses Redis when REDIS_URL is set (shared by sweep workers), LocMem otherwise
# -------------------------------------------------------------------
REDIS_URL = os.getenv("REDIS_URL")

if REDIS_URL:
    CACHES = {
        "default": {
            "BACKEND": "django_redis.cache.RedisCache",
            "LOCATION": REDIS_URL,
            "OPTIONS": {
                "CLIENT_CLASS": "django_redis.client.DefaultClient",
            },
            "TIMEOUT": QWALK["HISTORY_CACHE_TIMEOUT"],
        }
    }
else:
    CACHES = {
        "default": {
            "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
            "LOCATION": "qwalk-history-cache",
            "TIMEOUT": QWALK["HISTORY_CACHE_TIMEOUT"],
        }
    }

# -------------------------------------------------------------------
# Logging Configuration
# -------------------------------------------------------------------
LOG_FILE = os.getenv("QWALK_LOG_FILE", str(BASE_DIR / "debug.log"))

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
        "file": {
            "class": "logging.FileHandler",
            "filename": LOG_FILE,
            "formatter": "verbose",
            "delay": True,
        },
    },
    "root": {
        "handlers": ["console", "file"],
        "level": "WARNING",
    },
    "loggers": {
        "walks": {
            "handlers": ["console", "file"],
            "level": "DEBUG" if DEBUG else "INFO",
            "propagate": False,
        },
    },
}
