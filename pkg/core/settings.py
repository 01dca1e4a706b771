"""
Django settings for the graspprint project.

Generated by 'django-admin startproject' using Django 5.2.7 and trimmed to what
a command-line pipeline needs: settings, the ORM for run records and the test
runner. Library defaults live in GRASPPRINT and can be overridden from the
environment (or a .env file).

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from dotenv import load_dotenv
import math
import os
import sys

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

VERSION = "1.0.0"

# Only used by Django internals (signing); the pipeline never serves requests.
SECRET_KEY = os.environ.get("SECRET_KEY", "graspprint-local-only")

DEBUG = os.environ.get("DEBUG", "False") == "True"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "meshes.apps.MeshesConfig",
    "grasp_space.apps.GraspSpaceConfig",
    "morphing.apps.MorphingConfig",
    "kinematics.apps.KinematicsConfig",
    "slicer.apps.SlicerConfig",
    "energy.apps.EnergyConfig",
    "predictor.apps.PredictorConfig",
    "optimizer.apps.OptimizerConfig",
    "pipeline.apps.PipelineConfig",
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

if "test" in sys.argv or os.environ.get("TRAVIS") == "true":
    DATABASES = {
        "default": {
            "ENGINE": "django.db.backends.sqlite3",
            "NAME": ":memory:",
        }
    }
elif os.environ.get("DB_NAME"):
    DATABASES = {
        "default": {
            "ENGINE": "django.db.backends.postgresql",
            "NAME": os.environ.get("DB_NAME"),
            "USER": os.environ.get("DB_USER"),
            "PASSWORD": os.environ.get("DB_PASSWORD"),
            "HOST": os.environ.get("DB_HOST", "localhost"),
            "PORT": os.environ.get("DB_PORT", "5432"),
        }
    }
else:
    # Use SQLite as fallback for local runs
    DATABASES = {
        "default": {
            "ENGINE": "django.db.backends.sqlite3",
            "NAME": BASE_DIR / "db.sqlite3",
        }
    }


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Logging

LOG_LEVEL = os.environ.get("GRASPPRINT_LOG_LEVEL", "INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "graspprint": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "graspprint",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        app: {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False}
        for app in (
            "meshes",
            "grasp_space",
            "morphing",
            "kinematics",
            "slicer",
            "energy",
            "predictor",
            "optimizer",
            "pipeline",
        )
    },
}


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value not in (None, "") else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value not in (None, "") else default


# Library defaults. Engineering defaults are listed as such in DESIGN.md.
GRASPPRINT = {
    "CONFIG_PATH": os.environ.get("GRASPPRINT_CONFIG", ""),
    "SEED": _env_int("GRASPPRINT_SEED", 42),
    # mesh-core
    "WELD_TOLERANCE": _env_float("GRASPPRINT_WELD_TOLERANCE", 1e-6),
    "DEGENERATE_AREA": 1e-12,
    # ellipsoid-space
    "MVEE_EPS": _env_float("GRASPPRINT_MVEE_EPS", 1e-4),
    "MVEE_MAX_ITER": _env_int("GRASPPRINT_MVEE_MAX_ITER", 10_000),
    "ENVELOPE_EPS": _env_float("GRASPPRINT_ENVELOPE_EPS", 1e-3),
    "MAX_ELLIPSOIDS": _env_int("GRASPPRINT_MAX_ELLIPSOIDS", 6),
    "UNION_SAMPLES": _env_int("GRASPPRINT_UNION_SAMPLES", 200_000),
    # laplacian-morph
    "CONSTRAINT_WEIGHT": _env_float("GRASPPRINT_CONSTRAINT_WEIGHT", 1.0),
    "SOLVER_TOLERANCE": _env_float("GRASPPRINT_SOLVER_TOLERANCE", 1e-8),
    "GAUSS_SIGMA": _env_float("GRASPPRINT_GAUSS_SIGMA", 1.0),
    # slicer-lcm
    "LAYER_THICKNESS": _env_float("GRASPPRINT_LAYER_THICKNESS", 1.0),
    "SLICE_EPSILON": 1e-7,
    "CHAIN_TOLERANCE": 1e-6,
    "MASK_RESOLUTION": _env_int("GRASPPRINT_MASK_RESOLUTION", 32),
    "INFILL_SPACING": _env_float("GRASPPRINT_INFILL_SPACING", 2.0),
    "LINE_WIDTH": _env_float("GRASPPRINT_LINE_WIDTH", 0.4),
    "OVERHANG_THRESHOLD": _env_float("GRASPPRINT_OVERHANG_THRESHOLD", math.pi / 4),
    "SUPPORT_DENSITY": _env_float("GRASPPRINT_SUPPORT_DENSITY", 0.0),
    # energy-model (TPU-like filament, engineering defaults)
    "MATERIAL": {
        "specific_heat": 1.8,
        "density": 1210.0,
        "melt_temperature": 493.15,
        "ambient_temperature": 298.15,
        "latent_heat": 120.0,
        "filament_area": 2.405,
    },
    "PRINTER": {
        "line_width": 0.4,
        "working_power": 120.0,
        "feed_velocity": 30.0,
        "infill_rate": 0.2,
        "print_space": [220.0, 220.0, 250.0],
    },
    "THERMAL_COEFFICIENT": _env_float("GRASPPRINT_THERMAL_COEFFICIENT", 0.01),
    # resnet-predictor
    "HIDDEN_WIDTH": _env_int("GRASPPRINT_HIDDEN_WIDTH", 64),
    "RESIDUAL_BLOCKS": _env_int("GRASPPRINT_RESIDUAL_BLOCKS", 3),
    "LEARNING_RATE": _env_float("GRASPPRINT_LEARNING_RATE", 1e-3),
    "BATCH_SIZE": _env_int("GRASPPRINT_BATCH_SIZE", 32),
    "EPOCHS": _env_int("GRASPPRINT_EPOCHS", 200),
    "PSEUDO_WEIGHT": _env_float("GRASPPRINT_PSEUDO_WEIGHT", 0.5),
    # moo-optimizer
    "POPULATION": _env_int("GRASPPRINT_POPULATION", 100),
    "GENERATIONS": _env_int("GRASPPRINT_GENERATIONS", 100),
    "SBX_ETA": 15.0,
    "SBX_PROBABILITY": 0.9,
    "MUTATION_ETA": 20.0,
    "CACHE_GRID": 1e-9,
    # Decision-vector bounds; material-typical ranges for TPU.
    "BOUNDS": {
        "nozzle_temperature": [483.15, 513.15],
        "temperature_gradient": [0.0, 10.0],
        "print_velocity": [15.0, 60.0],
        "layer_thickness": [0.1, 0.4],
    },
}
