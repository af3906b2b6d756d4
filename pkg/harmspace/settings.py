"""
Django settings for the harmspace project.

The project has no web surface; Django hosts the pipeline apps, the
management commands and the test runner.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'harmspace-local-key')


# Application definition

INSTALLED_APPS = [
    'core',
    'features',
    'adjustment',
    'evaluation',
    'synthetic',
]

# Only the management commands and the test runner need a connection alias;
# no app defines database models.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_I18N = False
USE_TZ = True
TIME_ZONE = 'UTC'


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.getenv('HARMSPACE_LOG_LEVEL', 'INFO'),
    },
}


# Pipeline defaults. A run config file or command-line flags override these.

HARMSPACE = {
    'METHOD': os.getenv('HARMSPACE_METHOD', 'HARH'),
    'CHANNEL_SET': os.getenv('HARMSPACE_CHANNEL_SET', 'A1+A2'),
    'SEED': int(os.getenv('HARMSPACE_SEED', '20250703')),

    # Harmonic feature space
    'HARMONIC_D': int(os.getenv('HARMSPACE_HARMONIC_D', '4')),
    'HARMONIC_FO_MAX': float(os.getenv('HARMSPACE_HARMONIC_FO_MAX', '100')),
    'HARMONIC_MAX_HARMONICS': int(os.getenv('HARMSPACE_HARMONIC_MAX_HARMONICS', '60')),
    'HARMONIC_DB_FLOOR': float(os.getenv('HARMSPACE_HARMONIC_DB_FLOOR', '1e-12')),
    'HARMONIC_SPECTRUM': os.getenv('HARMSPACE_HARMONIC_SPECTRUM', 'magnitude'),

    # FFT / HFFT baselines
    'BASELINE_WINDOW': int(os.getenv('HARMSPACE_BASELINE_WINDOW', '8196')),
    'BASELINE_LOWPASS_HZ': float(os.getenv('HARMSPACE_BASELINE_LOWPASS_HZ', '6000')),

    # Zero-phase Butterworth applied to every recording before extraction
    'PREPROCESS_CUTOFF_HZ': float(os.getenv('HARMSPACE_PREPROCESS_CUTOFF_HZ', '6000')),
    'PREPROCESS_ORDER': int(os.getenv('HARMSPACE_PREPROCESS_ORDER', '4')),

    # Evaluation protocol
    'EVAL_PCA_COMPONENTS': int(os.getenv('HARMSPACE_EVAL_PCA_COMPONENTS', '2')),
    'EVAL_TEST_CONDITIONS': os.getenv('HARMSPACE_EVAL_TEST_CONDITIONS', '2000:5,3000:5,4000:5'),
    'EVAL_REWEIGHTING': os.getenv('HARMSPACE_EVAL_REWEIGHTING', 'inverse_class_frequency'),

    # Synthetic dataset
    'SYNTH_FS': float(os.getenv('HARMSPACE_SYNTH_FS', '48000')),
    'SYNTH_DURATION_S': float(os.getenv('HARMSPACE_SYNTH_DURATION_S', '1.0')),
    'SYNTH_CHANNELS': int(os.getenv('HARMSPACE_SYNTH_CHANNELS', '2')),
    'SYNTH_SPEEDS_RPM': os.getenv('HARMSPACE_SYNTH_SPEEDS_RPM', '1000,2000,3000,4000,5000,6000'),
    'SYNTH_LOADS_NM': os.getenv('HARMSPACE_SYNTH_LOADS_NM', '0,5,10,20'),
    'SYNTH_CELLS': os.getenv(
        'HARMSPACE_SYNTH_CELLS',
        '1000:0,2000:0,3000:0,4000:0,5000:0,6000:0,'
        '2000:5,3000:5,4000:5,'
        '1000:10,3000:10,5000:10,'
        '2000:20,4000:20,6000:20',
    ),
    'SYNTH_RUNS': int(os.getenv('HARMSPACE_SYNTH_RUNS', '1')),
    'SYNTH_SNR_DB': float(os.getenv('HARMSPACE_SYNTH_SNR_DB', '20')),

    'PATHS_DATA_DIR': os.getenv('HARMSPACE_DATA_DIR', str(BASE_DIR / 'data')),
    'PATHS_OUT_DIR': os.getenv('HARMSPACE_OUT_DIR', str(BASE_DIR / 'runs')),

    'WORKERS': int(os.getenv('HARMSPACE_WORKERS', str(min(8, os.cpu_count() or 1)))),
}
