"""
Run configuration: defaults from settings, a KEY=VALUE file, then flags.
"""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from django.conf import settings
from dotenv import dotenv_values

from core.exceptions import ConfigError
from core.forms import RunConfigForm
from core.models import Method
from features.baseline import BaselineConfig
from features.harmonic import HarmonicConfig

logger = logging.getLogger(__name__)

# Keys that only say where files go or how fast to work; they never change results
UNHASHED_KEYS = ('data_dir', 'out_dir', 'workers')


@dataclass(frozen=True)
class PreprocessConfig:
    cutoff_hz: float = 6000.0
    order: int = 4


@dataclass(frozen=True)
class EvalConfig:
    pca_components: int = 2
    test_conditions: tuple = ((2000.0, 5.0), (3000.0, 5.0), (4000.0, 5.0))
    reweighting: str = 'inverse_class_frequency'


@dataclass(frozen=True)
class SynthConfig:
    fs: float = 48000.0
    duration_s: float = 1.0
    channels: int = 2
    speeds_rpm: tuple = ()
    loads_nm: tuple = ()
    cells: tuple = ()
    runs: int = 1
    snr_db: float = 20.0


@dataclass(frozen=True)
class RunConfig:
    method: str
    channel_set: str
    seed: int
    harmonic: HarmonicConfig
    baseline: BaselineConfig
    preprocess: PreprocessConfig
    eval: EvalConfig
    synth: SynthConfig
    data_dir: str
    out_dir: str
    workers: int = 1

    @property
    def manifest_path(self):
        return Path(self.data_dir) / 'manifest.csv'

    @property
    def features_dir(self):
        return Path(self.out_dir) / 'features'

    def with_method(self, method=None, channel_set=None):
        """Copy with another method/channel set, keeping the Hilbert flags consistent."""
        method = Method(method or self.method)
        return replace(
            self,
            method=method.value,
            channel_set=channel_set or self.channel_set,
            harmonic=replace(self.harmonic, use_hilbert=method.uses_hilbert),
            baseline=replace(self.baseline, use_hilbert=method.uses_hilbert),
        )

    def as_dict(self):
        data = asdict(self)
        for key in UNHASHED_KEYS:
            data.pop(key)
        return data

    @property
    def config_hash(self):
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(',', ':'), default=list)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _defaults():
    return {key.lower(): value for key, value in settings.HARMSPACE.items()}


def read_config_file(path):
    """Parse a flat KEY=VALUE file into lower-case form keys."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    values = dotenv_values(path)
    known = set(RunConfigForm.base_fields)
    data = {}
    for key, value in values.items():
        name = key.lower()
        if name not in known:
            raise ConfigError(f"Unknown config key '{key}' in {path}")
        if value is None:
            raise ConfigError(f"Config key '{key}' in {path} has no value")
        data[name] = value
    return data


def load_run_config(path=None, overrides=None):
    """
    Build a RunConfig.

    Args:
        path: Optional KEY=VALUE config file
        overrides: Mapping of form keys to values; None entries are ignored

    Raises:
        ConfigError: Any value fails validation
    """
    data = _defaults()
    if path:
        data.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    form = RunConfigForm(data=data)
    if not form.is_valid():
        problems = '; '.join(
            f"{field.upper()}: {' '.join(errors)}" if field != '__all__' else ' '.join(errors)
            for field, errors in form.errors.items()
        )
        raise ConfigError(f"Invalid configuration: {problems}")

    config = from_cleaned(form.cleaned_data)
    logger.debug(f"Loaded run config {config.config_hash[:12]} (method {config.method})")
    return config


def from_cleaned(c):
    method = Method(c['method'])
    return RunConfig(
        method=method.value,
        channel_set=c['channel_set'],
        seed=c['seed'],
        harmonic=HarmonicConfig(
            d=c['harmonic_d'],
            fs=c['synth_fs'],
            fo_max=c['harmonic_fo_max'],
            use_hilbert=method.uses_hilbert,
            max_harmonics=c['harmonic_max_harmonics'],
            db_floor=c['harmonic_db_floor'],
            spectrum=c['harmonic_spectrum'],
        ),
        baseline=BaselineConfig(
            window=c['baseline_window'],
            lowpass_hz=c['baseline_lowpass_hz'],
            use_hilbert=method.uses_hilbert,
            fs=c['synth_fs'],
            db_floor=c['harmonic_db_floor'],
            spectrum=c['harmonic_spectrum'],
        ),
        preprocess=PreprocessConfig(
            cutoff_hz=c['preprocess_cutoff_hz'],
            order=c['preprocess_order'],
        ),
        eval=EvalConfig(
            pca_components=c['eval_pca_components'],
            test_conditions=c['eval_test_conditions'],
            reweighting=c['eval_reweighting'],
        ),
        synth=SynthConfig(
            fs=c['synth_fs'],
            duration_s=c['synth_duration_s'],
            channels=c['synth_channels'],
            speeds_rpm=c['synth_speeds_rpm'],
            loads_nm=c['synth_loads_nm'],
            cells=c['synth_cells'],
            runs=c['synth_runs'],
            snr_db=c['synth_snr_db'],
        ),
        data_dir=c['paths_data_dir'],
        out_dir=c['paths_out_dir'],
        workers=c['workers'],
    )
