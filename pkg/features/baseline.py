"""
FFT and HFFT baselines: fixed-length windows with the same normalisation
as the harmonic space, so differences between methods come from the
window sizing and the adjustment alone.
"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError, EmptyExtractionError
from core.models import SpectrumKind
from core.signal_utils import MIN_WINDOW, normalized_spectrum_rows, segment, to_decibels
from features.harmonic import combine_channels


@dataclass(frozen=True)
class BaselineConfig:
    # 8196, not 8192: the reference baseline window
    window: int = 8196
    lowpass_hz: float = 6000.0
    use_hilbert: bool = False
    fs: float = 48000.0
    db_floor: float = 1e-12
    spectrum: str = SpectrumKind.MAGNITUDE

    @property
    def resolution(self):
        return self.fs / self.window

    @property
    def feature_count(self):
        """Bins 1..K with K*resolution <= lowpass_hz."""
        return min(int(np.floor(self.lowpass_hz / self.resolution)), self.window // 2 - 1)

    def validate(self):
        if self.window < MIN_WINDOW:
            raise ConfigError(f"Baseline window must be >= {MIN_WINDOW}, got {self.window}")
        if not 0 < self.lowpass_hz < self.fs / 2:
            raise ConfigError(
                f"Baseline low-pass {self.lowpass_hz} Hz must be below Nyquist ({self.fs / 2} Hz)"
            )
        return self

    def feature_labels(self):
        return [f"f{(k + 1) * self.resolution:.3f}" for k in range(self.feature_count)]


def baseline_spectrum_rows(x, cfg):
    """Raw fixed-window spectrum rows for one channel."""
    x = np.asarray(x, dtype=float)
    if x.size < cfg.window:
        raise EmptyExtractionError(
            f"Signal of {x.size} samples is shorter than the {cfg.window}-sample window"
        )
    return normalized_spectrum_rows(segment(x, cfg.window), cfg.use_hilbert, kind=cfg.spectrum)


def postprocess_baseline(rows, cfg):
    """Drop the DC bin, keep bins up to the low-pass frequency, convert to dB."""
    keep = cfg.feature_count
    return to_decibels(rows[:, 1:keep + 1], cfg.db_floor, kind=cfg.spectrum)


def extract_baseline_rows(x, cfg):
    """Single-channel baseline features in dB."""
    return postprocess_baseline(baseline_spectrum_rows(x, cfg), cfg)


def baseline_features(channels, cfg):
    """Full baseline pipeline for one multi-channel recording."""
    rows = combine_channels([baseline_spectrum_rows(x, cfg) for x in channels])
    return postprocess_baseline(rows, cfg)
