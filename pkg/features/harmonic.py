"""
Harmonic feature space extraction.

The FFT window is sized per recording from the shaft frequency so bin k
always holds harmonic k/d of the shaft, whatever the speed. HARH takes the
Hilbert envelope of each windowed segment before the transform; HAR skips
that step.
"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import ConfigError, EmptyExtractionError, InvalidArgumentError
from core.models import SpectrumKind
from core.signal_utils import (
    normalized_spectrum_rows,
    segment,
    to_decibels,
    window_size,
)


@dataclass(frozen=True)
class HarmonicConfig:
    d: int = 4
    fs: float = 48000.0
    fo_max: float = 100.0
    use_hilbert: bool = True
    max_harmonics: int = 60
    db_floor: float = 1e-12
    spectrum: str = SpectrumKind.MAGNITUDE

    @property
    def n_min(self):
        """Shortest window in the dataset, the one at fo_max."""
        return window_size(self.fs, self.fo_max, self.d)

    @property
    def feature_count(self):
        return self.max_harmonics * self.d

    def validate(self):
        if self.d < 1:
            raise ConfigError(f"Harmonic bin d must be >= 1, got {self.d}")
        if self.fo_max <= 0:
            raise ConfigError(f"fo_max must be positive, got {self.fo_max}")
        if self.db_floor <= 0:
            raise ConfigError(f"dB floor must be positive, got {self.db_floor}")
        available = self.n_min // 2
        if self.feature_count > available - 1:
            raise ConfigError(
                f"{self.max_harmonics} harmonics at d={self.d} need {self.feature_count} "
                f"columns after the DC bin, only {available - 1} exist at fo_max={self.fo_max} Hz"
            )
        return self

    def feature_labels(self):
        """Column labels in harmonic units: feature j is harmonic (j+1)/d."""
        return [f"h{(j + 1) / self.d:g}" for j in range(self.feature_count)]


def extract_harmonic_rows(x, fo, cfg):
    """
    Raw harmonic spectrum rows for one channel.

    Returns a floor(len/N) x floor(N/2) matrix; row i is segment i and
    column k is the magnitude at k*fo/d Hz.
    """
    x = np.asarray(x, dtype=float)
    n = window_size(cfg.fs, fo, cfg.d)
    if x.size < n:
        raise EmptyExtractionError(
            f"Signal of {x.size} samples is shorter than one window of {n} "
            f"samples at fo={fo:g} Hz"
        )
    return normalized_spectrum_rows(segment(x, n), cfg.use_hilbert, kind=cfg.spectrum)


def combine_channels(rows_per_channel):
    """Euclidean magnitude over channels, bin by bin."""
    if not rows_per_channel:
        raise InvalidArgumentError("At least one channel is required")

    shape = np.shape(rows_per_channel[0])
    for rows in rows_per_channel[1:]:
        if np.shape(rows) != shape:
            raise InvalidArgumentError(
                f"Channel row matrices differ in shape: {shape} vs {np.shape(rows)}"
            )
    if len(rows_per_channel) == 1:
        return np.asarray(rows_per_channel[0], dtype=float)

    stacked = np.stack([np.asarray(r, dtype=float) for r in rows_per_channel])
    return np.sqrt(np.sum(stacked ** 2, axis=0))


def trim_features(rows, n_min):
    """Keep the first floor(n_min/2) columns so every speed has the same width."""
    keep = n_min // 2
    if rows.shape[1] < keep:
        raise InvalidArgumentError(
            f"Rows have {rows.shape[1]} columns but {keep} are required; "
            "the operating frequency is above fo_max"
        )
    return rows[:, :keep]


def postprocess(rows, cfg):
    """Drop the DC column, keep harmonics up to max_harmonics inclusive, convert to dB."""
    keep = cfg.feature_count
    if keep > rows.shape[1] - 1:
        raise ConfigError(
            f"Cannot keep {keep} harmonic columns from {rows.shape[1] - 1} available"
        )
    return to_decibels(rows[:, 1:keep + 1], cfg.db_floor, kind=cfg.spectrum)


def harmonic_features(channels, fo, cfg):
    """Full harmonic pipeline for one multi-channel recording."""
    rows = combine_channels([extract_harmonic_rows(x, fo, cfg) for x in channels])
    return postprocess(trim_features(rows, cfg.n_min), cfg)
