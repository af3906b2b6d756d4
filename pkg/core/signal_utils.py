"""
Signal primitives shared by the harmonic and baseline extractors.

All functions are pure and operate on 1-D numpy arrays; they hold no
state and can be called from any number of threads.
"""
import math

import numpy as np
from scipy import fft, signal

from core.exceptions import InvalidArgumentError, InvalidConditionError
from core.models import SpectrumKind

MIN_WINDOW = 8


def window_size(fs, fo, d):
    """
    Window length that places harmonic k/d of ``fo`` exactly on bin k.

    Args:
        fs: Sampling rate in Hz
        fo: Operating (shaft) frequency in Hz
        d: Harmonic bin, number of bins per shaft harmonic

    Returns:
        round(fs * d / fo), rounding halves away from zero

    Raises:
        InvalidConditionError: fo is not positive or the window is
            shorter than 8 samples
    """
    if fs <= 0:
        raise InvalidArgumentError(f"Sampling rate must be positive, got {fs}")
    if d < 1 or int(d) != d:
        raise InvalidArgumentError(f"Harmonic bin must be a positive integer, got {d}")
    if fo <= 0:
        raise InvalidConditionError(f"Operating frequency must be positive, got {fo}")

    n = int(math.floor(fs * d / fo + 0.5))
    if n < MIN_WINDOW:
        raise InvalidConditionError(
            f"Window of {n} samples at fo={fo} Hz is too coarse for analysis "
            f"(minimum {MIN_WINDOW})"
        )
    return n


def blackman_window(n):
    """Symmetric Blackman window of length n."""
    if n < 2:
        raise InvalidArgumentError(f"Blackman window needs at least 2 points, got {n}")
    return signal.windows.blackman(n, sym=True)


def window_energy_correction(w):
    """Factor sqrt(N / sum(w^2)) restoring the energy removed by the window."""
    w = np.asarray(w, dtype=float)
    if w.size == 0:
        raise InvalidArgumentError("Window is empty")
    energy = float(np.sum(w * w))
    if energy == 0.0:
        raise InvalidArgumentError("Window is all zeros")
    return math.sqrt(w.size / energy)


def dc_remove(x, axis=-1):
    """Subtract the mean along ``axis``."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise InvalidArgumentError("Cannot remove DC from an empty vector")
    return x - x.mean(axis=axis, keepdims=True)


def hilbert_envelope(x, axis=-1):
    """
    Magnitude of the analytic signal.

    The analytic signal is formed in the frequency domain over the whole
    segment: positive frequencies doubled, negative ones zeroed.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[axis] < 4:
        raise InvalidArgumentError(
            f"Hilbert envelope needs at least 4 samples, got {x.shape[axis]}"
        )
    return np.abs(signal.hilbert(x, axis=axis))


def one_sided_spectrum(x, kind=SpectrumKind.MAGNITUDE, axis=-1):
    """
    First floor(N/2) bins of the exact-length DFT of x.

    No zero padding: N is data dependent and padding would move the
    harmonic bins off their alignment.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[axis]
    if n < MIN_WINDOW:
        raise InvalidArgumentError(f"Spectrum needs at least {MIN_WINDOW} samples, got {n}")

    spectrum = np.abs(fft.fft(x, axis=axis))
    spectrum = np.take(spectrum, np.arange(n // 2), axis=axis)
    if kind == SpectrumKind.POWER:
        spectrum = spectrum ** 2
    return spectrum


def to_decibels(values, floor, kind=SpectrumKind.MAGNITUDE):
    """Clamp at ``floor`` and convert to dB (20 log10 for magnitude, 10 log10 for power)."""
    scale = 10.0 if kind == SpectrumKind.POWER else 20.0
    return scale * np.log10(np.maximum(values, floor))


def butterworth_zero_phase_lowpass(x, fs, cutoff, order=4, axis=-1):
    """
    Forward-backward Butterworth low-pass.

    The filter runs once in each direction, so the magnitude response is
    squared (effective order 2*order) and the phase cancels.
    """
    x = np.asarray(x, dtype=float)
    nyquist = fs / 2.0
    if not 0 < cutoff < nyquist:
        raise InvalidArgumentError(
            f"Cutoff {cutoff} Hz must lie strictly between 0 and Nyquist ({nyquist} Hz)"
        )
    if order < 1:
        raise InvalidArgumentError(f"Filter order must be positive, got {order}")

    length = x.shape[axis]
    if length <= 3 * order:
        raise InvalidArgumentError(
            f"Signal of {length} samples is too short for an order-{order} zero-phase filter"
        )

    sos = signal.butter(order, cutoff, btype='low', fs=fs, output='sos')
    padlen = min(3 * (2 * sos.shape[0] + 1), length - 1)
    return signal.sosfiltfilt(sos, x, axis=axis, padlen=padlen)


def segment(x, n):
    """
    Split x into floor(len/n) non-overlapping rows of n samples.

    The tail shorter than n is discarded.
    """
    x = np.asarray(x, dtype=float)
    rows = x.size // n
    return x[:rows * n].reshape(rows, n)


def normalized_spectrum_rows(segments, use_hilbert, kind=SpectrumKind.MAGNITUDE):
    """
    Window, DC-filter, optionally envelope, and transform each row.

    Rows are scaled by the window energy correction and divided by N/2 so
    a tone of fixed amplitude yields the same peak for every N.
    """
    n = segments.shape[1]
    w = blackman_window(n)
    c = window_energy_correction(w)

    z = dc_remove(segments * w, axis=1)
    if use_hilbert:
        z = hilbert_envelope(z, axis=1)
    spectra = one_sided_spectrum(z, kind=kind, axis=1)
    return c * spectra / (n / 2)
